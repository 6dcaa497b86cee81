#include "evacast/models/serialize.hpp"

#include "evacast/core/error.hpp"
#include "evacast/features/schema.hpp"

#include <fstream>
#include <sstream>

namespace evacast::models {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

void matrix_from_json(const json& j, Parameter& p) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != p.value.rows())
        throw ParseError("parameter " + p.name + " has the wrong number of rows");
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != p.value.cols())
            throw ParseError("parameter " + p.name + " has the wrong number of columns");
        for (Eigen::Index c = 0; c < p.value.cols(); ++c) p.value(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
}

json params_to_json(const std::vector<const Parameter*>& params) {
    json out = json::object();
    for (const auto* p : params) out[p->name] = matrix_to_json(p->value);
    return out;
}

void params_from_json(const json& j, const ParameterList& params) {
    for (auto* p : params) {
        if (!j.contains(p->name)) throw ParseError("missing parameter " + p->name);
        matrix_from_json(j.at(p->name), *p);
    }
}

json envelope(const std::string& type, json hyper, const std::vector<std::string>& names,
              const features::NormalizationStats& norm, json params, const json& metadata) {
    return json{{"format_version", kModelFormatVersion},
                {"model_type", type},
                {"hyperparams", std::move(hyper)},
                {"feature_schema", features::feature_schema_json(names)},
                {"normalization", features::normalization_to_json(norm)},
                {"parameters", std::move(params)},
                {"metadata", metadata}};
}

std::vector<std::string> schema_names(const json& j) {
    const auto& s = j.at("feature_schema");
    const int v = s.at("version").get<int>();
    if (v > features::kFeatureSchemaVersion)
        throw IncompatibleVersionError("feature schema version " + std::to_string(v) + " is newer than supported " +
                                       std::to_string(features::kFeatureSchemaVersion));
    return s.at("names").get<std::vector<std::string>>();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text << "\n";
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file malformed: ") + e.what());
    }
}

} // namespace

std::string model_type_of(const json& j) {
    return guarded([&] {
        if (!j.is_object() || !j.contains("format_version")) throw ParseError("model file has no format_version");
        const int v = j.at("format_version").get<int>();
        if (v > kModelFormatVersion)
            throw IncompatibleVersionError("model format_version " + std::to_string(v) + " is newer than supported " +
                                           std::to_string(kModelFormatVersion));
        if (v < 1) throw ParseError("model format_version must be >= 1");
        return j.at("model_type").get<std::string>();
    });
}

json to_json(const MlpArtifact& a) {
    const auto& s = a.model.shape();
    json hyper{{"input_dim", s.input_dim}, {"hidden", s.hidden}, {"n_classes", s.n_classes}};
    return envelope("mlp", std::move(hyper), a.feature_names, a.normalization, params_to_json(a.model.parameters()),
                    a.metadata);
}

json to_json(const SequenceArtifact& a) {
    const auto& s = a.model.shape();
    json hyper{{"input_dim", s.input_dim}, {"hidden", s.hidden},         {"layers", s.layers},
               {"dropout", s.dropout},     {"horizon_h", a.horizon_h}, {"window_len", a.window_len}};
    return envelope(to_string(s.cell), std::move(hyper), a.feature_names, a.normalization,
                    params_to_json(a.model.parameters()), a.metadata);
}

MlpArtifact mlp_from_json(const json& j) {
    const std::string type = model_type_of(j);
    if (type != "mlp") throw ValidationError("expected an mlp model, found " + type);
    return guarded([&] {
        MlpArtifact a;
        const auto& h = j.at("hyperparams");
        MlpShape shape;
        shape.input_dim = h.at("input_dim").get<std::size_t>();
        shape.hidden = h.at("hidden").get<std::vector<std::size_t>>();
        shape.n_classes = h.at("n_classes").get<std::size_t>();
        a.model = Mlp(shape, 0);
        params_from_json(j.at("parameters"), a.model.parameters());
        a.feature_names = schema_names(j);
        a.normalization = features::normalization_from_json(j.at("normalization"));
        a.metadata = j.value("metadata", json::object());
        if (a.feature_names.size() != shape.input_dim || a.normalization.dim() != shape.input_dim)
            throw ParseError("feature schema width does not match the model input");
        return a;
    });
}

SequenceArtifact sequence_from_json(const json& j) {
    const std::string type = model_type_of(j);
    if (type != "lstm" && type != "rnn") throw ValidationError("expected a sequence model, found " + type);
    return guarded([&] {
        SequenceArtifact a;
        const auto& h = j.at("hyperparams");
        SequenceShape shape;
        shape.cell = parse_cell_type(type);
        shape.input_dim = h.at("input_dim").get<std::size_t>();
        shape.hidden = h.at("hidden").get<std::size_t>();
        shape.layers = h.at("layers").get<std::size_t>();
        shape.dropout = h.at("dropout").get<double>();
        a.horizon_h = h.at("horizon_h").get<int>();
        a.window_len = h.at("window_len").get<std::size_t>();
        a.model = SequenceModel(shape, 0);
        params_from_json(j.at("parameters"), a.model.parameters());
        a.feature_names = schema_names(j);
        a.normalization = features::normalization_from_json(j.at("normalization"));
        a.metadata = j.value("metadata", json::object());
        if (a.feature_names.size() != shape.input_dim || a.normalization.dim() != shape.input_dim)
            throw ParseError("feature schema width does not match the model input");
        return a;
    });
}

void save_model(const MlpArtifact& a, const std::filesystem::path& path) { write_text(path, to_json(a).dump()); }

void save_model(const SequenceArtifact& a, const std::filesystem::path& path) { write_text(path, to_json(a).dump()); }

json read_model_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("model file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

MlpArtifact load_mlp(const std::filesystem::path& path) { return mlp_from_json(read_model_json(path)); }

SequenceArtifact load_sequence_model(const std::filesystem::path& path) {
    return sequence_from_json(read_model_json(path));
}

} // namespace evacast::models
