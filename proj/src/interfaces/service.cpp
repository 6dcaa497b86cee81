#include "evacast/interfaces/service.hpp"

#include "evacast/core/error.hpp"
#include "evacast/pipeline/config.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <regex>

namespace evacast::interfaces {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kGeoJson = "application/geo+json";

void reply(httplib::Response& res, int status, const json& body, const char* type = kJson) {
    res.status = status;
    res.set_content(body.dump(), type);
}

void error_reply(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, json{{"error", message}});
}

void field_errors(httplib::Response& res, const std::map<std::string, std::string>& fields) {
    reply(res, 400, json{{"error", "invalid request body"}, {"fields", fields}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) {
            error_reply(res, 400, "request body must be a JSON object");
            return std::nullopt;
        }
        return j;
    } catch (const json::parse_error& e) {
        error_reply(res, 400, std::string("malformed JSON: ") + e.what());
        return std::nullopt;
    }
}

const char* env_or_null(const char* name) {
    const char* v = std::getenv(name);
    return (v && *v) ? v : nullptr;
}

json scenario_json(const std::string& id, const ScenarioSpec& spec, const std::string& status) {
    return {{"scenario_id", id},
            {"label", spec.label},
            {"status", status},
            {"hurricane", domain::hurricane_to_json(spec.hurricane)}};
}

} // namespace

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig c;
    if (const char* m = env_or_null("EVACAST_MODEL_DIR"))
        c.model_dir = m;
    if (const char* d = env_or_null("EVACAST_DATA_DIR"))
        c.data_dir = d;
    return c;
}

std::shared_ptr<const ServiceState> load_state(const ServiceConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.model_dir.empty())
        throw ValidationError("no model directory configured");
    const fs::path dir(cfg.model_dir);
    if (!fs::is_directory(dir))
        throw ValidationError("model directory not found: " + dir.string());

    auto st = std::make_shared<ServiceState>(ServiceState{
        pipeline::load_or_generate(pipeline::data_source_at(cfg.data_dir)), {},
        models::load_mlp(dir / "mlp.json"), {}});
    st->reference_stats = pipeline::reference_regular_stats(st->data);

    static const std::regex seq_name(R"(lstm_h([1-6])\.json)");
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!std::regex_match(name, m, seq_name))
            continue;
        auto art = models::load_sequence_model(entry.path());
        const int h = std::stoi(m[1].str());
        if (art.horizon_h != h)
            throw ValidationError(name + " holds a model for horizon " + std::to_string(art.horizon_h) + " h");
        st->speed_models.emplace(h, std::move(art));
    }
    return st;
}

std::optional<ScenarioSpec> parse_scenario(const json& body, const domain::BoundingBox& bbox, double margin_deg,
                                           std::map<std::string, std::string>& errors) {
    ScenarioSpec spec;
    const auto label = body.find("label");
    if (label == body.end() || !label->is_string() || label->get<std::string>().empty())
        errors["label"] = "required non-empty string";
    else
        spec.label = label->get<std::string>();

    std::optional<domain::HurricaneEvent> base;
    if (const auto b = body.find("base"); b != body.end()) {
        if (!b->is_string())
            errors["base"] = "must be a preset name";
        else if (!(base = domain::find_preset(b->get<std::string>())))
            errors["base"] = "unknown preset '" + b->get<std::string>() + "'";
    }
    domain::HurricaneEvent h = base.value_or(domain::HurricaneEvent{});
    h.name = base ? base->name : spec.label;
    const bool custom_required = !body.contains("base");

    if (const auto c = body.find("category"); c != body.end()) {
        if (!c->is_number_integer() || c->get<int>() < 1 || c->get<int>() > 5)
            errors["category"] = "must be an integer in [1, 5]";
        else
            h.category = c->get<int>();
    } else if (custom_required) {
        errors["category"] = "required without a base preset";
    }

    bool point_given = false;
    for (const char* key : {"landfall_lat", "landfall_lon"}) {
        const auto v = body.find(key);
        if (v == body.end()) {
            if (custom_required)
                errors[key] = "required without a base preset";
            continue;
        }
        if (!v->is_number() || !std::isfinite(v->get<double>())) {
            errors[key] = "must be a number";
            continue;
        }
        point_given = true;
        (std::string(key) == "landfall_lat" ? h.landfall_point.lat : h.landfall_point.lon) = v->get<double>();
    }
    if (point_given && !errors.count("landfall_lat") && !errors.count("landfall_lon") &&
        !bbox.expanded(margin_deg).contains(h.landfall_point)) {
        errors["landfall_point"] = "outside the network extent plus a " + std::to_string(margin_deg) + " deg margin";
    }

    if (const auto t = body.find("landfall_time"); t != body.end()) {
        try {
            if (!t->is_string())
                throw ParseError("");
            h.landfall_time = parse_timestamp(t->get<std::string>());
        } catch (const ParseError&) {
            errors["landfall_time"] = "must be an ISO-8601 timestamp";
        }
    } else if (custom_required) {
        errors["landfall_time"] = "required without a base preset";
    }

    if (!errors.empty())
        return std::nullopt;
    h.landfall_zone = domain::derive_landfall_zone(h.landfall_point);
    spec.hurricane = h;
    return spec;
}

WorkerPool::WorkerPool(std::size_t n) {
    if (n == 0)
        throw ValidationError("worker pool needs at least one thread");
    for (std::size_t i = 0; i < n; ++i)
        threads_.emplace_back([this] { run(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lk(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_)
        t.join();
}

void WorkerPool::submit(std::function<void()> job) {
    {
        std::lock_guard lk(mu_);
        jobs_.push_back(std::move(job));
    }
    cv_.notify_one();
}

void WorkerPool::run() {
    for (;;) {
        std::function<void()> job;
        {
            std::unique_lock lk(mu_);
            cv_.wait(lk, [&] { return stopping_ || !jobs_.empty(); });
            if (jobs_.empty())
                return; // stopping and drained
            job = std::move(jobs_.front());
            jobs_.pop_front();
        }
        job();
    }
}

Service::Service(ServiceConfig cfg)
    : cfg_(std::move(cfg)), server_(std::make_unique<httplib::Server>()), pool_(cfg_.workers) {
    routes();
}

Service::~Service() {
    stop();
}

void Service::set_state(std::shared_ptr<const ServiceState> state) {
    std::lock_guard lk(state_mu_);
    state_ = std::move(state);
}

std::shared_ptr<const ServiceState> Service::state() const {
    std::lock_guard lk(state_mu_);
    return state_;
}

bool Service::ready() const {
    return state() != nullptr;
}

int Service::start(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

bool Service::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

void Service::wait_until_listening() const {
    server_->wait_until_ready();
}

void Service::stop() {
    server_->stop();
    if (thread_.joinable())
        thread_.join();
}

void Service::compute(const std::string& id, std::shared_ptr<const ServiceState> st) {
    ScenarioSpec spec;
    {
        std::lock_guard lk(scenarios_mu_);
        spec = scenarios_.at(id).spec;
    }
    std::optional<pipeline::CongestionGrid> grid;
    std::string error;
    try {
        grid = pipeline::predict_congestion_grid(st->mlp, st->data.network, spec.hurricane, st->reference_stats);
    } catch (const std::exception& e) {
        error = e.what();
    }
    std::lock_guard lk(scenarios_mu_);
    auto& sc = scenarios_.at(id);
    if (grid) {
        sc.grid = std::move(grid);
        sc.status = "done";
    } else {
        sc.status = "failed";
        sc.error = error;
    }
}

void Service::routes() {
    auto& s = *server_;

    s.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        if (ready())
            reply(res, 200, json{{"status", "ok"}});
        else
            reply(res, 503, json{{"status", "loading"}});
    });

    // every other handler needs a published state
    auto guarded = [this](auto fn) {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            auto st = state();
            if (!st) {
                error_reply(res, 503, "models not loaded");
                return;
            }
            fn(req, res, st);
        };
    };
    using StatePtr = std::shared_ptr<const ServiceState>;

    s.Get("/network", guarded([](const httplib::Request&, httplib::Response& res, const StatePtr& st) {
        reply(res, 200, domain::network_to_geojson(st->data.network), kGeoJson);
    }));

    s.Get("/hurricanes", guarded([](const httplib::Request&, httplib::Response& res, const StatePtr&) {
        json list = json::array();
        for (const auto& h : domain::hurricane_presets())
            list.push_back(domain::hurricane_to_json(h));
        reply(res, 200, json{{"hurricanes", list}});
    }));

    s.Post("/scenarios", guarded([this](const httplib::Request& req, httplib::Response& res, const StatePtr& st) {
        const auto body = parse_body(req, res);
        if (!body)
            return;
        std::map<std::string, std::string> errors;
        auto spec = parse_scenario(*body, st->data.network.bbox(), cfg_.landfall_margin_deg, errors);
        if (!spec) {
            field_errors(res, errors);
            return;
        }
        std::string id;
        {
            std::lock_guard lk(scenarios_mu_);
            if (label_index_.count(spec->label)) {
                reply(res, 409, json{{"error", "duplicate scenario label '" + spec->label + "'"},
                                     {"scenario_id", label_index_.at(spec->label)}});
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "sc-%04llu", static_cast<unsigned long long>(next_id_++));
            id = buf;
            label_index_.emplace(spec->label, id);
            scenarios_.emplace(id, Scenario{id, *spec, "pending", std::nullopt, {}});
        }
        pool_.submit([this, id, st] { compute(id, st); });
        reply(res, 202, scenario_json(id, *spec, "pending"));
    }));

    s.Get("/scenarios/:id", guarded([this](const httplib::Request& req, httplib::Response& res, const StatePtr&) {
        std::lock_guard lk(scenarios_mu_);
        const auto it = scenarios_.find(req.path_params.at("id"));
        if (it == scenarios_.end()) {
            error_reply(res, 404, "unknown scenario '" + req.path_params.at("id") + "'");
            return;
        }
        const auto& sc = it->second;
        json body = scenario_json(sc.id, sc.spec, sc.status);
        if (sc.grid)
            body["grid"] = pipeline::grid_to_json(*sc.grid);
        if (!sc.error.empty())
            body["error"] = sc.error;
        reply(res, 200, body);
    }));

    s.Get("/scenarios/:id/grid.geojson",
          guarded([this](const httplib::Request& req, httplib::Response& res, const StatePtr& st) {
              std::optional<pipeline::CongestionGrid> grid;
              std::string status;
              {
                  std::lock_guard lk(scenarios_mu_);
                  const auto it = scenarios_.find(req.path_params.at("id"));
                  if (it == scenarios_.end()) {
                      error_reply(res, 404, "unknown scenario '" + req.path_params.at("id") + "'");
                      return;
                  }
                  status = it->second.status;
                  grid = it->second.grid;
              }
              if (!grid) {
                  // still computing (202) or failed (500); the status endpoint has details
                  reply(res, status == "pending" ? 202 : 500, json{{"status", status}});
                  return;
              }
              reply(res, 200, pipeline::grid_to_geojson(*grid, st->data.network), kGeoJson);
          }));

    s.Post("/predict/speed", guarded([this](const httplib::Request& req, httplib::Response& res, const StatePtr& st) {
        const auto body = parse_body(req, res);
        if (!body)
            return;
        std::map<std::string, std::string> errors;
        const auto& b = *body;

        std::string link_id;
        if (!b.contains("link_id") || !b["link_id"].is_string())
            errors["link_id"] = "required string";
        else
            link_id = b["link_id"].get<std::string>();

        int horizon = 0;
        if (!b.contains("horizon_h") || !b["horizon_h"].is_number_integer() || b["horizon_h"].get<int>() < 1 ||
            b["horizon_h"].get<int>() > 6)
            errors["horizon_h"] = "required integer in [1, 6]";
        else
            horizon = b["horizon_h"].get<int>();

        std::vector<double> history;
        if (!b.contains("history") || !b["history"].is_array()) {
            errors["history"] = "required array of speeds (mph)";
        } else {
            for (const auto& v : b["history"]) {
                if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0.0 ||
                    v.get<double>() > domain::kMaxSpeedMph) {
                    errors["history"] = "values must be speeds in [0, " + std::to_string(int(domain::kMaxSpeedMph)) +
                                        "] mph";
                    break;
                }
                history.push_back(v.get<double>());
            }
        }

        std::uint64_t seed = 0;
        if (b.contains("seed")) {
            if (!b["seed"].is_number_unsigned())
                errors["seed"] = "must be a non-negative integer";
            else
                seed = b["seed"].get<std::uint64_t>();
        }

        const domain::HurricaneEvent* hurricane = st->data.events.empty() ? nullptr : &st->data.events.front().event;
        if (b.contains("hurricane")) {
            hurricane = nullptr;
            if (b["hurricane"].is_string())
                for (const auto& ev : st->data.events)
                    if (ev.event.name == b["hurricane"].get<std::string>())
                        hurricane = &ev.event;
            if (!hurricane)
                errors["hurricane"] = "must name a loaded hurricane";
        } else if (!hurricane) {
            errors["hurricane"] = "no hurricane loaded";
        }

        std::optional<Timestamp> last_step;
        if (b.contains("last_step_time")) {
            try {
                if (!b["last_step_time"].is_string())
                    throw ParseError("");
                last_step = parse_timestamp(b["last_step_time"].get<std::string>());
            } catch (const ParseError&) {
                errors["last_step_time"] = "must be an ISO-8601 timestamp";
            }
        }
        if (!errors.empty()) {
            field_errors(res, errors);
            return;
        }

        const auto model = st->speed_models.find(horizon);
        if (model == st->speed_models.end()) {
            error_reply(res, 404, "no speed model for horizon " + std::to_string(horizon) + " h");
            return;
        }
        if (history.size() != model->second.window_len) {
            field_errors(res, {{"history", "history length must be " + std::to_string(model->second.window_len) +
                                               " (got " + std::to_string(history.size()) + ")"}});
            return;
        }
        const auto* link = st->data.network.find(link_id);
        const auto stats = st->reference_stats.find(link_id);
        if (!link || stats == st->reference_stats.end()) {
            error_reply(res, 404, "unknown link '" + link_id + "'");
            return;
        }

        // without a clock anchor the window ends one day before landfall
        const Timestamp end = last_step.value_or(hurricane->landfall_time - Hours{24});
        domain::SpeedSeries series;
        series.link_id = link_id;
        series.start = end - Hours{static_cast<long long>(history.size()) - 1};
        for (double v : history)
            series.values.emplace_back(v);
        try {
            const auto p = pipeline::predict_speed_with_ci(model->second, series, *link, *hurricane, stats->second,
                                                           cfg_.mc_passes, seed);
            reply(res, 200, pipeline::prediction_to_json(p));
        } catch (const ValidationError& e) {
            field_errors(res, {{"history", e.what()}});
        }
    }));

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            error_reply(res, 500, e.what());
        } catch (...) {
            error_reply(res, 500, "internal error");
        }
    });
}

} // namespace evacast::interfaces
