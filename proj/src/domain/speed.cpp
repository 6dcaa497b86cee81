#include "evacast/domain/speed.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace evacast::domain {

std::optional<std::size_t> SpeedSeries::index_of(Timestamp t) const {
    if (t < start || interval.count() <= 0) {
        return std::nullopt;
    }
    const auto offset = (t - start).count();
    if (offset % interval.count() != 0) {
        return std::nullopt;
    }
    const auto i = static_cast<std::size_t>(offset / interval.count());
    if (i >= values.size()) {
        return std::nullopt;
    }
    return i;
}

std::size_t SpeedSeries::missing_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& v) { return !v; }));
}

void validate(const SpeedSeries& s) {
    if (s.interval.count() <= 0) {
        throw ValidationError("series " + s.link_id + ": interval must be positive");
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const auto& v = s.values[i];
        if (v && (!std::isfinite(*v) || *v < 0.0 || *v > kMaxSpeedMph)) {
            throw ValidationError("series " + s.link_id + ": speed " + std::to_string(*v) + " at " +
                                  format_timestamp(s.time_at(i)) + " outside [0, 120] mph");
        }
    }
}

SpeedSeries resample_series(const SpeedSeries& s, Seconds target) {
    if (s.interval.count() <= 0 || target.count() <= 0 || target.count() % s.interval.count() != 0) {
        throw ValidationError("resample target " + std::to_string(target.count()) +
                              "s is not an integer multiple of the series interval " +
                              std::to_string(s.interval.count()) + "s");
    }
    const auto k = static_cast<std::size_t>(target.count() / s.interval.count());
    SpeedSeries out{s.link_id, s.start, target, {}};
    const std::size_t blocks = s.values.size() / k;
    out.values.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = b * k; i < (b + 1) * k; ++i) {
            if (s.values[i]) {
                sum += *s.values[i];
                ++n;
            }
        }
        out.values.push_back(n == 0 ? std::nullopt : std::optional<double>(sum / static_cast<double>(n)));
    }
    return out;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

SpeedTable parse_speeds_csv(const std::string& text, Seconds interval) {
    if (interval.count() <= 0) {
        throw ValidationError("speed interval must be positive");
    }
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("speeds CSV is empty");
    }
    ++line_no;
    const auto header = split_csv_line(trim(line));
    if (header.size() != 3 || trim(header[0]) != "link_id" || trim(header[1]) != "timestamp" ||
        trim(header[2]) != "speed_mph") {
        throw ParseError("speeds CSV header must be 'link_id,timestamp,speed_mph'");
    }
    std::map<std::string, std::vector<std::pair<Timestamp, std::optional<double>>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = trim(line);
        if (trimmed.empty()) {
            continue;
        }
        const auto f = split_csv_line(trimmed);
        const std::string where = "speeds CSV line " + std::to_string(line_no);
        if (f.size() != 3) {
            throw ParseError(where + ": expected 3 fields");
        }
        const std::string id(trim(f[0]));
        if (id.empty()) {
            throw ParseError(where + ": empty link_id");
        }
        Timestamp t;
        try {
            t = parse_timestamp(trim(f[1]));
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        std::optional<double> speed;
        const auto sv = trim(f[2]);
        if (!sv.empty()) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
            if (ec != std::errc() || ptr != sv.data() + sv.size()) {
                throw ParseError(where + ": invalid speed '" + std::string(sv) + "'");
            }
            if (!std::isfinite(v) || v < 0.0 || v > kMaxSpeedMph) {
                throw ValidationError(where + ": speed outside [0, 120] mph");
            }
            speed = v;
        }
        rows[id].emplace_back(t, speed);
    }
    SpeedTable table;
    for (auto& [id, obs] : rows) {
        std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SpeedSeries s{id, obs.front().first, interval, {}};
        const auto span = (obs.back().first - s.start).count();
        if (span % interval.count() != 0) {
            throw ValidationError("series " + id + ": timestamps are not on a uniform " +
                                  std::to_string(interval.count()) + "s grid");
        }
        s.values.assign(static_cast<std::size_t>(span / interval.count()) + 1, std::nullopt);
        std::vector<bool> seen(s.values.size(), false);
        for (const auto& [t, v] : obs) {
            const auto idx = s.index_of(t);
            if (!idx) {
                throw ValidationError("series " + id + ": timestamp " + format_timestamp(t) + " is off the grid");
            }
            if (seen[*idx]) {
                throw ValidationError("series " + id + ": duplicate timestamp " + format_timestamp(t));
            }
            seen[*idx] = true;
            s.values[*idx] = v;
        }
        table.emplace(id, std::move(s));
    }
    return table;
}

SpeedTable load_speeds_csv(const std::filesystem::path& path, Seconds interval) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open speeds file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_speeds_csv(buf.str(), interval);
}

std::string speeds_to_csv(const SpeedTable& table) {
    std::string out = "link_id,timestamp,speed_mph\n";
    char num[64];
    for (const auto& [id, s] : table) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            out += id;
            out += ',';
            out += format_timestamp(s.time_at(i));
            out += ',';
            if (s.values[i]) {
                const auto [ptr, ec] = std::to_chars(num, num + sizeof num, *s.values[i]);
                out.append(num, ptr);
            }
            out += '\n';
        }
    }
    return out;
}

void save_speeds_csv(const SpeedTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write speeds file " + path.string());
    }
    out << speeds_to_csv(table);
}

} // namespace evacast::domain
