#pragma once

#include "evacast/core/time.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evacast::domain {

inline constexpr double kMaxSpeedMph = 120.0;

struct SpeedRecord {
    std::string link_id;
    Timestamp timestamp{};
    double speed = 0.0; // mph
};

// Uniformly sampled speeds of one link. A gap is an empty optional; gaps are
// never skipped, so value i always belongs to start + i * interval.
struct SpeedSeries {
    std::string link_id;
    Timestamp start{};
    Seconds interval{3600};
    std::vector<std::optional<double>> values;

    std::size_t size() const { return values.size(); }
    Timestamp time_at(std::size_t i) const { return start + interval * static_cast<long long>(i); }
    Timestamp end() const { return time_at(values.size()); } // exclusive
    // Index of the sample at exactly t, if t lies on the grid and inside the series.
    std::optional<std::size_t> index_of(Timestamp t) const;
    std::size_t missing_count() const;
};

// interval > 0, values in [0, kMaxSpeedMph].
void validate(const SpeedSeries& s);

// Block means over target/interval consecutive samples, ignoring gaps; a block
// is missing only when all its inputs are. A trailing partial block is dropped.
SpeedSeries resample_series(const SpeedSeries& s, Seconds target);

// Per-link series keyed by link_id.
using SpeedTable = std::map<std::string, SpeedSeries>;

// CSV with header `link_id,timestamp,speed_mph`; an empty speed field is a gap,
// and absent grid points are gaps too.
SpeedTable parse_speeds_csv(const std::string& text, Seconds interval = Hours{1});
SpeedTable load_speeds_csv(const std::filesystem::path& path, Seconds interval = Hours{1});
std::string speeds_to_csv(const SpeedTable& table);
void save_speeds_csv(const SpeedTable& table, const std::filesystem::path& path);

} // namespace evacast::domain
