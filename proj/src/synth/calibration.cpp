#include "evacast/synth/calibration.hpp"

#include "evacast/core/error.hpp"
#include "evacast/features/samples.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace evacast::synth {

using nlohmann::json;

namespace {

struct LinkStats {
    std::array<double, kCalibrationDays> change{};
    std::array<double, kCalibrationDays> duration{};
};

ClassCalibration summarize(const std::vector<LinkStats>& all, const std::vector<LinkStats>& impacted) {
    ClassCalibration c;
    c.n_links = all.size();
    c.impacted_only = !impacted.empty();
    const auto& pop = c.impacted_only ? impacted : all;
    c.n_population = pop.size();
    for (const auto& s : pop)
        for (int k = 0; k < kCalibrationDays; ++k) {
            c.change_pct[k] += s.change[k];
            c.duration_h[k] += s.duration[k];
        }
    for (int k = 0; k < kCalibrationDays; ++k) {
        c.change_pct[k] /= static_cast<double>(pop.size());
        c.duration_h[k] /= static_cast<double>(pop.size());
    }
    return c;
}

void check(bool ok, const std::string& what, std::vector<std::string>& failures) {
    if (!ok) failures.push_back(what);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

CalibrationReport calibration_check(const domain::EvacuationData& ds) {
    std::vector<LinkStats> near_all, near_imp, far_all, far_imp;
    for (const auto& ev : ds.events) {
        const auto& h = ev.event;
        const auto stats = features::compute_regular_stats_table(ds.network, h, ev.speeds).stats;
        const auto window = features::event_window(h);
        for (const auto& link : ds.network.links()) {
            const auto st = stats.find(link.link_id);
            const auto sp = ev.speeds.find(link.link_id);
            if (st == stats.end() || sp == ev.speeds.end() || st->second.mean_7d <= 0.0) continue;
            const double base = st->second.mean_7d;
            const auto series = features::hourly(sp->second);

            bool impacted = false;
            for (const auto& lab : features::period_labels(series, window, base))
                if (lab && *lab != features::CongestionLabel::NoCongestion) impacted = true;

            LinkStats ls;
            bool complete = true;
            for (int k = 0; k < kCalibrationDays && complete; ++k) {
                const Timestamp lo = h.landfall_time - Hours{24 * (k + 1)};
                const Timestamp hi = h.landfall_time - Hours{24 * k};
                double sum = 0.0;
                int n = 0, slow = 0;
                for (std::size_t i = 0; i < series.size(); ++i) {
                    const Timestamp t = series.time_at(i);
                    if (t < lo || t >= hi) continue;
                    if (!series.values[i]) continue;
                    const double v = *series.values[i];
                    sum += v;
                    ++n;
                    if (features::compute_spi(v, base).percent < features::kLightThreshold) ++slow;
                }
                if (n == 0) {
                    complete = false;
                    break;
                }
                ls.change[k] = 100.0 * (sum / n / base - 1.0);
                ls.duration[k] = slow * series.interval.count() / 3600.0;
            }
            if (!complete) continue;

            const bool nearby = domain::haversine_km(link.centroid, h.landfall_point) < kNearbyKm;
            (nearby ? near_all : far_all).push_back(ls);
            if (impacted) (nearby ? near_imp : far_imp).push_back(ls);
        }
    }
    if (near_all.empty() || far_all.empty())
        throw ValidationError(std::string("calibration needs both distance classes; no ") +
                              (near_all.empty() ? "nearby" : "distant") + " links with usable data");

    CalibrationReport r;
    r.nearby = summarize(near_all, near_imp);
    r.distant = summarize(far_all, far_imp);
    auto within = [](double v, double target, double tol) { return std::abs(v - target) <= tol; };
    check(within(r.nearby.change_pct[1], kNearbyChangePct[1], kChangeTolPts), "nearby day-1 change", r.failures);
    check(within(r.nearby.duration_h[1], kNearbyDurationH[1], kDurationTolH), "nearby day-1 duration", r.failures);
    check(within(r.distant.change_pct[1], kDistantChangePct[1], kChangeTolPts), "distant day-1 change", r.failures);
    check(within(r.distant.duration_h[1], kDistantDurationH[1], kDurationTolH), "distant day-1 duration", r.failures);
    check(within(r.nearby.change_pct[2], kNearbyChangePct[2], kChangeTolPts), "nearby day-2 change", r.failures);
    check(within(r.distant.change_pct[2], kDistantChangePct[2], kChangeTolPts), "distant day-2 change", r.failures);
    r.pass = r.failures.empty();
    return r;
}

json calibration_to_json(const CalibrationReport& r) {
    auto cls = [](const ClassCalibration& c) {
        return json{{"n_links", c.n_links},
                    {"n_population", c.n_population},
                    {"impacted_only", c.impacted_only},
                    {"change_pct", c.change_pct},
                    {"duration_h", c.duration_h}};
    };
    return json{{"pass", r.pass}, {"failures", r.failures}, {"nearby", cls(r.nearby)}, {"distant", cls(r.distant)}};
}

std::string format_calibration(const CalibrationReport& r) {
    std::ostringstream os;
    os << "day  nearby_change  nearby_hours  distant_change  distant_hours\n";
    for (int k = 0; k < kCalibrationDays; ++k)
        os << k << "    " << fmt(r.nearby.change_pct[k]) << "%        " << fmt(r.nearby.duration_h[k]) << "          "
           << fmt(r.distant.change_pct[k]) << "%         " << fmt(r.distant.duration_h[k]) << "\n";
    os << "nearby links " << r.nearby.n_population << "/" << r.nearby.n_links << ", distant links "
       << r.distant.n_population << "/" << r.distant.n_links << "\n";
    os << (r.pass ? "PASS" : "FAIL");
    for (const auto& f : r.failures) os << "\n  out of tolerance: " << f;
    os << "\n";
    return os.str();
}

} // namespace evacast::synth
