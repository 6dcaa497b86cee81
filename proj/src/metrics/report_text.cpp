#include "evacast/metrics/report_text.hpp"

#include <cstdio>
#include <sstream>

namespace evacast::metrics {

namespace {

std::string num(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) {
    // width counted in code points so "±" lines up
    std::size_t len = 0;
    for (const unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++len;
    return len >= w ? s + " " : s + std::string(w - len, ' ');
}

std::string cell(const AggregatedReport& r, const std::string& name, int digits) {
    const auto* m = r.find(name);
    return m ? format_mean_std(*m, digits) : "n/a";
}

} // namespace

std::string format_mean_std(const MetricSummary& m, int digits) {
    return num(m.mean, digits) + " ± " + num(m.std, digits);
}

std::string format_classification_table(const std::vector<std::pair<std::string, AggregatedReport>>& models) {
    std::ostringstream os;
    os << pad("Model", 8) << pad("Label", 18) << pad("Precision", 16) << pad("Recall", 16) << pad("F1 score", 16)
       << "Accuracy\n";
    for (const auto& [name, r] : models) {
        bool first = true;
        for (const auto c : features::kLabels) {
            const std::string k = class_key(c);
            os << pad(first ? name : "", 8) << pad(features::to_string(c), 18) << pad(cell(r, "precision_" + k, 3), 16)
               << pad(cell(r, "recall_" + k, 3), 16) << pad(cell(r, "f1_" + k, 3), 16)
               << (first ? cell(r, "accuracy", 3) : "") << "\n";
            first = false;
        }
    }
    return os.str();
}

std::string format_regression_table(const std::vector<HorizonRow>& rows) {
    std::ostringstream os;
    os << pad("Horizon (hour)", 16) << pad("Model", 13) << pad("RMSE (mi/h)", 18) << pad("MAE (mi/h)", 18)
       << "MAPE (%)\n";
    int last = -1;
    for (const auto& row : rows) {
        os << pad(row.horizon_h != last ? std::to_string(row.horizon_h) : "", 16) << pad(row.model, 13)
           << pad(cell(row.report, "rmse", 2), 18) << pad(cell(row.report, "mae", 2), 18) << cell(row.report, "mape", 2)
           << "\n";
        last = row.horizon_h;
    }
    return os.str();
}

std::string format_repeat_table(const AggregatedReport& r, const std::vector<std::string>& metrics) {
    std::ostringstream os;
    os << pad("Repeat", 14);
    for (const auto& m : metrics) os << pad(m, 18);
    os << "\n";
    for (std::size_t i = 0; i < r.repeats.size(); ++i) {
        os << pad(std::to_string(i + 1), 14);
        for (const auto& m : metrics) {
            const double* v = r.repeats[i].find(m);
            os << pad(v ? num(*v, 3) : "n/a", 18);
        }
        os << "\n";
    }
    os << pad("Mean ± Std", 14);
    for (const auto& m : metrics) os << pad(cell(r, m, 3), 18);
    os << "\n";
    return os.str();
}

} // namespace evacast::metrics
