#include "occurlens/table.hpp"

#include "occurlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occurlens {

bool Series::complete() const {
    return std::all_of(present.begin(), present.end(), [](std::uint8_t p) { return p != 0; });
}

int FeatureTable::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < meta.size(); ++i)
        if (meta[i].name == name) return static_cast<int>(i);
    return -1;
}

void FeatureTable::validate() const {
    const std::size_t n = timestamps.size();
    for (std::size_t i = 1; i < n; ++i)
        if (timestamps[i] != timestamps[i - 1] + 1)
            throw SchemaError("station " + station_id + ": timestamps not hourly-increasing at row " +
                              std::to_string(i));
    if (columns.size() != meta.size())
        throw SchemaError("station " + station_id + ": column/meta count mismatch");
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c].values.size() != n || columns[c].present.size() != n)
            throw SchemaError("station " + station_id + ": column '" + meta[c].name +
                              "' length mismatch");
    if (!labels.empty() && labels.size() != n)
        throw SchemaError("station " + station_id + ": label length mismatch");
    for (int y : labels)
        if (y != 0 && y != 1)
            throw SchemaError("station " + station_id + ": non-binary label");
}

std::vector<int> binarize_labels(const std::vector<long long>& counts) {
    std::vector<int> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw DomainError("negative event count");
        out[i] = counts[i] >= 1 ? 1 : 0;
    }
    return out;
}

StationStats compute_station_stats(const std::string& station_id,
                                   const std::vector<long long>& counts) {
    StationStats s;
    s.station_id = station_id;
    if (counts.empty()) return s;
    long long zero = 0, multi = 0;
    for (long long c : counts) {
        if (c < 0) throw DomainError("negative event count");
        s.total_events += c;
        if (c == 0) ++zero;
        if (c > 1) ++multi;
    }
    const double n = static_cast<double>(counts.size());
    s.pct_zero_hours = zero / n;
    s.pct_multi_hours = multi / n;
    return s;
}

std::vector<std::string> filter_stations(const std::vector<StationStats>& stats,
                                         double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DomainError("station filter threshold must be in (0,1)");
    std::vector<std::string> kept;
    for (const auto& s : stats)
        if (s.pct_multi_hours < threshold) kept.push_back(s.station_id);
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<ColumnBounds> normalize_minmax(FeatureTable& table) {
    std::vector<ColumnBounds> bounds;
    bounds.reserve(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        ColumnBounds b;
        b.name = table.meta[c].name;
        if (table.meta[c].kind == FeatureKind::Categorical) {
            // Categorical encodings are already in [0,1]; keep identity bounds.
            b.min = 0.0;
            b.max = 1.0;
            bounds.push_back(b);
            continue;
        }
        auto& col = table.columns[c];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (!col.present[i]) continue;
            lo = std::min(lo, col.values[i]);
            hi = std::max(hi, col.values[i]);
        }
        if (!std::isfinite(lo))
            throw DegenerateInputError("column '" + b.name + "' has no observed values");
        b.min = lo;
        b.max = hi;
        const double range = hi - lo;
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (!col.present[i]) continue;
            col.values[i] = range > 0.0 ? (col.values[i] - lo) / range : 0.0;
        }
        bounds.push_back(b);
    }
    return bounds;
}

void apply_bounds(FeatureTable& table, const std::vector<ColumnBounds>& bounds) {
    for (const auto& b : bounds) {
        int c = table.feature_index(b.name);
        if (c < 0) throw SchemaError("bounds refer to unknown column '" + b.name + "'");
        if (table.meta[c].kind == FeatureKind::Categorical) continue;
        auto& col = table.columns[c];
        const double range = b.max - b.min;
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (!col.present[i]) continue;
            double v = range > 0.0 ? (col.values[i] - b.min) / range : 0.0;
            col.values[i] = std::clamp(v, 0.0, 1.0);
        }
    }
}

} // namespace occurlens
