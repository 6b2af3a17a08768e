#pragma once

#include "occurlens/time.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace occurlens {

enum class FeatureKind { Continuous, Categorical };

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    int n_classes = 0; // categorical only
};

// One hourly column with an explicit per-cell missing mask.
struct Series {
    std::vector<double> values;
    std::vector<std::uint8_t> present; // 1 = observed

    std::size_t size() const { return values.size(); }
    bool complete() const;
};

// Hourly feature matrix + binary label column for one station.
// Timestamps are strictly increasing with a uniform 1-hour step.
struct FeatureTable {
    std::string station_id;
    std::vector<HourStamp> timestamps;
    std::vector<FeatureMeta> meta;
    std::vector<Series> columns;       // parallel to meta
    std::vector<int> labels;           // {0,1}
    std::vector<long long> event_counts; // un-binarized, may exceed 1

    std::size_t n_rows() const { return timestamps.size(); }
    std::size_t n_features() const { return meta.size(); }
    int feature_index(const std::string& name) const; // -1 if absent
    void validate() const;                            // throws SchemaError
};

struct StationStats {
    std::string station_id;
    long long total_events = 0;
    double pct_zero_hours = 0.0;
    double pct_multi_hours = 0.0; // fraction of hours with > 1 event
};

struct ColumnBounds {
    std::string name;
    double min = 0.0;
    double max = 0.0;
};

// counts[i] >= 1 -> 1, 0 -> 0. Negative counts are a domain error.
std::vector<int> binarize_labels(const std::vector<long long>& counts);

StationStats compute_station_stats(const std::string& station_id,
                                   const std::vector<long long>& counts);

// Retains exactly the stations with pct_multi_hours < threshold (strict).
std::vector<std::string> filter_stations(const std::vector<StationStats>& stats,
                                         double threshold = 0.03);

// Min-max rescales every continuous column in place over its non-missing
// values; a constant column maps to all zeros. Returns the bounds so
// evaluation-year data can be rescaled with training-year bounds.
std::vector<ColumnBounds> normalize_minmax(FeatureTable& table);

// Applies previously computed bounds; values outside them clip to [0,1].
void apply_bounds(FeatureTable& table, const std::vector<ColumnBounds>& bounds);

} // namespace occurlens
