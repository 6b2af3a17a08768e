#pragma once

#include "occurlens/spatial.hpp"
#include "occurlens/table.hpp"

#include <optional>
#include <string>
#include <vector>

namespace occurlens {

struct IngestPaths {
    std::string stations_csv;
    std::string sensors_csv;
    std::string readings_csv;
    std::string events_csv;
    std::string travel_time_csv; // optional
};

StationCatalog load_catalog(const IngestPaths& paths);

// Builds the hourly table for one station: per-parameter sensor series are
// combined to the station (weather via inverse-distance weights, traffic via
// the nearest road with correlation gap-fill, air via the nearest sensor with
// daily duplication), time encodings appended, event counts joined by hour.
// The result is complete (imputed) but not yet normalized.
FeatureTable load_feature_table(const IngestPaths& paths, const StationCatalog& catalog,
                                const std::string& station_id,
                                double corr_threshold = 0.95, double idw_exponent = 3.0);

// Event counts per station over the events file's span, for station filtering.
std::vector<StationStats> station_stats_from_events(const std::string& events_csv,
                                                    const StationCatalog& catalog);

// Writes a synthetic scenario in the raw CSV schemas (stations, sensors,
// readings, events) with every sensor colocated at the station, so the full
// ingestion path can be exercised against generated data.
struct Scenario;
IngestPaths write_scenario_csvs(const Scenario& scenario, const std::string& dir);

} // namespace occurlens
