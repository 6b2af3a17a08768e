#pragma once

#include "occurlens/table.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace occurlens {

enum class SensorKind { Weather, Traffic, Air };

struct Station {
    std::string id;
    std::string name;
    double x_m = 0.0;
    double y_m = 0.0;
};

struct Sensor {
    std::string id;
    SensorKind kind = SensorKind::Weather;
    double x_m = 0.0;
    double y_m = 0.0;
};

struct StationCatalog {
    std::vector<Station> stations;
    std::vector<Sensor> sensors;
    // (station_id, point_id) -> travel time in seconds; absent entry means
    // the point is unreachable from that station.
    std::map<std::pair<std::string, std::string>, double> travel_time_s;

    const Station* find_station(const std::string& id) const;
    const Sensor* find_sensor(const std::string& id) const;
    void validate() const;
};

enum class DistanceMetric { Euclidean, TravelTime };

// Argmin station under the metric; ties break to the smallest station_id.
// Unreachable points under TravelTime raise DomainError.
std::string assign_nearest(double x_m, double y_m, const std::string& point_id,
                           const StationCatalog& catalog, DistanceMetric metric);

// Inverse-distance weights w_i proportional to d_i^(-s), normalized to sum 1.
// A colocated sensor (d = 0) takes all the weight. The literal d^(+s) variant
// is selectable for comparison.
std::vector<double> idw_weights(const std::vector<double>& distances, double s,
                                bool invert_exponent = true);

// Weighted average across sensors, renormalizing at each hour over the
// sensors that reported; hours where nobody reported stay missing.
Series impute_weighted(const std::vector<Series>& series_set,
                       const std::vector<double>& weights);

// Fills gaps in `target`: if some candidate correlates above the threshold on
// jointly observed hours, gaps take that candidate passed through a
// least-squares affine fit; otherwise the (weekday, hour) seasonal mean of the
// observed target, with a global-mean fallback for unseen cells.
Series impute_traffic(const Series& target, const std::vector<Series>& candidates,
                      const std::vector<HourStamp>& timestamps,
                      double corr_threshold = 0.95);

// Expands daily observations to hours: each hour takes its day's value, a
// missing day carries the most recent observed day forward, and leading
// missing days back-fill from the first observation.
Series fill_daily(const Series& hourly_marked, const std::vector<HourStamp>& timestamps);

} // namespace occurlens
