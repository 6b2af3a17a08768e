#include "occurlens/ingest.hpp"

#include "occurlens/csv.hpp"
#include "occurlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace occurlens {

namespace {

SensorKind parse_kind(const std::string& s, const std::string& file, std::size_t line) {
    if (s == "weather") return SensorKind::Weather;
    if (s == "traffic") return SensorKind::Traffic;
    if (s == "air") return SensorKind::Air;
    throw ParseError(file + ":" + std::to_string(line) + ": unknown sensor kind '" + s + "'");
}

int require_column(const CsvTable& t, const std::string& name, const std::string& file) {
    const int c = t.column(name);
    if (c < 0) throw SchemaError(file + ": missing column '" + name + "'");
    return c;
}

} // namespace

StationCatalog load_catalog(const IngestPaths& paths) {
    StationCatalog cat;
    {
        CsvTable t = read_csv(paths.stations_csv);
        const int ci = require_column(t, "station_id", paths.stations_csv);
        const int cn = require_column(t, "name", paths.stations_csv);
        const int cx = require_column(t, "x_m", paths.stations_csv);
        const int cy = require_column(t, "y_m", paths.stations_csv);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            cat.stations.push_back({r[ci], r[cn],
                                    parse_double_cell(r[cx], paths.stations_csv, i + 2),
                                    parse_double_cell(r[cy], paths.stations_csv, i + 2)});
        }
    }
    {
        CsvTable t = read_csv(paths.sensors_csv);
        const int ci = require_column(t, "sensor_id", paths.sensors_csv);
        const int ck = require_column(t, "kind", paths.sensors_csv);
        const int cx = require_column(t, "x_m", paths.sensors_csv);
        const int cy = require_column(t, "y_m", paths.sensors_csv);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            cat.sensors.push_back({r[ci], parse_kind(r[ck], paths.sensors_csv, i + 2),
                                   parse_double_cell(r[cx], paths.sensors_csv, i + 2),
                                   parse_double_cell(r[cy], paths.sensors_csv, i + 2)});
        }
    }
    if (!paths.travel_time_csv.empty()) {
        CsvTable t = read_csv(paths.travel_time_csv);
        const int cs = require_column(t, "station_id", paths.travel_time_csv);
        const int cp = require_column(t, "point_id", paths.travel_time_csv);
        const int cv = require_column(t, "seconds", paths.travel_time_csv);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            cat.travel_time_s[{r[cs], r[cp]}] =
                parse_double_cell(r[cv], paths.travel_time_csv, i + 2);
        }
    }
    cat.validate();
    return cat;
}

std::vector<StationStats> station_stats_from_events(const std::string& events_csv,
                                                    const StationCatalog& catalog) {
    CsvTable t = read_csv(events_csv);
    const int ct = require_column(t, "timestamp_iso8601_hour", events_csv);
    const int cs = require_column(t, "station_id", events_csv);
    const int cc = require_column(t, "count", events_csv);

    HourStamp lo = 0, hi = 0;
    bool any = false;
    std::map<std::string, std::map<HourStamp, long long>> per_station;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (!catalog.find_station(r[cs]))
            throw SchemaError(events_csv + ":" + std::to_string(i + 2) +
                              ": unknown station '" + r[cs] + "'");
        const HourStamp h = parse_hour_iso(r[ct]);
        per_station[r[cs]][h] += parse_int_cell(r[cc], events_csv, i + 2);
        if (!any || h < lo) lo = h;
        if (!any || h > hi) hi = h;
        any = true;
    }
    std::vector<StationStats> out;
    if (!any) return out;
    const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
    for (const auto& [sid, hours] : per_station) {
        std::vector<long long> counts(span, 0);
        for (const auto& [h, c] : hours) counts[static_cast<std::size_t>(h - lo)] = c;
        out.push_back(compute_station_stats(sid, counts));
    }
    return out;
}

FeatureTable load_feature_table(const IngestPaths& paths, const StationCatalog& catalog,
                                const std::string& station_id,
                                double corr_threshold, double idw_exponent) {
    const Station* station = catalog.find_station(station_id);
    if (!station) throw SchemaError("unknown station '" + station_id + "'");

    CsvTable readings = read_csv(paths.readings_csv);
    const int ct = require_column(readings, "timestamp_iso8601_hour", paths.readings_csv);
    const int cs = require_column(readings, "sensor_id", paths.readings_csv);
    const int cp = require_column(readings, "parameter", paths.readings_csv);
    const int cv = require_column(readings, "value", paths.readings_csv);

    CsvTable events = read_csv(paths.events_csv);
    const int et = require_column(events, "timestamp_iso8601_hour", paths.events_csv);
    const int es = require_column(events, "station_id", paths.events_csv);
    const int ec = require_column(events, "count", paths.events_csv);

    // Covered span: union of reading and event hours.
    HourStamp lo = 0, hi = 0;
    bool any = false;
    auto extend = [&](HourStamp h) {
        if (!any || h < lo) lo = h;
        if (!any || h > hi) hi = h;
        any = true;
    };

    struct Cell {
        HourStamp h;
        double value;
        bool missing;
    };
    // (parameter, sensor) -> cells
    std::map<std::string, std::map<std::string, std::vector<Cell>>> by_param;
    std::map<std::string, std::set<HourStamp>> seen; // duplicate detection per (sensor,param)
    for (std::size_t i = 0; i < readings.rows.size(); ++i) {
        const auto& r = readings.rows[i];
        const std::string& sensor_id = r[cs];
        if (!catalog.find_sensor(sensor_id))
            throw SchemaError(paths.readings_csv + ":" + std::to_string(i + 2) +
                              ": unknown sensor '" + sensor_id + "'");
        const HourStamp h = parse_hour_iso(r[ct]);
        const std::string key = sensor_id + "\x1f" + r[cp];
        if (!seen[key].insert(h).second)
            throw SchemaError(paths.readings_csv + ":" + std::to_string(i + 2) +
                              ": duplicated timestamp for sensor '" + sensor_id +
                              "', parameter '" + r[cp] + "'");
        Cell cell{h, 0.0, r[cv].empty()};
        if (!cell.missing) cell.value = parse_double_cell(r[cv], paths.readings_csv, i + 2);
        by_param[r[cp]][sensor_id].push_back(cell);
        extend(h);
    }

    std::map<HourStamp, long long> event_counts;
    for (std::size_t i = 0; i < events.rows.size(); ++i) {
        const auto& r = events.rows[i];
        if (r[es] != station_id) continue;
        const HourStamp h = parse_hour_iso(r[et]);
        if (event_counts.count(h))
            throw SchemaError(paths.events_csv + ":" + std::to_string(i + 2) +
                              ": duplicated timestamp for station '" + station_id + "'");
        event_counts[h] = parse_int_cell(r[ec], paths.events_csv, i + 2);
        extend(h);
    }
    if (!any) throw SchemaError("no readings or events found");

    const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
    FeatureTable t;
    t.station_id = station_id;
    t.timestamps.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.timestamps[i] = lo + static_cast<HourStamp>(i);

    // Time encodings first.
    {
        Series hour_col, wd_col, mo_col;
        hour_col.values.resize(n);
        wd_col.values.resize(n);
        mo_col.values.resize(n);
        hour_col.present.assign(n, 1);
        wd_col.present.assign(n, 1);
        mo_col.present.assign(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            const TimeEncoding enc = encode_time(t.timestamps[i]);
            hour_col.values[i] = enc.hour_norm;
            wd_col.values[i] = enc.weekday_norm;
            mo_col.values[i] = enc.month_norm;
        }
        t.meta.push_back({"hour", FeatureKind::Categorical, 24});
        t.columns.push_back(std::move(hour_col));
        t.meta.push_back({"weekday", FeatureKind::Categorical, 7});
        t.columns.push_back(std::move(wd_col));
        t.meta.push_back({"month", FeatureKind::Categorical, 12});
        t.columns.push_back(std::move(mo_col));
    }

    auto series_of = [&](const std::vector<Cell>& cells) {
        Series s;
        s.values.assign(n, 0.0);
        s.present.assign(n, 0);
        for (const auto& c : cells) {
            if (c.missing) continue;
            const std::size_t i = static_cast<std::size_t>(c.h - lo);
            s.values[i] = c.value;
            s.present[i] = 1;
        }
        return s;
    };

    for (const auto& [param, sensors] : by_param) {
        std::vector<std::string> ids;
        std::vector<Series> series_set;
        std::vector<double> dists;
        SensorKind kind = SensorKind::Weather;
        for (const auto& [sid, cells] : sensors) {
            const Sensor* sensor = catalog.find_sensor(sid);
            ids.push_back(sid);
            series_set.push_back(series_of(cells));
            dists.push_back(std::hypot(sensor->x_m - station->x_m, sensor->y_m - station->y_m));
            kind = sensor->kind;
        }

        Series combined;
        switch (kind) {
            case SensorKind::Weather: {
                const auto weights = idw_weights(dists, idw_exponent);
                combined = impute_weighted(series_set, weights);
                break;
            }
            case SensorKind::Traffic: {
                // Nearest road is the station's series; the rest are rescale candidates.
                std::size_t nearest = 0;
                for (std::size_t i = 1; i < dists.size(); ++i)
                    if (dists[i] < dists[nearest] ||
                        (dists[i] == dists[nearest] && ids[i] < ids[nearest]))
                        nearest = i;
                std::vector<Series> candidates;
                for (std::size_t i = 0; i < series_set.size(); ++i)
                    if (i != nearest) candidates.push_back(series_set[i]);
                combined = impute_traffic(series_set[nearest], candidates, t.timestamps,
                                          corr_threshold);
                break;
            }
            case SensorKind::Air: {
                std::size_t nearest = 0;
                for (std::size_t i = 1; i < dists.size(); ++i)
                    if (dists[i] < dists[nearest] ||
                        (dists[i] == dists[nearest] && ids[i] < ids[nearest]))
                        nearest = i;
                combined = fill_daily(series_set[nearest], t.timestamps);
                break;
            }
        }
        t.meta.push_back({param, FeatureKind::Continuous, 0});
        t.columns.push_back(std::move(combined));
    }

    t.event_counts.assign(n, 0);
    for (const auto& [h, c] : event_counts)
        t.event_counts[static_cast<std::size_t>(h - lo)] = c;
    t.labels = binarize_labels(t.event_counts);
    t.validate();
    return t;
}

} // namespace occurlens
