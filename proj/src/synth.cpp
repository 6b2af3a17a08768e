#include "occurlens/synth.hpp"

#include "occurlens/csv.hpp"
#include "occurlens/error.hpp"
#include "occurlens/ingest.hpp"
#include "occurlens/spatial.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

namespace occurlens {

void Scenario::validate() const {
    if (n_hours == 0) throw DomainError("scenario needs n_hours > 0");
    for (double l : lambda_profile)
        if (!(l >= 0.0 && l <= 1.0)) throw DomainError("lambda profile outside [0,1]");
    for (const auto& c : covariates) {
        if (c.name.empty()) throw DomainError("covariate without a name");
        if (c.sigma < 0.0) throw DomainError("covariate sigma must be >= 0");
        if (c.kind == CovariateKind::Ar1 && !(std::fabs(c.rho) < 1.0))
            throw DomainError("ar1 requires |rho| < 1");
    }
}

Scenario default_diurnal_scenario(std::size_t n_hours, std::uint64_t seed) {
    Scenario s;
    s.station_id = "S1";
    s.start = to_hour_stamp(CivilTime{2015, 1, 1, 0});
    s.n_hours = n_hours;
    s.seed = seed;
    // Amplitude picked so the hour-of-day IV lands in the medium band and the
    // Bayes AUC sits near the low 0.6s.
    for (int h = 0; h < 24; ++h)
        s.lambda_profile[h] = 0.15 + 0.08 * std::sin(2.0 * std::numbers::pi * (h - 9) / 24.0);
    s.covariates.push_back({"road1", CovariateKind::DiurnalCorrelated, 1.0, 0.3, 0.0});
    for (int i = 1; i <= 5; ++i)
        s.covariates.push_back({"noise" + std::to_string(i), CovariateKind::IidNoise, 0.0, 1.0, 0.0});
    s.covariates.push_back({"weather1", CovariateKind::Ar1, 0.0, 1.0, 0.9});
    s.covariates.push_back({"air1", CovariateKind::DailyConstant, 0.0, 1.0, 0.0});
    return s;
}

SyntheticRaw generate_raw(const Scenario& sc) {
    sc.validate();
    SyntheticRaw raw;
    raw.timestamps.resize(sc.n_hours);
    for (std::size_t t = 0; t < sc.n_hours; ++t)
        raw.timestamps[t] = sc.start + static_cast<HourStamp>(t);

    // Independent, deterministically derived streams per component.
    std::mt19937_64 label_rng(sc.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    raw.event_counts.resize(sc.n_hours);
    for (std::size_t t = 0; t < sc.n_hours; ++t) {
        const double lam = sc.lambda_profile[hour_of(raw.timestamps[t])];
        raw.event_counts[t] = unif(label_rng) < lam ? 1 : 0;
    }

    for (std::size_t c = 0; c < sc.covariates.size(); ++c) {
        const auto& spec = sc.covariates[c];
        std::mt19937_64 rng(sc.seed + 0x9E3779B97F4A7C15ULL * (c + 1));
        std::normal_distribution<double> noise(0.0, 1.0);
        Series col;
        col.values.assign(sc.n_hours, 0.0);
        col.present.assign(sc.n_hours, 1);
        switch (spec.kind) {
            case CovariateKind::DiurnalCorrelated:
                for (std::size_t t = 0; t < sc.n_hours; ++t)
                    col.values[t] = spec.coupling * sc.lambda_profile[hour_of(raw.timestamps[t])] +
                                    spec.sigma * noise(rng);
                break;
            case CovariateKind::IidNoise:
                for (std::size_t t = 0; t < sc.n_hours; ++t)
                    col.values[t] = spec.sigma * noise(rng);
                break;
            case CovariateKind::Ar1: {
                double prev = 0.0;
                for (std::size_t t = 0; t < sc.n_hours; ++t) {
                    prev = spec.rho * prev + spec.sigma * noise(rng);
                    col.values[t] = prev;
                }
                break;
            }
            case CovariateKind::DailyConstant: {
                // One draw per day, observed at the day's first hour only.
                std::fill(col.present.begin(), col.present.end(), 0);
                std::int64_t cur_day = INT64_MIN;
                double val = 0.0;
                for (std::size_t t = 0; t < sc.n_hours; ++t) {
                    const std::int64_t day = raw.timestamps[t] / 24;
                    if (day != cur_day) {
                        cur_day = day;
                        val = spec.sigma * noise(rng);
                        col.values[t] = val;
                        col.present[t] = 1;
                    }
                }
                break;
            }
        }
        raw.names.push_back(spec.name);
        raw.columns.push_back(std::move(col));
    }
    return raw;
}

FeatureTable generate(const Scenario& sc) {
    SyntheticRaw raw = generate_raw(sc);
    FeatureTable t;
    t.station_id = sc.station_id;
    t.timestamps = raw.timestamps;
    t.event_counts = raw.event_counts;
    t.labels = binarize_labels(raw.event_counts);

    const std::size_t n = sc.n_hours;
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

    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        Series col = raw.columns[c];
        if (sc.covariates[c].kind == CovariateKind::DailyConstant)
            col = fill_daily(col, t.timestamps);
        t.meta.push_back({raw.names[c], FeatureKind::Continuous, 0});
        t.columns.push_back(std::move(col));
    }
    t.validate();
    return t;
}

IngestPaths write_scenario_csvs(const Scenario& sc, const std::string& dir) {
    sc.validate();
    std::filesystem::create_directories(dir);
    const SyntheticRaw raw = generate_raw(sc);
    const auto kind_of = [](CovariateKind k) {
        switch (k) {
            case CovariateKind::DiurnalCorrelated: return "traffic";
            case CovariateKind::DailyConstant: return "air";
            default: return "weather";
        }
    };
    const auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    IngestPaths paths;
    paths.stations_csv = dir + "/stations.csv";
    paths.sensors_csv = dir + "/sensors.csv";
    paths.readings_csv = dir + "/readings.csv";
    paths.events_csv = dir + "/events.csv";

    CsvWriter stations(paths.stations_csv);
    stations.write_header({"station_id", "name", "x_m", "y_m"});
    stations.write_row({sc.station_id, sc.station_id, "0", "0"});
    stations.close();

    CsvWriter sensors(paths.sensors_csv);
    sensors.write_header({"sensor_id", "kind", "x_m", "y_m"});
    for (const auto& cov : sc.covariates)
        sensors.write_row({"sn_" + cov.name, kind_of(cov.kind), "0", "0"});
    sensors.close();

    CsvWriter readings(paths.readings_csv);
    readings.write_header({"timestamp_iso8601_hour", "sensor_id", "parameter", "value"});
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        const auto& col = raw.columns[c];
        for (std::size_t t = 0; t < col.size(); ++t) {
            if (!col.present[t]) continue;
            readings.write_row({format_hour_iso(raw.timestamps[t]), "sn_" + raw.names[c],
                                raw.names[c], num(col.values[t])});
        }
    }
    readings.close();

    CsvWriter events(paths.events_csv);
    events.write_header({"timestamp_iso8601_hour", "station_id", "count"});
    for (std::size_t t = 0; t < raw.timestamps.size(); ++t)
        events.write_row({format_hour_iso(raw.timestamps[t]), sc.station_id,
                          std::to_string(raw.event_counts[t])});
    events.close();
    return paths;
}

double bayes_auc(const std::array<double, 24>& lam) {
    double wp = 0.0, wn = 0.0;
    for (double l : lam) {
        wp += l;
        wn += 1.0 - l;
    }
    bool all_equal = true;
    for (double l : lam) all_equal &= l == lam[0];
    if (all_equal || wp == 0.0 || wn == 0.0) return 0.5;
    double acc = 0.0;
    for (int h = 0; h < 24; ++h) {
        for (int g = 0; g < 24; ++g) {
            const double w = lam[h] * (1.0 - lam[g]);
            if (lam[h] > lam[g])
                acc += w;
            else if (lam[h] == lam[g])
                acc += 0.5 * w;
        }
    }
    return acc / (wp * wn);
}

double bayes_auc(const Scenario& sc) {
    sc.validate();
    return bayes_auc(sc.lambda_profile);
}

} // namespace occurlens
