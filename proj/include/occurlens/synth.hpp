#pragma once

#include "occurlens/table.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace occurlens {

enum class CovariateKind { DiurnalCorrelated, IidNoise, Ar1, DailyConstant };

struct CovariateSpec {
    std::string name;
    CovariateKind kind = CovariateKind::IidNoise;
    double coupling = 1.0; // DiurnalCorrelated: value = coupling * lambda(hour) + noise
    double sigma = 1.0;    // noise scale (IidNoise/Ar1/DiurnalCorrelated)
    double rho = 0.0;      // Ar1 only, |rho| < 1
};

struct Scenario {
    std::string station_id = "S1";
    HourStamp start;                       // first hour
    std::size_t n_hours = 0;
    std::array<double, 24> lambda_profile; // hourly event probabilities
    std::vector<CovariateSpec> covariates;
    std::uint64_t seed = 0;

    void validate() const;
};

// The headline diurnal scenario: all label signal lives in the hour of day,
// one road-like covariate tracks it, everything else is noise.
Scenario default_diurnal_scenario(std::size_t n_hours = 52560, std::uint64_t seed = 42);

// Draws label(t) ~ Bernoulli(lambda(hour(t))) plus the configured covariates;
// hour/weekday/month columns are included, time-encoded. Deterministic per seed.
FeatureTable generate(const Scenario& scenario);

// Raw covariate draws keyed for CSV emission (values before normalization).
struct SyntheticRaw {
    std::vector<HourStamp> timestamps;
    std::vector<std::string> names;
    std::vector<Series> columns; // daily-constant columns observed once per day
    std::vector<long long> event_counts;
};

SyntheticRaw generate_raw(const Scenario& scenario);

// AUC of the Bayes-optimal hour scorer s(h) = lambda(h), by exact enumeration
// of the (positive-hour, negative-hour) grid with ties at half credit.
double bayes_auc(const Scenario& scenario);
double bayes_auc(const std::array<double, 24>& lambda_profile);

} // namespace occurlens
