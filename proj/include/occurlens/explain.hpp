#pragma once

#include "occurlens/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace occurlens {

enum class ShapMode { Exact, Sampled };

struct ShapConfig {
    ShapMode mode = ShapMode::Exact;
    int sample_count = 2048;          // permutations drawn in sampled mode
    std::vector<double> background;   // per-feature training means E[z]
    std::uint64_t seed = 0;
    std::size_t max_rows = 0;         // 0 = whole dataset for mean_shap
};

struct ShapRow {
    std::vector<double> phi;
    double base_value = 0.0; // f(all-background row)
};

// Shapley attributions under the mean-imputation value function
// v(S) = f(x with out-of-coalition features set to their background means).
// Exact mode enumerates all coalitions (refused for M > 15); sampled mode
// averages marginal contributions over uniformly drawn feature permutations.
ShapRow shap_values(const Model& model, const double* x, std::size_t m,
                    const ShapConfig& cfg);

struct FeatureImportance {
    std::string feature;
    double mean_abs_shap = 0.0;
    double mean_signed_shap = 0.0;
    double perm_importance_mean = 0.0;
    double perm_importance_std = 0.0;
};

struct ImportanceReport {
    std::vector<FeatureImportance> features;
    std::vector<std::string> ranking; // by mean_abs_shap, descending
    bool perm_degenerate = false;     // all scores equal under AUC loss
    double base_value = 0.0;
};

// Dataset-mean SHAP aggregates (signed and absolute channels).
ImportanceReport mean_shap(const Model& model, const Dense& data, const ShapConfig& cfg);

enum class PermLoss { OneMinusAuc, LogLoss };
enum class PermScheme { Permute, UniformNoise };

struct PermConfig {
    PermLoss loss = PermLoss::OneMinusAuc;
    PermScheme scheme = PermScheme::Permute;
    int repeats = 10;
    std::uint64_t seed = 0;
};

struct PermResult {
    std::vector<std::string> features;
    std::vector<double> mean;
    std::vector<double> stddev;
    bool degenerate = false;
    double baseline_error = 0.0;
};

// Per-feature mean/std of E_j - E_0 over seeded column shuffles.
PermResult permutation_importance(const Model& model, const Dense& data,
                                  const PermConfig& cfg);

} // namespace occurlens
