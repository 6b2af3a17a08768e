#pragma once

#include "occurlens/table.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace occurlens {

// Row-major dense design matrix extracted from a complete FeatureTable.
struct Dense {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<double> x; // n * m
    std::vector<int> y;
    std::vector<std::string> names;
    std::vector<HourStamp> timestamps;

    const double* row(std::size_t i) const { return x.data() + i * m; }
    Dense slice(std::size_t begin, std::size_t end) const;
};

Dense to_dense(const FeatureTable& table);

struct GbdtParams {
    int n_trees = 200;
    int max_depth = 4;
    double learning_rate = 0.1;
    double l2_lambda = 1.0;
    double min_child_weight = 1.0;
};

struct MlpParams {
    std::vector<int> layers = {32, 16};
    double dropout = 0.1;
    double learning_rate = 1e-3;
    int batch_size = 256;
    int max_epochs = 200;
    int patience = 10;
};

struct Hyperparams {
    GbdtParams gbdt;
    MlpParams mlp;
    std::uint64_t seed = 0;

    void validate() const; // throws DomainError
};

// A probability-emitting binary classifier. Prediction is deterministic and
// thread-safe; trained models are immutable.
class Model {
public:
    virtual ~Model() = default;
    virtual std::string kind() const = 0;
    virtual double predict_row(const double* x) const = 0;
    virtual nlohmann::ordered_json to_json() const = 0;

    std::vector<double> predict_proba(const Dense& data) const;

    std::vector<std::string> feature_names;
    std::uint64_t seed = 0;
    std::string training_span;
};

std::unique_ptr<Model> model_from_json(const nlohmann::ordered_json& j);

std::unique_ptr<Model> train_gbdt(const Dense& data, const GbdtParams& hp, std::uint64_t seed);
std::unique_ptr<Model> train_mlp(const Dense& data, const MlpParams& hp, std::uint64_t seed);
// hours[i] in 0..23; rate[h] = empirical P[Y = 1 | hour = h], unseen hours
// take the global rate.
std::unique_ptr<Model> fit_prior(const std::vector<int>& hours, const std::vector<int>& labels);
// Prior trained straight from a table's hour column.
std::unique_ptr<Model> fit_prior_from(const Dense& data);

// Extracts integer hours 0..23 from the normalized "hour" column.
std::vector<int> hours_from(const Dense& data);

struct SearchSpace {
    // GBDT ranges (inclusive); learning rates sample log-uniformly.
    int n_trees_min = 50, n_trees_max = 400;
    int depth_min = 2, depth_max = 6;
    double lr_min = 0.02, lr_max = 0.3;
    double lambda_min = 0.1, lambda_max = 10.0;
    // MLP ranges.
    std::vector<std::vector<int>> layer_choices = {{16}, {32, 16}, {64, 32}};
    double dropout_min = 0.0, dropout_max = 0.3;
    double mlp_lr_min = 1e-4, mlp_lr_max = 1e-2;
};

enum class ModelKindSel { Gbdt, Mlp };

// Seeded random search over contiguous time-block folds, selecting the
// configuration with the best mean fold AUC. budget 0 returns the defaults.
Hyperparams tune_random_search(const Dense& data, const SearchSpace& space,
                               ModelKindSel which, int k_folds, int budget,
                               std::uint64_t seed);

} // namespace occurlens
