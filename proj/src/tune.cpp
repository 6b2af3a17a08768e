#include "occurlens/model.hpp"

#include "occurlens/error.hpp"
#include "occurlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace occurlens {

namespace {

double mean_fold_auc(const Dense& data, const Hyperparams& hp, ModelKindSel which,
                     int k_folds) {
    const std::size_t n = data.n;
    double sum = 0.0;
    int used = 0;
    for (int k = 0; k < k_folds; ++k) {
        const std::size_t lo = n * k / k_folds;
        const std::size_t hi = n * (k + 1) / k_folds;
        if (hi - lo < 2) continue;
        Dense train;
        train.m = data.m;
        train.names = data.names;
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= lo && i < hi) continue;
            train.x.insert(train.x.end(), data.row(i), data.row(i) + data.m);
            train.y.push_back(data.y[i]);
        }
        train.n = train.y.size();
        Dense val = data.slice(lo, hi);
        const auto has_both = [](const std::vector<int>& y) {
            long long p = std::accumulate(y.begin(), y.end(), 0LL);
            return p > 0 && p < static_cast<long long>(y.size());
        };
        if (!has_both(train.y) || !has_both(val.y)) continue; // skip degenerate folds
        std::unique_ptr<Model> model =
            which == ModelKindSel::Gbdt ? train_gbdt(train, hp.gbdt, hp.seed)
                                        : train_mlp(train, hp.mlp, hp.seed);
        sum += roc_auc(model->predict_proba(val), val.y);
        ++used;
    }
    if (used == 0) throw DegenerateInputError("all cross-validation folds were degenerate");
    return sum / used;
}

} // namespace

Hyperparams tune_random_search(const Dense& data, const SearchSpace& space,
                               ModelKindSel which, int k_folds, int budget,
                               std::uint64_t seed) {
    if (k_folds < 2) throw DomainError("k_folds must be >= 2");
    if (budget < 0) throw DomainError("budget must be >= 0");
    Hyperparams defaults;
    defaults.seed = seed;
    if (budget == 0) return defaults;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(std::log(lo) + unif(rng) * (std::log(hi) - std::log(lo)));
    };

    Hyperparams best = defaults;
    double best_auc = -1.0;
    for (int trial = 0; trial < budget; ++trial) {
        Hyperparams hp = defaults;
        if (which == ModelKindSel::Gbdt) {
            hp.gbdt.n_trees = space.n_trees_min +
                              static_cast<int>(unif(rng) * (space.n_trees_max - space.n_trees_min + 1));
            hp.gbdt.max_depth =
                space.depth_min + static_cast<int>(unif(rng) * (space.depth_max - space.depth_min + 1));
            hp.gbdt.learning_rate = log_uniform(space.lr_min, space.lr_max);
            hp.gbdt.l2_lambda = log_uniform(space.lambda_min, space.lambda_max);
        } else {
            hp.mlp.layers = space.layer_choices[static_cast<std::size_t>(
                unif(rng) * static_cast<double>(space.layer_choices.size()))];
            hp.mlp.dropout = space.dropout_min + unif(rng) * (space.dropout_max - space.dropout_min);
            hp.mlp.learning_rate = log_uniform(space.mlp_lr_min, space.mlp_lr_max);
        }
        hp.validate();
        const double auc = mean_fold_auc(data, hp, which, k_folds);
        if (auc > best_auc) {
            best_auc = auc;
            best = hp;
        }
    }
    return best;
}

} // namespace occurlens
