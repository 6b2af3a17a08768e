#include "occurlens/explain.hpp"

#include "occurlens/error.hpp"
#include "occurlens/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace occurlens {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

ShapRow shap_exact(const Model& model, const double* x, std::size_t m,
                   const ShapConfig& cfg) {
    const int M = static_cast<int>(m);
    if (M > 15)
        throw DomainError("exact SHAP refuses M > 15 features; use sampled mode");

    // One model evaluation per coalition mask.
    const std::size_t n_masks = std::size_t{1} << M;
    std::vector<double> v(n_masks);
    std::vector<double> row(m);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        for (int i = 0; i < M; ++i)
            row[i] = (mask >> i) & 1 ? x[i] : cfg.background[i];
        v[mask] = model.predict_row(row.data());
    }

    std::vector<double> weight(M);
    const double mfact = factorial(M);
    for (int k = 0; k < M; ++k)
        weight[k] = factorial(k) * factorial(M - k - 1) / mfact;

    ShapRow out;
    out.base_value = v[0];
    out.phi.assign(m, 0.0);
    for (int i = 0; i < M; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const int k = std::popcount(mask);
            out.phi[i] += weight[k] * (v[mask | bit] - v[mask]);
        }
    }
    return out;
}

ShapRow shap_sampled(const Model& model, const double* x, std::size_t m,
                     const ShapConfig& cfg) {
    if (cfg.sample_count < 64)
        throw DomainError("sampled SHAP requires sample_count >= 64");
    std::mt19937_64 rng(cfg.seed);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);

    ShapRow out;
    out.phi.assign(m, 0.0);
    std::vector<double> row(cfg.background.begin(), cfg.background.end());
    out.base_value = model.predict_row(row.data());

    for (int s = 0; s < cfg.sample_count; ++s) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::copy(cfg.background.begin(), cfg.background.end(), row.begin());
        double prev = out.base_value;
        for (int i : perm) {
            row[i] = x[i];
            const double cur = model.predict_row(row.data());
            out.phi[i] += cur - prev;
            prev = cur;
        }
    }
    for (auto& p : out.phi) p /= cfg.sample_count;
    return out;
}

} // namespace

ShapRow shap_values(const Model& model, const double* x, std::size_t m,
                    const ShapConfig& cfg) {
    if (cfg.background.size() != m)
        throw DomainError("background length must equal the feature count");
    return cfg.mode == ShapMode::Exact ? shap_exact(model, x, m, cfg)
                                       : shap_sampled(model, x, m, cfg);
}

ImportanceReport mean_shap(const Model& model, const Dense& data, const ShapConfig& cfg) {
    if (data.n == 0) throw DomainError("mean_shap: empty dataset");
    std::vector<std::size_t> rows(data.n);
    std::iota(rows.begin(), rows.end(), 0);
    if (cfg.max_rows > 0 && cfg.max_rows < data.n) {
        std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(cfg.max_rows);
        std::sort(rows.begin(), rows.end());
    }

    std::vector<double> sum_abs(data.m, 0.0), sum_signed(data.m, 0.0);
    double base = 0.0;
    for (std::size_t r : rows) {
        ShapRow sr = shap_values(model, data.row(r), data.m, cfg);
        base = sr.base_value;
        for (std::size_t i = 0; i < data.m; ++i) {
            sum_abs[i] += std::fabs(sr.phi[i]);
            sum_signed[i] += sr.phi[i];
        }
    }
    const double n = static_cast<double>(rows.size());

    ImportanceReport rep;
    rep.base_value = base;
    for (std::size_t i = 0; i < data.m; ++i) {
        FeatureImportance fi;
        fi.feature = data.names[i];
        fi.mean_abs_shap = sum_abs[i] / n;
        fi.mean_signed_shap = sum_signed[i] / n;
        rep.features.push_back(std::move(fi));
    }
    std::vector<std::size_t> order(data.m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rep.features[a].mean_abs_shap > rep.features[b].mean_abs_shap;
    });
    for (std::size_t i : order) rep.ranking.push_back(rep.features[i].feature);
    return rep;
}

namespace {

double eval_loss(const std::vector<double>& scores, const std::vector<int>& labels,
                 PermLoss loss, bool* degenerate) {
    if (loss == PermLoss::OneMinusAuc) {
        const bool all_equal =
            std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores[0]; });
        if (all_equal) {
            if (degenerate) *degenerate = true;
            return 0.5;
        }
        return 1.0 - roc_auc(scores, labels);
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = std::clamp(scores[i], 1e-15, 1.0 - 1e-15);
        ll += -(labels[i] * std::log(p) + (1 - labels[i]) * std::log(1.0 - p));
    }
    return ll / static_cast<double>(scores.size());
}

} // namespace

PermResult permutation_importance(const Model& model, const Dense& data,
                                  const PermConfig& cfg) {
    if (cfg.repeats < 1) throw DomainError("permutation repeats must be >= 1");
    long long pos = std::accumulate(data.y.begin(), data.y.end(), 0LL);
    if (pos == 0 || pos == static_cast<long long>(data.n))
        throw DegenerateInputError("permutation_importance: labels contain a single class");

    PermResult out;
    out.features = data.names;
    std::vector<double> base_scores = model.predict_proba(data);
    bool degenerate = false;
    out.baseline_error = eval_loss(base_scores, data.y, cfg.loss, &degenerate);
    if (degenerate && cfg.loss == PermLoss::OneMinusAuc) {
        out.degenerate = true;
        out.mean.assign(data.m, 0.0);
        out.stddev.assign(data.m, 0.0);
        return out;
    }

    Dense work = data;
    for (std::size_t f = 0; f < data.m; ++f) {
        std::vector<double> errs;
        errs.reserve(cfg.repeats);
        for (int r = 0; r < cfg.repeats; ++r) {
            std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ULL * (f + 1) + r);
            std::vector<double> col(data.n);
            for (std::size_t i = 0; i < data.n; ++i) col[i] = data.x[i * data.m + f];
            if (cfg.scheme == PermScheme::Permute) {
                std::shuffle(col.begin(), col.end(), rng);
            } else {
                const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
                std::uniform_real_distribution<double> unif(*lo, *hi);
                for (auto& v : col) v = unif(rng);
            }
            for (std::size_t i = 0; i < data.n; ++i) work.x[i * data.m + f] = col[i];
            errs.push_back(eval_loss(model.predict_proba(work), data.y, cfg.loss, nullptr) -
                           out.baseline_error);
        }
        for (std::size_t i = 0; i < data.n; ++i)
            work.x[i * data.m + f] = data.x[i * data.m + f];
        const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        out.mean.push_back(mean);
        out.stddev.push_back(errs.size() > 1 ? std::sqrt(var / (errs.size() - 1)) : 0.0);
    }
    return out;
}

} // namespace occurlens
