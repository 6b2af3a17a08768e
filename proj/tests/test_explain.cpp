#include <doctest.h>

#include "occurlens/error.hpp"
#include "occurlens/explain.hpp"
#include "occurlens/metrics.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace occurlens;

namespace {

// Arbitrary fixed function of the inputs, for closed-form checks.
class FnModel final : public Model {
public:
    std::function<double(const double*)> fn;
    explicit FnModel(std::size_t m, std::function<double(const double*)> f) : fn(std::move(f)) {
        feature_names.resize(m);
        for (std::size_t j = 0; j < m; ++j)
            feature_names[j] = "f" + std::to_string(j);
    }
    std::string kind() const override { return "fn"; }
    double predict_row(const double* x) const override { return fn(x); }
    nlohmann::ordered_json to_json() const override { return {}; }
};

Dense random_dense(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dense d;
    d.n = n;
    d.m = m;
    for (std::size_t j = 0; j < m; ++j)
        d.names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        d.timestamps.push_back(static_cast<HourStamp>(i));
        for (std::size_t j = 0; j < m; ++j)
            d.x.push_back(u(rng));
        d.y.push_back(u(rng) < 0.5 ? 1 : 0);
    }
    return d;
}

} // namespace

TEST_CASE("exact SHAP on a linear model equals a_i (x_i - mu_i)") {
    FnModel m(2, [](const double* x) { return 3.0 * x[0] + 2.0 * x[1]; });
    ShapConfig cfg;
    cfg.background = {0.4, 0.7};
    const double x[2] = {0.9, 0.1};
    const ShapRow r = shap_values(m, x, 2, cfg);
    CHECK(r.phi[0] == doctest::Approx(3.0 * (0.9 - 0.4)).epsilon(1e-12));
    CHECK(r.phi[1] == doctest::Approx(2.0 * (0.1 - 0.7)).epsilon(1e-12));
    CHECK(r.base_value == doctest::Approx(3.0 * 0.4 + 2.0 * 0.7).epsilon(1e-12));
    CHECK(r.phi[0] + r.phi[1] + r.base_value == doctest::Approx(m.predict_row(x)).epsilon(1e-12));
}

TEST_CASE("single-feature SHAP is f(x) - f(background) for any g") {
    FnModel m(1, [](const double* x) { return std::sin(5.0 * x[0]) + x[0] * x[0]; });
    ShapConfig cfg;
    cfg.background = {0.3};
    const double x[1] = {0.8};
    const ShapRow r = shap_values(m, x, 1, cfg);
    CHECK(r.phi[0] ==
          doctest::Approx(m.predict_row(x) - m.predict_row(cfg.background.data())).epsilon(1e-12));
}

TEST_CASE("unused features get exactly zero SHAP in exact mode") {
    FnModel m(4, [](const double* x) { return x[0] * x[0] - x[2]; });
    ShapConfig cfg;
    cfg.background = {0.5, 0.5, 0.5, 0.5};
    const double x[4] = {0.9, 0.2, 0.7, 0.1};
    const ShapRow r = shap_values(m, x, 4, cfg);
    CHECK(r.phi[1] == 0.0);
    CHECK(r.phi[3] == 0.0);
}

TEST_CASE("local accuracy holds exactly on a nonlinear interaction model") {
    FnModel m(5, [](const double* x) {
        return x[0] * x[1] + std::exp(x[2]) - 0.3 * x[3] * x[3] * x[4];
    });
    ShapConfig cfg;
    cfg.background = {0.2, 0.4, 0.6, 0.8, 0.5};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double x[5];
        for (double& v : x) v = u(rng);
        const ShapRow r = shap_values(m, x, 5, cfg);
        double sum = r.base_value;
        for (double p : r.phi) sum += p;
        CHECK(sum == doctest::Approx(m.predict_row(x)).epsilon(1e-9));
    }
}

TEST_CASE("sampled SHAP converges to exact within 0.01 at 8192 permutations") {
    FnModel m(6, [](const double* x) {
        return x[0] * x[1] - x[2] + 0.5 * x[3] * x[4] * x[5] + std::sin(x[0] + x[5]);
    });
    ShapConfig exact;
    exact.background = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    ShapConfig sampled = exact;
    sampled.mode = ShapMode::Sampled;
    sampled.sample_count = 8192;
    sampled.seed = 11;
    const double x[6] = {0.9, 0.1, 0.8, 0.3, 0.6, 0.2};
    const ShapRow re = shap_values(m, x, 6, exact);
    const ShapRow rs = shap_values(m, x, 6, sampled);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(std::fabs(re.phi[j] - rs.phi[j]) <= 0.01);
}

TEST_CASE("exact SHAP refuses more than 15 features") {
    FnModel m(16, [](const double* x) { return x[0]; });
    ShapConfig cfg;
    cfg.background.assign(16, 0.5);
    double x[16] = {};
    CHECK_THROWS_AS(shap_values(m, x, 16, cfg), DomainError);
}

TEST_CASE("mean_shap of a one-row dataset equals that row's phi") {
    FnModel m(3, [](const double* x) { return 2.0 * x[0] - x[1] * x[2]; });
    Dense d = random_dense(1, 3, 3);
    d.y = {1};
    ShapConfig cfg;
    cfg.background = {0.5, 0.5, 0.5};
    const ShapRow row = shap_values(m, d.row(0), 3, cfg);
    const ImportanceReport rep = mean_shap(m, d, cfg);
    REQUIRE(rep.features.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(rep.features[j].mean_signed_shap == doctest::Approx(row.phi[j]).epsilon(1e-12));
        CHECK(rep.features[j].mean_abs_shap ==
              doctest::Approx(std::fabs(row.phi[j])).epsilon(1e-12));
    }
}

TEST_CASE("mean_shap ranking puts the dominant feature first and ignored features at zero") {
    FnModel m(3, [](const double* x) { return 4.0 * x[0] + 0.2 * x[1]; });
    const Dense d = random_dense(64, 3, 5);
    ShapConfig cfg;
    cfg.background = {0.5, 0.5, 0.5};
    const ImportanceReport rep = mean_shap(m, d, cfg);
    CHECK(rep.ranking.front() == "f0");
    CHECK(rep.features[2].mean_abs_shap == 0.0);
}

TEST_CASE("permutation importance of the only informative feature approximates AUC - 0.5") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dense d = random_dense(2000, 2, 21);
    for (std::size_t i = 0; i < d.n; ++i)
        d.y[i] = u(rng) < 0.2 + 0.6 * d.x[i * 2] ? 1 : 0;
    FnModel m(2, [](const double* x) { return x[0]; });
    const double auc = roc_auc(m.predict_proba(d), d.y);

    PermConfig cfg;
    cfg.repeats = 50;
    cfg.seed = 4;
    const PermResult r = permutation_importance(m, d, cfg);
    CHECK_FALSE(r.degenerate);
    CHECK(std::fabs(r.mean[0] - (auc - 0.5)) <= 0.02);
    CHECK(std::fabs(r.mean[1]) <= 0.005); // absent from the model
}

TEST_CASE("permutation importance is deterministic per seed") {
    Dense d = random_dense(300, 3, 33);
    for (std::size_t i = 0; i < d.n; ++i)
        d.y[i] = d.x[i * 3] > 0.5 ? 1 : 0;
    FnModel m(3, [](const double* x) { return 0.7 * x[0] + 0.1 * x[1]; });
    PermConfig cfg;
    cfg.repeats = 1;
    cfg.seed = 9;
    const PermResult a = permutation_importance(m, d, cfg);
    const PermResult b = permutation_importance(m, d, cfg);
    for (std::size_t j = 0; j < a.mean.size(); ++j)
        CHECK(a.mean[j] == b.mean[j]);
    cfg.seed = 10;
    const PermResult c = permutation_importance(m, d, cfg);
    bool any_different = false;
    for (std::size_t j = 0; j < a.mean.size(); ++j)
        any_different |= a.mean[j] != c.mean[j];
    CHECK(any_different);
}

TEST_CASE("constant scores under AUC loss are reported as degenerate") {
    Dense d = random_dense(100, 2, 41);
    FnModel m(2, [](const double*) { return 0.5; });
    PermConfig cfg;
    cfg.repeats = 3;
    cfg.seed = 1;
    const PermResult r = permutation_importance(m, d, cfg);
    CHECK(r.degenerate);
}
