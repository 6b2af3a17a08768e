#include <doctest.h>

#include "occurlens/error.hpp"
#include "occurlens/metrics.hpp"

#include <random>

using namespace occurlens;

namespace {

// Independent oracle: trapezoidal integration of the ROC polyline.
double trapezoid_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    auto pts = roc_curve(scores, labels);
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += 0.5 * (pts[i].tpr + pts[i - 1].tpr) * (pts[i].fpr - pts[i - 1].fpr);
    return area;
}

// Second independent oracle: direct pair counting.
double pair_count_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0, ties = 0, pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[i] != 1 || labels[j] != 0) continue;
            pairs += 1;
            if (scores[i] > scores[j])
                wins += 1;
            else if (scores[i] == scores[j])
                ties += 1;
        }
    return (wins + 0.5 * ties) / pairs;
}

} // namespace

TEST_CASE("Mann-Whitney AUC on the 4-point fixture is 0.75") {
    const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
    const std::vector<int> y = {0, 0, 1, 1};
    CHECK(roc_auc(s, y) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("AUC edges: perfect separation and all ties") {
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), DegenerateInputError);
}

TEST_CASE("AUC equals trapezoidal ROC integration and pair counting on random fixtures") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> quant(1, 10);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 10 + trial % 40;
        std::vector<double> s;
        std::vector<int> y;
        bool both = false;
        for (int i = 0; i < n; ++i) {
            s.push_back(quant(rng) / 10.0); // quantized to force ties
            y.push_back(u(rng) < 0.4 ? 1 : 0);
        }
        y[0] = 0;
        y[1] = 1;
        const double a = roc_auc(s, y);
        CHECK(a == doctest::Approx(trapezoid_auc(s, y)).epsilon(1e-12));
        CHECK(a == doctest::Approx(pair_count_auc(s, y)).epsilon(1e-12));
        CHECK(a + roc_auc([&] {
                  std::vector<double> neg(s);
                  for (auto& v : neg) v = -v;
                  return neg;
              }(), y) ==
              doctest::Approx(1.0).epsilon(1e-12));
        // Strictly increasing transform leaves AUC unchanged.
        std::vector<double> t(s);
        for (auto& v : t) v = std::exp(3.0 * v);
        CHECK(roc_auc(t, y) == doctest::Approx(a).epsilon(1e-15));
    }
}

TEST_CASE("precision curve honors P(1) = 1 and the base rate at c = 0") {
    const std::vector<double> pz = {0.9, 0.8, 0.7, 0.6};
    const std::vector<int> y = {0, 0, 0, 1};
    auto curve = precision_curve(pz, y);
    REQUIRE(!curve.thresholds.empty());
    // c = 0: all rows predicted zero.
    CHECK(curve.thresholds.front() == 0.0);
    CHECK(curve.precision.front() == doctest::Approx(0.75));
    CHECK(curve.frac_predicted_zero.front() == doctest::Approx(1.0));
    // c = 1: no row at prob 1 -> convention P(1) = 1.
    CHECK(curve.thresholds.back() == 1.0);
    CHECK(curve.precision.back() == 1.0);
    CHECK(curve.frac_predicted_zero.back() == 0.0);
    // c = 0.75 within the sweep: two predicted zeros, both true.
    auto c075 = precision_curve(pz, y, {0.75});
    REQUIRE(c075.thresholds.size() == 1);
    CHECK(c075.precision[0] == doctest::Approx(1.0));
    CHECK(c075.frac_predicted_zero[0] == doctest::Approx(0.5));
}

TEST_CASE("predicted-zero fraction is nonincreasing in c") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pz;
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
        pz.push_back(u(rng));
        y.push_back(u(rng) < 0.5 ? 1 : 0);
    }
    auto curve = precision_curve(pz, y);
    for (std::size_t i = 1; i < curve.thresholds.size(); ++i)
        CHECK(curve.frac_predicted_zero[i] <= curve.frac_predicted_zero[i - 1] + 1e-15);
}

TEST_CASE("gamma-precision on the 4-point fixture") {
    const std::vector<double> pz = {0.9, 0.8, 0.7, 0.6};
    const std::vector<int> y = {0, 0, 0, 1};
    auto curve = precision_curve(pz, y);

    // gamma = 0.25: need > 1 predicted zero; best is c = 0.8 with precision 1.
    auto g = gamma_precision(curve, 0.25);
    CHECK(g.feasible);
    CHECK(g.p_star == doctest::Approx(1.0));
    CHECK(g.achieving_c == doctest::Approx(0.8));

    // gamma = 0: the max over all nonempty thresholds.
    g = gamma_precision(curve, 0.0);
    CHECK(g.feasible);
    CHECK(g.p_star == doctest::Approx(1.0));

    // gamma = 0.999 on n = 4: only all-4 thresholds qualify -> base rate.
    g = gamma_precision(curve, 0.999);
    CHECK(g.feasible);
    CHECK(g.p_star == doctest::Approx(0.75));
}

TEST_CASE("P*_gamma is nonincreasing in gamma") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pz;
        std::vector<int> y;
        for (int i = 0; i < 100; ++i) {
            pz.push_back(u(rng));
            y.push_back(u(rng) < 0.4 ? 1 : 0);
        }
        auto curve = precision_curve(pz, y);
        double prev = 2.0;
        for (int k = 0; k < 20; ++k) {
            const double gamma = k / 20.0;
            auto g = gamma_precision(curve, gamma);
            if (!g.feasible) break;
            CHECK(g.p_star <= prev + 1e-15);
            prev = g.p_star;
        }
    }
}
