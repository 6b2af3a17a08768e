#include <doctest.h>

#include "occurlens/error.hpp"
#include "occurlens/spatial.hpp"

#include <random>

using namespace occurlens;

namespace {

StationCatalog three_stations() {
    StationCatalog c;
    c.stations = {{"2", "b", 0.0, 10.0}, {"3", "c", 5.0, 0.0}, {"5", "e", 0.0, -10.0}};
    return c;
}

} // namespace

TEST_CASE("assign_nearest: zero distance, tie-break, brute-force argmin") {
    StationCatalog c = three_stations();
    CHECK(assign_nearest(5.0, 0.0, "p", c, DistanceMetric::Euclidean) == "3");
    // Equidistant to stations 2 and 5 -> smallest id wins.
    CHECK(assign_nearest(-10.0, 0.0, "p", c, DistanceMetric::Euclidean) == "2");

    // Random points against a brute-force argmin.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = u(rng), y = u(rng);
        std::string best;
        double best_d = 1e300;
        for (const auto& st : c.stations) {
            const double d = std::hypot(st.x_m - x, st.y_m - y);
            if (d < best_d || (d == best_d && st.id < best)) {
                best_d = d;
                best = st.id;
            }
        }
        CHECK(assign_nearest(x, y, "p", c, DistanceMetric::Euclidean) == best);
        // Scale invariance of the argmin.
        StationCatalog scaled = c;
        for (auto& st : scaled.stations) {
            st.x_m *= 3.5;
            st.y_m *= 3.5;
        }
        CHECK(assign_nearest(x * 3.5, y * 3.5, "p", scaled, DistanceMetric::Euclidean) == best);
    }
}

TEST_CASE("assign_nearest via travel time; unreachable point errors") {
    StationCatalog c = three_stations();
    c.travel_time_s[{"2", "p"}] = 300.0;
    c.travel_time_s[{"3", "p"}] = 120.0;
    CHECK(assign_nearest(0.0, 0.0, "p", c, DistanceMetric::TravelTime) == "3");
    CHECK_THROWS_AS(assign_nearest(0.0, 0.0, "q", c, DistanceMetric::TravelTime), DomainError);
}

TEST_CASE("idw_weights: symmetry, normalization, hand-derived values") {
    auto w = idw_weights({4.0, 4.0}, 3.0);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(idw_weights({7.0}, 3.0)[0] == doctest::Approx(1.0).epsilon(1e-15));

    // d = (1, 2), s = 3: 1/1 and 1/8 -> (8/9, 1/9).
    w = idw_weights({1.0, 2.0}, 3.0);
    CHECK(w[0] == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
    CHECK(w[1] == doctest::Approx(1.0 / 9.0).epsilon(1e-13));

    CHECK_THROWS_AS(idw_weights({1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(idw_weights({1.0}, -2.0), DomainError);
}

TEST_CASE("idw_weights properties: sum one, permutation equivariance, s-limit") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> d = {u(rng), u(rng), u(rng), u(rng)};
        auto w = idw_weights(d, 3.0);
        double sum = 0.0;
        for (double v : w) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        std::vector<double> d2 = {d[2], d[0], d[3], d[1]};
        auto w2 = idw_weights(d2, 3.0);
        CHECK(w2[0] == doctest::Approx(w[2]).epsilon(1e-12));
        CHECK(w2[1] == doctest::Approx(w[0]).epsilon(1e-12));

        // Nearest weight grows monotonically with s toward 1.
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < d.size(); ++i)
            if (d[i] < d[nearest]) nearest = i;
        double prev = idw_weights(d, 1.0)[nearest];
        for (double s : {2.0, 4.0, 8.0, 16.0}) {
            const double cur = idw_weights(d, s)[nearest];
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
    // Clearly separated distances: the nearest sensor's weight tends to 1.
    CHECK(idw_weights({1.0, 2.0, 5.0}, 60.0)[0] > 0.999);
}

TEST_CASE("colocated sensor takes all weight") {
    auto w = idw_weights({0.0, 3.0}, 3.0);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 0.0);
}

TEST_CASE("idw literal d^(+s) variant is selectable") {
    auto w = idw_weights({1.0, 2.0}, 3.0, /*invert_exponent=*/false);
    CHECK(w[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
}

namespace {

Series series(std::vector<double> v, std::vector<std::uint8_t> p) {
    Series s;
    s.values = std::move(v);
    s.present = std::move(p);
    return s;
}

} // namespace

TEST_CASE("impute_weighted averages and renormalizes over reporters") {
    auto out = impute_weighted({series({10}, {1}), series({20}, {1})}, {0.5, 0.5});
    CHECK(out.values[0] == doctest::Approx(15.0));

    out = impute_weighted({series({9}, {1}), series({18}, {1})}, {8.0 / 9.0, 1.0 / 9.0});
    CHECK(out.values[0] == doctest::Approx(10.0).epsilon(1e-13));

    out = impute_weighted({series({0}, {0}), series({4}, {1})}, {0.7, 0.3});
    CHECK(out.values[0] == doctest::Approx(4.0));
    CHECK(out.present[0] == 1);

    out = impute_weighted({series({0}, {0}), series({4}, {0})}, {0.7, 0.3});
    CHECK(out.present[0] == 0); // all-missing hour propagates
}

TEST_CASE("impute_weighted equals the plain mean for equal weights, no gaps") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<Series> set(3);
    for (auto& s : set) {
        for (int i = 0; i < 50; ++i) {
            s.values.push_back(u(rng));
            s.present.push_back(1);
        }
    }
    auto out = impute_weighted(set, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    for (int i = 0; i < 50; ++i) {
        const double mean = (set[0].values[i] + set[1].values[i] + set[2].values[i]) / 3.0;
        CHECK(out.values[i] == doctest::Approx(mean).epsilon(1e-12));
    }
}

namespace {

std::vector<HourStamp> hourly_span(std::size_t n, HourStamp start = 24 * 365) {
    std::vector<HourStamp> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = start + static_cast<HourStamp>(i);
    return ts;
}

} // namespace

TEST_CASE("impute_traffic recovers an exact affine candidate") {
    const std::size_t n = 200;
    auto ts = hourly_span(n);
    Series target, cand;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(10.0, 100.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = u(rng);
        cand.values.push_back(c);
        cand.present.push_back(1);
        target.values.push_back(c / 2.0); // candidate = 2 x target
        target.present.push_back(1);
    }
    std::vector<double> truth = target.values;
    for (std::size_t i = 40; i < 60; ++i) target.present[i] = 0;

    auto filled = impute_traffic(target, {cand}, ts, 0.95);
    for (std::size_t i = 40; i < 60; ++i)
        CHECK(filled.values[i] == doctest::Approx(truth[i]).epsilon(1e-9));
}

TEST_CASE("impute_traffic falls back to the seasonal mean below the threshold") {
    // Two Tuesdays 08:00 observed at 100 and 120; gap on a third Tuesday 08:00.
    const std::size_t n = 24 * 7 * 3;
    auto ts = hourly_span(n, to_hour_stamp(CivilTime{2015, 1, 5, 0})); // Monday
    Series target;
    target.values.assign(n, 50.0);
    target.present.assign(n, 1);
    std::vector<std::size_t> tuesday8;
    for (std::size_t i = 0; i < n; ++i)
        if (weekday_of(ts[i]) == 1 && hour_of(ts[i]) == 8) tuesday8.push_back(i);
    REQUIRE(tuesday8.size() == 3);
    target.values[tuesday8[0]] = 100.0;
    target.values[tuesday8[1]] = 120.0;
    target.present[tuesday8[2]] = 0;

    // A candidate correlated only 0.90-ish: uncorrelated noise.
    Series weak;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        weak.values.push_back(u(rng));
        weak.present.push_back(1);
    }
    auto filled = impute_traffic(target, {weak}, ts, 0.95);
    CHECK(filled.values[tuesday8[2]] == doctest::Approx(110.0));
}

TEST_CASE("impute_traffic on a gap-free target returns it unchanged") {
    auto ts = hourly_span(50);
    Series target;
    for (std::size_t i = 0; i < 50; ++i) {
        target.values.push_back(static_cast<double>(i));
        target.present.push_back(1);
    }
    auto out = impute_traffic(target, {}, ts);
    CHECK(out.values == target.values);
}

TEST_CASE("impute_traffic errors on empty target") {
    Series empty;
    CHECK_THROWS_AS(impute_traffic(empty, {}, {}), DomainError);
}

TEST_CASE("fill_daily duplicates, carries forward, and back-fills") {
    const std::size_t n = 24 * 3;
    auto ts = hourly_span(n, 24 * 1000);
    Series daily;
    daily.values.assign(n, 0.0);
    daily.present.assign(n, 0);

    SUBCASE("single day value duplicates to all 24 hours") {
        daily.values[0] = 42.0;
        daily.present[0] = 1;
        auto out = fill_daily(daily, ts);
        for (std::size_t i = 0; i < 24; ++i) CHECK(out.values[i] == 42.0);
    }
    SUBCASE("missing middle day takes the most recent value") {
        daily.values[0] = 5.0;
        daily.present[0] = 1;
        daily.values[48] = 7.0;
        daily.present[48] = 1;
        auto out = fill_daily(daily, ts);
        for (std::size_t i = 24; i < 48; ++i) CHECK(out.values[i] == 5.0);
        for (std::size_t i = 48; i < 72; ++i) CHECK(out.values[i] == 7.0);
    }
    SUBCASE("leading missing day back-fills from the first observation") {
        daily.values[24] = 9.0;
        daily.present[24] = 1;
        auto out = fill_daily(daily, ts);
        for (std::size_t i = 0; i < 24; ++i) CHECK(out.values[i] == 9.0);
    }
    SUBCASE("empty series errors") {
        CHECK_THROWS_AS(fill_daily(daily, ts), DegenerateInputError);
    }
}
