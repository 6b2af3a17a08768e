#include "occurlens/spatial.hpp"

#include "occurlens/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace occurlens {

const Station* StationCatalog::find_station(const std::string& id) const {
    for (const auto& s : stations)
        if (s.id == id) return &s;
    return nullptr;
}

const Sensor* StationCatalog::find_sensor(const std::string& id) const {
    for (const auto& s : sensors)
        if (s.id == id) return &s;
    return nullptr;
}

void StationCatalog::validate() const {
    std::set<std::string> ids;
    for (const auto& s : stations) {
        if (!ids.insert(s.id).second) throw SchemaError("duplicate station id '" + s.id + "'");
        if (!std::isfinite(s.x_m) || !std::isfinite(s.y_m))
            throw SchemaError("non-finite coordinates for station '" + s.id + "'");
    }
    std::set<std::string> sids;
    for (const auto& s : sensors) {
        if (!sids.insert(s.id).second) throw SchemaError("duplicate sensor id '" + s.id + "'");
        if (!std::isfinite(s.x_m) || !std::isfinite(s.y_m))
            throw SchemaError("non-finite coordinates for sensor '" + s.id + "'");
    }
    for (const auto& [key, secs] : travel_time_s)
        if (secs < 0.0)
            throw SchemaError("negative travel time for (" + key.first + ", " + key.second + ")");
}

std::string assign_nearest(double x_m, double y_m, const std::string& point_id,
                           const StationCatalog& catalog, DistanceMetric metric) {
    if (catalog.stations.empty()) throw DomainError("empty station catalog");
    const Station* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& st : catalog.stations) {
        double d;
        if (metric == DistanceMetric::Euclidean) {
            d = std::hypot(st.x_m - x_m, st.y_m - y_m);
        } else {
            auto it = catalog.travel_time_s.find({st.id, point_id});
            if (it == catalog.travel_time_s.end()) continue;
            d = it->second;
        }
        if (d < best_d || (d == best_d && best && st.id < best->id)) {
            best_d = d;
            best = &st;
        }
    }
    if (!best)
        throw DomainError("point '" + point_id + "' unreachable from every station");
    return best->id;
}

std::vector<double> idw_weights(const std::vector<double>& distances, double s,
                                bool invert_exponent) {
    if (!(s > 0.0)) throw DomainError("idw exponent s must be positive");
    if (distances.empty()) throw DomainError("idw_weights needs at least one sensor");
    std::vector<double> w(distances.size());
    // A colocated sensor dominates in the d^(-s) limit.
    std::size_t zero_count = 0;
    for (double d : distances)
        if (d == 0.0) ++zero_count;
    if (zero_count > 0) {
        for (std::size_t i = 0; i < distances.size(); ++i)
            w[i] = distances[i] == 0.0 ? 1.0 / static_cast<double>(zero_count) : 0.0;
        return w;
    }
    // Scale by the extremal distance so large s cannot underflow every weight.
    double ref = distances[0];
    for (double d : distances) ref = invert_exponent ? std::min(ref, d) : std::max(ref, d);
    double sum = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double ratio = distances[i] / ref;
        w[i] = invert_exponent ? std::pow(ratio, -s) : std::pow(ratio, s);
        sum += w[i];
    }
    for (auto& v : w) v /= sum;
    return w;
}

Series impute_weighted(const std::vector<Series>& series_set,
                       const std::vector<double>& weights) {
    if (series_set.size() != weights.size())
        throw DomainError("weights do not align with sensor series");
    if (series_set.empty()) throw DomainError("impute_weighted needs at least one series");
    const std::size_t n = series_set[0].size();
    for (const auto& s : series_set)
        if (s.size() != n) throw DomainError("sensor series lengths differ");
    Series out;
    out.values.assign(n, 0.0);
    out.present.assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        double wsum = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < series_set.size(); ++i) {
            if (!series_set[i].present[t]) continue;
            wsum += weights[i];
            acc += weights[i] * series_set[i].values[t];
        }
        if (wsum > 0.0) {
            out.values[t] = acc / wsum;
            out.present[t] = 1;
        }
    }
    return out;
}

namespace {

struct JointFit {
    double corr = 0.0;
    double a = 1.0;
    double b = 0.0;
    std::size_t n = 0;
};

JointFit fit_candidate(const Series& target, const Series& cand) {
    JointFit f;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t t = 0; t < target.size(); ++t) {
        if (!target.present[t] || !cand.present[t]) continue;
        const double x = cand.values[t], y = target.values[t];
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        ++f.n;
    }
    if (f.n < 2) return f;
    const double n = static_cast<double>(f.n);
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    if (vx <= 0.0 || vy <= 0.0) return f;
    f.corr = cxy / std::sqrt(vx * vy);
    f.a = cxy / vx;
    f.b = (sy - f.a * sx) / n;
    return f;
}

} // namespace

Series impute_traffic(const Series& target, const std::vector<Series>& candidates,
                      const std::vector<HourStamp>& timestamps,
                      double corr_threshold) {
    const std::size_t n = target.size();
    if (n == 0) throw DomainError("empty target series");
    if (timestamps.size() != n) throw DomainError("timestamps do not align with target");
    bool any_observed = false;
    for (auto p : target.present) any_observed |= p != 0;
    if (!any_observed) throw DegenerateInputError("traffic target has no observed hours");

    Series out = target;
    if (out.complete()) return out;

    // Best correlated candidate above the threshold wins all gap hours it covers.
    int best = -1;
    JointFit best_fit;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].size() != n) throw DomainError("candidate series length mismatch");
        JointFit f = fit_candidate(target, candidates[i]);
        if (f.corr > corr_threshold && (best < 0 || f.corr > best_fit.corr)) {
            best = static_cast<int>(i);
            best_fit = f;
        }
    }
    if (best >= 0) {
        const Series& cand = candidates[best];
        for (std::size_t t = 0; t < n; ++t) {
            if (out.present[t] || !cand.present[t]) continue;
            out.values[t] = best_fit.a * cand.values[t] + best_fit.b;
            out.present[t] = 1;
        }
        if (out.complete()) return out;
    }

    // Seasonal (weekday, hour) mean over the observed target.
    std::array<double, 7 * 24> cell_sum{};
    std::array<long long, 7 * 24> cell_cnt{};
    double gsum = 0.0;
    long long gcnt = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (!out.present[t]) continue;
        const int cell = weekday_of(timestamps[t]) * 24 + hour_of(timestamps[t]);
        cell_sum[cell] += out.values[t];
        cell_cnt[cell] += 1;
        gsum += out.values[t];
        gcnt += 1;
    }
    const double gmean = gsum / static_cast<double>(gcnt);
    for (std::size_t t = 0; t < n; ++t) {
        if (out.present[t]) continue;
        const int cell = weekday_of(timestamps[t]) * 24 + hour_of(timestamps[t]);
        out.values[t] = cell_cnt[cell] > 0 ? cell_sum[cell] / cell_cnt[cell] : gmean;
        out.present[t] = 1;
    }
    return out;
}

Series fill_daily(const Series& hourly_marked, const std::vector<HourStamp>& timestamps) {
    const std::size_t n = hourly_marked.size();
    if (n == 0 || timestamps.size() != n) throw DomainError("empty or misaligned daily series");

    // One value per calendar day: the first observation inside the day.
    std::vector<std::int64_t> day_of(n);
    for (std::size_t t = 0; t < n; ++t)
        day_of[t] = timestamps[t] >= 0 ? timestamps[t] / 24 : (timestamps[t] - 23) / 24;

    Series out;
    out.values.assign(n, 0.0);
    out.present.assign(n, 1);

    double carried = 0.0;
    bool have_carried = false;
    std::size_t t = 0;
    std::vector<std::pair<std::size_t, std::size_t>> day_spans;
    while (t < n) {
        std::size_t e = t;
        while (e < n && day_of[e] == day_of[t]) ++e;
        day_spans.emplace_back(t, e);
        t = e;
    }
    std::vector<double> day_values(day_spans.size());
    std::vector<bool> day_has(day_spans.size(), false);
    for (std::size_t d = 0; d < day_spans.size(); ++d) {
        for (std::size_t i = day_spans[d].first; i < day_spans[d].second; ++i) {
            if (hourly_marked.present[i]) {
                day_values[d] = hourly_marked.values[i];
                day_has[d] = true;
                break;
            }
        }
    }
    if (std::none_of(day_has.begin(), day_has.end(), [](bool b) { return b; }))
        throw DegenerateInputError("daily series has no observed day");

    // Forward fill, then back-fill the leading run from the first observation.
    for (std::size_t d = 0; d < day_spans.size(); ++d) {
        if (day_has[d]) {
            carried = day_values[d];
            have_carried = true;
        } else if (have_carried) {
            day_values[d] = carried;
            day_has[d] = true;
        }
    }
    double first_value = 0.0;
    for (std::size_t d = 0; d < day_spans.size(); ++d)
        if (day_has[d]) {
            first_value = day_values[d];
            break;
        }
    for (std::size_t d = 0; d < day_spans.size(); ++d) {
        const double v = day_has[d] ? day_values[d] : first_value;
        for (std::size_t i = day_spans[d].first; i < day_spans[d].second; ++i)
            out.values[i] = v;
    }
    return out;
}

} // namespace occurlens
