#include "occurlens/stats.hpp"

#include "occurlens/error.hpp"
#include "occurlens/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace occurlens {

const char* iv_band_name(IvBand b) {
    switch (b) {
        case IvBand::Insignificant: return "insignificant";
        case IvBand::Weak: return "weak";
        case IvBand::Medium: return "medium";
        case IvBand::Strong: return "strong";
    }
    return "?";
}

IvBand iv_band_of(double iv) {
    if (iv < 0.02) return IvBand::Insignificant;
    if (iv < 0.1) return IvBand::Weak;
    if (iv <= 0.3) return IvBand::Medium;
    return IvBand::Strong;
}

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("pearson_corr needs two equal vectors with >= 2 rows");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
        cxy += (x[i] - mx) * (y[i] - my);
    }
    if (vx <= 0.0 || vy <= 0.0) return 0.0; // constant-column convention
    return cxy / std::sqrt(vx * vy);
}

CorrMatrix pearson_corr_matrix(const FeatureTable& table, bool include_label) {
    if (table.n_rows() < 2) throw DegenerateInputError("correlation needs >= 2 rows");
    CorrMatrix out;
    std::vector<const std::vector<double>*> cols;
    for (std::size_t c = 0; c < table.n_features(); ++c) {
        out.names.push_back(table.meta[c].name);
        cols.push_back(&table.columns[c].values);
    }
    std::vector<double> label_col;
    if (include_label) {
        label_col.assign(table.labels.begin(), table.labels.end());
        out.names.push_back("label");
        cols.push_back(&label_col);
    }
    const std::size_t k = cols.size();
    out.r.assign(k, std::vector<double>(k, 0.0));
    std::vector<bool> constant(k, false);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& v = *cols[j];
        constant[j] = std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
        if (constant[j]) out.warnings.push_back("column '" + out.names[j] + "' is constant");
    }
    for (std::size_t j = 0; j < k; ++j) {
        out.r[j][j] = 1.0;
        for (std::size_t l = j + 1; l < k; ++l) {
            const double r = (constant[j] || constant[l]) ? 0.0 : pearson_corr(*cols[j], *cols[l]);
            out.r[j][l] = r;
            out.r[l][j] = r;
        }
    }
    return out;
}

TestResult chi_squared_test(const std::vector<int>& categories,
                            const std::vector<int>& labels,
                            const std::string& feature_name) {
    if (categories.size() != labels.size() || categories.empty())
        throw DomainError("chi_squared_test: misaligned inputs");
    std::map<int, std::array<double, 2>> cells;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        const int y = labels[i];
        if (y != 0 && y != 1) throw DomainError("labels must be binary");
        cells[categories[i]][y] += 1.0;
    }
    if (cells.size() < 2)
        throw DegenerateInputError("chi_squared_test: fewer than two observed categories");
    const double n = static_cast<double>(categories.size());
    double col[2] = {0.0, 0.0};
    for (const auto& [cat, row] : cells) {
        col[0] += row[0];
        col[1] += row[1];
    }
    double stat = 0.0;
    for (const auto& [cat, row] : cells) {
        const double row_total = row[0] + row[1];
        for (int y = 0; y < 2; ++y) {
            const double e = row_total * col[y] / n;
            if (e > 0.0) stat += (row[y] - e) * (row[y] - e) / e;
        }
    }
    TestResult r;
    r.feature_name = feature_name;
    r.statistic = stat;
    r.dof = static_cast<double>(cells.size() - 1);
    r.p_value = chi_squared_sf(stat, r.dof);
    r.method = "chi_squared";
    return r;
}

TestResult t_test_two_sample(const std::vector<double>& values,
                             const std::vector<int>& labels,
                             TTestVariant variant,
                             const std::string& feature_name) {
    if (values.size() != labels.size()) throw DomainError("t_test: misaligned inputs");
    double s[2] = {0, 0}, ss[2] = {0, 0};
    long long cnt[2] = {0, 0};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int y = labels[i];
        if (y != 0 && y != 1) throw DomainError("labels must be binary");
        s[y] += values[i];
        ++cnt[y];
    }
    if (cnt[0] < 2 || cnt[1] < 2)
        throw DegenerateInputError("t_test: each group needs >= 2 values");
    const double n0 = static_cast<double>(cnt[0]), n1 = static_cast<double>(cnt[1]);
    const double m0 = s[0] / n0, m1 = s[1] / n1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - (labels[i] ? m1 : m0);
        ss[labels[i]] += d * d;
    }
    const double v0 = ss[0] / (n0 - 1.0), v1 = ss[1] / (n1 - 1.0);

    TestResult r;
    r.feature_name = feature_name;
    r.method = variant == TTestVariant::Welch ? "t_welch" : "t_pooled";
    if (v0 == 0.0 && v1 == 0.0) {
        if (m0 != m1) throw DegenerateInputError("t_test: zero variance with unequal means");
        r.statistic = 0.0;
        r.dof = n0 + n1 - 2.0;
        r.p_value = 1.0;
        return r;
    }
    double se, dof;
    if (variant == TTestVariant::Pooled) {
        const double vp = (ss[0] + ss[1]) / (n0 + n1 - 2.0);
        if (vp == 0.0) throw DegenerateInputError("t_test: zero pooled variance");
        se = std::sqrt(vp * (1.0 / n0 + 1.0 / n1));
        dof = n0 + n1 - 2.0;
    } else {
        const double a = v0 / n0, b = v1 / n1;
        se = std::sqrt(a + b);
        if (se == 0.0) throw DegenerateInputError("t_test: zero standard error");
        dof = (a + b) * (a + b) / (a * a / (n0 - 1.0) + b * b / (n1 - 1.0));
    }
    r.statistic = (m0 - m1) / se;
    r.dof = dof;
    r.p_value = student_t_two_sided_p(r.statistic, dof);
    return r;
}

namespace {

int bin_of(double x, int m, FeatureKind kind) {
    if (kind == FeatureKind::Categorical) {
        // Normalized class encodings: class index i encoded as i / (m - 1).
        const int idx = m > 1 ? static_cast<int>(std::lround(x * (m - 1))) : 0;
        return std::clamp(idx, 0, m - 1);
    }
    const int idx = static_cast<int>(std::floor(x * m));
    return std::clamp(idx, 0, m - 1);
}

} // namespace

std::vector<WoeBin> woe_bins(const std::vector<double>& feature,
                             const std::vector<int>& labels, int m, FeatureKind kind) {
    if (feature.size() != labels.size() || feature.empty())
        throw DomainError("woe_bins: misaligned inputs");
    if (m < 1) throw DomainError("woe_bins: m must be >= 1");
    long long total[2] = {0, 0};
    std::vector<std::array<long long, 2>> counts(m, {0, 0});
    for (std::size_t i = 0; i < feature.size(); ++i) {
        const int y = labels[i];
        if (y != 0 && y != 1) throw DomainError("labels must be binary");
        counts[bin_of(feature[i], m, kind)][y] += 1;
        ++total[y];
    }
    if (total[0] == 0 || total[1] == 0)
        throw DegenerateInputError("woe_bins: labels contain a single class");

    std::vector<WoeBin> bins;
    for (int i = 0; i < m; ++i)
        if (counts[i][0] + counts[i][1] > 0) {
            WoeBin b;
            b.bin_index = i;
            b.count_neg = counts[i][0];
            b.count_pos = counts[i][1];
            bins.push_back(b);
        }
    // +0.5 smoothing on class-conditional counts, normalized over retained bins.
    double denom[2] = {0, 0};
    for (const auto& b : bins) {
        denom[0] += b.count_neg + 0.5;
        denom[1] += b.count_pos + 0.5;
    }
    for (auto& b : bins) {
        const double p1 = (b.count_pos + 0.5) / denom[1];
        const double p0 = (b.count_neg + 0.5) / denom[0];
        b.woe = std::log(p1 / p0);
    }
    return bins;
}

IvResult information_value(const std::vector<double>& feature,
                           const std::vector<int>& labels, int m, FeatureKind kind,
                           const std::string& feature_name) {
    IvResult r;
    r.feature_name = feature_name;
    r.bins = woe_bins(feature, labels, m, kind);
    double denom[2] = {0, 0};
    for (const auto& b : r.bins) {
        denom[0] += b.count_neg + 0.5;
        denom[1] += b.count_pos + 0.5;
    }
    double iv = 0.0;
    for (const auto& b : r.bins) {
        const double p1 = (b.count_pos + 0.5) / denom[1];
        const double p0 = (b.count_neg + 0.5) / denom[0];
        iv += (p1 - p0) * b.woe;
    }
    r.iv = iv;
    r.band = iv_band_of(iv);
    return r;
}

} // namespace occurlens
