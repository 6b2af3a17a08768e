#pragma once

#include "occurlens/table.hpp"

#include <string>
#include <vector>

namespace occurlens {

struct TestResult {
    std::string feature_name;
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
    std::string method; // "chi_squared" | "t_welch" | "t_pooled"
};

enum class IvBand { Insignificant, Weak, Medium, Strong };

const char* iv_band_name(IvBand b);
IvBand iv_band_of(double iv);

struct WoeBin {
    int bin_index = 0;
    long long count_pos = 0;
    long long count_neg = 0;
    double woe = 0.0;
};

struct IvResult {
    std::string feature_name;
    double iv = 0.0;
    IvBand band = IvBand::Insignificant;
    std::vector<WoeBin> bins;
};

struct CorrMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> r;
    std::vector<std::string> warnings; // constant columns correlate 0 by convention
};

CorrMatrix pearson_corr_matrix(const FeatureTable& table, bool include_label);

// Pearson correlation of two equal-length vectors; 0 if either is constant.
double pearson_corr(const std::vector<double>& x, const std::vector<double>& y);

// r x 2 contingency test, no continuity correction; dof counts only the
// categories that actually occur.
TestResult chi_squared_test(const std::vector<int>& categories,
                            const std::vector<int>& labels,
                            const std::string& feature_name = {});

enum class TTestVariant { Welch, Pooled };

TestResult t_test_two_sample(const std::vector<double>& values,
                             const std::vector<int>& labels,
                             TTestVariant variant = TTestVariant::Welch,
                             const std::string& feature_name = {});

// WoE per bin with +0.5 Laplace smoothing on class-conditional counts;
// continuous features use m equal-width bins over [0,1], categorical features
// one bin per class; empty bins are dropped.
std::vector<WoeBin> woe_bins(const std::vector<double>& feature,
                             const std::vector<int>& labels, int m, FeatureKind kind);

IvResult information_value(const std::vector<double>& feature,
                           const std::vector<int>& labels, int m, FeatureKind kind,
                           const std::string& feature_name = {});

} // namespace occurlens
