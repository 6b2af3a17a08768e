#pragma once

#include <optional>
#include <vector>

namespace occurlens {

// Mann-Whitney AUC with ties at half credit. Throws DegenerateInputError when
// only one class is present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RocPoint {
    double fpr;
    double tpr;
};

// ROC polyline (threshold sweep, ties grouped); starts at (0,0), ends at (1,1).
std::vector<RocPoint> roc_curve(const std::vector<double>& scores,
                                const std::vector<int>& labels);

struct PrecisionCurve {
    std::vector<double> thresholds;          // ascending, in [0,1]
    std::vector<double> precision;           // class-zero precision P(c)
    std::vector<double> frac_predicted_zero; // nonincreasing in c
    std::size_t n = 0;
};

struct GammaPrecision {
    bool feasible = false;
    double p_star = 0.0;
    double achieving_c = 0.0;
};

// Class-zero precision swept over prob_zero thresholds. The grid defaults to
// the sorted unique prob_zero values plus {0, 1}. Thresholds whose
// predicted-zero set is empty are omitted, except c = 1 which is fixed to
// P(1) = 1 by convention.
PrecisionCurve precision_curve(const std::vector<double>& prob_zero,
                               const std::vector<int>& labels,
                               const std::vector<double>& grid = {});

// P*_gamma = max{ P(c) : #predicted-zero(c) > n * gamma }, largest achieving
// c on ties; infeasible when no threshold qualifies.
GammaPrecision gamma_precision(const PrecisionCurve& curve, double gamma);

} // namespace occurlens
