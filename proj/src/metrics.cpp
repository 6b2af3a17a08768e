#include "occurlens/metrics.hpp"

#include "occurlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace occurlens {

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DomainError("roc_auc: misaligned inputs");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midrank sum over positives: AUC = (R1 - n1(n1+1)/2) / (n0 * n1).
    double n1 = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw DomainError("labels must be binary");
        n1 += y;
    }
    const double n0 = static_cast<double>(labels.size()) - n1;
    if (n0 == 0 || n1 == 0)
        throw DegenerateInputError("roc_auc: labels contain a single class");

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j); // average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) rank_sum_pos += mid_rank;
        i = j;
    }
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n0 * n1);
}

std::vector<RocPoint> roc_curve(const std::vector<double>& scores,
                                const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DomainError("roc_curve: misaligned inputs");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double n1 = 0;
    for (int y : labels) n1 += y;
    const double n0 = static_cast<double>(labels.size()) - n1;
    if (n0 == 0 || n1 == 0)
        throw DegenerateInputError("roc_curve: labels contain a single class");

    std::vector<RocPoint> pts;
    pts.push_back({0.0, 0.0});
    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]])
                tp += 1;
            else
                fp += 1;
        }
        pts.push_back({fp / n0, tp / n1});
        i = j;
    }
    return pts;
}

PrecisionCurve precision_curve(const std::vector<double>& prob_zero,
                               const std::vector<int>& labels,
                               const std::vector<double>& grid) {
    if (prob_zero.size() != labels.size() || prob_zero.empty())
        throw DomainError("precision_curve: misaligned inputs");
    for (double p : prob_zero)
        if (p < 0.0 || p > 1.0) throw DomainError("prob_zero outside [0,1]");

    std::vector<double> thresholds = grid;
    if (thresholds.empty()) {
        thresholds = prob_zero;
        thresholds.push_back(0.0);
        thresholds.push_back(1.0);
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    PrecisionCurve out;
    out.n = prob_zero.size();
    for (double c : thresholds) {
        long long predicted = 0, correct = 0;
        for (std::size_t i = 0; i < prob_zero.size(); ++i) {
            if (prob_zero[i] >= c) {
                ++predicted;
                if (labels[i] == 0) ++correct;
            }
        }
        double p;
        if (predicted == 0) {
            if (c != 1.0) continue; // undefined, omitted
            p = 1.0;                // P(1) := 1 by convention
        } else {
            p = static_cast<double>(correct) / static_cast<double>(predicted);
        }
        out.thresholds.push_back(c);
        out.precision.push_back(p);
        out.frac_predicted_zero.push_back(static_cast<double>(predicted) /
                                          static_cast<double>(out.n));
    }
    return out;
}

GammaPrecision gamma_precision(const PrecisionCurve& curve, double gamma) {
    if (gamma < 0.0 || gamma >= 1.0) throw DomainError("gamma must be in [0,1)");
    GammaPrecision g;
    const double need = static_cast<double>(curve.n) * gamma;
    for (std::size_t i = curve.thresholds.size(); i-- > 0;) {
        const double predicted = curve.frac_predicted_zero[i] * static_cast<double>(curve.n);
        if (!(predicted > need)) continue; // strict inequality
        if (!g.feasible || curve.precision[i] > g.p_star) {
            g.feasible = true;
            g.p_star = curve.precision[i];
            g.achieving_c = curve.thresholds[i];
        }
    }
    return g;
}

} // namespace occurlens
