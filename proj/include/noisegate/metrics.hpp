#pragma once

#include <cstddef>
#include <vector>

namespace ng {

struct ScoredLabel {
    double score = 0.0;
    int label = 0;  // 1 positive, 0 negative
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // thresholds descending, (0,0) to (1,1)
};

struct MannWhitneyResult {
    double u = 0.0;  // min(U_a, U_b)
    double p_value = 1.0;  // two-tailed
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double z = 0.0;
};

// One point per distinct score (ties share a point) plus sentinels.
RocCurve roc_curve(const std::vector<ScoredLabel>& scored);

double auc(const RocCurve& curve);
double auc(const std::vector<ScoredLabel>& scored);

// Fraction classified correctly when predicting positive at score >= threshold.
double accuracy_at(const std::vector<ScoredLabel>& scored, double threshold);

// Midrank ties, normal approximation with tie-corrected variance and
// continuity correction. Identical samples give u = n1*n2/2, p = 1.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ng
