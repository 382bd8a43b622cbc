#include "noisegate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ng {

RocCurve roc_curve(const std::vector<ScoredLabel>& scored) {
    std::size_t pos = 0, neg = 0;
    for (const auto& s : scored) (s.label ? pos : neg) += 1;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc_curve: need both classes");

    std::vector<ScoredLabel> sorted = scored;
    std::sort(sorted.begin(), sorted.end(),
              [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double s = sorted[i].score;
        while (i < sorted.size() && sorted[i].score == s) {
            (sorted[i].label ? tp : fp) += 1;  // ties share one point
            ++i;
        }
        curve.points.push_back({s, static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return area;
}

double auc(const std::vector<ScoredLabel>& scored) { return auc(roc_curve(scored)); }

double accuracy_at(const std::vector<ScoredLabel>& scored, double threshold) {
    if (scored.empty()) throw std::invalid_argument("accuracy_at: empty input");
    std::size_t correct = 0;
    for (const auto& s : scored) {
        const int predicted = s.score >= threshold ? 1 : 0;
        if (predicted == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(scored.size());
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
    const auto n1 = static_cast<double>(a.size());
    const auto n2 = static_cast<double>(b.size());
    const std::size_t n = a.size() + b.size();

    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(n);
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    // midranks and the tie correction term sum(t^3 - t)
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const auto t = static_cast<double>(j - i);
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_a += midrank;
        tie_term += t * t * t - t;
        i = j;
    }

    const double u_a = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const double u_b = n1 * n2 - u_a;

    MannWhitneyResult res;
    res.u = std::min(u_a, u_b);
    res.n1 = a.size();
    res.n2 = b.size();
    const double mu = n1 * n2 / 2.0;
    const auto total = static_cast<double>(n);
    const double var =
        n1 * n2 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if (var <= 0.0) {  // all values identical
        res.z = 0.0;
        res.p_value = 1.0;
        return res;
    }
    const double diff = std::max(std::fabs(res.u - mu) - 0.5, 0.0);  // continuity correction
    res.z = diff / std::sqrt(var);
    res.p_value = std::clamp(std::erfc(res.z / std::sqrt(2.0)), 0.0, 1.0);
    return res;
}

}  // namespace ng
