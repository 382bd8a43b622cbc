#include "noisegate/cfs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ng {
namespace {

// Absolute Pearson correlations between all columns (features + label).
struct CorrelationTable {
    std::size_t nf = 0;
    std::vector<double> feature_label;      // |r(f, y)|
    std::vector<double> feature_feature;    // |r(f, g)|, row-major upper use

    double ff(std::size_t a, std::size_t b) const { return feature_feature[a * nf + b]; }
};

CorrelationTable build_table(const Dataset& ds) {
    const std::size_t n = ds.rows.size();
    const std::size_t nf = ds.feature_names.size();

    std::vector<double> mean(nf, 0.0), sd(nf, 0.0);
    for (const auto& row : ds.rows)
        for (std::size_t f = 0; f < nf; ++f) mean[f] += row[f];
    for (std::size_t f = 0; f < nf; ++f) mean[f] /= static_cast<double>(n);
    for (const auto& row : ds.rows)
        for (std::size_t f = 0; f < nf; ++f) {
            const double d = row[f] - mean[f];
            sd[f] += d * d;
        }
    for (std::size_t f = 0; f < nf; ++f) sd[f] = std::sqrt(sd[f]);

    double label_mean = 0.0;
    for (int l : ds.labels) label_mean += l;
    label_mean /= static_cast<double>(n);
    double label_sd = 0.0;
    for (int l : ds.labels) label_sd += (l - label_mean) * (l - label_mean);
    label_sd = std::sqrt(label_sd);

    CorrelationTable t;
    t.nf = nf;
    t.feature_label.assign(nf, 0.0);
    t.feature_feature.assign(nf * nf, 0.0);

    for (std::size_t f = 0; f < nf; ++f) {
        if (sd[f] <= 0.0 || label_sd <= 0.0) continue;  // constant column: no signal
        double cov = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            cov += (ds.rows[r][f] - mean[f]) * (ds.labels[r] - label_mean);
        t.feature_label[f] = std::fabs(cov / (sd[f] * label_sd));
    }
    for (std::size_t a = 0; a < nf; ++a) {
        t.feature_feature[a * nf + a] = 1.0;
        for (std::size_t b = a + 1; b < nf; ++b) {
            double r = 0.0;
            if (sd[a] > 0.0 && sd[b] > 0.0) {
                double cov = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    cov += (ds.rows[i][a] - mean[a]) * (ds.rows[i][b] - mean[b]);
                r = std::fabs(cov / (sd[a] * sd[b]));
            }
            t.feature_feature[a * nf + b] = r;
            t.feature_feature[b * nf + a] = r;
        }
    }
    return t;
}

double merit_from_table(const CorrelationTable& t, const std::vector<std::size_t>& subset) {
    const auto k = static_cast<double>(subset.size());
    if (subset.empty()) return 0.0;
    double rcf = 0.0;
    for (std::size_t f : subset) rcf += t.feature_label[f];
    rcf /= k;
    double rff = 0.0;
    if (subset.size() > 1) {
        for (std::size_t i = 0; i < subset.size(); ++i)
            for (std::size_t j = i + 1; j < subset.size(); ++j) rff += t.ff(subset[i], subset[j]);
        rff /= k * (k - 1.0) / 2.0;
    }
    const double denom = k + k * (k - 1.0) * rff;
    if (denom <= 0.0) return 0.0;
    return k * rcf / std::sqrt(denom);
}

void check_cfs_input(const Dataset& ds) {
    if (ds.rows.size() < 2) throw std::invalid_argument("cfs: need at least 2 rows");
    if (!ds.labeled() || ds.labels.size() != ds.rows.size())
        throw std::invalid_argument("cfs: dataset must be labeled");
    if (ds.feature_names.empty()) throw std::invalid_argument("cfs: no features");
}

}  // namespace

double cfs_merit(const Dataset& ds, const std::vector<std::size_t>& subset) {
    check_cfs_input(ds);
    for (std::size_t f : subset)
        if (f >= ds.feature_names.size()) throw std::invalid_argument("cfs_merit: index out of range");
    return merit_from_table(build_table(ds), subset);
}

std::vector<std::string> cfs_select(const Dataset& ds) {
    check_cfs_input(ds);
    const auto table = build_table(ds);
    const std::size_t nf = ds.feature_names.size();

    std::vector<std::size_t> current(nf);
    for (std::size_t i = 0; i < nf; ++i) current[i] = i;

    // candidates visited in name order so merit ties resolve deterministically
    std::vector<std::size_t> by_name(nf);
    for (std::size_t i = 0; i < nf; ++i) by_name[i] = i;
    std::sort(by_name.begin(), by_name.end(), [&](std::size_t a, std::size_t b) {
        return ds.feature_names[a] < ds.feature_names[b];
    });

    double merit = merit_from_table(table, current);
    while (current.size() > 1) {
        double best_merit = -1.0;
        std::size_t best_drop = nf;  // sentinel
        for (std::size_t f : by_name) {
            const auto it = std::find(current.begin(), current.end(), f);
            if (it == current.end()) continue;
            std::vector<std::size_t> reduced;
            reduced.reserve(current.size() - 1);
            for (std::size_t g : current)
                if (g != f) reduced.push_back(g);
            const double m = merit_from_table(table, reduced);
            if (m > best_merit) {
                best_merit = m;
                best_drop = f;
            }
        }
        // accept merit-preserving removals too: an exact duplicate leaves the
        // merit unchanged and should still be shed
        if (best_drop == nf || best_merit < merit - 1e-12) break;
        current.erase(std::find(current.begin(), current.end(), best_drop));
        merit = std::max(merit, best_merit);
    }

    std::vector<std::string> names;
    names.reserve(current.size());
    for (std::size_t f : current) names.push_back(ds.feature_names[f]);
    return names;
}

}  // namespace ng
