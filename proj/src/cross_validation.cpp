#include "noisegate/cross_validation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "noisegate/metrics.hpp"
#include "noisegate/rng.hpp"

namespace ng {

CvReport cross_validate(const Dataset& ds, const TrainerConfig& cfg, std::size_t folds) {
    if (folds < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
    if (ds.rows.size() < folds)
        throw std::invalid_argument("cross_validate: more folds than rows");
    if (!ds.labeled() || ds.labels.size() != ds.rows.size())
        throw std::invalid_argument("cross_validate: dataset must be labeled");

    // seeded shuffle, then deal round-robin
    std::vector<std::size_t> order(ds.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(Rng::derive(cfg.seed, 0x6376ULL));  // cv stream
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    std::vector<std::size_t> fold_of(ds.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;

    CvReport report;
    report.seed = cfg.seed;
    report.folds = folds;
    report.predictions.resize(ds.rows.size());

    for (std::size_t fold = 0; fold < folds; ++fold) {
        Dataset train_part;
        train_part.feature_names = ds.feature_names;
        std::vector<std::size_t> test_rows;
        for (std::size_t r = 0; r < ds.rows.size(); ++r) {
            if (fold_of[r] == fold) {
                test_rows.push_back(r);
            } else {
                train_part.rows.push_back(ds.rows[r]);
                train_part.labels.push_back(ds.labels[r]);
            }
        }

        int pos = 0;
        for (int l : train_part.labels) pos += l;
        if (pos == 0 || pos == static_cast<int>(train_part.labels.size())) {
            report.warnings.push_back("fold " + std::to_string(fold) +
                                      ": training part has a single class");
        }

        // selection, when requested, happens inside the fold
        const TrainedModel model = train(train_part, cfg);

        std::vector<std::size_t> column_map(model.feature_names.size());
        for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
            const auto it =
                std::find(ds.feature_names.begin(), ds.feature_names.end(), model.feature_names[i]);
            column_map[i] = static_cast<std::size_t>(it - ds.feature_names.begin());
        }
        std::vector<double> projected(model.feature_names.size());
        for (std::size_t r : test_rows) {
            for (std::size_t i = 0; i < column_map.size(); ++i)
                projected[i] = ds.rows[r][column_map[i]];
            report.predictions[r] = {r, ds.labels[r], predict_proba(model, projected)};
        }
    }

    std::vector<ScoredLabel> scored;
    scored.reserve(report.predictions.size());
    for (const auto& p : report.predictions) scored.push_back({p.probability, p.label});
    report.auc = auc(scored);
    report.accuracy_at_half = accuracy_at(scored, 0.5);
    return report;
}

std::string format_report(const CvReport& report) {
    std::ostringstream out;
    out << "folds " << report.folds << " seed " << report.seed << '\n';
    out << "auc " << report.auc << '\n';
    out << "accuracy@0.5 " << report.accuracy_at_half << '\n';
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace ng
