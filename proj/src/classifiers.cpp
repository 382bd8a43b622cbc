#include "noisegate/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "noisegate/cfs.hpp"
#include "noisegate/rng.hpp"

namespace ng {
namespace {

constexpr double kVarianceFloor = 1e-9;

void check_training_data(const Dataset& ds, const TrainerConfig& cfg) {
    if (cfg.set == FeatureSet::cfs_subset)
        throw std::invalid_argument(
            "train: cfs-subset is not an extractable base set; pass the base set and enable cfs");
    if (ds.rows.empty()) throw std::invalid_argument("train: empty dataset");
    if (!ds.labeled() || ds.labels.size() != ds.rows.size())
        throw std::invalid_argument("train: dataset must be fully labeled");
    if (cfg.cfs) {
        int pos = 0;
        for (int l : ds.labels) pos += l;
        if (pos == 0 || pos == static_cast<int>(ds.labels.size()))
            throw std::invalid_argument("train: cfs needs examples of both classes");
    }
    for (const auto& row : ds.rows)
        if (row.size() != ds.feature_names.size())
            throw std::invalid_argument("train: ragged dataset");
}

std::uint64_t row_hash(const std::vector<double>& row, int label) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix_byte = [&h](unsigned char b) {
        h ^= b;
        h *= 1099511628211ULL;
    };
    for (double v : row) {
        if (v == 0.0) v = 0.0;  // merge +/-0
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>((bits >> (8 * i)) & 0xff));
    }
    mix_byte(static_cast<unsigned char>(label));
    return h;
}

double entropy2(std::size_t pos, std::size_t n) {
    if (n == 0 || pos == 0 || pos == n) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(n);
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

// Shared recursive builder for single trees and forest members. For forests a
// per-split random feature subset is drawn from rng.
class TreeBuilder {
public:
    TreeBuilder(const Dataset& ds, std::size_t min_rows, std::size_t features_per_split, Rng* rng)
        : ds_(ds), min_rows_(min_rows), features_per_split_(features_per_split), rng_(rng) {}

    std::vector<TreeNode> build(const std::vector<std::size_t>& rows) {
        nodes_.clear();
        grow(rows);
        return std::move(nodes_);
    }

private:
    struct Split {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double gain_ratio = 0.0;
    };

    int grow(const std::vector<std::size_t>& rows) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();

        std::size_t pos = 0;
        for (std::size_t r : rows) pos += static_cast<std::size_t>(ds_.labels[r]);
        const std::size_t n = rows.size();

        auto make_leaf = [&] {
            nodes_[id].feature = -1;
            nodes_[id].p_positive =
                (static_cast<double>(pos) + 1.0) / (static_cast<double>(n) + 2.0);
            nodes_[id].vote = pos * 2 > n ? 1 : 0;
            return id;
        };

        if (pos == 0 || pos == n || n < min_rows_) return make_leaf();

        const Split split = best_split(rows, pos);
        if (!split.found) return make_leaf();

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (ds_.rows[r][split.feature] <= split.threshold ? left : right).push_back(r);

        nodes_[id].feature = static_cast<int>(split.feature);
        nodes_[id].threshold = split.threshold;
        const int l = grow(left);
        nodes_[id].left = l;
        const int r = grow(right);
        nodes_[id].right = r;
        return id;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t total = ds_.feature_names.size();
        if (features_per_split_ == 0 || features_per_split_ >= total || rng_ == nullptr) {
            std::vector<std::size_t> all(total);
            for (std::size_t i = 0; i < total; ++i) all[i] = i;
            return all;
        }
        // partial Fisher-Yates, then sorted so evaluation order is canonical
        std::vector<std::size_t> pool(total);
        for (std::size_t i = 0; i < total; ++i) pool[i] = i;
        for (std::size_t i = 0; i < features_per_split_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_->below(total - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(features_per_split_);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    Split best_split(const std::vector<std::size_t>& rows, std::size_t pos_total) {
        Split best;
        const std::size_t n = rows.size();
        const double parent = entropy2(pos_total, n);
        std::vector<std::pair<double, int>> vals(n);
        for (std::size_t f : candidate_features()) {
            for (std::size_t i = 0; i < n; ++i)
                vals[i] = {ds_.rows[rows[i]][f], ds_.labels[rows[i]]};
            std::sort(vals.begin(), vals.end());
            std::size_t left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_n;
                left_pos += static_cast<std::size_t>(vals[i].second);
                if (vals[i].first == vals[i + 1].first) continue;
                const std::size_t right_n = n - left_n;
                const std::size_t right_pos = pos_total - left_pos;
                const double wl = static_cast<double>(left_n) / static_cast<double>(n);
                const double wr = static_cast<double>(right_n) / static_cast<double>(n);
                const double gain =
                    parent - wl * entropy2(left_pos, left_n) - wr * entropy2(right_pos, right_n);
                if (gain <= 1e-12) continue;
                const double split_info = -wl * std::log(wl) - wr * std::log(wr);
                const double ratio = gain / split_info;
                if (ratio > best.gain_ratio + 1e-15) {
                    best.found = true;
                    best.gain_ratio = ratio;
                    best.feature = f;
                    best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        return best;
    }

    const Dataset& ds_;
    std::size_t min_rows_;
    std::size_t features_per_split_;
    Rng* rng_;
    std::vector<TreeNode> nodes_;
};

double tree_probability(const std::vector<TreeNode>& nodes, const std::vector<double>& row) {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(i)];
        i = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(i)].p_positive;
}

int tree_vote(const std::vector<TreeNode>& nodes, const std::vector<double>& row) {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(i)];
        i = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(i)].vote;
}

Dataset apply_cfs(const Dataset& ds, const TrainerConfig& cfg) {
    if (!cfg.cfs) return ds;
    const auto selected = cfs_select(ds);
    std::vector<std::size_t> idx;
    idx.reserve(selected.size());
    for (const auto& name : selected) {
        const auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), name);
        idx.push_back(static_cast<std::size_t>(it - ds.feature_names.begin()));
    }
    Dataset out;
    out.feature_names = selected;
    out.labels = ds.labels;
    out.rows.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        std::vector<double> r(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[i] = row[idx[i]];
        out.rows.push_back(std::move(r));
    }
    return out;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ClassifierKind classifier_from_string(const std::string& s) {
    if (s == "naive-bayes" || s == "nb") return ClassifierKind::naive_bayes;
    if (s == "knn") return ClassifierKind::knn;
    if (s == "tree") return ClassifierKind::tree;
    if (s == "random-forest" || s == "rf") return ClassifierKind::random_forest;
    throw std::invalid_argument("unknown classifier '" + s + "'");
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::naive_bayes: return "naive-bayes";
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::tree: return "tree";
        case ClassifierKind::random_forest: return "random-forest";
    }
    throw std::invalid_argument("unknown classifier kind");
}

Dataset canonical_row_order(const Dataset& ds) {
    std::vector<std::size_t> order(ds.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::uint64_t> hashes(ds.rows.size());
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        hashes[i] = row_hash(ds.rows[i], ds.labeled() ? ds.labels[i] : 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
        if (ds.rows[a] != ds.rows[b]) return ds.rows[a] < ds.rows[b];
        if (ds.labeled() && ds.labels[a] != ds.labels[b]) return ds.labels[a] < ds.labels[b];
        return false;
    });
    Dataset out;
    out.feature_names = ds.feature_names;
    out.rows.reserve(ds.rows.size());
    for (std::size_t i : order) {
        out.rows.push_back(ds.rows[i]);
        if (ds.labeled()) out.labels.push_back(ds.labels[i]);
    }
    return out;
}

TrainedModel train_naive_bayes(const Dataset& input, const TrainerConfig& cfg) {
    check_training_data(input, cfg);
    const Dataset ds = canonical_row_order(apply_cfs(input, cfg));
    const std::size_t nf = ds.feature_names.size();

    TrainedModel m;
    m.kind = ClassifierKind::naive_bayes;
    m.base_set = cfg.set;
    m.pre = cfg.pre;
    m.feature_names = ds.feature_names;
    m.seed = cfg.seed;

    std::size_t count[2] = {0, 0};
    for (int l : ds.labels) ++count[l];
    m.prior_pos = static_cast<double>(count[1]) / static_cast<double>(ds.rows.size());

    for (int c = 0; c < 2; ++c) {
        m.nb_mean[c].assign(nf, 0.0);
        m.nb_var[c].assign(nf, 0.0);
    }
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        const int c = ds.labels[r];
        for (std::size_t f = 0; f < nf; ++f) m.nb_mean[c][f] += ds.rows[r][f];
    }
    // an absent class keeps zero mean and floor variance; the zero prior
    // already sends its log-likelihood to -inf
    for (int c = 0; c < 2; ++c)
        for (std::size_t f = 0; f < nf; ++f)
            if (count[c] > 0) m.nb_mean[c][f] /= static_cast<double>(count[c]);
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        const int c = ds.labels[r];
        for (std::size_t f = 0; f < nf; ++f) {
            const double d = ds.rows[r][f] - m.nb_mean[c][f];
            m.nb_var[c][f] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t f = 0; f < nf; ++f)
            m.nb_var[c][f] = std::max(
                count[c] > 0 ? m.nb_var[c][f] / static_cast<double>(count[c]) : kVarianceFloor,
                kVarianceFloor);
    return m;
}

TrainedModel train_knn(const Dataset& input, const TrainerConfig& cfg) {
    check_training_data(input, cfg);
    if (cfg.k < 1 || cfg.k > 25 || cfg.k % 2 == 0)
        throw std::invalid_argument("train_knn: k must be odd and within [1, 25]");
    if (static_cast<std::size_t>(cfg.k) > input.rows.size())
        throw std::invalid_argument("train_knn: k exceeds training size");
    const Dataset ds = canonical_row_order(apply_cfs(input, cfg));
    const std::size_t nf = ds.feature_names.size();

    TrainedModel m;
    m.kind = ClassifierKind::knn;
    m.base_set = cfg.set;
    m.pre = cfg.pre;
    m.feature_names = ds.feature_names;
    m.seed = cfg.seed;
    m.k = cfg.k;

    m.scale_mean.assign(nf, 0.0);
    m.scale_std.assign(nf, 0.0);
    for (const auto& row : ds.rows)
        for (std::size_t f = 0; f < nf; ++f) m.scale_mean[f] += row[f];
    for (std::size_t f = 0; f < nf; ++f) m.scale_mean[f] /= static_cast<double>(ds.rows.size());
    for (const auto& row : ds.rows)
        for (std::size_t f = 0; f < nf; ++f) {
            const double d = row[f] - m.scale_mean[f];
            m.scale_std[f] += d * d;
        }
    for (std::size_t f = 0; f < nf; ++f) {
        m.scale_std[f] = std::sqrt(m.scale_std[f] / static_cast<double>(ds.rows.size()));
        if (m.scale_std[f] <= 0.0) m.scale_std[f] = 1.0;  // constant feature: no scaling
    }

    m.knn_rows.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        std::vector<double> std_row(nf);
        for (std::size_t f = 0; f < nf; ++f) std_row[f] = (row[f] - m.scale_mean[f]) / m.scale_std[f];
        m.knn_rows.push_back(std::move(std_row));
    }
    m.knn_labels = ds.labels;
    return m;
}

TrainedModel train_tree(const Dataset& input, const TrainerConfig& cfg) {
    check_training_data(input, cfg);
    const Dataset ds = canonical_row_order(apply_cfs(input, cfg));

    TrainedModel m;
    m.kind = ClassifierKind::tree;
    m.base_set = cfg.set;
    m.pre = cfg.pre;
    m.feature_names = ds.feature_names;
    m.seed = cfg.seed;
    m.trees = 1;

    std::vector<std::size_t> rows(ds.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    TreeBuilder builder(ds, 4, 0, nullptr);
    m.forest.push_back(builder.build(rows));
    return m;
}

TrainedModel train_random_forest(const Dataset& input, const TrainerConfig& cfg) {
    check_training_data(input, cfg);
    if (cfg.trees < 1) throw std::invalid_argument("train_random_forest: trees must be >= 1");
    const Dataset ds = canonical_row_order(apply_cfs(input, cfg));
    const std::size_t n = ds.rows.size();
    const auto per_split = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(ds.feature_names.size()))));

    TrainedModel m;
    m.kind = ClassifierKind::random_forest;
    m.base_set = cfg.set;
    m.pre = cfg.pre;
    m.feature_names = ds.feature_names;
    m.seed = cfg.seed;
    m.trees = cfg.trees;
    m.forest.reserve(static_cast<std::size_t>(cfg.trees));

    for (int t = 0; t < cfg.trees; ++t) {
        Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> sample(n);
        for (std::size_t i = 0; i < n; ++i) sample[i] = static_cast<std::size_t>(rng.below(n));
        std::sort(sample.begin(), sample.end());
        TreeBuilder builder(ds, 2, per_split, &rng);
        m.forest.push_back(builder.build(sample));
    }
    return m;
}

TrainedModel train(const Dataset& ds, const TrainerConfig& cfg) {
    switch (cfg.kind) {
        case ClassifierKind::naive_bayes: return train_naive_bayes(ds, cfg);
        case ClassifierKind::knn: return train_knn(ds, cfg);
        case ClassifierKind::tree: return train_tree(ds, cfg);
        case ClassifierKind::random_forest: return train_random_forest(ds, cfg);
    }
    throw std::invalid_argument("unknown classifier kind");
}

double predict_proba(const TrainedModel& m, const std::vector<double>& row) {
    if (row.size() != m.feature_names.size())
        throw std::invalid_argument("predict_proba: row width does not match the model");

    switch (m.kind) {
        case ClassifierKind::naive_bayes: {
            double log_like[2] = {std::log(1.0 - m.prior_pos), std::log(m.prior_pos)};
            for (int c = 0; c < 2; ++c)
                for (std::size_t f = 0; f < row.size(); ++f) {
                    const double var = m.nb_var[c][f];
                    const double d = row[f] - m.nb_mean[c][f];
                    log_like[c] += -0.5 * std::log(2.0 * 3.14159265358979323846 * var) -
                                   d * d / (2.0 * var);
                }
            const double hi = std::max(log_like[0], log_like[1]);
            const double e0 = std::exp(log_like[0] - hi);
            const double e1 = std::exp(log_like[1] - hi);
            return e1 / (e0 + e1);
        }
        case ClassifierKind::knn: {
            std::vector<double> std_row(row.size());
            for (std::size_t f = 0; f < row.size(); ++f)
                std_row[f] = (row[f] - m.scale_mean[f]) / m.scale_std[f];
            std::vector<std::pair<double, std::size_t>> dist(m.knn_rows.size());
            for (std::size_t r = 0; r < m.knn_rows.size(); ++r) {
                double acc = 0.0;
                for (std::size_t f = 0; f < row.size(); ++f) {
                    const double d = std_row[f] - m.knn_rows[r][f];
                    acc += d * d;
                }
                dist[r] = {acc, r};  // index tiebreak keeps ordering total
            }
            std::sort(dist.begin(), dist.end());
            int pos = 0;
            for (int i = 0; i < m.k; ++i) pos += m.knn_labels[dist[static_cast<std::size_t>(i)].second];
            return (static_cast<double>(pos) + 1.0) / (static_cast<double>(m.k) + 2.0);
        }
        case ClassifierKind::tree:
            return tree_probability(m.forest.front(), row);
        case ClassifierKind::random_forest: {
            int votes = 0;
            for (const auto& tree : m.forest) votes += tree_vote(tree, row);
            return static_cast<double>(votes) / static_cast<double>(m.forest.size());
        }
    }
    throw std::invalid_argument("unknown classifier kind");
}

double predict_proba(const TrainedModel& m, const FeatureVector& fv) {
    std::vector<double> row(m.feature_names.size());
    for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
        const auto it = std::find(fv.names.begin(), fv.names.end(), m.feature_names[i]);
        if (it == fv.names.end())
            throw std::invalid_argument("predict_proba: missing feature '" + m.feature_names[i] + "'");
        row[i] = fv.values[static_cast<std::size_t>(it - fv.names.begin())];
    }
    return predict_proba(m, row);
}

void save_model(const std::string& path, const TrainedModel& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "NGMODEL v1\n";
    out << "kind " << to_string(m.kind) << '\n';
    out << "set " << to_string(m.base_set) << '\n';
    out << "highpass " << (m.pre.highpass ? 1 : 0) << '\n';
    out << "mmse " << (m.pre.mmse ? 1 : 0) << '\n';
    out << "seed " << m.seed << '\n';
    out << "features " << m.feature_names.size() << '\n';
    for (const auto& name : m.feature_names) out << name << '\n';

    switch (m.kind) {
        case ClassifierKind::naive_bayes:
            out << "prior_pos " << format_value(m.prior_pos) << '\n';
            for (std::size_t f = 0; f < m.feature_names.size(); ++f)
                out << format_value(m.nb_mean[0][f]) << ' ' << format_value(m.nb_var[0][f]) << ' '
                    << format_value(m.nb_mean[1][f]) << ' ' << format_value(m.nb_var[1][f]) << '\n';
            break;
        case ClassifierKind::knn:
            out << "k " << m.k << '\n';
            for (std::size_t f = 0; f < m.feature_names.size(); ++f)
                out << format_value(m.scale_mean[f]) << ' ' << format_value(m.scale_std[f]) << '\n';
            out << "rows " << m.knn_rows.size() << '\n';
            for (std::size_t r = 0; r < m.knn_rows.size(); ++r) {
                out << m.knn_labels[r];
                for (double v : m.knn_rows[r]) out << ' ' << format_value(v);
                out << '\n';
            }
            break;
        case ClassifierKind::tree:
        case ClassifierKind::random_forest:
            out << "trees " << m.forest.size() << '\n';
            for (const auto& tree : m.forest) {
                out << "nodes " << tree.size() << '\n';
                for (const auto& nd : tree)
                    out << nd.feature << ' ' << format_value(nd.threshold) << ' ' << nd.left << ' '
                        << nd.right << ' ' << format_value(nd.p_positive) << ' ' << nd.vote << '\n';
            }
            break;
    }
    out << "END\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string magic;
    std::getline(in, magic);
    if (magic != "NGMODEL v1") throw std::runtime_error(path + ": not a NGMODEL v1 file");

    auto expect = [&](const char* key) {
        std::string word;
        if (!(in >> word) || word != key)
            throw std::runtime_error(path + ": expected '" + key + "', got '" + word + "'");
    };

    TrainedModel m;
    std::string word;
    expect("kind");
    in >> word;
    m.kind = classifier_from_string(word);
    expect("set");
    in >> word;
    m.base_set = feature_set_from_string(word);
    int flag = 0;
    expect("highpass");
    in >> flag;
    m.pre.highpass = flag != 0;
    expect("mmse");
    in >> flag;
    m.pre.mmse = flag != 0;
    expect("seed");
    in >> m.seed;
    std::size_t nf = 0;
    expect("features");
    in >> nf;
    m.feature_names.resize(nf);
    for (auto& name : m.feature_names)
        if (!(in >> name)) throw std::runtime_error(path + ": truncated feature list");

    switch (m.kind) {
        case ClassifierKind::naive_bayes:
            expect("prior_pos");
            in >> m.prior_pos;
            for (int c = 0; c < 2; ++c) {
                m.nb_mean[c].resize(nf);
                m.nb_var[c].resize(nf);
            }
            for (std::size_t f = 0; f < nf; ++f)
                in >> m.nb_mean[0][f] >> m.nb_var[0][f] >> m.nb_mean[1][f] >> m.nb_var[1][f];
            break;
        case ClassifierKind::knn: {
            expect("k");
            in >> m.k;
            m.scale_mean.resize(nf);
            m.scale_std.resize(nf);
            for (std::size_t f = 0; f < nf; ++f) in >> m.scale_mean[f] >> m.scale_std[f];
            std::size_t rows = 0;
            expect("rows");
            in >> rows;
            m.knn_rows.assign(rows, std::vector<double>(nf));
            m.knn_labels.resize(rows);
            for (std::size_t r = 0; r < rows; ++r) {
                in >> m.knn_labels[r];
                for (std::size_t f = 0; f < nf; ++f) in >> m.knn_rows[r][f];
            }
            break;
        }
        case ClassifierKind::tree:
        case ClassifierKind::random_forest: {
            std::size_t trees = 0;
            expect("trees");
            in >> trees;
            m.trees = static_cast<int>(trees);
            m.forest.resize(trees);
            for (auto& tree : m.forest) {
                std::size_t nodes = 0;
                expect("nodes");
                in >> nodes;
                tree.resize(nodes);
                for (auto& nd : tree)
                    in >> nd.feature >> nd.threshold >> nd.left >> nd.right >> nd.p_positive >>
                        nd.vote;
            }
            break;
        }
    }
    expect("END");
    if (!in) throw std::runtime_error(path + ": truncated model file");
    return m;
}

}  // namespace ng
