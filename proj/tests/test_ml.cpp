#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "noisegate/cfs.hpp"
#include "noisegate/classifiers.hpp"
#include "noisegate/cross_validation.hpp"
#include "noisegate/rng.hpp"

using namespace ng;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

Dataset one_dim(const std::vector<double>& xs, const std::vector<int>& labels) {
    Dataset ds;
    ds.feature_names = {"f0"};
    for (double x : xs) ds.rows.push_back({x});
    ds.labels = labels;
    return ds;
}

// two gaussian blobs in 2-D, positives around (+c, +c)
Dataset blobs(std::size_t per_class, double c, double sigma, std::uint64_t seed) {
    Dataset ds;
    ds.feature_names = {"f0", "f1"};
    Rng rng(seed);
    for (std::size_t i = 0; i < per_class; ++i) {
        ds.rows.push_back({c + sigma * rng.normal(), c + sigma * rng.normal()});
        ds.labels.push_back(1);
        ds.rows.push_back({-c + sigma * rng.normal(), -c + sigma * rng.normal()});
        ds.labels.push_back(0);
    }
    return ds;
}

TrainerConfig config(ClassifierKind kind, std::uint64_t seed = 0) {
    TrainerConfig cfg;
    cfg.kind = kind;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("naive bayes separates distant gaussians") {
    Dataset train_ds;
    train_ds.feature_names = {"f0"};
    Rng rng(100);
    for (int i = 0; i < 100; ++i) {
        train_ds.rows.push_back({rng.normal()});
        train_ds.labels.push_back(0);
        train_ds.rows.push_back({10.0 + rng.normal()});
        train_ds.labels.push_back(1);
    }
    const auto model = train_naive_bayes(train_ds, config(ClassifierKind::naive_bayes));

    int correct = 0, total = 0;
    for (int i = 0; i < 200; ++i) {
        const int label = i % 2;
        const double x = label ? 10.0 + rng.normal() : rng.normal();
        const double p = predict_proba(model, std::vector<double>{x});
        correct += (p >= 0.5) == (label == 1);
        ++total;
    }
    CHECK(static_cast<double>(correct) / total >= 0.99);
    CHECK(predict_proba(model, std::vector<double>{5.0}) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(predict_proba(model, std::vector<double>{10.0}) > 0.9);
    CHECK(predict_proba(model, std::vector<double>{0.0}) < 0.1);
}

TEST_CASE("naive bayes tolerates constant features") {
    Dataset ds;
    ds.feature_names = {"f0", "f1"};
    ds.rows = {{1.0, 5.0}, {1.0, 6.0}, {1.0, -5.0}, {1.0, -6.0}};
    ds.labels = {1, 1, 0, 0};
    const auto model = train_naive_bayes(ds, config(ClassifierKind::naive_bayes));
    const double p = predict_proba(model, std::vector<double>{1.0, 5.5});
    CHECK(p > 0.9);
}

TEST_CASE("knn smoothing arithmetic") {
    // probe at its own training point, k = 1: (1+1)/(1+2)
    auto ds = one_dim({0.0, 1.0, 2.0, 10.0, 11.0}, {1, 1, 1, 0, 0});
    auto cfg = config(ClassifierKind::knn);
    cfg.k = 1;
    const auto m1 = train_knn(ds, cfg);
    CHECK(predict_proba(m1, std::vector<double>{0.0}) == doctest::Approx(2.0 / 3.0));
    CHECK(predict_proba(m1, std::vector<double>{10.0}) == doctest::Approx(1.0 / 3.0));

    // k = 3 with 2 positive + 1 negative neighbours: (2+1)/(3+2)
    auto ds3 = one_dim({0.0, 0.1, 0.2, 10.0, 11.0}, {1, 1, 0, 0, 0});
    cfg.k = 3;
    const auto m3 = train_knn(ds3, cfg);
    CHECK(predict_proba(m3, std::vector<double>{0.05}) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("knn with k equal to n predicts the smoothed prior everywhere") {
    auto ds = one_dim({0.0, 1.0, 2.0, 3.0, 4.0}, {1, 1, 1, 0, 0});
    auto cfg = config(ClassifierKind::knn);
    cfg.k = 5;
    const auto m = train_knn(ds, cfg);
    for (double probe : {-100.0, 0.0, 2.5, 100.0})
        CHECK(predict_proba(m, std::vector<double>{probe}) == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("knn duplicated points resolve deterministically") {
    auto ds = one_dim({0.0, 0.0, 5.0, 6.0}, {1, 0, 0, 1});
    auto shuffled = one_dim({6.0, 0.0, 0.0, 5.0}, {1, 0, 1, 0});
    auto cfg = config(ClassifierKind::knn);
    cfg.k = 1;
    const double a = predict_proba(train_knn(ds, cfg), std::vector<double>{0.0});
    const double b = predict_proba(train_knn(shuffled, cfg), std::vector<double>{0.0});
    CHECK(a == b);  // canonical row order makes the tie-break input-order free
    CHECK((a == doctest::Approx(2.0 / 3.0) || a == doctest::Approx(1.0 / 3.0)));
}

TEST_CASE("knn validates k") {
    auto ds = one_dim({0.0, 1.0, 2.0, 3.0}, {1, 1, 0, 0});
    auto cfg = config(ClassifierKind::knn);
    cfg.k = 4;
    CHECK_THROWS(train_knn(ds, cfg));
    cfg.k = 0;
    CHECK_THROWS(train_knn(ds, cfg));
    cfg.k = 27;
    CHECK_THROWS(train_knn(ds, cfg));
    cfg.k = 5;  // odd but exceeds the 4 training rows
    CHECK_THROWS(train_knn(ds, cfg));
}

TEST_CASE("tree finds the separating threshold") {
    std::vector<double> xs;
    std::vector<int> labels;
    for (int i = 1; i <= 10; ++i) {
        xs.push_back(i);
        labels.push_back(i > 5 ? 1 : 0);
    }
    const auto ds = one_dim(xs, labels);
    const auto model = train_tree(ds, config(ClassifierKind::tree));
    REQUIRE(model.forest.size() == 1);
    const auto& root = model.forest[0][0];
    CHECK(root.feature == 0);
    CHECK(root.threshold > 5.0);
    CHECK(root.threshold < 6.0);
    for (int i = 1; i <= 10; ++i) {
        const double p = predict_proba(model, std::vector<double>{static_cast<double>(i)});
        CHECK((p >= 0.5) == (i > 5));
    }
}

TEST_CASE("tree on a pure dataset is a single smoothed leaf") {
    const auto ds = one_dim({1.0, 2.0, 3.0, 4.0, 5.0}, {1, 1, 1, 1, 1});
    const auto model = train_tree(ds, config(ClassifierKind::tree));
    REQUIRE(model.forest.size() == 1);
    REQUIRE(model.forest[0].size() == 1);
    CHECK(model.forest[0][0].feature == -1);
    CHECK(predict_proba(model, std::vector<double>{2.0}) == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("tree solves a slightly unbalanced xor at depth two") {
    Dataset ds;
    ds.feature_names = {"f0", "f1"};
    auto add = [&](double x, double y, int label, int copies) {
        for (int i = 0; i < copies; ++i) {
            ds.rows.push_back({x, y});
            ds.labels.push_back(label);
        }
    };
    add(0.0, 0.0, 0, 3);
    add(1.0, 1.0, 0, 4);  // the imbalance gives the first split positive gain
    add(0.0, 1.0, 1, 3);
    add(1.0, 0.0, 1, 3);
    const auto model = train_tree(ds, config(ClassifierKind::tree));
    REQUIRE(model.forest.size() == 1);
    const auto& nodes = model.forest[0];
    REQUIRE(nodes.size() >= 3);
    CHECK(nodes[0].feature != -1);
    const bool has_inner_child =
        nodes[nodes[0].left].feature != -1 || nodes[nodes[0].right].feature != -1;
    CHECK(has_inner_child);  // depth >= 2
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        const double p = predict_proba(model, ds.rows[r]);
        CHECK((p >= 0.5) == (ds.labels[r] == 1));
    }
}

TEST_CASE("random forest is deterministic per seed") {
    const auto ds = blobs(40, 2.0, 1.0, 8);
    auto cfg = config(ClassifierKind::random_forest, 42);
    cfg.trees = 25;
    const auto a = train_random_forest(ds, cfg);
    const auto b = train_random_forest(ds, cfg);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> probe{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        CHECK(predict_proba(a, probe) == predict_proba(b, probe));
    }
}

TEST_CASE("random forest with one tree votes 0 or 1") {
    const auto ds = blobs(30, 2.0, 0.8, 4);
    auto cfg = config(ClassifierKind::random_forest, 7);
    cfg.trees = 1;
    const auto model = train_random_forest(ds, cfg);
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        const double p =
            predict_proba(model, std::vector<double>{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)});
        CHECK((p == 0.0 || p == 1.0));
    }
}

TEST_CASE("random forest agreement saturates at probability one") {
    const auto ds = blobs(50, 3.0, 0.3, 12);
    auto cfg = config(ClassifierKind::random_forest, 5);
    cfg.trees = 40;
    const auto model = train_random_forest(ds, cfg);
    CHECK(predict_proba(model, std::vector<double>{3.0, 3.0}) == doctest::Approx(1.0));
    CHECK(predict_proba(model, std::vector<double>{-3.0, -3.0}) == doctest::Approx(0.0));
    CHECK(cross_validate(ds, cfg, 10).auc >= 0.95);
}

TEST_CASE("random forest rejects zero trees") {
    const auto ds = blobs(10, 2.0, 0.5, 2);
    auto cfg = config(ClassifierKind::random_forest);
    cfg.trees = 0;
    CHECK_THROWS(train_random_forest(ds, cfg));
}

TEST_CASE("training is invariant to input row order") {
    auto ds = blobs(25, 2.0, 1.2, 19);
    auto shuffled = ds;
    Rng rng(77);
    for (std::size_t i = shuffled.rows.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(shuffled.rows[i - 1], shuffled.rows[j]);
        std::swap(shuffled.labels[i - 1], shuffled.labels[j]);
    }
    for (auto kind : {ClassifierKind::naive_bayes, ClassifierKind::knn, ClassifierKind::tree,
                      ClassifierKind::random_forest}) {
        auto cfg = config(kind, 11);
        cfg.k = 3;
        cfg.trees = 15;
        const auto a = train(ds, cfg);
        const auto b = train(shuffled, cfg);
        Rng probe_rng(1);
        for (int i = 0; i < 15; ++i) {
            const std::vector<double> probe{probe_rng.uniform(-4.0, 4.0),
                                            probe_rng.uniform(-4.0, 4.0)};
            CHECK(predict_proba(a, probe) == predict_proba(b, probe));
        }
    }
}

TEST_CASE("predictions stay within the unit interval") {
    const auto ds = blobs(20, 1.0, 1.5, 31);
    for (auto kind : {ClassifierKind::naive_bayes, ClassifierKind::knn, ClassifierKind::tree,
                      ClassifierKind::random_forest}) {
        auto cfg = config(kind, 2);
        cfg.k = 5;
        cfg.trees = 9;
        const auto model = train(ds, cfg);
        Rng rng(4);
        for (int i = 0; i < 25; ++i) {
            const double p = predict_proba(
                model, std::vector<double>{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)});
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("predict_proba names the missing feature") {
    const auto ds = blobs(10, 2.0, 0.5, 3);
    const auto model = train(ds, config(ClassifierKind::naive_bayes));
    FeatureVector fv;
    fv.names = {"f0"};
    fv.values = {1.0};
    bool threw = false;
    try {
        predict_proba(model, fv);
    } catch (const std::exception& e) {
        threw = true;
        CHECK(std::string(e.what()).find("f1") != std::string::npos);
    }
    CHECK(threw);
    CHECK_THROWS(predict_proba(model, std::vector<double>{1.0}));  // width mismatch
}

TEST_CASE("model save and load round trips exactly") {
    const auto ds = blobs(20, 2.0, 0.7, 23);
    for (auto kind : {ClassifierKind::naive_bayes, ClassifierKind::knn, ClassifierKind::tree,
                      ClassifierKind::random_forest}) {
        auto cfg = config(kind, 99);
        cfg.k = 3;
        cfg.trees = 12;
        const auto model = train(ds, cfg);
        const auto path = tmp_path("ng_model_" + to_string(kind) + ".txt");
        save_model(path, model);
        const auto loaded = load_model(path);
        CHECK(loaded.kind == model.kind);
        CHECK(loaded.feature_names == model.feature_names);
        Rng rng(6);
        for (int i = 0; i < 25; ++i) {
            const std::vector<double> probe{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
            CHECK(predict_proba(loaded, probe) == predict_proba(model, probe));
        }
    }
}

TEST_CASE("model loader rejects garbage") {
    const auto path = tmp_path("ng_model_garbage.txt");
    {
        std::ofstream out(path);
        out << "definitely not a model\n";
    }
    CHECK_THROWS(load_model(path));
    CHECK_THROWS(load_model(tmp_path("ng_model_missing.txt")));
}

TEST_CASE("cfs drops duplicates and noise") {
    Dataset ds;
    ds.feature_names = {"informative", "copy", "noise"};
    Rng rng(55);
    for (int i = 0; i < 120; ++i) {
        const int label = i % 2;
        const double sig = label + 0.3 * rng.normal();
        ds.rows.push_back({sig, sig, rng.normal()});
        ds.labels.push_back(label);
    }
    const auto picked = cfs_select(ds);
    REQUIRE(!picked.empty());
    int copies = 0;
    bool noise_present = false;
    for (const auto& name : picked) {
        if (name == "informative" || name == "copy") ++copies;
        if (name == "noise") noise_present = true;
    }
    CHECK(copies <= 1);
    CHECK(!noise_present);

    // greedy only ever accepts improvements
    std::vector<std::size_t> full(ds.feature_names.size());
    for (std::size_t i = 0; i < full.size(); ++i) full[i] = i;
    std::vector<std::size_t> chosen;
    for (const auto& name : picked)
        chosen.push_back(static_cast<std::size_t>(
            std::find(ds.feature_names.begin(), ds.feature_names.end(), name) -
            ds.feature_names.begin()));
    CHECK(cfs_merit(ds, chosen) >= cfs_merit(ds, full));
}

TEST_CASE("cross validation is seed deterministic") {
    const auto ds = blobs(30, 1.5, 1.0, 44);
    auto cfg = config(ClassifierKind::random_forest, 17);
    cfg.trees = 10;
    const auto a = cross_validate(ds, cfg, 10);
    const auto b = cross_validate(ds, cfg, 10);
    CHECK(a.auc == b.auc);
    CHECK(a.accuracy_at_half == b.accuracy_at_half);
    REQUIRE(a.predictions.size() == b.predictions.size());
    for (std::size_t i = 0; i < a.predictions.size(); ++i) {
        CHECK(a.predictions[i].row == b.predictions[i].row);
        CHECK(a.predictions[i].probability == b.predictions[i].probability);
    }
}

TEST_CASE("cross validation leave-one-out covers every row once") {
    const auto ds = blobs(6, 2.0, 0.5, 21);  // 12 rows
    auto cfg = config(ClassifierKind::knn, 1);
    cfg.k = 3;
    const auto report = cross_validate(ds, cfg, ds.rows.size());
    REQUIRE(report.predictions.size() == ds.rows.size());
    std::vector<bool> seen(ds.rows.size(), false);
    for (const auto& p : report.predictions) {
        CHECK(!seen[p.row]);
        seen[p.row] = true;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST_CASE("cross validation warns on single-class training folds") {
    Dataset ds = one_dim({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 100.0},
                         {1, 1, 1, 1, 1, 1, 1, 1, 1, 0});
    const auto report = cross_validate(ds, config(ClassifierKind::naive_bayes), 10);
    CHECK(!report.warnings.empty());
    CHECK(report.predictions.size() == ds.rows.size());
}

TEST_CASE("cross validation argument checks") {
    const auto ds = blobs(5, 2.0, 0.5, 1);
    CHECK_THROWS(cross_validate(ds, config(ClassifierKind::naive_bayes), 1));
    CHECK_THROWS(cross_validate(ds, config(ClassifierKind::naive_bayes), ds.rows.size() + 1));
    Dataset unlabeled = ds;
    unlabeled.labels.clear();
    CHECK_THROWS(cross_validate(unlabeled, config(ClassifierKind::naive_bayes), 5));
}

TEST_CASE("classifier names round trip") {
    for (auto kind : {ClassifierKind::naive_bayes, ClassifierKind::knn, ClassifierKind::tree,
                      ClassifierKind::random_forest})
        CHECK(classifier_from_string(to_string(kind)) == kind);
    CHECK_THROWS(classifier_from_string("svm"));
}
