#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "noisegate/dataset.hpp"
#include "noisegate/features.hpp"

namespace ng {

enum class ClassifierKind { naive_bayes, knn, tree, random_forest };

ClassifierKind classifier_from_string(const std::string& s);
std::string to_string(ClassifierKind kind);

struct TrainerConfig {
    ClassifierKind kind = ClassifierKind::random_forest;
    FeatureSet set = FeatureSet::all;  // base set the training columns came from
    Preprocess pre;
    int k = 5;           // k-NN neighbor count, odd
    int trees = 100;     // forest size
    std::uint64_t seed = 0;
    bool cfs = false;    // run correlation-based selection on the training data
};

struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // go left when value <= threshold
    int left = -1;
    int right = -1;
    double p_positive = 0.5;   // Laplace-smoothed leaf probability
    int vote = 0;              // leaf majority class
};

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::naive_bayes;
    std::vector<std::string> feature_names;
    FeatureSet base_set = FeatureSet::all;  // set to extract before projecting
    Preprocess pre;
    std::uint64_t seed = 0;

    // naive bayes
    double prior_pos = 0.5;
    std::array<std::vector<double>, 2> nb_mean;  // [class][feature]
    std::array<std::vector<double>, 2> nb_var;

    // k-NN (rows stored standardized)
    int k = 0;
    std::vector<double> scale_mean;
    std::vector<double> scale_std;
    std::vector<std::vector<double>> knn_rows;
    std::vector<int> knn_labels;

    // tree / forest
    int trees = 0;
    std::vector<std::vector<TreeNode>> forest;
};

// Reorders rows by a stable content hash so training is invariant to input
// row order.
Dataset canonical_row_order(const Dataset& ds);

TrainedModel train_naive_bayes(const Dataset& ds, const TrainerConfig& cfg);
TrainedModel train_knn(const Dataset& ds, const TrainerConfig& cfg);
TrainedModel train_tree(const Dataset& ds, const TrainerConfig& cfg);
TrainedModel train_random_forest(const Dataset& ds, const TrainerConfig& cfg);
TrainedModel train(const Dataset& ds, const TrainerConfig& cfg);

// row must follow the model's feature order.
double predict_proba(const TrainedModel& m, const std::vector<double>& row);
// By-name lookup; throws naming the first missing feature.
double predict_proba(const TrainedModel& m, const FeatureVector& fv);

// Versioned text format ("NGMODEL v1"); load(save(m)) reproduces predictions
// exactly.
void save_model(const std::string& path, const TrainedModel& m);
TrainedModel load_model(const std::string& path);

}  // namespace ng
