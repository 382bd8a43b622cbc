#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "noisegate/classifiers.hpp"
#include "noisegate/dataset.hpp"

namespace ng {

struct FoldPrediction {
    std::size_t row = 0;  // index into the input dataset
    int label = 0;
    double probability = 0.0;
};

struct CvReport {
    std::uint64_t seed = 0;
    std::size_t folds = 0;
    std::vector<FoldPrediction> predictions;  // exactly one per row
    double auc = 0.0;
    double accuracy_at_half = 0.0;
    std::vector<std::string> warnings;
};

// Seeded shuffle + round-robin fold assignment; every row is predicted once
// by a model that never saw it. With cfg.cfs, selection reruns inside each
// training fold.
CvReport cross_validate(const Dataset& ds, const TrainerConfig& cfg, std::size_t folds = 10);

std::string format_report(const CvReport& report);

}  // namespace ng
