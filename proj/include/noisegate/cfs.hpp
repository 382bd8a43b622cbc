#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "noisegate/dataset.hpp"

namespace ng {

// Subset merit k*rcf / sqrt(k + k(k-1)*rff) from mean absolute Pearson
// correlations (feature-label and feature-feature).
double cfs_merit(const Dataset& ds, const std::vector<std::size_t>& subset);

// Greedy backward elimination from the full set; never returns empty. Ties
// resolve by feature name so selection is deterministic.
std::vector<std::string> cfs_select(const Dataset& ds);

}  // namespace ng
