#pragma once

#include <string>
#include <vector>

namespace ng {

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;  // 0/1; empty when unlabeled

    std::size_t size() const { return rows.size(); }
    bool labeled() const { return !labels.empty(); }
};

// CSV layout: header of feature names, one row per segment, with a final
// "label" column when labels are present. Values use max-precision decimal so
// write/read round-trips exactly.
Dataset read_features_csv(const std::string& path);
void write_features_csv(const std::string& path, const Dataset& ds);

// Weka-style ARFF export for interop.
void write_arff(const std::string& path, const Dataset& ds, const std::string& relation);

}  // namespace ng
