#include "noisegate/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ng {
namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Dataset read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    Dataset ds;
    auto header = split_csv_line(line);
    if (header.empty()) throw std::runtime_error(path + ": empty header");
    const bool labeled = header.back() == "label";
    ds.feature_names.assign(header.begin(), labeled ? header.end() - 1 : header.end());
    if (ds.feature_names.empty()) throw std::runtime_error(path + ": no feature columns");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
        std::vector<double> row(ds.feature_names.size());
        try {
            for (std::size_t i = 0; i < row.size(); ++i) row[i] = std::stod(cells[i]);
            if (labeled) {
                const int label = std::stoi(cells.back());
                if (label != 0 && label != 1)
                    throw std::runtime_error("label must be 0 or 1");
                ds.labels.push_back(label);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

void write_features_csv(const std::string& path, const Dataset& ds) {
    if (ds.labeled() && ds.labels.size() != ds.rows.size())
        throw std::invalid_argument(path + ": label/row count mismatch");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    for (std::size_t i = 0; i < ds.feature_names.size(); ++i) {
        if (i) out << ',';
        out << ds.feature_names[i];
    }
    if (ds.labeled()) out << ",label";
    out << '\n';

    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        if (ds.rows[r].size() != ds.feature_names.size())
            throw std::invalid_argument(path + ": ragged row " + std::to_string(r));
        for (std::size_t i = 0; i < ds.rows[r].size(); ++i) {
            if (i) out << ',';
            out << format_value(ds.rows[r][i]);
        }
        if (ds.labeled()) out << ',' << ds.labels[r];
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_arff(const std::string& path, const Dataset& ds, const std::string& relation) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "@relation " << relation << '\n';
    for (const auto& name : ds.feature_names) out << "@attribute " << name << " numeric\n";
    if (ds.labeled()) out << "@attribute label {0,1}\n";
    out << "@data\n";
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        for (std::size_t i = 0; i < ds.rows[r].size(); ++i) {
            if (i) out << ',';
            out << format_value(ds.rows[r][i]);
        }
        if (ds.labeled()) out << ',' << ds.labels[r];
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace ng
