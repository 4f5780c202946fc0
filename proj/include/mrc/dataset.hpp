// dataset.hpp - numeric instances with dense integer labels.
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrc/error.hpp"

namespace mrc {

// n x D instance matrix plus labels encoded 0..|Y|-1. label_names keeps the
// raw label strings in encoding order, so the label space survives
// subsetting even when a class is absent from the subset.
struct Dataset {
    std::size_t num_rows = 0;
    std::size_t num_dims = 0;
    std::vector<double> values;  // row-major
    std::vector<int> labels;
    std::vector<std::string> label_names;

    std::span<const double> instance(std::size_t i) const {
        return std::span<const double>(values.data() + i * num_dims, num_dims);
    }

    std::size_t num_labels() const { return label_names.size(); }

    std::size_t class_count(int label) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
    }

    Dataset subset(const std::vector<std::size_t>& indices) const {
        Dataset out;
        out.num_rows = indices.size();
        out.num_dims = num_dims;
        out.label_names = label_names;
        out.values.reserve(indices.size() * num_dims);
        out.labels.reserve(indices.size());
        for (std::size_t i : indices) {
            auto row = instance(i);
            out.values.insert(out.values.end(), row.begin(), row.end());
            out.labels.push_back(labels[i]);
        }
        return out;
    }
};

// Build a dataset from explicit rows and integer labels. Label names become
// the decimal strings of the distinct labels; labels are re-encoded densely
// by sorted value.
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels) {
    if (rows.empty() || rows.size() != labels.size())
        throw std::invalid_argument("make_dataset: rows/labels mismatch");
    Dataset d;
    d.num_rows = rows.size();
    d.num_dims = rows.front().size();
    if (d.num_dims == 0) throw std::invalid_argument("make_dataset: zero-dimensional rows");

    std::map<int, int> remap;
    for (int raw : labels) remap.emplace(raw, 0);
    int next = 0;
    for (auto& [raw, enc] : remap) {
        enc = next++;
        d.label_names.push_back(std::to_string(raw));
    }

    d.values.reserve(d.num_rows * d.num_dims);
    for (const auto& row : rows) {
        if (row.size() != d.num_dims)
            throw std::invalid_argument("make_dataset: ragged rows");
        d.values.insert(d.values.end(), row.begin(), row.end());
    }
    d.labels.reserve(labels.size());
    for (int raw : labels) d.labels.push_back(remap[raw]);
    return d;
}

}  // namespace mrc
