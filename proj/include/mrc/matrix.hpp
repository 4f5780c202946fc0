// matrix.hpp - minimal dense row-major matrix.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mrc {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, rows*cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * cols, cols);
    }
    std::span<double> row(std::size_t i) {
        return std::span<double>(data.data() + i * cols, cols);
    }

    bool operator==(const Matrix& other) const {
        return rows == other.rows && cols == other.cols && data == other.data;
    }
};

}  // namespace mrc
