#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ticketforge/common.hpp"

namespace ticketforge {

using Vec = std::vector<double>;

// Dense row-major matrix. Kept deliberately minimal: the library only needs
// matvec products and entry access at desk scale.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Vec matvec(const Vec& x) const {
        if (x.size() != cols_)
            throw ShapeError("matvec: expected vector of size " + std::to_string(cols_) +
                             ", got " + std::to_string(x.size()));
        Vec y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double acc = 0.0;
            const double* row = data_.data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        return y;
    }

    // max absolute row sum
    double inf_norm() const {
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
            if (s > best) best = s;
        }
        return best;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double l1_norm(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

// Axis-aligned box; the evaluation domain of a network.
struct Box {
    Vec low, high;

    std::size_t dim() const { return low.size(); }

    static Box unit(std::size_t n) {
        return Box{Vec(n, -1.0), Vec(n, 1.0)};
    }
};

// Closed interval, for sound bound propagation.
struct Interval {
    double lo = 0.0, hi = 0.0;

    double abs_sup() const { return std::max(std::abs(lo), std::abs(hi)); }
};

}  // namespace ticketforge
