#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mgt {

/// Dense row-major matrix of feature rows.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols) : rows_{rows}, cols_{cols}, data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * cols_, cols_);
    }
    std::span<double> row(std::size_t i) { return std::span<double>(data_).subspan(i * cols_, cols_); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    /// The first row fixes the column count.
    void push_row(std::span<const double> values);

    std::span<const double> data() const noexcept { return data_; }

private:
    std::size_t rows_{0};
    std::size_t cols_{0};
    std::vector<double> data_;
};

} // namespace mgt
