#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// N x 2 array of planar points, one point per row.
using Points2D = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Bad arguments or configuration (wrong sizes, eps <= 0, caps exceeded, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// P(x_i, y_j) fell outside (0, 1) for some support pair.
class SupportError : public ConfigError {
public:
    SupportError(Index i, Index j, double value);

    Index row() const noexcept { return i_; }
    Index col() const noexcept { return j_; }
    double value() const noexcept { return value_; }

private:
    Index i_;
    Index j_;
    double value_;
};

// A scaling update produced a non-finite value or divided by ~0.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t iteration)
        : std::runtime_error(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace fsl
