#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace lapeig {

using Point = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row-major CSR storage; both triangles stored.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Raised for breakdowns of numerical algorithms (non-SPD pivots, indefinite
/// preconditioners). Input validation failures use std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lapeig
