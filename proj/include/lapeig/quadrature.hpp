#pragma once

#include "lapeig/common.hpp"

#include <vector>

namespace lapeig {

/// Triangle rule in barycentric coordinates. Weights are fractions of the
/// triangle area and sum to one.
struct QuadratureRule {
    std::vector<Eigen::Vector3d> points;
    std::vector<double> weights;
    int degree = 0;

    int size() const { return static_cast<int>(points.size()); }

    static QuadratureRule centroid();       // degree 1
    static QuadratureRule edge_midpoints(); // degree 2, the default
    static QuadratureRule strang_fix6();    // degree 4
    static QuadratureRule of_degree(int degree);
};

} // namespace lapeig
