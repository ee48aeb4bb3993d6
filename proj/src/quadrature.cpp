#include "lapeig/quadrature.hpp"

#include <stdexcept>

namespace lapeig {

QuadratureRule QuadratureRule::centroid()
{
    return {{Eigen::Vector3d::Constant(1.0 / 3.0)}, {1.0}, 1};
}

QuadratureRule QuadratureRule::edge_midpoints()
{
    return {{Eigen::Vector3d(0.5, 0.5, 0.0), Eigen::Vector3d(0.0, 0.5, 0.5), Eigen::Vector3d(0.5, 0.0, 0.5)},
            {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
            2};
}

QuadratureRule QuadratureRule::strang_fix6()
{
    const double a = 0.445948490915965, wa = 0.223381589678011;
    const double b = 0.091576213509771, wb = 0.109951743655322;
    QuadratureRule q;
    q.degree = 4;
    for (double c : {a, b}) {
        const double w = c == a ? wa : wb;
        const double d = 1.0 - 2.0 * c;
        q.points.emplace_back(c, c, d);
        q.points.emplace_back(c, d, c);
        q.points.emplace_back(d, c, c);
        q.weights.insert(q.weights.end(), 3, w);
    }
    return q;
}

QuadratureRule QuadratureRule::of_degree(int degree)
{
    switch (degree) {
    case 1:
        return centroid();
    case 2:
        return edge_midpoints();
    case 4:
        return strang_fix6();
    default:
        throw std::invalid_argument("quadrature degree must be 1, 2 or 4");
    }
}

} // namespace lapeig
