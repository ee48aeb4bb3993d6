#include "lapeig/assembly.hpp"

#include <cmath>
#include <vector>

namespace lapeig {

namespace {

struct ElementGeometry {
    double area;
    Eigen::Matrix<double, 2, 3> grads; // columns: gradients of the barycentric coordinates
};

ElementGeometry geometry(const Mesh& mesh, int t)
{
    const auto& tri = mesh.triangle(t);
    const Point& p0 = mesh.node(tri[0]);
    const Point& p1 = mesh.node(tri[1]);
    const Point& p2 = mesh.node(tri[2]);
    const double det = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    ElementGeometry g;
    g.area = 0.5 * det;
    // grad lambda_i = rot90(opposite edge) / det
    auto rot = [det](const Point& e) -> Point { return Point(-e.y(), e.x()) / det; };
    g.grads.col(0) = rot(p2 - p1);
    g.grads.col(1) = rot(p0 - p2);
    g.grads.col(2) = rot(p1 - p0);
    return g;
}

Point physical(const Mesh& mesh, int t, const Eigen::Vector3d& w)
{
    const auto& tri = mesh.triangle(t);
    return w[0] * mesh.node(tri[0]) + w[1] * mesh.node(tri[1]) + w[2] * mesh.node(tri[2]);
}

double element_coefficient(const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad, int t)
{
    double kbar = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
        const double k = field.on_element(mesh, t, physical(mesh, t, quad.points[q]));
        if (!(k > 0))
            throw std::invalid_argument("coefficient " + field.name() + " is not positive at a quadrature node");
        kbar += quad.weights[q] * k;
    }
    return kbar;
}

template <typename Index>
SparseMatrix assemble(const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad, int n,
                      Index&& index)
{
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        if (!(g.area > 0))
            throw std::invalid_argument("mesh has a non-positive triangle");
        const double kbar = element_coefficient(mesh, field, quad, t);
        const Eigen::Matrix3d local = kbar * g.area * (g.grads.transpose() * g.grads);
        const auto& tri = mesh.triangle(t);
        for (int a = 0; a < 3; ++a) {
            const int i = index(tri[a]);
            if (i < 0)
                continue;
            for (int b = 0; b < 3; ++b) {
                const int j = index(tri[b]);
                if (j >= 0)
                    trip.emplace_back(i, j, local(a, b));
            }
        }
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

} // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad)
{
    return assemble(mesh, field, quad, mesh.num_dofs(), [&](int node) { return mesh.dof_of_node(node); });
}

SparseMatrix assemble_laplacian(const Mesh& mesh)
{
    return assemble_stiffness(mesh, constant_field(1.0), QuadratureRule::centroid());
}

SparseMatrix assemble_full_stiffness(const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad)
{
    return assemble(mesh, field, quad, mesh.num_nodes(), [](int node) { return node; });
}

Vector assemble_rhs(const Mesh& mesh, const CoefficientField& field, const ScalarFunction& source,
                    const ScalarFunction& dirichlet, const QuadratureRule& quad)
{
    Vector b = Vector::Zero(mesh.num_dofs());
    if (source) {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const double area = mesh.signed_area(t);
            const auto& tri = mesh.triangle(t);
            for (int q = 0; q < quad.size(); ++q) {
                const double fq = source(physical(mesh, t, quad.points[q]));
                for (int a = 0; a < 3; ++a) {
                    const int i = mesh.dof_of_node(tri[a]);
                    if (i >= 0)
                        b[i] += area * quad.weights[q] * fq * quad.points[q][a];
                }
            }
        }
    }
    if (dirichlet) {
        const SparseMatrix full = assemble_full_stiffness(mesh, field, quad);
        Vector g = Vector::Zero(mesh.num_nodes());
        for (int v : mesh.boundary_nodes())
            g[v] = dirichlet(mesh.node(v));
        const Vector lift = full * g;
        for (int i = 0; i < mesh.num_dofs(); ++i)
            b[i] -= lift[mesh.node_of_dof(i)];
    }
    return b;
}

double min_at_quadrature(const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad)
{
    double lo = std::numeric_limits<double>::infinity();
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (const auto& w : quad.points)
            lo = std::min(lo, field.on_element(mesh, t, physical(mesh, t, w)));
    return lo;
}

Vector extend_with_boundary(const Mesh& mesh, const Vector& dof_values, const ScalarFunction& dirichlet)
{
    Vector full = Vector::Zero(mesh.num_nodes());
    for (int v = 0; v < mesh.num_nodes(); ++v) {
        const int d = mesh.dof_of_node(v);
        if (d >= 0)
            full[v] = dof_values[d];
        else if (dirichlet)
            full[v] = dirichlet(mesh.node(v));
    }
    return full;
}

double max_abs(const SparseMatrix& m)
{
    double out = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            out = std::max(out, std::abs(it.value()));
    return out;
}

bool is_symmetric(const SparseMatrix& m, double rel_tol)
{
    if (m.rows() != m.cols())
        return false;
    const SparseMatrix t = m.transpose();
    return max_abs(SparseMatrix(m - t)) <= rel_tol * max_abs(m);
}

} // namespace lapeig
