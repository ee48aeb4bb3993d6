#include "lapeig/assembly.hpp"
#include "lapeig/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace lapeig;

namespace {

double integrate(const QuadratureRule& q, int i, int j)
{
    // x^i y^j over the reference triangle (0,0), (1,0), (0,1); vertices as barycentric columns
    double s = 0.0;
    for (int k = 0; k < q.size(); ++k) {
        const double x = q.points[k][1], y = q.points[k][2];
        s += q.weights[k] * std::pow(x, i) * std::pow(y, j);
    }
    return 0.5 * s;
}

double exact_monomial(int i, int j)
{
    return std::tgamma(i + 1) * std::tgamma(j + 1) / std::tgamma(i + j + 3);
}

} // namespace

TEST_CASE("quadrature rules integrate to their degree")
{
    for (const auto& q : {QuadratureRule::centroid(), QuadratureRule::edge_midpoints(), QuadratureRule::strang_fix6()}) {
        double w = 0.0;
        for (double x : q.weights)
            w += x;
        CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
        for (int i = 0; i <= q.degree; ++i)
            for (int j = 0; i + j <= q.degree; ++j)
                CHECK(integrate(q, i, j) == doctest::Approx(exact_monomial(i, j)).epsilon(1e-13));
    }
    CHECK(integrate(QuadratureRule::edge_midpoints(), 3, 0) != doctest::Approx(exact_monomial(3, 0)));
    CHECK(QuadratureRule::of_degree(2).degree == 2);
    CHECK(QuadratureRule::of_degree(4).degree == 4);
    CHECK_THROWS_AS(QuadratureRule::of_degree(3), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule::of_degree(9), std::invalid_argument);
}

TEST_CASE("Laplacian on the uniform mesh is the five-point stencil")
{
    const int m = 6;
    const Mesh mesh = uniform_square(m);
    const SparseMatrix l = assemble_laplacian(mesh);
    const int n = m - 1;
    Matrix stencil = Matrix::Zero(n * n, n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int r = j * n + i;
            stencil(r, r) = 4;
            if (i > 0)
                stencil(r, r - 1) = -1;
            if (i + 1 < n)
                stencil(r, r + 1) = -1;
            if (j > 0)
                stencil(r, r - n) = -1;
            if (j + 1 < n)
                stencil(r, r + n) = -1;
        }
    CHECK((Matrix(l) - stencil).norm() < 1e-13);
}

TEST_CASE("constant coefficient scales the Laplacian")
{
    const Mesh mesh = refine_local(uniform_square(5), RegionPredicate::box(0, 0.4, 0, 0.4), 2).mesh;
    const SparseMatrix a = assemble_stiffness(mesh, constant_field(3.5));
    const SparseMatrix l = assemble_laplacian(mesh);
    CHECK((Matrix(a) - 3.5 * Matrix(l)).norm() <= 1e-13 * Matrix(a).norm());
    CHECK(is_symmetric(a));
    CHECK(max_abs(l) > 0);
}

TEST_CASE("edge-midpoint assembly is exact for linear coefficients")
{
    const Mesh mesh = uniform_square(7);
    CoefficientField::Branch b;
    b.value = [](const Point& p) { return 1.0 + 2.0 * p.x() + 3.0 * p.y(); };
    const auto lin = CoefficientField::analytic("linear", b);
    const Matrix mid = Matrix(assemble_stiffness(mesh, lin, QuadratureRule::edge_midpoints()));
    const Matrix sf = Matrix(assemble_stiffness(mesh, lin, QuadratureRule::strang_fix6()));
    CHECK((mid - sf).norm() <= 1e-13 * sf.norm());
    const Matrix cen = Matrix(assemble_stiffness(mesh, lin, QuadratureRule::centroid()));
    CHECK((cen - sf).norm() <= 1e-13 * sf.norm());
    const Matrix p3 = Matrix(assemble_stiffness(mesh, p3_field(), QuadratureRule::edge_midpoints()));
    const Matrix p3x = Matrix(assemble_stiffness(mesh, p3_field(), QuadratureRule::strang_fix6()));
    CHECK((p3 - p3x).norm() > 1e-8 * p3x.norm());
}

TEST_CASE("patch test: linear data are reproduced")
{
    const Mesh mesh = reentrant_corner(8);
    const auto field = constant_field(2.7);
    const auto g = [](const Point& p) { return 0.3 - 1.2 * p.x() + 2.0 * p.y(); };
    const SparseMatrix a = assemble_stiffness(mesh, field);
    const Vector b = assemble_rhs(mesh, field, {}, g);
    const Vector u = CholeskyFactor(a).solve(b);
    const Vector full = extend_with_boundary(mesh, u, g);
    for (int i = 0; i < mesh.num_nodes(); ++i)
        CHECK(full[i] == doctest::Approx(g(mesh.node(i))).epsilon(1e-10));
}

TEST_CASE("load vector of a unit source")
{
    const Mesh mesh = uniform_square(1);
    const auto one = [](const Point&) { return 1.0; };
    const Vector full = assemble_rhs(uniform_square(4), constant_field(1), one, {});
    CHECK(full.size() == 9);
    CHECK(full.sum() == doctest::Approx(9.0 / 16.0)); // each interior hat integrates to h^2
    CHECK(mesh.num_dofs() == 0);
}

TEST_CASE("full stiffness annihilates constants")
{
    const Mesh mesh = uniform_square(5);
    const SparseMatrix a = assemble_full_stiffness(mesh, p1_field());
    CHECK(a.rows() == mesh.num_nodes());
    const Vector ones = Vector::Ones(mesh.num_nodes());
    CHECK((a * ones).norm() < 1e-12);
}

TEST_CASE("minimum over quadrature nodes")
{
    const Mesh mesh = uniform_square(4);
    const double m = min_at_quadrature(mesh, p1_field(), QuadratureRule::edge_midpoints());
    CHECK(m == doctest::Approx(std::sin(0.125)));
}
