#include "lapeig/assembly.hpp"
#include "lapeig/krylov.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

using namespace lapeig;

namespace {

struct Problem {
    Mesh mesh;
    SparseMatrix a;
    SparseMatrix l;
    Vector b;
    Vector x;
};

Problem problem(int cells, const CoefficientField& field)
{
    Problem p{uniform_square(cells), {}, {}, {}, {}};
    p.a = assemble_stiffness(p.mesh, field);
    p.l = assemble_laplacian(p.mesh);
    p.b = assemble_rhs(p.mesh, field, [](const Point& x) { return 1.0 + x.x(); }, {});
    p.x = Eigen::LLT<Matrix>(Matrix(p.a)).solve(p.b);
    return p;
}

PcgOptions with_exact(const Vector& x, double tol = 1e-12)
{
    PcgOptions o;
    o.x_exact = x;
    o.energy_tol = tol;
    return o;
}

} // namespace

TEST_CASE("ichol with zero drop tolerance is the complete factor")
{
    const Problem p = problem(6, p2_field());
    const IncompleteFactor ic = ichol(p.a, 0.0);
    const Matrix c = Matrix(ic.factor());
    const Matrix llt = Eigen::LLT<Matrix>(Matrix(p.a)).matrixL();
    CHECK((c - llt).norm() <= 1e-12 * llt.norm());
    CHECK(c.isLowerTriangular());
}

TEST_CASE("ichol with infinite drop tolerance is the diagonal")
{
    const Problem p = problem(5, p1_field());
    const IncompleteFactor ic = ichol(p.a, std::numeric_limits<double>::infinity());
    CHECK(ic.nonzeros() == p.a.rows());
    for (int j = 0; j < p.a.rows(); ++j)
        CHECK(ic.factor().coeff(j, j) == doctest::Approx(std::sqrt(p.a.coeff(j, j))));
}

TEST_CASE("ichol drops by the unscaled value")
{
    // ||A(0:2, 0)|| = sqrt(256 + 1 + 0.01); C(2,0) C(0,0) = -0.1
    Matrix a(3, 3);
    a << 16, -1, -0.1, -1, 4, 0, -0.1, 0, 4;
    const SparseMatrix s = a.sparseView();
    const double norm0 = std::sqrt(256 + 1 + 0.01);
    const IncompleteFactor keep = ichol(s, 0.09 / norm0);
    CHECK(keep.factor().coeff(2, 0) == doctest::Approx(-0.1 / 4));
    const IncompleteFactor drop = ichol(s, 0.11 / norm0);
    CHECK(drop.factor().coeff(2, 0) == 0.0);
    CHECK(drop.factor().coeff(1, 0) == doctest::Approx(-0.25));
}

TEST_CASE("ichol breakdown is reported")
{
    Matrix a(2, 2);
    a << 1, 2, 2, 1;
    CHECK_THROWS_AS(ichol(SparseMatrix(a.sparseView()), 0.0), NumericalError);
    CHECK_THROWS_AS(ichol(SparseMatrix(a.sparseView()), -1.0), std::invalid_argument);
}

TEST_CASE("unpreconditioned CG matches the direct solve")
{
    const Problem p = problem(8, p1_field());
    const PcgTrace t = pcg(p.a, p.b, Preconditioner::none(p.mesh.num_dofs()), with_exact(p.x));
    CHECK(t.converged);
    CHECK((t.x - p.x).norm() <= 1e-9 * p.x.norm());
    CHECK(t.iterations() <= p.mesh.num_dofs());
    for (std::size_t m = 1; m < t.rel_energy_error.size(); ++m)
        CHECK(t.rel_energy_error[m] <= t.rel_energy_error[m - 1] * (1 + 1e-12));
    CHECK(t.rel_energy_error[0] == doctest::Approx(1.0));
}

TEST_CASE("exact preconditioner converges in one step")
{
    const Problem p = problem(6, p3_field());
    const PcgTrace t = pcg(p.a, p.b, Preconditioner::exact(p.a), with_exact(p.x));
    CHECK(t.iterations() == 1);
    CHECK(t.iterations_to(1e-10) == 1);
}

TEST_CASE("Laplace preconditioning with a constant coefficient")
{
    const Problem p = problem(6, constant_field(7.0));
    const Preconditioner m = Preconditioner::laplace(p.l);
    const PcgTrace t = pcg(p.a, p.b, m, with_exact(p.x));
    CHECK(t.iterations() == 1);
    CHECK(ritz_values(t, 1)[0] == doctest::Approx(7.0));
}

TEST_CASE("preconditioned spectra")
{
    const Problem p = problem(6, p2_field());
    const Preconditioner lap = Preconditioner::laplace(p.l);
    const Vector ev = lap.operator_spectrum(p.a, {false}).eigenvalues;
    const Vector gen = generalized_eigs(p.a, p.l, {false}).eigenvalues;
    CHECK((ev - gen).norm() <= 1e-10 * gen.norm());
    const Preconditioner ic = Preconditioner::incomplete(p.a, 1e-2);
    CHECK(ic.name() == "ichol");
    CHECK(lap.name() == "laplace");
    const Vector e2 = ic.operator_spectrum(p.a, {false}).eigenvalues;
    CHECK(e2.minCoeff() > 0);
    const Vector z = ic.apply(p.b);
    CHECK(z.size() == p.b.size());
}

TEST_CASE("Ritz values interlace and approach the extremes")
{
    const Problem p = problem(10, p3_field());
    const Preconditioner lap = Preconditioner::laplace(p.l);
    const PcgTrace t = pcg(p.a, p.b, lap, with_exact(p.x));
    REQUIRE(t.iterations() > 3);
    for (int m = 1; m < t.iterations(); ++m) {
        const Vector coarse = ritz_values(t, m), fine = ritz_values(t, m + 1);
        CHECK(ritz_interlace(coarse, fine));
        for (int i = 1; i < coarse.size(); ++i)
            CHECK(coarse[i] >= coarse[i - 1]);
    }
    const auto [d, e] = lanczos_tridiagonal(t, 3);
    CHECK(d.size() == 3);
    CHECK(e.size() == 2);
    CHECK_THROWS_AS(ritz_values(t, t.iterations() + 1), std::out_of_range);

    // Ritz values agree with the Lanczos tridiagonal computed in long double
    const auto [dl, el] = lanczos_tridiagonal<long double>(t, 4);
    Matrix tri = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        tri(i, i) = static_cast<double>(dl[i]);
        if (i < 3)
            tri(i, i + 1) = tri(i + 1, i) = static_cast<double>(el[i]);
    }
    const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(tri).eigenvalues();
    CHECK((ref - ritz_values(t, 4)).norm() <= 1e-10 * ref.norm());

    Vector a(2), b(3);
    a << 1.0, 3.0;
    b << 0.5, 2.0, 3.5;
    CHECK(ritz_interlace(a, b));
    b << 1.5, 2.0, 3.5;
    CHECK_FALSE(ritz_interlace(a, b));
}

TEST_CASE("distribution weights sum to one")
{
    const Problem p = problem(8, p2_field());
    for (const auto& m : {Preconditioner::laplace(p.l), Preconditioner::incomplete(p.a, 1e-2)}) {
        const DistributionFunction d = distribution_function(m.operator_spectrum(p.a), m, p.b);
        CHECK(std::abs(d.total() - 1.0) <= 1e-12);
        CHECK(d.cumulative()[d.size() - 1] == doctest::Approx(1.0));
        for (double w : d.weights)
            CHECK(w >= 0);
    }
}

TEST_CASE("cluster merging")
{
    DistributionFunction d;
    d.points.resize(5);
    d.weights.resize(5);
    d.points << 1.0, 1.0 + 1e-12, 2.0, 100.0, 100.0 + 5e-7;
    d.weights << 0.1, 0.1, 0.2, 0.3, 0.3;
    const DistributionFunction m = merge_clusters(d);
    REQUIRE(m.size() == 3);
    CHECK(m.weights[0] == doctest::Approx(0.2));
    CHECK(m.weights[2] == doctest::Approx(0.6));
    CHECK(m.total() == doctest::Approx(1.0));
}

TEST_CASE("effective condition number")
{
    DistributionFunction d;
    d.points.resize(5);
    d.weights.resize(5);
    d.points << 0.1, 1.0, 2.0, 4.0, 50.0;
    d.weights << 0.1, 0.3, 1e-10, 0.3, 0.3;
    const EffectiveCondition ec = effective_condition_bound(d, 1, 1, 3, 10);
    CHECK(ec.lambda_min == 1.0);
    CHECK(ec.lambda_max == 4.0);
    CHECK(ec.kappa == doctest::Approx(4.0));
    CHECK(ec.bound.size() == 10);
    CHECK(ec.bound[1] == doctest::Approx(2.0 / 3));
    CHECK_THROWS_AS(effective_condition_bound(d, 2, 2, 0), std::invalid_argument);
}

TEST_CASE("max iteration cap and trace CSV")
{
    const Problem p = problem(10, p3_field());
    PcgOptions o = with_exact(p.x);
    o.max_iter = 3;
    const PcgTrace t = pcg(p.a, p.b, Preconditioner::none(p.mesh.num_dofs()), o);
    CHECK(t.iterations() == 3);
    CHECK_FALSE(t.converged);
    CHECK(t.iterations_to(1e-10) == -1);
    std::stringstream s;
    write_trace_csv(s, t);
    std::string header;
    std::getline(s, header);
    CHECK(header == "iter,rel_energy_error,residual");
}
