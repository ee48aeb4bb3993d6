#include "lapeig/assembly.hpp"
#include "lapeig/io.hpp"
#include "lapeig/spectral.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <filesystem>
#include <sstream>

using namespace lapeig;

namespace {

SparseMatrix sparse(const Matrix& d)
{
    return d.sparseView();
}

} // namespace

TEST_CASE("Cholesky factor of a 2x2 matrix")
{
    Matrix m(2, 2);
    m << 4, -1, -1, 4;
    const CholeskyFactor c(sparse(m), CholeskyFactor::Ordering::natural);
    const Matrix r = Matrix(c.factor());
    CHECK(r(0, 0) == doctest::Approx(2.0));
    CHECK(r(1, 0) == doctest::Approx(-0.5));
    CHECK(r(1, 1) == doctest::Approx(std::sqrt(15.0) / 2));
    CHECK(r(0, 1) == 0.0);
    const Vector x = c.solve(Vector(Vector::Ones(2)));
    CHECK(x[0] == doctest::Approx(1.0 / 3));
    CHECK(x[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("factor operations are consistent")
{
    const Mesh mesh = uniform_square(5);
    const SparseMatrix l = assemble_laplacian(mesh);
    for (auto ord : {CholeskyFactor::Ordering::natural, CholeskyFactor::Ordering::amd}) {
        const CholeskyFactor c(l, ord);
        CHECK(c.order() == 16);
        const Matrix eye = Matrix::Identity(16, 16);
        const Matrix cm = c.lower_apply(eye);
        CHECK((cm * cm.transpose() - Matrix(l)).norm() < 1e-12);
        CHECK((c.upper_apply(eye) - cm.transpose()).norm() < 1e-13);
        CHECK((c.lower_solve(cm) - eye).norm() < 1e-12);
        CHECK((c.upper_solve(cm.transpose()) - eye).norm() < 1e-12);
    }
}

TEST_CASE("non-SPD matrix is a numerical failure")
{
    Matrix m(2, 2);
    m << 1, 2, 2, 1;
    CHECK_THROWS_AS(CholeskyFactor(sparse(m)), NumericalError);
}

TEST_CASE("generalized eigenpairs")
{
    const Mesh mesh = uniform_square(6);
    const SparseMatrix a = assemble_stiffness(mesh, p2_field());
    const SparseMatrix l = assemble_laplacian(mesh);
    const SpectrumResult s = generalized_eigs(a, l);
    CHECK(s.size() == 25);
    for (int i = 1; i < s.size(); ++i)
        CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
    CHECK(s.residuals.maxCoeff() < 1e-10 * s.eigenvalues.maxCoeff());
    const Matrix gram = s.eigenvectors.transpose() * Matrix(l) * s.eigenvectors;
    CHECK((gram - Matrix::Identity(25, 25)).norm() < 1e-10);

    // trace identity: sum of eigenvalues = tr(L^{-1} A)
    const Matrix la = Eigen::LLT<Matrix>(Matrix(l)).solve(Matrix(a));
    CHECK(s.eigenvalues.sum() == doctest::Approx(la.trace()).epsilon(1e-12));

    const SpectrumResult values = generalized_eigs(a, l, {false});
    CHECK_FALSE(values.has_vectors());
    CHECK((values.eigenvalues - s.eigenvalues).norm() < 1e-10);
}

TEST_CASE("constant coefficient spectrum")
{
    const Mesh mesh = uniform_square(4);
    const Vector ev = generalized_eigs(assemble_stiffness(mesh, constant_field(2)), assemble_laplacian(mesh), {false})
                          .eigenvalues;
    CHECK(ev.size() == 9);
    for (double l : ev)
        CHECK(l == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("eigenvalues lie in the coefficient range")
{
    const Mesh mesh = uniform_square(8);
    const Vector ev =
        generalized_eigs(assemble_stiffness(mesh, p3_field()), assemble_laplacian(mesh), {false}).eigenvalues;
    CHECK(ev.minCoeff() >= 0.0);
    CHECK(ev.maxCoeff() <= 256.0);
}

TEST_CASE("eigenvalue CSV")
{
    Vector v(3);
    v << 1.0, 2.5, 1.0 / 3;
    std::stringstream s;
    write_eigenvalues_csv(s, v);
    const io::CsvTable t = io::parse_csv(s);
    REQUIRE(t.column("lambda") >= 0);
    const auto col = t.values("lambda");
    CHECK(col.size() == 3);
    CHECK(col[2] == 1.0 / 3);
    CHECK(t.values("index")[0] == 1);
}

TEST_CASE("Matrix Market and vector round trip")
{
    const auto dir = std::filesystem::temp_directory_path() / "lapeig_test_io";
    std::filesystem::create_directories(dir);
    const SparseMatrix a = assemble_stiffness(uniform_square(4), p1_field());
    io::write_matrix_market((dir / "a.mtx").string(), a);
    const SparseMatrix r = io::read_matrix_market((dir / "a.mtx").string());
    CHECK((Matrix(r) - Matrix(a)).norm() == 0.0);
    Vector v = Vector::LinSpaced(5, 0.1, 0.9);
    io::write_vector((dir / "v.txt").string(), v);
    CHECK(io::read_vector((dir / "v.txt").string()) == v);
    CHECK_THROWS(io::read_matrix_market((dir / "missing.mtx").string()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("CSV parser")
{
    std::stringstream ok("a,b\n1,2\n3,4.5\n");
    const auto t = io::parse_csv(ok);
    CHECK(t.columns == std::vector<std::string>{"a", "b"});
    CHECK(t.values("b") == std::vector<double>{2, 4.5});
    CHECK(t.column("c") == -1);
    std::stringstream ragged("a,b\n1\n");
    CHECK_THROWS_AS(io::parse_csv(ragged), std::invalid_argument);
    CHECK(io::format_double(0.1) == "0.1");
}
