#include "lapeig/spectral.hpp"

#include "lapeig/io.hpp"

#include <Eigen/Eigenvalues>

#include <ostream>

namespace lapeig {

namespace {

template <typename Solver>
void check_factorization(const Solver& s)
{
    if (s.info() != Eigen::Success)
        throw NumericalError("Cholesky factorization failed: matrix is not SPD");
}

template <typename Perm>
Matrix apply_perm(const Perm& p, const Matrix& b)
{
    return p.size() > 0 ? Matrix(p * b) : b;
}

template <typename Perm>
Matrix apply_perm_transpose(const Perm& p, const Matrix& b)
{
    return p.size() > 0 ? Matrix(p.transpose() * b) : b;
}

} // namespace

CholeskyFactor::CholeskyFactor(const SparseMatrix& m, Ordering ordering) : n_(static_cast<int>(m.rows()))
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("Cholesky needs a square matrix");
    const Eigen::SparseMatrix<double> cm = m;
    if (ordering == Ordering::natural) {
        natural_ = std::make_shared<Natural>(cm);
        check_factorization(*natural_);
    } else {
        amd_ = std::make_shared<Amd>(cm);
        check_factorization(*amd_);
    }
}

Vector CholeskyFactor::solve(const Vector& y) const
{
    return with_solver([&](const auto& s) -> Vector { return s.solve(y); });
}

Matrix CholeskyFactor::solve(const Matrix& y) const
{
    return with_solver([&](const auto& s) -> Matrix { return s.solve(y); });
}

Matrix CholeskyFactor::lower_solve(const Matrix& b) const
{
    return with_solver([&](const auto& s) -> Matrix {
        Matrix x = apply_perm(s.permutationP(), b);
        s.matrixL().solveInPlace(x);
        return x;
    });
}

Matrix CholeskyFactor::upper_solve(const Matrix& b) const
{
    return with_solver([&](const auto& s) -> Matrix {
        Matrix x = b;
        s.matrixU().solveInPlace(x);
        return apply_perm_transpose(s.permutationP(), x);
    });
}

Matrix CholeskyFactor::lower_apply(const Matrix& b) const
{
    return with_solver([&](const auto& s) -> Matrix {
        const Eigen::SparseMatrix<double> l = s.matrixL();
        return apply_perm_transpose(s.permutationP(), Matrix(l * b));
    });
}

Matrix CholeskyFactor::upper_apply(const Matrix& b) const
{
    return with_solver([&](const auto& s) -> Matrix {
        const Eigen::SparseMatrix<double> l = s.matrixL();
        return l.transpose() * apply_perm(s.permutationP(), b);
    });
}

Eigen::SparseMatrix<double> CholeskyFactor::factor() const
{
    return with_solver([](const auto& s) -> Eigen::SparseMatrix<double> { return s.matrixL(); });
}

Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> CholeskyFactor::permutation() const
{
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p =
        with_solver([](const auto& s) { return s.permutationP(); });
    if (p.size() == 0)
        p.setIdentity(n_);
    return p;
}

SpectrumResult symmetric_spectrum(const Matrix& s, bool vectors)
{
    if (!s.allFinite())
        throw NumericalError("operator has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense symmetric eigensolver did not converge");
    SpectrumResult r;
    r.eigenvalues = es.eigenvalues();
    if (vectors)
        r.transformed = es.eigenvectors();
    return r;
}

SpectrumResult generalized_eigs(const SparseMatrix& a, const SparseMatrix& l, const EigenOptions& options)
{
    if (a.rows() != l.rows() || a.cols() != l.cols())
        throw std::invalid_argument("generalized_eigs: order mismatch");
    const CholeskyFactor factor(l);
    return preconditioned_operator_spectrum(a, factor, options);
}

void write_eigenvalues_csv(std::ostream& out, const Vector& eigenvalues)
{
    out << "index,lambda\n";
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        out << i + 1 << "," << io::format_double(eigenvalues[i]) << "\n";
}

} // namespace lapeig
