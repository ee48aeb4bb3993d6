#pragma once

#include "lapeig/common.hpp"

#include <Eigen/SparseCholesky>

#include <iosfwd>
#include <memory>

namespace lapeig {

/// Complete sparse Cholesky factorization M = C C^T with C = P^T R, where
/// P M P^T = R R^T and R is lower triangular.
class CholeskyFactor {
public:
    enum class Ordering { natural, amd };

    explicit CholeskyFactor(const SparseMatrix& m, Ordering ordering = Ordering::amd);

    int order() const { return n_; }

    Vector solve(const Vector& y) const;
    Matrix solve(const Matrix& y) const;

    /// C^{-1} B
    Matrix lower_solve(const Matrix& b) const;
    /// C^{-T} B
    Matrix upper_solve(const Matrix& b) const;
    /// C B
    Matrix lower_apply(const Matrix& b) const;
    /// C^T B
    Matrix upper_apply(const Matrix& b) const;

    /// The triangular factor R of the permuted matrix.
    Eigen::SparseMatrix<double> factor() const;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> permutation() const;

private:
    using Natural = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>>;
    using Amd = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

    template <typename F>
    decltype(auto) with_solver(F&& f) const
    {
        if (natural_)
            return f(*natural_);
        return f(*amd_);
    }

    int n_ = 0;
    std::shared_ptr<Natural> natural_;
    std::shared_ptr<Amd> amd_;
};

/// Eigenpairs of the symmetrized operator C^{-1} A C^{-T}, ascending.
struct SpectrumResult {
    Vector eigenvalues;
    /// Generalized eigenvectors v_i with A v_i = lambda_i C C^T v_i and
    /// V^T C C^T V = I. Empty when only eigenvalues were requested.
    Matrix eigenvectors;
    /// Orthonormal eigenvectors of C^{-1} A C^{-T}, i.e. C^T v_i.
    Matrix transformed;
    /// ||A v_i - lambda_i C C^T v_i||_2 per column (empty without vectors).
    Vector residuals;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    bool has_vectors() const { return eigenvectors.size() > 0; }
};

struct EigenOptions {
    bool vectors = true;
};

/// A v = lambda L v via the congruent standard problem R^{-1} A R^{-T} with the
/// Cholesky factor of L and a dense symmetric eigensolver.
SpectrumResult generalized_eigs(const SparseMatrix& a, const SparseMatrix& l, const EigenOptions& options = {});

/// Dense form of C^{-1} A C^{-T}, symmetrized.
template <typename Factor>
Matrix congruence_transform(const SparseMatrix& a, const Factor& c)
{
    const Matrix dense_a = Matrix(a);
    const Matrix x = c.lower_solve(dense_a);            // C^{-1} A
    Matrix s = c.lower_solve(Matrix(x.transpose()));      // C^{-1} A C^{-T}
    s = 0.5 * (s + s.transpose()).eval();
    return s;
}

SpectrumResult symmetric_spectrum(const Matrix& s, bool vectors);

/// Spectrum of C^{-1} A C^{-T} for any factor exposing lower_solve,
/// upper_solve and lower_apply.
template <typename Factor>
SpectrumResult preconditioned_operator_spectrum(const SparseMatrix& a, const Factor& c,
                                                const EigenOptions& options = {})
{
    if (a.rows() != a.cols() || a.rows() != c.order())
        throw std::invalid_argument("operator and factor orders differ");
    SpectrumResult r = symmetric_spectrum(congruence_transform(a, c), options.vectors);
    if (options.vectors) {
        r.eigenvectors = c.upper_solve(r.transformed);
        const Matrix mv = c.lower_apply(r.transformed); // C C^T v
        const Matrix av = a * r.eigenvectors;
        r.residuals.resize(r.size());
        for (int i = 0; i < r.size(); ++i)
            r.residuals[i] = (av.col(i) - r.eigenvalues[i] * mv.col(i)).norm();
    }
    return r;
}

/// Eigenvalues as CSV `index,lambda` with 1-based indices.
void write_eigenvalues_csv(std::ostream& out, const Vector& eigenvalues);

} // namespace lapeig
