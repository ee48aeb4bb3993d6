#pragma once

#include "lapeig/common.hpp"
#include "lapeig/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lapeig {

/// Lower-triangular C with C C^T close to A, natural ordering.
class IncompleteFactor {
public:
    IncompleteFactor(Eigen::SparseMatrix<double> c, double tau) : c_(std::move(c)), tau_(tau) {}

    int order() const { return static_cast<int>(c_.rows()); }
    double drop_tolerance() const { return tau_; }
    const Eigen::SparseMatrix<double>& factor() const { return c_; }
    Eigen::Index nonzeros() const { return c_.nonZeros(); }

    /// (C C^T)^{-1} r
    Vector solve(const Vector& r) const;
    Matrix lower_solve(const Matrix& b) const;
    Matrix upper_solve(const Matrix& b) const;
    Matrix lower_apply(const Matrix& b) const;
    Matrix upper_apply(const Matrix& b) const;

private:
    Eigen::SparseMatrix<double> c_;
    double tau_;
};

/// Left-looking incomplete Cholesky. An off-diagonal entry of column j is
/// dropped when its value before division by the pivot, C(i,j) * C(j,j), is
/// smaller than tau * ||A(j:n, j)||_2 in magnitude; the diagonal is always kept.
/// tau = 0 gives the complete factor, tau = inf the diagonal sqrt(a_jj).
/// Throws NumericalError on a non-positive pivot.
IncompleteFactor ichol(const SparseMatrix& a, double tau);

/// Factor interface for the unpreconditioned system.
class IdentityFactor {
public:
    explicit IdentityFactor(int n) : n_(n) {}
    int order() const { return n_; }
    Vector solve(const Vector& r) const { return r; }
    Matrix lower_solve(const Matrix& b) const { return b; }
    Matrix upper_solve(const Matrix& b) const { return b; }
    Matrix lower_apply(const Matrix& b) const { return b; }
    Matrix upper_apply(const Matrix& b) const { return b; }

private:
    int n_;
};

class Preconditioner {
public:
    enum class Kind { none, laplace, ichol, exact };

    static Preconditioner none(int n);
    /// Complete Cholesky of the Laplacian L.
    static Preconditioner laplace(const SparseMatrix& l);
    static Preconditioner incomplete(const SparseMatrix& a, double tau);
    /// Complete Cholesky of the operator itself.
    static Preconditioner exact(const SparseMatrix& a);

    Kind kind() const { return kind_; }
    std::string name() const;
    int order() const;

    /// z = M^{-1} r
    Vector apply(const Vector& r) const;

    /// Spectrum of C^{-1} A C^{-T} for the factor C of M.
    SpectrumResult operator_spectrum(const SparseMatrix& a, const EigenOptions& options = {}) const;
    /// C^{-1} b
    Vector transform(const Vector& b) const;

    template <typename F>
    decltype(auto) visit(F&& f) const
    {
        return std::visit(std::forward<F>(f), factor_);
    }

private:
    using Factor = std::variant<IdentityFactor, CholeskyFactor, IncompleteFactor>;
    Preconditioner(Kind kind, Factor factor) : kind_(kind), factor_(std::move(factor)) {}

    Kind kind_;
    Factor factor_;
};

struct PcgOptions {
    int max_iter = 1000;
    /// Stop once ||r_m|| <= residual_tol * ||b||.
    double residual_tol = 0.0;
    /// Stop once the relative energy error drops below this (needs x_exact).
    double energy_tol = 1e-10;
    std::optional<Vector> x_exact;
};

struct PcgTrace {
    std::string preconditioner;
    /// Index m = 0..iterations; NaN when no exact solution was supplied.
    std::vector<double> rel_energy_error;
    std::vector<double> residual;
    /// Step lengths alpha_j = (r_j^T z_j) / (p_j^T A p_j).
    std::vector<double> alpha;
    /// beta_j = (r_{j+1}^T z_{j+1}) / (r_j^T z_j).
    std::vector<double> beta;
    Vector x;
    bool converged = false;
    /// Relative energy error grew beyond 10.
    bool diverged = false;
    /// z^T r <= 0 was met.
    bool indefinite = false;

    int iterations() const { return static_cast<int>(alpha.size()); }
    /// First m with rel_energy_error[m] <= tol, or -1.
    int iterations_to(double tol) const;
};

/// Preconditioned CG from x0 = 0.
PcgTrace pcg(const SparseMatrix& a, const Vector& b, const Preconditioner& m, const PcgOptions& options = {});

/// Diagonal and off-diagonal of the m x m Lanczos matrix built from the CG
/// coefficients.
template <typename Scalar = double>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
lanczos_tridiagonal(const PcgTrace& trace, int m)
{
    if (m < 1 || m > trace.iterations())
        throw std::out_of_range("Ritz step exceeds the recorded iterations");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag(m), off(std::max(m - 1, 0));
    diag[0] = Scalar(1) / Scalar(trace.alpha[0]);
    for (int j = 1; j < m; ++j) {
        const Scalar a = trace.alpha[j], ap = trace.alpha[j - 1], bp = trace.beta[j - 1];
        diag[j] = Scalar(1) / a + bp / ap;
        off[j - 1] = std::sqrt(bp) / ap;
    }
    return {diag, off};
}

/// Ascending Ritz values after m iterations.
Vector ritz_values(const PcgTrace& trace, int m);

/// theta^{(m+1)}_i <= theta^{(m)}_i <= theta^{(m+1)}_{i+1} up to slack.
bool ritz_interlace(const Vector& coarse, const Vector& fine, double slack = 1e-10);

struct DistributionFunction {
    std::string system;
    /// Points of increase, ascending.
    Vector points;
    Vector weights;

    int size() const { return static_cast<int>(points.size()); }
    double total() const { return weights.sum(); }
    Vector cumulative() const;
};

/// Weights (v_i^T q)^2 with q = C^{-1} b / ||C^{-1} b|| and the orthonormal
/// transformed eigenvectors of the spectrum.
DistributionFunction distribution_function(const SpectrumResult& spectrum, const Vector& transformed_b,
                                           std::string system = {});
DistributionFunction distribution_function(const SpectrumResult& spectrum, const Preconditioner& m, const Vector& b);

/// Merge consecutive points within tol * max(1, |lambda|) of a cluster's first
/// point; weights are summed and the point is the cluster mean.
DistributionFunction merge_clusters(const DistributionFunction& dist, double tol = 1e-8);

struct EffectiveCondition {
    double kappa = 1.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int start_iter = 0;
    /// bound[i] is the estimate at iteration start_iter + i.
    std::vector<double> bound;
};

/// kappa_e from the points with weight above the floor after dropping the
/// given numbers of lowest and highest such points.
EffectiveCondition effective_condition_bound(const DistributionFunction& dist, int drop_low, int drop_high,
                                             int start_iter, int length = 100, double weight_floor = 1e-8);

/// CSV `iter,rel_energy_error,residual`.
void write_trace_csv(std::ostream& out, const PcgTrace& trace);
/// CSV `iter,ritz_index,value` for every recorded iteration.
void write_ritz_csv(std::ostream& out, const PcgTrace& trace);
/// CSV `lambda,weight,cumulative`.
void write_distribution_csv(std::ostream& out, const DistributionFunction& dist);

} // namespace lapeig
