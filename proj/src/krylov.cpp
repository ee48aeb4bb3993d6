#include "lapeig/krylov.hpp"

#include "lapeig/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace lapeig {

Vector IncompleteFactor::solve(const Vector& r) const
{
    Vector y = c_.triangularView<Eigen::Lower>().solve(r);
    c_.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
    return y;
}

Matrix IncompleteFactor::lower_solve(const Matrix& b) const
{
    Matrix x = b;
    c_.triangularView<Eigen::Lower>().solveInPlace(x);
    return x;
}

Matrix IncompleteFactor::upper_solve(const Matrix& b) const
{
    Matrix x = b;
    c_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

Matrix IncompleteFactor::lower_apply(const Matrix& b) const
{
    return c_ * b;
}

Matrix IncompleteFactor::upper_apply(const Matrix& b) const
{
    return c_.transpose() * b;
}

IncompleteFactor ichol(const SparseMatrix& a, double tau)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument("ichol needs a square matrix");
    if (!(tau >= 0))
        throw std::invalid_argument("drop tolerance must be non-negative");
    const Eigen::SparseMatrix<double> ac = a;
    const int n = static_cast<int>(ac.rows());

    struct Entry {
        int row;
        double value;
    };
    std::vector<std::vector<Entry>> cols(n);
    // cursor[k]: position in column k of the next row to be visited;
    // pending[j]: columns whose cursor currently sits on row j
    std::vector<std::size_t> cursor(n, 0);
    std::vector<std::vector<int>> pending(n);
    Vector work = Vector::Zero(n);
    std::vector<char> in_pattern(n, 0);
    std::vector<int> pattern;

    for (int j = 0; j < n; ++j) {
        double col_norm = 0.0;
        pattern.clear();
        for (Eigen::SparseMatrix<double>::InnerIterator it(ac, j); it; ++it) {
            const int i = static_cast<int>(it.row());
            if (i < j)
                continue;
            col_norm += it.value() * it.value();
            work[i] = it.value();
            if (!in_pattern[i]) {
                in_pattern[i] = 1;
                pattern.push_back(i);
            }
        }
        col_norm = std::sqrt(col_norm);
        if (!in_pattern[j]) {
            in_pattern[j] = 1;
            pattern.push_back(j);
        }

        for (int k : pending[j]) {
            const auto& ck = cols[k];
            const double cjk = ck[cursor[k]].value;
            for (std::size_t p = cursor[k]; p < ck.size(); ++p) {
                const int i = ck[p].row;
                work[i] -= ck[p].value * cjk;
                if (!in_pattern[i]) {
                    in_pattern[i] = 1;
                    pattern.push_back(i);
                }
            }
            if (++cursor[k] < ck.size())
                pending[ck[cursor[k]].row].push_back(k);
        }
        std::vector<int>().swap(pending[j]);

        const double pivot = work[j];
        if (!(pivot > 0))
            throw NumericalError("ichol breakdown: non-positive pivot " + io::format_double(pivot) + " in column " +
                                 std::to_string(j));
        const double d = std::sqrt(pivot);
        const double threshold = tau * col_norm;
        std::sort(pattern.begin(), pattern.end());
        auto& cj = cols[j];
        for (int i : pattern) {
            const double w = work[i];
            if (i == j)
                cj.push_back({j, d});
            else if (std::abs(w) >= threshold && w != 0.0)
                cj.push_back({i, w / d});
            work[i] = 0.0;
            in_pattern[i] = 0;
        }
        // the diagonal entry is first; the cursor skips it
        cursor[j] = 1;
        if (cj.size() > 1)
            pending[cj[1].row].push_back(j);
    }

    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < n; ++j)
        for (const auto& e : cols[j])
            trips.emplace_back(e.row, j, e.value);
    Eigen::SparseMatrix<double> c(n, n);
    c.setFromTriplets(trips.begin(), trips.end());
    return IncompleteFactor(std::move(c), tau);
}

Preconditioner Preconditioner::none(int n)
{
    return Preconditioner(Kind::none, IdentityFactor(n));
}

Preconditioner Preconditioner::laplace(const SparseMatrix& l)
{
    return Preconditioner(Kind::laplace, CholeskyFactor(l));
}

Preconditioner Preconditioner::incomplete(const SparseMatrix& a, double tau)
{
    return Preconditioner(Kind::ichol, ichol(a, tau));
}

Preconditioner Preconditioner::exact(const SparseMatrix& a)
{
    return Preconditioner(Kind::exact, CholeskyFactor(a));
}

std::string Preconditioner::name() const
{
    switch (kind_) {
    case Kind::none:
        return "none";
    case Kind::laplace:
        return "laplace";
    case Kind::ichol:
        return "ichol";
    case Kind::exact:
        return "exact";
    }
    return "unknown";
}

int Preconditioner::order() const
{
    return visit([](const auto& f) { return f.order(); });
}

Vector Preconditioner::apply(const Vector& r) const
{
    return visit([&](const auto& f) -> Vector { return f.solve(r); });
}

SpectrumResult Preconditioner::operator_spectrum(const SparseMatrix& a, const EigenOptions& options) const
{
    return visit([&](const auto& f) { return preconditioned_operator_spectrum(a, f, options); });
}

Vector Preconditioner::transform(const Vector& b) const
{
    return visit([&](const auto& f) -> Vector { return f.lower_solve(Matrix(b)).col(0); });
}

int PcgTrace::iterations_to(double tol) const
{
    for (std::size_t m = 0; m < rel_energy_error.size(); ++m)
        if (rel_energy_error[m] <= tol)
            return static_cast<int>(m);
    return -1;
}

PcgTrace pcg(const SparseMatrix& a, const Vector& b, const Preconditioner& m, const PcgOptions& options)
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.size() != n || m.order() != n)
        throw std::invalid_argument("pcg: dimension mismatch");
    if (options.x_exact && options.x_exact->size() != n)
        throw std::invalid_argument("pcg: exact solution has the wrong size");
    for (Eigen::Index k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            if (!std::isfinite(it.value()))
                throw NumericalError("pcg: operator has non-finite entries");

    PcgTrace t;
    t.preconditioner = m.name();
    t.x = Vector::Zero(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double bnorm = b.norm();

    double e0 = nan;
    auto energy_error = [&]() {
        if (!options.x_exact)
            return nan;
        const Vector e = *options.x_exact - t.x;
        return std::sqrt(std::max(0.0, e.dot(a * e))) / e0;
    };
    if (options.x_exact) {
        e0 = std::sqrt(options.x_exact->dot(a * *options.x_exact));
        if (e0 == 0)
            e0 = 1.0;
    }

    Vector r = b;
    Vector z = m.apply(r);
    double rz = r.dot(z);
    Vector p = z;
    t.rel_energy_error.push_back(options.x_exact ? 1.0 : nan);
    t.residual.push_back(bnorm);
    if (bnorm == 0) {
        t.converged = true;
        return t;
    }
    if (!(rz > 0)) {
        t.indefinite = true;
        return t;
    }

    for (int it = 0; it < options.max_iter; ++it) {
        const Vector ap = a * p;
        const double pap = p.dot(ap);
        if (!(pap > 0))
            throw NumericalError("pcg: operator is not positive definite");
        const double alpha = rz / pap;
        t.x += alpha * p;
        r -= alpha * ap;
        t.alpha.push_back(alpha);

        const double err = energy_error();
        t.rel_energy_error.push_back(err);
        const double rn = r.norm();
        t.residual.push_back(rn);
        if (err > 10.0) {
            t.diverged = true;
            break;
        }
        if ((options.x_exact && err <= options.energy_tol) || rn <= options.residual_tol * bnorm || rn == 0) {
            t.converged = true;
            break;
        }

        z = m.apply(r);
        const double rz_next = r.dot(z);
        if (!(rz_next > 0)) {
            t.indefinite = true;
            break;
        }
        const double beta = rz_next / rz;
        t.beta.push_back(beta);
        rz = rz_next;
        p = z + beta * p;
    }
    return t;
}

Vector ritz_values(const PcgTrace& trace, int m)
{
    const auto [diag, off] = lanczos_tridiagonal<double>(trace, m);
    if (m == 1)
        return diag;
    // computeFromTridiagonal does not scale its input
    const double scale = std::max(diag.cwiseAbs().maxCoeff(), off.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(diag / scale, off / scale, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("tridiagonal eigensolver did not converge");
    return scale * es.eigenvalues();
}

bool ritz_interlace(const Vector& coarse, const Vector& fine, double slack)
{
    if (fine.size() != coarse.size() + 1)
        return false;
    for (Eigen::Index i = 0; i < coarse.size(); ++i) {
        const double s = slack * std::max(1.0, std::abs(coarse[i]));
        if (fine[i] > coarse[i] + s || coarse[i] > fine[i + 1] + s)
            return false;
    }
    return true;
}

Vector DistributionFunction::cumulative() const
{
    Vector c(weights.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        c[i] = acc += weights[i];
    return c;
}

DistributionFunction distribution_function(const SpectrumResult& spectrum, const Vector& transformed_b,
                                           std::string system)
{
    if (!spectrum.has_vectors())
        throw std::invalid_argument("distribution function needs eigenvectors");
    if (transformed_b.size() != spectrum.size())
        throw std::invalid_argument("distribution function: dimension mismatch");
    const double nrm = transformed_b.norm();
    if (nrm == 0)
        throw std::invalid_argument("distribution function of a zero right-hand side");
    DistributionFunction d;
    d.system = std::move(system);
    d.points = spectrum.eigenvalues;
    d.weights = (spectrum.transformed.transpose() * (transformed_b / nrm)).array().square();
    return d;
}

DistributionFunction distribution_function(const SpectrumResult& spectrum, const Preconditioner& m, const Vector& b)
{
    if (b.size() != m.order())
        throw std::invalid_argument("distribution function: dimension mismatch");
    return distribution_function(spectrum, m.transform(b), m.name());
}

DistributionFunction merge_clusters(const DistributionFunction& dist, double tol)
{
    std::vector<double> pts, wts;
    Eigen::Index i = 0;
    const Eigen::Index n = dist.points.size();
    while (i < n) {
        const double first = dist.points[i];
        double sum = 0.0, weight = 0.0;
        Eigen::Index j = i;
        while (j < n && dist.points[j] - first <= tol * std::max(1.0, std::abs(first))) {
            sum += dist.points[j];
            weight += dist.weights[j];
            ++j;
        }
        pts.push_back(sum / static_cast<double>(j - i));
        wts.push_back(weight);
        i = j;
    }
    DistributionFunction m;
    m.system = dist.system;
    m.points = Eigen::Map<const Vector>(pts.data(), static_cast<Eigen::Index>(pts.size()));
    m.weights = Eigen::Map<const Vector>(wts.data(), static_cast<Eigen::Index>(wts.size()));
    return m;
}

EffectiveCondition effective_condition_bound(const DistributionFunction& dist, int drop_low, int drop_high,
                                             int start_iter, int length, double weight_floor)
{
    if (drop_low < 0 || drop_high < 0)
        throw std::invalid_argument("drop counts must be non-negative");
    std::vector<double> kept;
    for (Eigen::Index i = 0; i < dist.points.size(); ++i)
        if (dist.weights[i] > weight_floor)
            kept.push_back(dist.points[i]);
    if (static_cast<int>(kept.size()) <= drop_low + drop_high)
        throw std::invalid_argument("no points of increase remain after dropping outliers");

    EffectiveCondition ec;
    ec.lambda_min = kept[drop_low];
    ec.lambda_max = kept[kept.size() - 1 - drop_high];
    ec.kappa = ec.lambda_max / ec.lambda_min;
    ec.start_iter = start_iter;
    const double sk = std::sqrt(ec.kappa);
    const double rate = (sk - 1) / (sk + 1);
    for (int k = 0; k < length; ++k)
        ec.bound.push_back(2 * std::pow(rate, k));
    return ec;
}

void write_trace_csv(std::ostream& out, const PcgTrace& trace)
{
    out << "iter,rel_energy_error,residual\n";
    for (std::size_t m = 0; m < trace.residual.size(); ++m)
        out << m << "," << io::format_double(trace.rel_energy_error[m]) << "," << io::format_double(trace.residual[m])
            << "\n";
}

void write_ritz_csv(std::ostream& out, const PcgTrace& trace)
{
    out << "iter,ritz_index,value\n";
    for (int m = 1; m <= trace.iterations(); ++m) {
        const Vector theta = ritz_values(trace, m);
        for (int i = 0; i < m; ++i)
            out << m << "," << i + 1 << "," << io::format_double(theta[i]) << "\n";
    }
}

void write_distribution_csv(std::ostream& out, const DistributionFunction& dist)
{
    out << "lambda,weight,cumulative\n";
    const Vector c = dist.cumulative();
    for (Eigen::Index i = 0; i < dist.points.size(); ++i)
        out << io::format_double(dist.points[i]) << "," << io::format_double(dist.weights[i]) << ","
            << io::format_double(c[i]) << "\n";
}

} // namespace lapeig
