#include "lapeig/bounds.hpp"

#include "lapeig/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace lapeig {

namespace {

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1)
        return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

double spectral_norm(const Eigen::Matrix2d& h)
{
    const double mean = 0.5 * (h(0, 0) + h(1, 1));
    const double rad = std::hypot(0.5 * (h(0, 0) - h(1, 1)), 0.5 * (h(0, 1) + h(1, 0)));
    return std::max(std::abs(mean + rad), std::abs(mean - rad));
}

class Derivatives {
public:
    Derivatives(const CoefficientField& field, const Mesh& mesh, const BoundOptions& options)
        : field_(field), mesh_(mesh), fd_(!field.has_gradient() || !field.has_hessian()), h_(options.fd_step)
    {
    }

    Eigen::Vector2d gradient(int tri, const Point& p) const
    {
        if (!fd_)
            return field_.gradient_on_element(mesh_, tri, p);
        Eigen::Vector2d g;
        for (int d = 0; d < 2; ++d) {
            Point e = Point::Zero();
            e[d] = h_;
            g[d] = (k(tri, p + e) - k(tri, p - e)) / (2 * h_);
        }
        return g;
    }

    Eigen::Matrix2d hessian(int tri, const Point& p) const
    {
        if (!fd_)
            return field_.hessian_on_element(mesh_, tri, p);
        const Point ex(h_, 0.0), ey(0.0, h_);
        const double c = k(tri, p);
        Eigen::Matrix2d m;
        m(0, 0) = (k(tri, p + ex) - 2 * c + k(tri, p - ex)) / (h_ * h_);
        m(1, 1) = (k(tri, p + ey) - 2 * c + k(tri, p - ey)) / (h_ * h_);
        m(0, 1) = m(1, 0) =
            (k(tri, p + ex + ey) - k(tri, p + ex - ey) - k(tri, p - ex + ey) + k(tri, p - ex - ey)) / (4 * h_ * h_);
        return m;
    }

private:
    double k(int tri, const Point& p) const { return field_.on_element(mesh_, tri, p); }

    const CoefficientField& field_;
    const Mesh& mesh_;
    bool fd_;
    double h_;
};

} // namespace

double BoundReport::max_gap() const
{
    double m = 0.0;
    for (const auto& r : rows)
        m = std::max(m, r.gap);
    return m;
}

double BoundReport::median_gap() const
{
    std::vector<double> g;
    g.reserve(rows.size());
    for (const auto& r : rows)
        g.push_back(r.gap);
    return median(std::move(g));
}

double BoundReport::max_patch_radius() const
{
    double m = 0.0;
    for (const auto& r : rows)
        m = std::max(m, r.patch_radius);
    return m;
}

BoundReport evaluate_bounds(const CoefficientField& field, const Mesh& mesh, const PairingResult& pairing,
                            const Vector& eigenvalues, const BoundOptions& options)
{
    if (!pairing.matched)
        throw std::invalid_argument("bounds need a perfect pairing");
    if (static_cast<int>(pairing.eigen_of_dof.size()) != mesh.num_dofs() || eigenvalues.size() != mesh.num_dofs())
        throw std::invalid_argument("bounds: pairing, spectrum and mesh sizes differ");

    const bool smooth_kind = field.kind() != FieldKind::per_element;
    const bool has_derivatives = field.has_gradient() && field.has_hessian();
    if (smooth_kind && !has_derivatives && !options.finite_difference_fallback)
        throw std::invalid_argument("field " + field.name() + " lacks derivatives and no fallback was enabled");
    const Derivatives deriv(field, mesh, options);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    BoundReport report;
    report.rows.reserve(mesh.num_dofs());
    for (int j = 0; j < mesh.num_dofs(); ++j) {
        const int node = mesh.node_of_dof(j);
        const Point& xh = mesh.node(node);
        const SupportPatch patch = support_patch(mesh, j);

        BoundRow row;
        row.dof = j;
        row.lambda = eigenvalues[pairing.eigen_of_dof[j]];
        row.k_nodal = field.nodal_value(mesh, node);
        row.gap = std::abs(row.lambda - row.k_nodal);
        row.patch_radius = patch.diameter;

        const int region = field.region_of_element(mesh, patch.triangles.front());
        row.applicable = smooth_kind && region >= 0 && std::all_of(patch.triangles.begin(), patch.triangles.end(), [&](int t) {
                             return field.region_of_element(mesh, t) == region;
                         });

        double hess_max = 0.0;
        for (int t : patch.triangles) {
            for (const Point& p : sample_points(mesh, t, options.sampler)) {
                row.loose_bound = std::max(row.loose_bound, std::abs(field.on_element(mesh, t, p) - row.k_nodal));
                if (row.applicable)
                    hess_max = std::max(hess_max, spectral_norm(deriv.hessian(t, p)));
            }
        }
        if (row.applicable) {
            const double h = patch.diameter;
            row.taylor1 = h * deriv.gradient(patch.triangles.front(), xh).norm();
            row.taylor_full = row.taylor1 + 0.5 * h * h * options.hessian_safety * hess_max;
        } else {
            row.taylor1 = row.taylor_full = nan;
        }
        report.rows.push_back(row);
    }
    return report;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope needs at least two points");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / den;
}

ConvergenceTable convergence_table(const CoefficientField& field, const std::function<Mesh(int)>& mesh_of,
                                   const std::vector<int>& resolutions, const BoundOptions& options)
{
    if (resolutions.size() < 2)
        throw std::invalid_argument("convergence table needs at least two resolutions");
    ConvergenceTable table;
    std::vector<double> hs, gaps;
    for (int res : resolutions) {
        const Mesh mesh = mesh_of(res);
        StudyOptions so;
        so.sampler = options.sampler;
        const PairingStudy st = study_pairing(mesh, field, so);
        const BoundReport br = evaluate_bounds(field, mesh, st.pairing, st.eigenvalues, options);
        ConvergenceRow row{res, mesh.num_dofs(), br.max_patch_radius(), br.max_gap(), br.median_gap()};
        table.rows.push_back(row);
        hs.push_back(row.h_max);
        gaps.push_back(row.max_gap);
    }
    table.slope = loglog_slope(hs, gaps);
    return table;
}

void write_bounds_csv(std::ostream& out, const BoundReport& report)
{
    using io::format_double;
    out << "dof,lambda,k_nodal,gap,loose_bound,taylor1,taylor_full,applicable\n";
    for (const auto& r : report.rows) {
        out << r.dof << "," << format_double(r.lambda) << "," << format_double(r.k_nodal) << ","
            << format_double(r.gap) << "," << format_double(r.loose_bound) << "," << format_double(r.taylor1)
            << "," << format_double(r.taylor_full) << "," << (r.applicable ? 1 : 0) << "\n";
    }
}

} // namespace lapeig
