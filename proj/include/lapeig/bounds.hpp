#pragma once

#include "lapeig/coefficient.hpp"
#include "lapeig/localization.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace lapeig {

struct BoundRow {
    int dof = -1;
    double lambda = 0.0;
    double k_nodal = 0.0;
    double gap = 0.0;
    /// max over the patch samples of |k - k(x_hat)|
    double loose_bound = 0.0;
    double patch_radius = 0.0;
    /// h_hat ||grad k(x_hat)||
    double taylor1 = 0.0;
    /// taylor1 + h_hat^2 / 2 * safety * max ||D^2 k||_2
    double taylor_full = 0.0;
    /// False where k is not C^2 on the patch; the Taylor columns are NaN then.
    bool applicable = false;
};

struct BoundReport {
    std::vector<BoundRow> rows;

    double max_gap() const;
    double median_gap() const;
    double max_patch_radius() const;
};

struct BoundOptions {
    SamplingRule sampler;
    double hessian_safety = 1.1;
    /// Central differences when the field lacks analytic derivatives.
    bool finite_difference_fallback = false;
    double fd_step = 1e-4;
};

/// Nodal-value bounds per dof for a matched pairing.
BoundReport evaluate_bounds(const CoefficientField& field, const Mesh& mesh, const PairingResult& pairing,
                            const Vector& eigenvalues, const BoundOptions& options = {});

struct ConvergenceRow {
    int resolution = 0;
    int dofs = 0;
    double h_max = 0.0;
    double max_gap = 0.0;
    double median_gap = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// Least-squares slope of log(max gap) against log(h_max); NaN when a gap vanishes.
    double slope = 0.0;
};

ConvergenceTable convergence_table(const CoefficientField& field, const std::function<Mesh(int)>& mesh_of,
                                   const std::vector<int>& resolutions, const BoundOptions& options = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// CSV `dof,lambda,k_nodal,gap,loose_bound,taylor1,taylor_full,applicable`.
void write_bounds_csv(std::ostream& out, const BoundReport& report);

} // namespace lapeig
