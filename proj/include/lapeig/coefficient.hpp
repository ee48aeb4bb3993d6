#pragma once

#include "lapeig/common.hpp"
#include "lapeig/mesh.hpp"
#include "lapeig/quadrature.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lapeig {

enum class FieldKind { analytic, piecewise_region, per_element };

/// Scalar diffusion coefficient k(x). Piecewise fields resolve the branch of a
/// point inside an element by the element's barycenter, so interface points
/// are evaluated consistently with the element that owns them.
class CoefficientField {
public:
    struct Branch {
        std::function<double(const Point&)> value;
        std::function<Eigen::Vector2d(const Point&)> gradient; // optional
        std::function<Eigen::Matrix2d(const Point&)> hessian;  // optional
        bool constant = false;
    };

    static CoefficientField analytic(std::string name, Branch branch);
    /// How a piecewise field resolves its branch inside a triangle.
    enum class Resolution {
        barycenter, ///< one branch per element, chosen at the barycenter
        pointwise,  ///< region_of at every evaluation point
    };

    /// region_of maps a point to a branch index.
    static CoefficientField piecewise(std::string name, std::vector<Branch> branches,
                                      std::function<int(const Point&)> region_of,
                                      Resolution resolution = Resolution::barycenter);
    static CoefficientField per_element(std::string name, std::vector<double> values);

    const std::string& name() const { return name_; }
    FieldKind kind() const { return kind_; }

    /// Pointwise value; not defined for per-element fields.
    double operator()(const Point& p) const;
    /// Value at p seen from inside triangle tri.
    double on_element(const Mesh& mesh, int tri, const Point& p) const;

    bool has_gradient() const;
    bool has_hessian() const;
    Eigen::Vector2d gradient(const Point& p) const;
    Eigen::Matrix2d hessian(const Point& p) const;
    Eigen::Vector2d gradient_on_element(const Mesh& mesh, int tri, const Point& p) const;
    Eigen::Matrix2d hessian_on_element(const Mesh& mesh, int tri, const Point& p) const;

    /// Branch owning the element; the triangle index for per-element fields.
    /// -1 for pointwise fields whose vertices and barycenter disagree.
    int region_of_element(const Mesh& mesh, int tri) const;
    bool constant_on_element(const Mesh& mesh, int tri) const;

    /// k at a mesh node: pointwise for analytic and piecewise fields, the value
    /// of the first incident triangle for per-element fields.
    double nodal_value(const Mesh& mesh, int node) const;

    const std::vector<double>& element_values() const { return element_values_; }

private:
    const Branch& branch_at(const Point& p) const;
    const Branch& branch_on(const Mesh& mesh, int tri, const Point& p) const;

    std::string name_;
    FieldKind kind_ = FieldKind::analytic;
    std::vector<Branch> branches_;
    std::function<int(const Point&)> region_of_;
    Resolution resolution_ = Resolution::barycenter;
    std::vector<double> element_values_;
};

/// Kellogg checkerboard parameters for exponent gamma = 0.1: coefficient R in
/// the first and third quadrants, 1 in the second and fourth.
struct KelloggParameters {
    double gamma = 0.1;
    double ratio = 161.4476387975881;
    double rho = 0.7853981633974483; // pi / 4
    double sigma = -14.92256510455152;
};

/// Exact singular solution r^gamma mu(theta) of the Kellogg problem.
double kellogg_solution(const Point& p, const KelloggParameters& params = {});

CoefficientField constant_field(double c);
CoefficientField p1_field();
CoefficientField p2_field();
CoefficientField p3_field();
/// p1 on (0,1) x (1/2,1), p2 elsewhere; the line y = 1/2 belongs to p2.
CoefficientField p4_field();
/// Checkerboard on (-1,1)^2 with the Kellogg ratio in quadrants 1 and 3.
CoefficientField quadrant_field(const KelloggParameters& params = {});
/// Per-element constants, log-uniform in [low, high].
CoefficientField random_piecewise_field(const Mesh& mesh, unsigned long long seed, double low = 1.0,
                                        double high = 1e3);
/// CSV rows `triangle_index,value`, one per triangle.
CoefficientField read_element_field(std::istream& in, const Mesh& mesh, std::string name = "csv");

/// Builtin by name: p1..p4, quadrant, constant(param).
CoefficientField builtin(const std::string& name, double param = 1.0);

/// Mini-syntax `name[:param]`, e.g. `constant:2`, `p4`, `random:7`.
/// Mesh-dependent fields (random, csv) need the mesh.
CoefficientField parse_coefficient(const std::string& spec, const Mesh* mesh = nullptr);

/// Sample points per triangle: the barycentric lattice of the given order
/// (order 4 puts three interior points on every edge), the barycenter, and
/// always the assembly quadrature nodes.
struct SamplingRule {
    int lattice_order = 4;
    bool barycenter = true;
    QuadratureRule quadrature = QuadratureRule::edge_midpoints();

    std::vector<Eigen::Vector3d> barycentric_points() const;
};

enum class Exactness { exact, sampled };

struct SupportInterval {
    int dof = -1;
    double kmin = 0.0;
    double kmax = 0.0;
    int sample_count = 0;
    Exactness exactness = Exactness::sampled;

    bool contains(double value, double eps) const;
};

SupportInterval support_interval(const CoefficientField& field, const Mesh& mesh, int dof,
                                 const SamplingRule& sampler = {});
std::vector<SupportInterval> support_intervals(const CoefficientField& field, const Mesh& mesh,
                                               const SamplingRule& sampler = {});

/// Physical sample points of a triangle under the sampling rule.
std::vector<Point> sample_points(const Mesh& mesh, int tri, const SamplingRule& sampler);

/// Nodal values k(x_j) for every dof.
Vector nodal_values(const CoefficientField& field, const Mesh& mesh);

} // namespace lapeig
