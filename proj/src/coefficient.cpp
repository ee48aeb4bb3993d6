#include "lapeig/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace lapeig {

CoefficientField CoefficientField::analytic(std::string name, Branch branch)
{
    CoefficientField f;
    f.name_ = std::move(name);
    f.kind_ = FieldKind::analytic;
    f.branches_.push_back(std::move(branch));
    f.region_of_ = [](const Point&) { return 0; };
    return f;
}

CoefficientField CoefficientField::piecewise(std::string name, std::vector<Branch> branches,
                                             std::function<int(const Point&)> region_of, Resolution resolution)
{
    if (branches.empty() || !region_of)
        throw std::invalid_argument("piecewise field needs branches and a region map");
    CoefficientField f;
    f.name_ = std::move(name);
    f.kind_ = FieldKind::piecewise_region;
    f.branches_ = std::move(branches);
    f.region_of_ = std::move(region_of);
    f.resolution_ = resolution;
    return f;
}

CoefficientField CoefficientField::per_element(std::string name, std::vector<double> values)
{
    CoefficientField f;
    f.name_ = std::move(name);
    f.kind_ = FieldKind::per_element;
    f.element_values_ = std::move(values);
    return f;
}

const CoefficientField::Branch& CoefficientField::branch_at(const Point& p) const
{
    if (kind_ == FieldKind::per_element)
        throw std::logic_error("per-element field has no pointwise branch");
    return branches_.at(region_of_(p));
}

const CoefficientField::Branch& CoefficientField::branch_on(const Mesh& mesh, int tri, const Point& p) const
{
    return branch_at(resolution_ == Resolution::pointwise ? p : mesh.barycenter(tri));
}

double CoefficientField::operator()(const Point& p) const { return branch_at(p).value(p); }

double CoefficientField::on_element(const Mesh& mesh, int tri, const Point& p) const
{
    if (kind_ == FieldKind::per_element)
        return element_values_.at(tri);
    return branch_on(mesh, tri, p).value(p);
}

bool CoefficientField::has_gradient() const
{
    return kind_ != FieldKind::per_element &&
           std::all_of(branches_.begin(), branches_.end(), [](const Branch& b) { return bool(b.gradient); });
}

bool CoefficientField::has_hessian() const
{
    return kind_ != FieldKind::per_element &&
           std::all_of(branches_.begin(), branches_.end(), [](const Branch& b) { return bool(b.hessian); });
}

Eigen::Vector2d CoefficientField::gradient(const Point& p) const
{
    const auto& b = branch_at(p);
    if (!b.gradient)
        throw std::logic_error("field " + name_ + " has no analytic gradient");
    return b.gradient(p);
}

Eigen::Matrix2d CoefficientField::hessian(const Point& p) const
{
    const auto& b = branch_at(p);
    if (!b.hessian)
        throw std::logic_error("field " + name_ + " has no analytic hessian");
    return b.hessian(p);
}

Eigen::Vector2d CoefficientField::gradient_on_element(const Mesh& mesh, int tri, const Point& p) const
{
    const auto& b = branch_on(mesh, tri, p);
    if (!b.gradient)
        throw std::logic_error("field " + name_ + " has no analytic gradient");
    return b.gradient(p);
}

Eigen::Matrix2d CoefficientField::hessian_on_element(const Mesh& mesh, int tri, const Point& p) const
{
    const auto& b = branch_on(mesh, tri, p);
    if (!b.hessian)
        throw std::logic_error("field " + name_ + " has no analytic hessian");
    return b.hessian(p);
}

int CoefficientField::region_of_element(const Mesh& mesh, int tri) const
{
    if (kind_ == FieldKind::per_element)
        return tri;
    const int region = region_of_(mesh.barycenter(tri));
    if (kind_ == FieldKind::piecewise_region && resolution_ == Resolution::pointwise)
        for (int v : mesh.triangle(tri))
            if (region_of_(mesh.node(v)) != region)
                return -1;
    return region;
}

bool CoefficientField::constant_on_element(const Mesh& mesh, int tri) const
{
    if (kind_ == FieldKind::per_element)
        return true;
    return region_of_element(mesh, tri) >= 0 && branch_on(mesh, tri, mesh.barycenter(tri)).constant;
}

double CoefficientField::nodal_value(const Mesh& mesh, int node) const
{
    if (kind_ == FieldKind::per_element)
        return element_values_.at(mesh.node_patch(node).front());
    return (*this)(mesh.node(node));
}

double kellogg_solution(const Point& p, const KelloggParameters& k)
{
    using std::numbers::pi;
    const double r = p.norm();
    if (r == 0.0)
        return 0.0;
    double theta = std::atan2(p.y(), p.x());
    if (theta < 0)
        theta += 2 * pi;
    const double g = k.gamma;
    double mu = 0.0;
    if (theta < pi / 2)
        mu = std::cos((pi / 2 - k.sigma) * g) * std::cos((theta - pi / 2 + k.rho) * g);
    else if (theta < pi)
        mu = std::cos(k.rho * g) * std::cos((theta - pi + k.sigma) * g);
    else if (theta < 3 * pi / 2)
        mu = std::cos(k.sigma * g) * std::cos((theta - pi - k.rho) * g);
    else
        mu = std::cos((pi / 2 - k.rho) * g) * std::cos((theta - 3 * pi / 2 - k.sigma) * g);
    return std::pow(r, g) * mu;
}

namespace {

CoefficientField::Branch constant_branch(double c)
{
    return {[c](const Point&) { return c; }, [](const Point&) { return Eigen::Vector2d::Zero().eval(); },
            [](const Point&) { return Eigen::Matrix2d::Zero().eval(); }, true};
}

CoefficientField::Branch p1_branch()
{
    return {[](const Point& p) { return std::sin(p.x() + p.y()); },
            [](const Point& p) { return Eigen::Vector2d::Constant(std::cos(p.x() + p.y())).eval(); },
            [](const Point& p) { return Eigen::Matrix2d::Constant(-std::sin(p.x() + p.y())).eval(); }};
}

CoefficientField::Branch p2_branch()
{
    auto bump = [](const Point& p) { return 50.0 * std::exp(-5.0 * p.squaredNorm()); };
    return {[bump](const Point& p) { return 1.0 + bump(p); },
            [bump](const Point& p) { return (-10.0 * bump(p) * p).eval(); },
            [bump](const Point& p) {
                Eigen::Matrix2d h;
                h << 100 * p.x() * p.x() - 10, 100 * p.x() * p.y(), 100 * p.x() * p.y(), 100 * p.y() * p.y() - 10;
                return (bump(p) * h).eval();
            }};
}

CoefficientField::Branch p3_branch()
{
    return {[](const Point& p) { return 128.0 * (std::pow(p.x(), 7) + std::pow(p.y(), 7)); },
            [](const Point& p) { return Eigen::Vector2d(896.0 * std::pow(p.x(), 6), 896.0 * std::pow(p.y(), 6)); },
            [](const Point& p) {
                Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
                h(0, 0) = 5376.0 * std::pow(p.x(), 5);
                h(1, 1) = 5376.0 * std::pow(p.y(), 5);
                return h;
            }};
}

} // namespace

CoefficientField constant_field(double c)
{
    if (!(c > 0))
        throw std::invalid_argument("constant coefficient must be positive");
    std::ostringstream name;
    name.precision(17);
    name << "constant:" << c;
    return CoefficientField::analytic(name.str(), constant_branch(c));
}

CoefficientField p1_field() { return CoefficientField::analytic("p1", p1_branch()); }
CoefficientField p2_field() { return CoefficientField::analytic("p2", p2_branch()); }
CoefficientField p3_field() { return CoefficientField::analytic("p3", p3_branch()); }

CoefficientField p4_field()
{
    return CoefficientField::piecewise("p4", {p1_branch(), p2_branch()},
                                       [](const Point& p) { return p.y() > 0.5 ? 0 : 1; }, CoefficientField::Resolution::pointwise);
}

CoefficientField quadrant_field(const KelloggParameters& params)
{
    return CoefficientField::piecewise("quadrant", {constant_branch(params.ratio), constant_branch(1.0)},
                                       [](const Point& p) { return (p.x() > 0) == (p.y() > 0) ? 0 : 1; });
}

CoefficientField random_piecewise_field(const Mesh& mesh, unsigned long long seed, double low, double high)
{
    if (!(low > 0) || !(high >= low))
        throw std::invalid_argument("random field range must satisfy 0 < low <= high");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(std::log(low), std::log(high));
    std::vector<double> values(mesh.num_triangles());
    for (auto& v : values)
        v = std::exp(u(rng));
    return CoefficientField::per_element("random:" + std::to_string(seed), std::move(values));
}

CoefficientField read_element_field(std::istream& in, const Mesh& mesh, std::string name)
{
    std::vector<double> values(mesh.num_triangles(), std::numeric_limits<double>::quiet_NaN());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        long idx = -1;
        double value = 0.0;
        if (!(row >> idx)) // header line
            continue;
        if (!(row >> value) || idx < 0 || idx >= mesh.num_triangles())
            throw std::invalid_argument("element field CSV: bad row '" + line + "'");
        values[idx] = value;
    }
    for (double v : values)
        if (!(v > 0))
            throw std::invalid_argument("element field CSV: missing or non-positive value");
    return CoefficientField::per_element(std::move(name), std::move(values));
}

CoefficientField builtin(const std::string& name, double param)
{
    if (name == "p1")
        return p1_field();
    if (name == "p2")
        return p2_field();
    if (name == "p3")
        return p3_field();
    if (name == "p4")
        return p4_field();
    if (name == "quadrant")
        return quadrant_field();
    if (name == "constant")
        return constant_field(param);
    throw std::invalid_argument("unknown coefficient '" + name + "'");
}

CoefficientField parse_coefficient(const std::string& spec, const Mesh* mesh)
{
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (name == "random") {
        if (!mesh)
            throw std::invalid_argument("random coefficient needs a mesh");
        return random_piecewise_field(*mesh, arg.empty() ? 0ULL : std::stoull(arg));
    }
    if (name == "csv") {
        if (!mesh)
            throw std::invalid_argument("csv coefficient needs a mesh");
        std::ifstream in(arg);
        if (!in)
            throw std::invalid_argument("cannot open coefficient CSV '" + arg + "'");
        return read_element_field(in, *mesh, spec);
    }
    double param = 1.0;
    if (!arg.empty()) {
        std::size_t used = 0;
        try {
            param = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != arg.size())
            throw std::invalid_argument("bad coefficient parameter '" + arg + "'");
    }
    return builtin(name, param);
}

std::vector<Eigen::Vector3d> SamplingRule::barycentric_points() const
{
    if (lattice_order < 1)
        throw std::invalid_argument("sampling lattice order must be >= 1");
    std::vector<Eigen::Vector3d> pts;
    const int n = lattice_order;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j)
            pts.emplace_back(double(i) / n, double(j) / n, double(n - i - j) / n);
    if (barycenter)
        pts.emplace_back(Eigen::Vector3d::Constant(1.0 / 3.0));
    pts.insert(pts.end(), quadrature.points.begin(), quadrature.points.end());
    return pts;
}

std::vector<Point> sample_points(const Mesh& mesh, int tri, const SamplingRule& sampler)
{
    const auto& t = mesh.triangle(tri);
    std::vector<Point> out;
    for (const auto& w : sampler.barycentric_points()) {
        // vertices are taken verbatim so nodal values are reproduced exactly
        if (w.maxCoeff() == 1.0) {
            int k = 0;
            w.maxCoeff(&k);
            out.push_back(mesh.node(t[k]));
        } else {
            out.push_back(w[0] * mesh.node(t[0]) + w[1] * mesh.node(t[1]) + w[2] * mesh.node(t[2]));
        }
    }
    return out;
}

bool SupportInterval::contains(double value, double eps) const
{
    const double scale = std::max(1.0, std::abs(value));
    return kmin - eps * scale <= value && value <= kmax + eps * scale;
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int count = 0;
};

Range element_range(const CoefficientField& field, const Mesh& mesh, int tri, const SamplingRule& sampler)
{
    Range r;
    for (const auto& p : sample_points(mesh, tri, sampler)) {
        const double v = field.on_element(mesh, tri, p);
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
        ++r.count;
    }
    return r;
}

SupportInterval combine(const CoefficientField& field, const Mesh& mesh, int dof, const std::vector<Range>& ranges)
{
    SupportInterval s;
    s.dof = dof;
    s.kmin = std::numeric_limits<double>::infinity();
    s.kmax = -std::numeric_limits<double>::infinity();
    bool exact = true;
    for (int t : mesh.node_patch(mesh.node_of_dof(dof))) {
        s.kmin = std::min(s.kmin, ranges[t].lo);
        s.kmax = std::max(s.kmax, ranges[t].hi);
        s.sample_count += ranges[t].count;
        exact = exact && field.constant_on_element(mesh, t);
    }
    s.exactness = exact ? Exactness::exact : Exactness::sampled;
    return s;
}

} // namespace

SupportInterval support_interval(const CoefficientField& field, const Mesh& mesh, int dof,
                                 const SamplingRule& sampler)
{
    if (dof < 0 || dof >= mesh.num_dofs())
        throw std::out_of_range("dof out of range");
    std::vector<Range> ranges(mesh.num_triangles());
    for (int t : mesh.node_patch(mesh.node_of_dof(dof)))
        ranges[t] = element_range(field, mesh, t, sampler);
    return combine(field, mesh, dof, ranges);
}

std::vector<SupportInterval> support_intervals(const CoefficientField& field, const Mesh& mesh,
                                               const SamplingRule& sampler)
{
    std::vector<Range> ranges(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        ranges[t] = element_range(field, mesh, t, sampler);
    std::vector<SupportInterval> out;
    out.reserve(mesh.num_dofs());
    for (int j = 0; j < mesh.num_dofs(); ++j)
        out.push_back(combine(field, mesh, j, ranges));
    return out;
}

Vector nodal_values(const CoefficientField& field, const Mesh& mesh)
{
    Vector v(mesh.num_dofs());
    for (int j = 0; j < mesh.num_dofs(); ++j)
        v[j] = field.nodal_value(mesh, mesh.node_of_dof(j));
    return v;
}

} // namespace lapeig
