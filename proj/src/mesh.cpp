#include "lapeig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace lapeig {

namespace {

std::uint64_t edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double cross(const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); }

} // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles))
{
    const int n = num_nodes();
    node_patch_.assign(n, {});
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(triangles_.size() * 3);
    for (int t = 0; t < num_triangles(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int v = triangles_[t][k];
            if (v < 0 || v >= n)
                throw std::invalid_argument("triangle references node out of range");
            node_patch_[v].push_back(t);
            ++edge_count[edge_key(v, triangles_[t][(k + 1) % 3])];
        }
    }
    boundary_.assign(n, false);
    for (const auto& [key, count] : edge_count) {
        if (count == 1) {
            boundary_[key >> 32] = true;
            boundary_[key & 0xffffffffu] = true;
        }
    }
    dof_of_node_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!boundary_[i] && !node_patch_[i].empty()) {
            dof_of_node_[i] = static_cast<int>(free_nodes_.size());
            free_nodes_.push_back(i);
        }
    }
}

std::vector<int> Mesh::boundary_nodes() const
{
    std::vector<int> out;
    for (int i = 0; i < num_nodes(); ++i)
        if (boundary_[i])
            out.push_back(i);
    return out;
}

double Mesh::signed_area(int t) const
{
    const auto& tri = triangles_[t];
    return 0.5 * cross(nodes_[tri[1]] - nodes_[tri[0]], nodes_[tri[2]] - nodes_[tri[0]]);
}

Point Mesh::barycenter(int t) const
{
    const auto& tri = triangles_[t];
    return (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]) / 3.0;
}

double Mesh::diameter(int t) const
{
    const auto& tri = triangles_[t];
    return std::max({(nodes_[tri[0]] - nodes_[tri[1]]).norm(),
                     (nodes_[tri[1]] - nodes_[tri[2]]).norm(),
                     (nodes_[tri[2]] - nodes_[tri[0]]).norm()});
}

double Mesh::total_area() const
{
    double sum = 0.0;
    for (int t = 0; t < num_triangles(); ++t)
        sum += signed_area(t);
    return sum;
}

Mesh uniform_square(int cells_per_side, double low, double high, Diagonal diagonal)
{
    if (cells_per_side < 1)
        throw std::invalid_argument("cells_per_side must be positive");
    if (!(low < high) || !std::isfinite(low) || !std::isfinite(high))
        throw std::invalid_argument("degenerate square corners");

    const int m = cells_per_side;
    const double h = (high - low) / m;
    std::vector<Point> nodes;
    nodes.reserve((m + 1) * (m + 1));
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i)
            nodes.emplace_back(i == m ? high : low + i * h, j == m ? high : low + j * h);

    auto id = [m](int i, int j) { return j * (m + 1) + i; };
    std::vector<Triangle> tris;
    tris.reserve(2 * m * m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const int p00 = id(i, j), p10 = id(i + 1, j), p01 = id(i, j + 1), p11 = id(i + 1, j + 1);
            // refinement edge is the shared diagonal, newest vertex the right angle
            if (diagonal == Diagonal::up) {
                tris.push_back({p11, p00, p10});
                tris.push_back({p00, p11, p01});
            } else {
                tris.push_back({p10, p01, p00});
                tris.push_back({p01, p10, p11});
            }
        }
    }
    return Mesh(std::move(nodes), std::move(tris));
}

bool in_reentrant_domain(const Point& p)
{
    const bool in_square = p.x() >= 0 && p.x() <= 1 && p.y() >= 0 && p.y() <= 1;
    const bool in_wedge = p.x() > 0.8 * p.y() + 0.1 && p.y() < 0.8 * p.x() + 0.1;
    return in_square && !in_wedge;
}

double reentrant_domain_area()
{
    // the wedge is the quadrilateral (0.1,0) (1,0) (1,0.9) (0.5,0.5) of area 0.45
    return 1.0 - 0.45;
}

Mesh reentrant_corner(int cells_per_side)
{
    if (cells_per_side < 4)
        throw std::invalid_argument("reentrant_corner needs cells_per_side >= 4");
    const int m = (cells_per_side + 1) / 2;

    const std::array<std::array<Point, 4>, 3> quads{{
        {Point(0, 0), Point(0.1, 0), Point(0.5, 0.5), Point(0, 0.5)},
        {Point(0, 0.5), Point(0.5, 0.5), Point(0.5, 1), Point(0, 1)},
        {Point(0.5, 0.5), Point(1, 0.9), Point(1, 1), Point(0.5, 1)},
    }};

    std::vector<Point> nodes;
    std::map<std::pair<long long, long long>, int> index;
    auto node_id = [&](const Point& p) {
        const auto key = std::make_pair(std::llround(p.x() * 1e10), std::llround(p.y() * 1e10));
        auto [it, inserted] = index.emplace(key, static_cast<int>(nodes.size()));
        if (inserted)
            nodes.push_back(p);
        return it->second;
    };

    std::vector<Triangle> tris;
    for (const auto& q : quads) {
        std::vector<int> grid((m + 1) * (m + 1));
        for (int j = 0; j <= m; ++j) {
            for (int i = 0; i <= m; ++i) {
                const double s = static_cast<double>(i) / m, t = static_cast<double>(j) / m;
                const Point p = (1 - s) * (1 - t) * q[0] + s * (1 - t) * q[1] + s * t * q[2] + (1 - s) * t * q[3];
                grid[j * (m + 1) + i] = node_id(p);
            }
        }
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                const int p00 = grid[j * (m + 1) + i], p10 = grid[j * (m + 1) + i + 1];
                const int p01 = grid[(j + 1) * (m + 1) + i], p11 = grid[(j + 1) * (m + 1) + i + 1];
                const double d_up = (nodes[p11] - nodes[p00]).norm();
                const double d_down = (nodes[p01] - nodes[p10]).norm();
                if (d_up <= d_down) {
                    tris.push_back({p11, p00, p10});
                    tris.push_back({p00, p11, p01});
                } else {
                    tris.push_back({p10, p01, p00});
                    tris.push_back({p01, p10, p11});
                }
            }
        }
    }
    return Mesh(std::move(nodes), std::move(tris));
}

RegionPredicate RegionPredicate::box(double xmin, double xmax, double ymin, double ymax)
{
    if (!(xmin <= xmax) || !(ymin <= ymax))
        throw std::invalid_argument("empty box region");
    return half_planes({{Point(-1, 0), -xmin}, {Point(1, 0), xmax}, {Point(0, -1), -ymin}, {Point(0, 1), ymax}});
}

RegionPredicate RegionPredicate::half_planes(std::vector<HalfPlane> planes)
{
    RegionPredicate r;
    r.planes_ = std::move(planes);
    return r;
}

bool RegionPredicate::contains(const Point& p) const
{
    return std::all_of(planes_.begin(), planes_.end(),
                       [&](const HalfPlane& h) { return h.normal.dot(p) <= h.offset; });
}

namespace {

class Bisector {
public:
    explicit Bisector(const Mesh& mesh) : nodes_(mesh.nodes()), tris_(mesh.triangles()) {}

    void bisect(std::size_t t)
    {
        const auto [a, b, c] = tris_[t];
        const int m = midpoint(a, b);
        tris_[t] = {c, a, m};
        tris_.push_back({b, c, m});
    }

    bool has_hanging_node(std::size_t t) const
    {
        const auto& tri = tris_[t];
        for (int k = 0; k < 3; ++k)
            if (midpoints_.count(edge_key(tri[k], tri[(k + 1) % 3])))
                return true;
        return false;
    }

    void close()
    {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t t = 0; t < tris_.size(); ++t) {
                while (has_hanging_node(t)) {
                    bisect(t);
                    changed = true;
                }
            }
        }
    }

    std::vector<Point> nodes_;
    std::vector<Triangle> tris_;

private:
    int midpoint(int a, int b)
    {
        const auto key = edge_key(a, b);
        if (auto it = midpoints_.find(key); it != midpoints_.end())
            return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(0.5 * (nodes_[a] + nodes_[b]));
        midpoints_.emplace(key, id);
        return id;
    }

    std::unordered_map<std::uint64_t, int> midpoints_;
};

} // namespace

RefineResult refine_local(const Mesh& mesh, const RegionPredicate& region, int steps)
{
    if (steps < 0)
        throw std::invalid_argument("refinement steps must be non-negative");
    if (steps == 0)
        return {mesh, false};

    Bisector work(mesh);
    for (int step = 0; step < steps; ++step) {
        std::vector<std::size_t> marked;
        for (std::size_t t = 0; t < work.tris_.size(); ++t) {
            const auto& tri = work.tris_[t];
            const Point bc = (work.nodes_[tri[0]] + work.nodes_[tri[1]] + work.nodes_[tri[2]]) / 3.0;
            if (region.contains(bc))
                marked.push_back(t);
        }
        if (marked.empty()) {
            if (step == 0)
                return {mesh, true};
            break;
        }
        for (auto t : marked)
            work.bisect(t);
        work.close();
    }
    return {Mesh(std::move(work.nodes_), std::move(work.tris_)), false};
}

SupportPatch support_patch(const Mesh& mesh, int dof)
{
    if (dof < 0 || dof >= mesh.num_dofs())
        throw std::out_of_range("dof out of range");
    const int node = mesh.node_of_dof(dof);
    SupportPatch patch;
    patch.triangles = mesh.node_patch(node);
    for (int t : patch.triangles)
        for (int v : mesh.triangle(t))
            patch.nodes.insert(v);
    for (int v : patch.nodes)
        patch.diameter = std::max(patch.diameter, (mesh.node(v) - mesh.node(node)).norm());
    return patch;
}

bool is_conforming(const Mesh& mesh)
{
    std::unordered_map<std::uint64_t, int> edge_count;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (!(mesh.signed_area(t) > 0))
            return false;
        const auto& tri = mesh.triangle(t);
        for (int k = 0; k < 3; ++k)
            ++edge_count[edge_key(tri[k], tri[(k + 1) % 3])];
    }
    for (const auto& [key, count] : edge_count) {
        if (count > 2)
            return false;
        if (count == 2)
            continue;
        const Point& a = mesh.node(static_cast<int>(key >> 32));
        const Point& b = mesh.node(static_cast<int>(key & 0xffffffffu));
        const Point d = b - a;
        const double len2 = d.squaredNorm();
        for (int v = 0; v < mesh.num_nodes(); ++v) {
            const Point w = mesh.node(v) - a;
            const double s = w.dot(d) / len2;
            if (s <= 1e-12 || s >= 1 - 1e-12)
                continue;
            if (std::abs(cross(d, w)) <= 1e-12 * len2)
                return false;
        }
    }
    return true;
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    const auto boundary = mesh.boundary_nodes();
    out << "nodes " << mesh.num_nodes() << " triangles " << mesh.num_triangles() << " boundary "
        << boundary.size() << "\n";
    out.precision(17);
    for (const auto& p : mesh.nodes())
        out << p.x() << " " << p.y() << "\n";
    for (const auto& t : mesh.triangles())
        out << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (int b : boundary)
        out << b << "\n";
}

Mesh read_mesh(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("mesh file: missing header");
    std::istringstream header(line);
    std::string k1, k2, k3;
    long n = -1, t = -1, b = -1;
    header >> k1 >> n >> k2 >> t >> k3 >> b;
    if (!header || k1 != "nodes" || k2 != "triangles" || k3 != "boundary" || n < 0 || t < 0 || b < 0)
        throw std::invalid_argument("mesh file: malformed header");

    std::vector<Point> nodes(n);
    for (auto& p : nodes)
        if (!(in >> p.x() >> p.y()))
            throw std::invalid_argument("mesh file: truncated coordinates");
    std::vector<Triangle> tris(t);
    for (auto& tri : tris)
        if (!(in >> tri[0] >> tri[1] >> tri[2]))
            throw std::invalid_argument("mesh file: truncated connectivity");
    std::vector<int> boundary(b);
    for (auto& v : boundary)
        if (!(in >> v))
            throw std::invalid_argument("mesh file: truncated boundary list");

    Mesh mesh(std::move(nodes), std::move(tris));
    if (boundary != mesh.boundary_nodes())
        throw std::invalid_argument("mesh file: boundary list does not match topology");
    return mesh;
}

} // namespace lapeig
