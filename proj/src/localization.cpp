#include "lapeig/localization.hpp"

#include "lapeig/assembly.hpp"
#include "lapeig/io.hpp"
#include "lapeig/spectral.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>

namespace lapeig {

AdjacencyMatrix::AdjacencyMatrix(int eigen_count, std::vector<std::vector<int>> neighbors, double eps)
    : eigen_count_(eigen_count), neighbors_(std::move(neighbors)), eps_(eps)
{
    for (auto& list : neighbors_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        if (!list.empty() && (list.front() < 0 || list.back() >= eigen_count_))
            throw std::invalid_argument("adjacency references eigenvalue out of range");
    }
}

AdjacencyMatrix AdjacencyMatrix::from_dense(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& g)
{
    std::vector<std::vector<int>> nb(g.cols());
    for (Eigen::Index i = 0; i < g.cols(); ++i)
        for (Eigen::Index s = 0; s < g.rows(); ++s)
            if (g(s, i))
                nb[i].push_back(static_cast<int>(s));
    return AdjacencyMatrix(static_cast<int>(g.rows()), std::move(nb));
}

bool AdjacencyMatrix::operator()(int s, int i) const
{
    const auto& list = neighbors_.at(i);
    return std::binary_search(list.begin(), list.end(), s);
}

long long AdjacencyMatrix::edge_count() const
{
    long long e = 0;
    for (const auto& list : neighbors_)
        e += static_cast<long long>(list.size());
    return e;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> AdjacencyMatrix::to_dense() const
{
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> g =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(eigen_count_, num_dofs(), false);
    for (int i = 0; i < num_dofs(); ++i)
        for (int s : neighbors_[i])
            g(s, i) = true;
    return g;
}

AdjacencyMatrix::DegreeStats AdjacencyMatrix::degree_stats() const
{
    DegreeStats st;
    if (neighbors_.empty())
        return st;
    st.min_dof_degree = std::numeric_limits<int>::max();
    std::vector<char> seen(eigen_count_, 0);
    for (const auto& list : neighbors_) {
        const int d = static_cast<int>(list.size());
        st.min_dof_degree = std::min(st.min_dof_degree, d);
        st.max_dof_degree = std::max(st.max_dof_degree, d);
        st.mean_dof_degree += d;
        for (int s : list)
            seen[s] = 1;
    }
    st.mean_dof_degree /= static_cast<double>(neighbors_.size());
    st.isolated_eigenvalues = static_cast<int>(std::count(seen.begin(), seen.end(), 0));
    return st;
}

AdjacencyMatrix build_adjacency(const Vector& eigenvalues, const std::vector<SupportInterval>& intervals, double eps)
{
    if (eigenvalues.size() != static_cast<Eigen::Index>(intervals.size()))
        throw std::invalid_argument("build_adjacency: eigenvalue and interval counts differ");
    if (!(eps >= 0 && eps < 1))
        throw std::invalid_argument("membership tolerance must lie in [0, 1)");
    if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
        throw std::invalid_argument("build_adjacency: eigenvalues must be ascending");

    const int n = static_cast<int>(eigenvalues.size());
    auto scale = [](double v) { return std::max(1.0, std::abs(v)); };
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::vector<int>> nb(intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        // both membership bounds are monotone in lambda for eps < 1
        auto first = std::partition_point(idx.begin(), idx.end(), [&](int s) {
            return eigenvalues[s] < iv.kmin - eps * scale(eigenvalues[s]);
        });
        auto last = std::partition_point(first, idx.end(), [&](int s) {
            return eigenvalues[s] <= iv.kmax + eps * scale(eigenvalues[s]);
        });
        nb[i].assign(first, last);
    }
    return AdjacencyMatrix(n, std::move(nb), eps);
}

namespace {

class HopcroftKarp {
public:
    explicit HopcroftKarp(const AdjacencyMatrix& g)
        : g_(g), match_u_(g.num_dofs(), -1), match_v_(g.num_eigenvalues(), -1), dist_(g.num_dofs())
    {
    }

    void warm_start(const std::vector<int>& pairs)
    {
        for (int u = 0; u < static_cast<int>(pairs.size()) && u < g_.num_dofs(); ++u) {
            const int v = pairs[u];
            if (v >= 0 && v < g_.num_eigenvalues() && match_u_[u] < 0 && match_v_[v] < 0 && g_(v, u)) {
                match_u_[u] = v;
                match_v_[v] = u;
            }
        }
    }

    int run()
    {
        while (bfs()) {
            next_.assign(g_.num_dofs(), 0);
            for (int u = 0; u < g_.num_dofs(); ++u)
                if (match_u_[u] < 0)
                    dfs(u);
        }
        return static_cast<int>(std::count_if(match_u_.begin(), match_u_.end(), [](int v) { return v >= 0; }));
    }

private:
    const AdjacencyMatrix& g_;

public:
    std::vector<int> match_u_;
    std::vector<int> match_v_;

private:
    static constexpr int inf = std::numeric_limits<int>::max();

    bool bfs()
    {
        std::deque<int> queue;
        for (int u = 0; u < g_.num_dofs(); ++u) {
            if (match_u_[u] < 0) {
                dist_[u] = 0;
                queue.push_back(u);
            } else {
                dist_[u] = inf;
            }
        }
        bool found = false;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : g_.eigenvalues_of(u)) {
                const int w = match_v_[v];
                if (w < 0) {
                    found = true;
                } else if (dist_[w] == inf) {
                    dist_[w] = dist_[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        return found;
    }

    bool dfs(int u)
    {
        const auto& adj = g_.eigenvalues_of(u);
        for (int& k = next_[u]; k < static_cast<int>(adj.size()); ++k) {
            const int v = adj[k];
            const int w = match_v_[v];
            if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
                match_u_[u] = v;
                match_v_[v] = u;
                ++k;
                return true;
            }
        }
        dist_[u] = inf;
        return false;
    }

    std::vector<int> dist_;
    std::vector<int> next_;
};

// Rematch dofs in increasing order to their smallest feasible eigenvalue,
// keeping earlier dofs fixed.
void canonicalize(const AdjacencyMatrix& g, std::vector<int>& match_u, std::vector<int>& match_v)
{
    const int n = g.num_dofs();
    std::vector<char> fixed(n, 0);
    std::vector<int> seen(g.num_eigenvalues(), -1);
    int stamp = 0;

    // alternating path from dof u to eigenvalue target avoiding fixed dofs and dof skip
    auto reroute = [&](auto&& self, int u, int target, int skip) -> bool {
        for (int v : g.eigenvalues_of(u)) {
            if (seen[v] == stamp)
                continue;
            seen[v] = stamp;
            const int w = match_v[v];
            if (v == target || (w >= 0 && w != skip && !fixed[w] && self(self, w, target, skip))) {
                match_u[u] = v;
                match_v[v] = u;
                return true;
            }
        }
        return false;
    };

    for (int i = 0; i < n; ++i) {
        const int current = match_u[i];
        for (int s : g.eigenvalues_of(i)) {
            if (s >= current)
                break;
            const int holder = match_v[s];
            if (holder < 0 || fixed[holder])
                continue;
            ++stamp;
            seen[s] = stamp;
            match_v[current] = -1;
            if (reroute(reroute, holder, current, i)) {
                match_u[i] = s;
                match_v[s] = i;
                break;
            }
            match_v[current] = i;
        }
        fixed[i] = 1;
    }
}

} // namespace

PairingResult perfect_matching(const AdjacencyMatrix& g, const MatchingOptions& options)
{
    HopcroftKarp hk(g);
    if (options.warm_start)
        hk.warm_start(*options.warm_start);
    PairingResult r;
    r.matching_size = hk.run();
    r.matched = r.matching_size == g.num_dofs() && g.num_dofs() == g.num_eigenvalues();

    if (r.matched && options.canonical)
        canonicalize(g, hk.match_u_, hk.match_v_);
    r.eigen_of_dof = hk.match_u_;

    if (r.matching_size < g.num_dofs()) {
        std::vector<char> seen_u(g.num_dofs(), 0), seen_v(g.num_eigenvalues(), 0);
        std::deque<int> queue;
        for (int u = 0; u < g.num_dofs(); ++u) {
            if (hk.match_u_[u] < 0) {
                seen_u[u] = 1;
                queue.push_back(u);
            }
        }
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : g.eigenvalues_of(u)) {
                if (seen_v[v])
                    continue;
                seen_v[v] = 1;
                const int w = hk.match_v_[v];
                if (w >= 0 && !seen_u[w]) {
                    seen_u[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        for (int u = 0; u < g.num_dofs(); ++u)
            if (seen_u[u])
                r.deficiency.push_back(u);
        for (int v = 0; v < g.num_eigenvalues(); ++v)
            if (seen_v[v])
                r.deficiency_neighbors.push_back(v);
    }
    return r;
}

std::vector<int> sorted_dof_order(const Vector& nodal)
{
    std::vector<int> order(nodal.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return nodal[a] < nodal[b]; });
    return order;
}

std::vector<int> sorted_warm_start(const AdjacencyMatrix& g, const Vector& nodal)
{
    const auto order = sorted_dof_order(nodal);
    std::vector<int> pairs(g.num_dofs(), -1);
    for (int s = 0; s < static_cast<int>(order.size()) && s < g.num_eigenvalues(); ++s)
        if (g(s, order[s]))
            pairs[order[s]] = s;
    return pairs;
}

SortedAudit sorted_pairing_audit(const Vector& eigenvalues, const Vector& nodal,
                                 const std::vector<SupportInterval>& intervals, double eps)
{
    if (eigenvalues.size() != nodal.size() || nodal.size() != static_cast<Eigen::Index>(intervals.size()))
        throw std::invalid_argument("sorted_pairing_audit: count mismatch");
    SortedAudit audit;
    audit.dof_of_rank = sorted_dof_order(nodal);
    for (int s = 0; s < static_cast<int>(eigenvalues.size()); ++s)
        if (!intervals[audit.dof_of_rank[s]].contains(eigenvalues[s], eps))
            audit.violations.push_back(s);
    return audit;
}

SubsetCount subset_counting_check(const Vector& eigenvalues, const std::vector<SupportInterval>& intervals,
                                  const std::vector<int>& subset, double eps)
{
    if (subset.empty())
        throw std::invalid_argument("subset_counting_check: empty subset");
    SubsetCount c;
    c.subset_size = static_cast<int>(subset.size());
    SupportInterval hull;
    hull.kmin = std::numeric_limits<double>::infinity();
    hull.kmax = -std::numeric_limits<double>::infinity();
    for (int j : subset) {
        hull.kmin = std::min(hull.kmin, intervals.at(j).kmin);
        hull.kmax = std::max(hull.kmax, intervals.at(j).kmax);
    }
    for (double lam : eigenvalues) {
        if (hull.contains(lam, eps))
            ++c.hull_count;
        if (std::any_of(subset.begin(), subset.end(), [&](int j) { return intervals[j].contains(lam, eps); }))
            ++c.union_count;
    }
    c.pass = c.hull_count >= c.subset_size && c.union_count >= c.subset_size;
    return c;
}

void write_pairing_csv(std::ostream& out, const Mesh& mesh, const Vector& nodal,
                       const std::vector<SupportInterval>& intervals, const Vector& eigenvalues,
                       const PairingResult& pairing)
{
    using io::format_double;
    out << "dof,node_x,node_y,k_nodal,kmin,kmax,lambda_paired\n";
    for (int j = 0; j < mesh.num_dofs(); ++j) {
        const Point& p = mesh.node(mesh.node_of_dof(j));
        const int s = pairing.eigen_of_dof.at(j);
        out << j << "," << format_double(p.x()) << "," << format_double(p.y()) << "," << format_double(nodal[j])
            << "," << format_double(intervals[j].kmin) << "," << format_double(intervals[j].kmax) << ","
            << (s >= 0 ? format_double(eigenvalues[s]) : std::string("nan")) << "\n";
    }
}

void write_violations_csv(std::ostream& out, const Vector& eigenvalues, const std::vector<SupportInterval>& intervals,
                          const SortedAudit& audit)
{
    using io::format_double;
    out << "rank,lambda,dof,kmin,kmax\n";
    for (int s : audit.violations) {
        const int j = audit.dof_of_rank[s];
        out << s + 1 << "," << format_double(eigenvalues[s]) << "," << j << "," << format_double(intervals[j].kmin)
            << "," << format_double(intervals[j].kmax) << "\n";
    }
}

PairingStudy study_pairing(const Mesh& mesh, const CoefficientField& field, const StudyOptions& options)
{
    const SparseMatrix a = assemble_stiffness(mesh, field, options.sampler.quadrature);
    const SparseMatrix l = assemble_laplacian(mesh);
    PairingStudy st;
    st.eigenvalues = generalized_eigs(a, l, {.vectors = false}).eigenvalues;
    st.intervals = support_intervals(field, mesh, options.sampler);
    st.nodal = nodal_values(field, mesh);
    st.graph = build_adjacency(st.eigenvalues, st.intervals, options.eps);
    MatchingOptions mo;
    mo.warm_start = sorted_warm_start(st.graph, st.nodal);
    mo.canonical = options.canonical;
    st.pairing = perfect_matching(st.graph, mo);
    return st;
}

} // namespace lapeig
