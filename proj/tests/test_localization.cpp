#include "lapeig/localization.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace lapeig;

namespace {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

bool valid_matching(const AdjacencyMatrix& g, const PairingResult& p)
{
    std::set<int> used;
    for (int i = 0; i < g.num_dofs(); ++i) {
        const int s = p.eigen_of_dof[i];
        if (s < 0 || !g(s, i) || !used.insert(s).second)
            return false;
    }
    return true;
}

// Largest matching by exhaustive search over permutations.
int brute_force_matching(const BoolMatrix& g)
{
    const int n = static_cast<int>(g.cols());
    std::vector<int> perm(g.rows());
    for (int s = 0; s < g.rows(); ++s)
        perm[s] = s;
    int best = 0;
    do {
        int m = 0;
        for (int i = 0; i < n; ++i)
            m += g(perm[i], i);
        best = std::max(best, m);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

SupportInterval interval(int dof, double lo, double hi)
{
    SupportInterval s;
    s.dof = dof;
    s.kmin = lo;
    s.kmax = hi;
    return s;
}

} // namespace

TEST_CASE("identity and complete graphs")
{
    const int n = 6;
    const auto id = AdjacencyMatrix::from_dense(BoolMatrix::Identity(n, n));
    const PairingResult a = perfect_matching(id);
    CHECK(a.matched);
    for (int i = 0; i < n; ++i)
        CHECK(a.eigen_of_dof[i] == i);
    const auto full = AdjacencyMatrix::from_dense(BoolMatrix::Constant(n, n, true));
    const PairingResult b = perfect_matching(full);
    CHECK(b.matched);
    CHECK(valid_matching(full, b));
    CHECK(full.edge_count() == n * n);
    CHECK(full.to_dense().all());
}

TEST_CASE("deficiency witness violates Hall's condition")
{
    BoolMatrix g = BoolMatrix::Zero(4, 4);
    g(0, 0) = g(0, 1) = g(0, 2) = true; // dofs 0-2 only see eigenvalue 0 and 1
    g(1, 1) = true;
    g(1, 2) = g(2, 3) = g(3, 3) = true;
    const auto adj = AdjacencyMatrix::from_dense(g);
    const PairingResult r = perfect_matching(adj);
    CHECK_FALSE(r.matched);
    CHECK(r.matching_size == 3);
    CHECK(r.deficiency_neighbors.size() < r.deficiency.size());
    std::set<int> nbrs;
    for (int i : r.deficiency)
        for (int s : adj.eigenvalues_of(i))
            nbrs.insert(s);
    CHECK(std::vector<int>(nbrs.begin(), nbrs.end()) == r.deficiency_neighbors);
}

TEST_CASE("matching size agrees with exhaustive search")
{
    std::mt19937_64 rng(11);
    std::bernoulli_distribution edge(0.3);
    for (int trial = 0; trial < 200; ++trial) {
        BoolMatrix g(6, 6);
        for (int s = 0; s < 6; ++s)
            for (int i = 0; i < 6; ++i)
                g(s, i) = edge(rng);
        const auto adj = AdjacencyMatrix::from_dense(g);
        const PairingResult r = perfect_matching(adj);
        CHECK(r.matching_size == brute_force_matching(g));
        CHECK(r.matched == (r.matching_size == 6));
        if (!r.matched)
            CHECK(r.deficiency_neighbors.size() < r.deficiency.size());
    }
}

TEST_CASE("canonical matching is the lexicographically smallest")
{
    std::mt19937_64 rng(5);
    std::bernoulli_distribution edge(0.5);
    for (int trial = 0; trial < 50; ++trial) {
        BoolMatrix g(5, 5);
        for (int s = 0; s < 5; ++s)
            for (int i = 0; i < 5; ++i)
                g(s, i) = edge(rng) || s == (i + trial) % 5;
        std::vector<int> perm = {0, 1, 2, 3, 4}, best;
        do {
            bool ok = true;
            for (int i = 0; i < 5; ++i)
                ok = ok && g(perm[i], i);
            if (ok) {
                best = perm;
                break;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        MatchingOptions opt;
        opt.canonical = true;
        const PairingResult r = perfect_matching(AdjacencyMatrix::from_dense(g), opt);
        REQUIRE(r.matched);
        CHECK(r.eigen_of_dof == best);
    }
}

TEST_CASE("warm start does not change the outcome")
{
    const Mesh mesh = uniform_square(6);
    const auto field = p3_field();
    const PairingStudy st = study_pairing(mesh, field);
    CHECK(st.pairing.matched);
    CHECK(valid_matching(st.graph, st.pairing));
    MatchingOptions cold;
    CHECK(perfect_matching(st.graph, cold).matched);
    MatchingOptions bad;
    bad.warm_start = std::vector<int>(mesh.num_dofs(), 0);
    CHECK(perfect_matching(st.graph, bad).matched);
}

TEST_CASE("adjacency uses the relative tolerance")
{
    Vector ev(3);
    ev << 1.0, 2.0, 100.0;
    const std::vector<SupportInterval> iv = {interval(0, 1.0 + 5e-10, 1.5), interval(1, 1.5, 2.0 - 1e-8),
                                             interval(2, 100.0 + 5e-8, 200.0)};
    const auto g = build_adjacency(ev, iv, 1e-9);
    CHECK(g(0, 0));
    CHECK_FALSE(g(1, 1));
    CHECK(g(2, 2));
    const std::vector<SupportInterval> far = {interval(0, 0, 0.5), interval(1, 0, 0.5), interval(2, 100.0 + 2e-7, 200)};
    CHECK_FALSE(build_adjacency(ev, far, 1e-9)(2, 2));
    CHECK_THROWS_AS(build_adjacency(ev, iv, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_adjacency(ev, iv, -1e-3), std::invalid_argument);
}

TEST_CASE("adjacency matches a direct membership scan")
{
    const Mesh mesh = uniform_square(7);
    const PairingStudy st = study_pairing(mesh, p2_field());
    const BoolMatrix dense = st.graph.to_dense();
    for (int s = 0; s < st.eigenvalues.size(); ++s)
        for (int i = 0; i < mesh.num_dofs(); ++i)
            CHECK(dense(s, i) == st.intervals[i].contains(st.eigenvalues[s], 1e-9));
    const auto stats = st.graph.degree_stats();
    CHECK(stats.min_dof_degree >= 1);
    CHECK(stats.max_dof_degree <= mesh.num_dofs());
}

TEST_CASE("sorted pairing audit")
{
    const Mesh mesh = uniform_square(6);
    const PairingStudy c = study_pairing(mesh, constant_field(3.0));
    const SortedAudit ac = sorted_pairing_audit(c.eigenvalues, c.nodal, c.intervals);
    CHECK(ac.violations.empty());
    CHECK(c.pairing.matched);
    CHECK(ac.dof_of_rank == sorted_dof_order(c.nodal));

    const Mesh m10 = uniform_square(10);
    const PairingStudy p4 = study_pairing(m10, p4_field());
    const SortedAudit a4 = sorted_pairing_audit(p4.eigenvalues, p4.nodal, p4.intervals);
    CHECK_FALSE(a4.violations.empty());
    CHECK(p4.pairing.matched);
    for (int s : a4.violations)
        CHECK((s >= 20 && s < 45));
}

TEST_CASE("sorted order breaks ties by dof")
{
    Vector nodal(4);
    nodal << 2.0, 1.0, 2.0, 1.0;
    CHECK(sorted_dof_order(nodal) == std::vector<int>{1, 3, 0, 2});
}

TEST_CASE("subset counting")
{
    Vector ev(3);
    ev << 1.0, 2.0, 3.0;
    const std::vector<SupportInterval> iv = {interval(0, 0.5, 1.5), interval(1, 2.5, 3.5), interval(2, 1.0, 3.0)};
    const SubsetCount a = subset_counting_check(ev, iv, {0, 1});
    CHECK(a.hull_count == 3);
    CHECK(a.union_count == 2);
    CHECK(a.pass);
    const std::vector<SupportInterval> tight = {interval(0, 0.5, 0.6), interval(1, 0.5, 0.6), interval(2, 1, 3)};
    CHECK_FALSE(subset_counting_check(ev, tight, {0, 1}).pass);
    CHECK_THROWS_AS(subset_counting_check(ev, iv, {}), std::invalid_argument);
}

TEST_CASE("pairing CSV columns")
{
    const Mesh mesh = uniform_square(4);
    const PairingStudy st = study_pairing(mesh, p1_field());
    std::stringstream s;
    write_pairing_csv(s, mesh, st.nodal, st.intervals, st.eigenvalues, st.pairing);
    std::string header;
    std::getline(s, header);
    CHECK(header == "dof,node_x,node_y,k_nodal,kmin,kmax,lambda_paired");
}
