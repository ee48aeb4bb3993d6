#pragma once

#include "lapeig/coefficient.hpp"
#include "lapeig/common.hpp"
#include "lapeig/mesh.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace lapeig {

/// Bipartite graph between eigenvalue indices s (rows) and dofs i (columns):
/// G(s, i) holds iff lambda_s lies in k(T_i) within the membership tolerance
///   kmin_i - eps * max(1, |lambda_s|) <= lambda_s <= kmax_i + eps * max(1, |lambda_s|).
/// Stored per dof as an ascending list of adjacent eigenvalue indices.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    AdjacencyMatrix(int eigen_count, std::vector<std::vector<int>> neighbors, double eps = 0.0);

    /// From a dense boolean matrix indexed (eigenvalue, dof).
    static AdjacencyMatrix from_dense(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& g);

    int num_eigenvalues() const { return eigen_count_; }
    int num_dofs() const { return static_cast<int>(neighbors_.size()); }
    double tolerance() const { return eps_; }

    bool operator()(int s, int i) const;
    const std::vector<int>& eigenvalues_of(int dof) const { return neighbors_[dof]; }
    long long edge_count() const;

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> to_dense() const;

    struct DegreeStats {
        int min_dof_degree = 0;
        int max_dof_degree = 0;
        double mean_dof_degree = 0.0;
        int isolated_eigenvalues = 0;
    };
    DegreeStats degree_stats() const;

private:
    int eigen_count_ = 0;
    std::vector<std::vector<int>> neighbors_;
    double eps_ = 0.0;
};

/// eigenvalues must be ascending.
AdjacencyMatrix build_adjacency(const Vector& eigenvalues, const std::vector<SupportInterval>& intervals,
                                double eps = 1e-9);

struct PairingResult {
    bool matched = false;
    int matching_size = 0;
    /// eigen_of_dof[i] = pi(i), or -1 for dofs left unmatched.
    std::vector<int> eigen_of_dof;
    /// Hall violator J with |G(J)| < |J| when no perfect matching exists.
    std::vector<int> deficiency;
    std::vector<int> deficiency_neighbors;
};

struct MatchingOptions {
    /// Initial matching tried edge by edge before augmenting (dof -> eigen).
    std::optional<std::vector<int>> warm_start;
    /// Post-process to the lexicographically smallest pi.
    bool canonical = false;
};

/// Hopcroft-Karp maximum matching; on deficiency returns a Koenig witness.
PairingResult perfect_matching(const AdjacencyMatrix& g, const MatchingOptions& options = {});

struct SortedAudit {
    /// dof_of_rank[s] = P(s), the dof with the s-th smallest nodal value.
    std::vector<int> dof_of_rank;
    /// Eigenvalue indices s with lambda_s outside k(T_P(s)).
    std::vector<int> violations;
};

SortedAudit sorted_pairing_audit(const Vector& eigenvalues, const Vector& nodal,
                                 const std::vector<SupportInterval>& intervals, double eps = 1e-9);

/// Order in which the sorted pairing visits dofs: ascending nodal value, ties by dof.
std::vector<int> sorted_dof_order(const Vector& nodal);

/// Warm start pairing the s-th smallest eigenvalue with the s-th smallest
/// nodal value wherever that pair is an edge.
std::vector<int> sorted_warm_start(const AdjacencyMatrix& g, const Vector& nodal);

struct SubsetCount {
    int hull_count = 0;  ///< eigenvalues in [min kmin_J, max kmax_J]
    int union_count = 0; ///< eigenvalues in the union of k(T_j), j in J
    int subset_size = 0;
    bool pass = false;
};

SubsetCount subset_counting_check(const Vector& eigenvalues, const std::vector<SupportInterval>& intervals,
                                  const std::vector<int>& subset, double eps = 1e-9);

/// CSV `dof,node_x,node_y,k_nodal,kmin,kmax,lambda_paired`.
void write_pairing_csv(std::ostream& out, const Mesh& mesh, const Vector& nodal,
                       const std::vector<SupportInterval>& intervals, const Vector& eigenvalues,
                       const PairingResult& pairing);

/// CSV `rank,lambda,dof,kmin,kmax` for the sorted-pairing violations.
void write_violations_csv(std::ostream& out, const Vector& eigenvalues, const std::vector<SupportInterval>& intervals,
                          const SortedAudit& audit);

/// Everything needed to study the pairing for one mesh and field.
struct PairingStudy {
    Vector eigenvalues;
    std::vector<SupportInterval> intervals;
    Vector nodal;
    AdjacencyMatrix graph;
    PairingResult pairing;
};

struct StudyOptions {
    /// Its quadrature is also the assembly rule.
    SamplingRule sampler;
    double eps = 1e-9;
    bool canonical = false;
};

/// Assemble A and L, compute the spectrum of L^{-1}A, the support intervals
/// and a matching warm-started from the sorted pairing.
PairingStudy study_pairing(const Mesh& mesh, const CoefficientField& field, const StudyOptions& options = {});

} // namespace lapeig
