#pragma once

#include "lapeig/bounds.hpp"
#include "lapeig/krylov.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lapeig {

inline constexpr const char* report_schema = "lapeig.report/1";

struct ScenarioInfo {
    std::string name;
    std::string description;
    /// Default cells per side of the runs.
    std::vector<int> resolutions;
};

const std::vector<ScenarioInfo>& registered_scenarios();
bool is_registered(const std::string& name);

struct Overrides {
    /// Replaces the default resolutions with a single one.
    std::optional<int> cells;
    /// Value of the constant coefficient.
    std::optional<double> parameter;
    unsigned long long seed = 1;
    double eps = 1e-9;
    double tau = 1e-2;
    int quad_degree = 2;
    int lattice_order = 4;
    int max_iter = 1000;
    bool canonical = false;
    bool plots = true;
    std::filesystem::path out = "out";
};

struct Report {
    nlohmann::json summary;
    std::filesystem::path directory;
    std::vector<std::filesystem::path> artifacts;
};

/// Run a registered scenario, writing CSV and SVG artifacts under
/// out/<scenario>/<resolution>/ and the summary to out/<scenario>/report.json.
Report run_scenario(const std::string& name, const Overrides& overrides = {});

/// Consecutive values within tol * max(1, |v|) of a cluster's first value.
struct Cluster {
    int first = 0; ///< 1-based
    int last = 0;
    double value = 0.0;
    double weight = 0.0;
};
std::vector<Cluster> cluster_table(const Vector& values, const Vector& weights, double tol = 1e-8);

nlohmann::json to_json(const std::vector<Cluster>& clusters);

/// Quadrant checkerboard on (-1,1)^2 with Kellogg boundary data.
struct QuadrantProblem {
    Mesh mesh;
    CoefficientField field;
    SparseMatrix a;
    SparseMatrix l;
    Vector b;
    Vector x_exact;
};
QuadrantProblem quadrant_problem(int cells, const QuadratureRule& quad = QuadratureRule::edge_midpoints());

} // namespace lapeig
