#include "lapeig/scenarios.hpp"

#include "lapeig/assembly.hpp"
#include "lapeig/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace lapeig {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<ScenarioInfo>& registered_scenarios()
{
    static const std::vector<ScenarioInfo> list = {
        {"constant", "constant coefficient on the unit square", {8}},
        {"p1-pairing", "sin(x+y) on the unit square", {10}},
        {"p2-pairing", "Gaussian bump 1 + 50 exp(-5 r^2)", {10}},
        {"p3-pairing", "128 (x^7 + y^7)", {10}},
        {"p4-pairing", "p1 above y = 1/2, p2 below", {10}},
        {"fine", "p1 and p3 on a fine uniform mesh", {60}},
        {"adapt", "p2 with 1 and 3 local refinement steps in (0,0.2)^2", {10}},
        {"corner", "p3 on the re-entrant corner domain", {20}},
        {"quadrant-cg", "checkerboard with Kellogg data, Laplace vs incomplete Cholesky CG", {8, 64}},
        {"random-piecewise", "seeded per-element log-uniform coefficient", {8}},
    };
    return list;
}

bool is_registered(const std::string& name)
{
    const auto& l = registered_scenarios();
    return std::any_of(l.begin(), l.end(), [&](const ScenarioInfo& s) { return s.name == name; });
}

std::vector<Cluster> cluster_table(const Vector& values, const Vector& weights, double tol)
{
    if (weights.size() != 0 && weights.size() != values.size())
        throw std::invalid_argument("cluster table: weight count differs");
    std::vector<Cluster> out;
    Eigen::Index i = 0;
    while (i < values.size()) {
        Cluster c;
        c.first = static_cast<int>(i) + 1;
        const double start = values[i];
        double sum = 0.0;
        while (i < values.size() && values[i] - start <= tol * std::max(1.0, std::abs(start))) {
            sum += values[i];
            if (weights.size())
                c.weight += weights[i];
            ++i;
        }
        c.last = static_cast<int>(i);
        c.value = sum / (c.last - c.first + 1);
        out.push_back(c);
    }
    return out;
}

json to_json(const std::vector<Cluster>& clusters)
{
    json a = json::array();
    for (const auto& c : clusters)
        a.push_back({{"first", c.first}, {"last", c.last}, {"value", c.value}, {"weight", c.weight}});
    return a;
}

QuadrantProblem quadrant_problem(int cells, const QuadratureRule& quad)
{
    QuadrantProblem p{uniform_square(cells, -1.0, 1.0), quadrant_field(), {}, {}, {}, {}};
    p.a = assemble_stiffness(p.mesh, p.field, quad);
    p.l = assemble_laplacian(p.mesh);
    const KelloggParameters kp;
    p.b = assemble_rhs(p.mesh, p.field, {}, [&](const Point& x) { return kellogg_solution(x, kp); }, quad);
    p.x_exact = CholeskyFactor(p.a).solve(p.b);
    return p;
}

namespace {

struct Context {
    const Overrides& ov;
    SamplingRule sampler;
    std::vector<fs::path> artifacts;

    explicit Context(const Overrides& o) : ov(o)
    {
        sampler.lattice_order = o.lattice_order;
        sampler.quadrature = QuadratureRule::of_degree(o.quad_degree);
    }

    template <typename F>
    void write(const fs::path& dir, const std::string& name, F&& emit)
    {
        const fs::path p = dir / name;
        std::ofstream out(p);
        if (!out)
            throw std::runtime_error("cannot write " + p.string());
        emit(out);
        artifacts.push_back(p);
    }
};

json quantiles(std::vector<double> v)
{
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
    if (v.empty())
        return nullptr;
    std::sort(v.begin(), v.end());
    auto q = [&](double p) { return v[static_cast<std::size_t>(std::floor(p * (v.size() - 1)))]; };
    return {{"min", v.front()}, {"median", q(0.5)}, {"p90", q(0.9)}, {"max", v.back()}};
}

json mesh_json(const Mesh& m)
{
    return {{"nodes", m.num_nodes()}, {"triangles", m.num_triangles()}, {"dofs", m.num_dofs()},
            {"area", m.total_area()}};
}

void pairing_analysis(Context& ctx, const Mesh& mesh, const CoefficientField& field, const fs::path& dir, json& run)
{
    StudyOptions so;
    so.sampler = ctx.sampler;
    so.eps = ctx.ov.eps;
    so.canonical = ctx.ov.canonical;
    const PairingStudy st = study_pairing(mesh, field, so);
    const SortedAudit audit = sorted_pairing_audit(st.eigenvalues, st.nodal, st.intervals, ctx.ov.eps);

    ctx.write(dir, "eigenvalues.csv", [&](std::ostream& o) { write_eigenvalues_csv(o, st.eigenvalues); });
    ctx.write(dir, "pairing.csv",
              [&](std::ostream& o) { write_pairing_csv(o, mesh, st.nodal, st.intervals, st.eigenvalues, st.pairing); });
    ctx.write(dir, "violations.csv",
              [&](std::ostream& o) { write_violations_csv(o, st.eigenvalues, st.intervals, audit); });

    run["spectrum"] = {{"count", st.eigenvalues.size()},
                       {"min", st.eigenvalues.minCoeff()},
                       {"max", st.eigenvalues.maxCoeff()},
                       {"clusters", to_json(cluster_table(st.eigenvalues, Vector()))}};
    const auto deg = st.graph.degree_stats();
    run["pairing"] = {{"matched", st.pairing.matched},
                      {"matching_size", st.pairing.matching_size},
                      {"edges", st.graph.edge_count()},
                      {"min_degree", deg.min_dof_degree},
                      {"max_degree", deg.max_dof_degree},
                      {"mean_degree", deg.mean_dof_degree},
                      {"deficiency", st.pairing.deficiency.size()},
                      {"sorted_violations", audit.violations.size()},
                      {"eps", ctx.ov.eps}};

    if (!st.pairing.matched)
        return;
    BoundOptions bo;
    bo.sampler = ctx.sampler;
    bo.finite_difference_fallback = true;
    const BoundReport br = evaluate_bounds(field, mesh, st.pairing, st.eigenvalues, bo);
    ctx.write(dir, "bounds.csv", [&](std::ostream& o) { write_bounds_csv(o, br); });
    std::vector<double> gap, loose, t1;
    int chain = 0, applicable = 0, taylor_chain = 0, taylor1_covers = 0;
    for (const auto& r : br.rows) {
        gap.push_back(r.gap);
        loose.push_back(r.loose_bound);
        t1.push_back(r.taylor1);
        chain += r.gap <= r.loose_bound + ctx.ov.eps * std::max(1.0, std::abs(r.lambda));
        if (r.applicable) {
            ++applicable;
            taylor_chain += r.loose_bound <= r.taylor_full;
            taylor1_covers += r.gap <= r.taylor1;
        }
    }
    run["bounds"] = {{"gap", quantiles(gap)},
                     {"loose_bound", quantiles(loose)},
                     {"taylor1", quantiles(t1)},
                     {"h_max", br.max_patch_radius()},
                     {"gap_within_loose", chain},
                     {"applicable", applicable},
                     {"loose_within_taylor_full", taylor_chain},
                     {"gap_within_taylor1", taylor1_covers}};
}

struct PcgCase {
    Preconditioner m;
    int drop_low = 0;
    int drop_high = 0;
};

void pcg_analysis(Context& ctx, const SparseMatrix& a, const Vector& b, const Vector& x_exact,
                  std::vector<PcgCase> cases, const fs::path& dir, json& run)
{
    json pc = json::object();
    for (const auto& c : cases) {
        PcgOptions po;
        po.max_iter = ctx.ov.max_iter;
        po.energy_tol = 1e-10;
        po.x_exact = x_exact;
        const PcgTrace trace = pcg(a, b, c.m, po);
        const SpectrumResult sp = c.m.operator_spectrum(a);
        const DistributionFunction dist = distribution_function(sp, c.m, b);
        const DistributionFunction merged = merge_clusters(dist);
        const std::string name = c.m.name();

        ctx.write(dir, "trace_" + name + ".csv", [&](std::ostream& o) { write_trace_csv(o, trace); });
        ctx.write(dir, "ritz_" + name + ".csv", [&](std::ostream& o) { write_ritz_csv(o, trace); });
        ctx.write(dir, "distribution_" + name + ".csv", [&](std::ostream& o) { write_distribution_csv(o, merged); });

        json j = {{"iterations", trace.iterations()},
                  {"iterations_to_1e-10", trace.iterations_to(1e-10)},
                  {"converged", trace.converged},
                  {"diverged", trace.diverged},
                  {"indefinite", trace.indefinite},
                  {"lambda_min", sp.eigenvalues[0]},
                  {"lambda_max", sp.eigenvalues[sp.size() - 1]},
                  {"condition", sp.eigenvalues[sp.size() - 1] / sp.eigenvalues[0]},
                  {"weight_total", dist.total()},
                  {"clusters", to_json(cluster_table(dist.points, dist.weights))}};
        if (trace.iterations() >= 5) {
            const Vector r = ritz_values(trace, 5);
            j["ritz_at_5"] = std::vector<double>(r.begin(), r.end());
        }
        try {
            const auto ec = effective_condition_bound(merged, c.drop_low, c.drop_high, 5);
            j["effective_condition"] = {{"kappa", ec.kappa},      {"lambda_min", ec.lambda_min},
                                        {"lambda_max", ec.lambda_max}, {"drop_low", c.drop_low},
                                        {"drop_high", c.drop_high},   {"start_iter", ec.start_iter}};
        } catch (const std::invalid_argument&) {
            j["effective_condition"] = nullptr;
        }
        pc[name] = std::move(j);
    }
    run["pcg"] = std::move(pc);
}

fs::path run_dir(Context& ctx, const std::string& scenario, const std::string& label)
{
    const fs::path dir = ctx.ov.out / scenario / label;
    fs::create_directories(dir);
    return dir;
}

std::vector<int> resolutions(const ScenarioInfo& info, const Overrides& ov)
{
    if (ov.cells) {
        if (*ov.cells < 1)
            throw std::invalid_argument("cells must be positive");
        return {*ov.cells};
    }
    return info.resolutions;
}

const ScenarioInfo& info_of(const std::string& name)
{
    for (const auto& s : registered_scenarios())
        if (s.name == name)
            return s;
    throw std::invalid_argument("unknown scenario: " + name);
}

} // namespace

Report run_scenario(const std::string& name, const Overrides& ov)
{
    const ScenarioInfo& info = info_of(name);
    Context ctx(ov);
    json runs = json::array();

    auto finish_run = [&](const fs::path& dir, json run) {
        if (ov.plots)
            for (auto& p : plots::emit_plots(dir))
                ctx.artifacts.push_back(p);
        runs.push_back(std::move(run));
    };

    auto uniform_pairing = [&](const CoefficientField& field, int cells, const std::string& label) {
        const Mesh mesh = uniform_square(cells);
        const fs::path dir = run_dir(ctx, name, label);
        json run = {{"resolution", label}, {"cells", cells}, {"coefficient", field.name()}, {"mesh", mesh_json(mesh)}};
        pairing_analysis(ctx, mesh, field, dir, run);
        finish_run(dir, std::move(run));
    };

    try {
        for (int cells : resolutions(info, ov)) {
            const std::string res = std::to_string(cells);
            if (name == "constant") {
                const Mesh mesh = uniform_square(cells);
                const CoefficientField field = constant_field(ov.parameter.value_or(1.0));
                const fs::path dir = run_dir(ctx, name, res);
                json run = {{"resolution", res}, {"cells", cells}, {"coefficient", field.name()},
                            {"mesh", mesh_json(mesh)}};
                pairing_analysis(ctx, mesh, field, dir, run);
                const SparseMatrix a = assemble_stiffness(mesh, field, ctx.sampler.quadrature);
                const SparseMatrix l = assemble_laplacian(mesh);
                const Vector b = assemble_rhs(mesh, field, [](const Point&) { return 1.0; }, {}, ctx.sampler.quadrature);
                const Vector x = CholeskyFactor(a).solve(b);
                pcg_analysis(ctx, a, b, x, {{Preconditioner::laplace(l)}}, dir, run);
                finish_run(dir, std::move(run));
            } else if (name.size() == 10 && name.substr(2) == "-pairing") {
                uniform_pairing(builtin(name.substr(0, 2)), cells, res);
            } else if (name == "fine") {
                for (const char* f : {"p1", "p3"})
                    uniform_pairing(builtin(f), cells, res + "/" + f);
            } else if (name == "adapt") {
                const Mesh base = uniform_square(cells);
                for (int steps : {1, 3}) {
                    const RefineResult rr = refine_local(base, RegionPredicate::box(0, 0.2, 0, 0.2), steps);
                    const std::string label = res + "-refine" + std::to_string(steps);
                    const fs::path dir = run_dir(ctx, name, label);
                    const CoefficientField field = p2_field();
                    ctx.write(dir, "mesh.txt", [&](std::ostream& o) { write_mesh(o, rr.mesh); });
                    json run = {{"resolution", label}, {"cells", cells},         {"refine_steps", steps},
                                {"coefficient", field.name()}, {"mesh", mesh_json(rr.mesh)}};
                    pairing_analysis(ctx, rr.mesh, field, dir, run);
                    finish_run(dir, std::move(run));
                }
            } else if (name == "corner") {
                const Mesh mesh = reentrant_corner(cells);
                const CoefficientField field = p3_field();
                const fs::path dir = run_dir(ctx, name, res);
                ctx.write(dir, "mesh.txt", [&](std::ostream& o) { write_mesh(o, mesh); });
                json run = {{"resolution", res}, {"cells", cells}, {"coefficient", field.name()},
                            {"mesh", mesh_json(mesh)}};
                pairing_analysis(ctx, mesh, field, dir, run);
                finish_run(dir, std::move(run));
            } else if (name == "quadrant-cg") {
                const QuadrantProblem qp = quadrant_problem(cells, ctx.sampler.quadrature);
                const fs::path dir = run_dir(ctx, name, res);
                json run = {{"resolution", res}, {"cells", cells}, {"coefficient", qp.field.name()},
                            {"mesh", mesh_json(qp.mesh)}};
                pairing_analysis(ctx, qp.mesh, qp.field, dir, run);
                pcg_analysis(ctx, qp.a, qp.b, qp.x_exact,
                             {{Preconditioner::laplace(qp.l), 4, 1}, {Preconditioner::incomplete(qp.a, ov.tau), 5, 0}},
                             dir, run);
                run["tau"] = ov.tau;
                finish_run(dir, std::move(run));
            } else if (name == "random-piecewise") {
                const Mesh mesh = uniform_square(cells);
                const CoefficientField field = random_piecewise_field(mesh, ov.seed);
                const fs::path dir = run_dir(ctx, name, res);
                json run = {{"resolution", res}, {"cells", cells}, {"coefficient", field.name()},
                            {"seed", ov.seed},   {"mesh", mesh_json(mesh)}};
                pairing_analysis(ctx, mesh, field, dir, run);
                finish_run(dir, std::move(run));
            }
        }
    } catch (const NumericalError& e) {
        throw NumericalError("scenario " + name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("scenario " + name + ": " + e.what());
    }

    Report report;
    report.directory = ov.out / name;
    std::vector<std::string> paths;
    for (const auto& p : ctx.artifacts)
        paths.push_back(fs::relative(p, report.directory).generic_string());
    report.summary = {{"schema", report_schema},
                      {"scenario", name},
                      {"description", info.description},
                      {"configuration",
                       {{"eps", ov.eps},
                        {"tau", ov.tau},
                        {"quad_degree", ov.quad_degree},
                        {"lattice_order", ov.lattice_order},
                        {"max_iter", ov.max_iter},
                        {"seed", ov.seed},
                        {"canonical", ov.canonical}}},
                      {"runs", std::move(runs)},
                      {"artifacts", paths}};
    fs::create_directories(report.directory);
    const fs::path json_path = report.directory / "report.json";
    std::ofstream(json_path) << report.summary.dump(2) << "\n";
    ctx.artifacts.push_back(json_path);
    report.artifacts = std::move(ctx.artifacts);
    return report;
}

} // namespace lapeig
