#include "lapeig/acceptance.hpp"
#include "lapeig/assembly.hpp"
#include "lapeig/bounds.hpp"
#include "lapeig/io.hpp"
#include "lapeig/krylov.hpp"
#include "lapeig/localization.hpp"
#include "lapeig/scenarios.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace lapeig;

namespace {

struct Options {
    std::string coeff = "constant:1";
    std::string domain = "auto";
    int cells = 8;
    double eps = 1e-9;
    double tau = 1e-2;
    int quad_degree = 2;
    int samples = 4;
    int max_iter = 1000;
    double tol = 1e-10;
    std::string precond = "both";
    std::string out;
    unsigned long long seed = 1;
    int threads = 0;
    bool audit = false;
    bool canonical = false;
    bool fd = false;
    bool no_plots = false;
    std::optional<double> param;
    std::string scenario;
    std::vector<int> only;
};

void add_problem_flags(CLI::App* cmd, Options& o)
{
    cmd->add_option("--coeff", o.coeff, "Coefficient name[:param]: constant, p1..p4, quadrant, random:<seed>, csv:<path>")
        ->capture_default_str();
    cmd->add_option("--cells", o.cells, "Cells per side")->check(CLI::Range(1, 4096))->capture_default_str();
    cmd->add_option("--domain", o.domain, "Mesh: unit, centered (-1,1)^2, corner, or auto")
        ->check(CLI::IsMember({"auto", "unit", "centered", "corner"}))
        ->capture_default_str();
    cmd->add_option("--quad-degree", o.quad_degree, "Assembly quadrature degree")
        ->check(CLI::Range(1, 4))
        ->capture_default_str();
}

void add_sampling_flags(CLI::App* cmd, Options& o)
{
    cmd->add_option("--samples-per-triangle", o.samples, "Barycentric lattice order of the sampling rule")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    cmd->add_option("--eps", o.eps, "Membership tolerance, relative to max(1,|lambda|)")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
}

void add_common_flags(CLI::App* cmd, Options& o)
{
    cmd->add_option("--out", o.out, "Output directory (default $LAPEIG_OUT or out)");
    cmd->add_option("--seed", o.seed, "Seed for random fields")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Thread cap, 0 for the library default")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

fs::path out_dir(const Options& o)
{
    fs::path dir = o.out;
    if (dir.empty()) {
        const char* env = std::getenv("LAPEIG_OUT");
        dir = env && *env ? env : "out";
    }
    fs::create_directories(dir);
    return dir;
}

Mesh make_mesh(const Options& o)
{
    std::string domain = o.domain;
    if (domain == "auto")
        domain = o.coeff.rfind("quadrant", 0) == 0 ? "centered" : "unit";
    if (domain == "centered")
        return uniform_square(o.cells, -1.0, 1.0);
    if (domain == "corner")
        return reentrant_corner(o.cells);
    return uniform_square(o.cells);
}

CoefficientField make_field(const Options& o, const Mesh& mesh)
{
    if (o.coeff == "random")
        return random_piecewise_field(mesh, o.seed);
    return parse_coefficient(o.coeff, &mesh);
}

SamplingRule sampler(const Options& o)
{
    SamplingRule s;
    s.lattice_order = o.samples;
    s.quadrature = QuadratureRule::of_degree(o.quad_degree);
    return s;
}

template <typename F>
void write_file(const fs::path& path, F&& emit)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    emit(out);
    std::cout << path.string() << "\n";
}

Vector rhs(const Options& o, const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad)
{
    if (o.coeff.rfind("quadrant", 0) == 0) {
        const KelloggParameters kp;
        return assemble_rhs(mesh, field, {}, [&](const Point& x) { return kellogg_solution(x, kp); }, quad);
    }
    return assemble_rhs(mesh, field, [](const Point&) { return 1.0; }, {}, quad);
}

void cmd_mesh(const Options& o)
{
    const Mesh mesh = make_mesh(o);
    write_file(out_dir(o) / "mesh.txt", [&](std::ostream& s) { write_mesh(s, mesh); });
}

void cmd_assemble(const Options& o)
{
    const Mesh mesh = make_mesh(o);
    const CoefficientField field = make_field(o, mesh);
    const QuadratureRule quad = QuadratureRule::of_degree(o.quad_degree);
    const fs::path dir = out_dir(o);
    io::write_matrix_market((dir / "A.mtx").string(), assemble_stiffness(mesh, field, quad));
    io::write_matrix_market((dir / "L.mtx").string(), assemble_laplacian(mesh));
    io::write_vector((dir / "b.txt").string(), rhs(o, mesh, field, quad));
    for (const char* name : {"A.mtx", "L.mtx", "b.txt"})
        std::cout << (dir / name).string() << "\n";
}

void cmd_eigs(const Options& o)
{
    const Mesh mesh = make_mesh(o);
    const CoefficientField field = make_field(o, mesh);
    const QuadratureRule quad = QuadratureRule::of_degree(o.quad_degree);
    const Vector ev =
        generalized_eigs(assemble_stiffness(mesh, field, quad), assemble_laplacian(mesh), {false}).eigenvalues;
    write_file(out_dir(o) / "eigenvalues.csv", [&](std::ostream& s) { write_eigenvalues_csv(s, ev); });
}

void cmd_pair(const Options& o)
{
    const Mesh mesh = make_mesh(o);
    const CoefficientField field = make_field(o, mesh);
    StudyOptions so{sampler(o), o.eps, o.canonical};
    const PairingStudy st = study_pairing(mesh, field, so);
    const fs::path dir = out_dir(o);
    write_file(dir / "eigenvalues.csv", [&](std::ostream& s) { write_eigenvalues_csv(s, st.eigenvalues); });
    write_file(dir / "pairing.csv", [&](std::ostream& s) {
        write_pairing_csv(s, mesh, st.nodal, st.intervals, st.eigenvalues, st.pairing);
    });
    if (o.audit) {
        const SortedAudit audit = sorted_pairing_audit(st.eigenvalues, st.nodal, st.intervals, o.eps);
        write_file(dir / "violations.csv",
                   [&](std::ostream& s) { write_violations_csv(s, st.eigenvalues, st.intervals, audit); });
        std::cerr << audit.violations.size() << " sorted-pairing violations\n";
    }
    if (!st.pairing.matched)
        std::cerr << "no perfect matching: deficiency " << st.pairing.deficiency.size() << " dofs\n";
}

void cmd_bounds(const Options& o)
{
    const Mesh mesh = make_mesh(o);
    const CoefficientField field = make_field(o, mesh);
    StudyOptions so{sampler(o), o.eps, o.canonical};
    const PairingStudy st = study_pairing(mesh, field, so);
    BoundOptions bo;
    bo.sampler = so.sampler;
    bo.finite_difference_fallback = o.fd;
    const BoundReport report = evaluate_bounds(field, mesh, st.pairing, st.eigenvalues, bo);
    write_file(out_dir(o) / "bounds.csv", [&](std::ostream& s) { write_bounds_csv(s, report); });
}

void cmd_pcg(const Options& o)
{
    const Mesh mesh = make_mesh(o);
    const CoefficientField field = make_field(o, mesh);
    const QuadratureRule quad = QuadratureRule::of_degree(o.quad_degree);
    const SparseMatrix a = assemble_stiffness(mesh, field, quad);
    const Vector b = rhs(o, mesh, field, quad);
    PcgOptions po;
    po.max_iter = o.max_iter;
    po.energy_tol = o.tol;
    po.x_exact = CholeskyFactor(a).solve(b);

    std::vector<Preconditioner> pcs;
    if (o.precond == "laplace" || o.precond == "both")
        pcs.push_back(Preconditioner::laplace(assemble_laplacian(mesh)));
    if (o.precond == "ichol" || o.precond == "both")
        pcs.push_back(Preconditioner::incomplete(a, o.tau));
    if (o.precond == "none")
        pcs.push_back(Preconditioner::none(mesh.num_dofs()));
    if (o.precond == "exact")
        pcs.push_back(Preconditioner::exact(a));

    const fs::path dir = out_dir(o);
    for (const auto& m : pcs) {
        const PcgTrace trace = pcg(a, b, m, po);
        const DistributionFunction dist = distribution_function(m.operator_spectrum(a), m, b);
        write_file(dir / ("trace_" + m.name() + ".csv"), [&](std::ostream& s) { write_trace_csv(s, trace); });
        write_file(dir / ("ritz_" + m.name() + ".csv"), [&](std::ostream& s) { write_ritz_csv(s, trace); });
        write_file(dir / ("distribution_" + m.name() + ".csv"),
                   [&](std::ostream& s) { write_distribution_csv(s, dist); });
        std::cerr << m.name() << ": " << trace.iterations() << " iterations, "
                  << (trace.converged ? "converged" : "not converged") << "\n";
    }
}

void cmd_report(const Options& o, const CLI::App& cmd)
{
    if (!is_registered(o.scenario))
        throw std::invalid_argument("unknown scenario '" + o.scenario + "'");
    Overrides ov;
    if (cmd.count("--cells"))
        ov.cells = o.cells;
    ov.parameter = o.param;
    ov.seed = o.seed;
    ov.eps = o.eps;
    ov.tau = o.tau;
    ov.quad_degree = o.quad_degree;
    ov.lattice_order = o.samples;
    ov.max_iter = o.max_iter;
    ov.canonical = o.canonical;
    ov.plots = !o.no_plots;
    ov.out = out_dir(o);
    const Report r = run_scenario(o.scenario, ov);
    std::cout << (r.directory / "report.json").string() << "\n";
}

int cmd_check(const Options& o)
{
    AcceptanceOptions ao;
    ao.only.insert(o.only.begin(), o.only.end());
    ao.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
    const auto results = run_acceptance(ao);
    for (const auto& r : results)
        if (!r.pass)
            return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Eigenvalues of the Laplace-preconditioned diffusion operator"};
    app.require_subcommand(1);
    Options o;

    auto* mesh = app.add_subcommand("mesh", "Write the mesh file");
    add_problem_flags(mesh, o);
    add_common_flags(mesh, o);

    auto* assemble = app.add_subcommand("assemble", "Write A and L as Matrix Market and b as a vector file");
    add_problem_flags(assemble, o);
    add_common_flags(assemble, o);

    auto* eigs = app.add_subcommand("eigs", "Write the spectrum of L^{-1}A");
    add_problem_flags(eigs, o);
    add_common_flags(eigs, o);

    auto* pair = app.add_subcommand("pair", "Match eigenvalues to support intervals");
    add_problem_flags(pair, o);
    add_sampling_flags(pair, o);
    add_common_flags(pair, o);
    pair->add_flag("--audit", o.audit, "Also write the sorted-pairing violations");
    pair->add_flag("--canonical", o.canonical, "Report the lexicographically smallest matching");

    auto* bounds = app.add_subcommand("bounds", "Write the nodal-value bound report");
    add_problem_flags(bounds, o);
    add_sampling_flags(bounds, o);
    add_common_flags(bounds, o);
    bounds->add_flag("--canonical", o.canonical, "Use the lexicographically smallest matching");
    bounds->add_flag("--fd", o.fd, "Finite differences for fields without derivatives");

    auto* pcgc = app.add_subcommand("pcg", "Run PCG and write trace, Ritz and distribution CSVs");
    add_problem_flags(pcgc, o);
    add_common_flags(pcgc, o);
    pcgc->add_option("--precond", o.precond, "laplace, ichol, both, none or exact")
        ->check(CLI::IsMember({"laplace", "ichol", "both", "none", "exact"}))
        ->capture_default_str();
    pcgc->add_option("--tau", o.tau, "ICHOL drop tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();
    pcgc->add_option("--max-iter", o.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    pcgc->add_option("--tol", o.tol, "Relative energy-error tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* report = app.add_subcommand("report", "Run a registered scenario");
    std::string names;
    for (const auto& s : registered_scenarios())
        names += (names.empty() ? "" : ", ") + s.name;
    report->add_option("scenario", o.scenario, "One of: " + names)->required();
    report->add_option("--cells", o.cells, "Single resolution instead of the defaults")->check(CLI::Range(1, 4096));
    report->add_option("--param", o.param, "Parameter of the constant coefficient");
    report->add_option("--quad-degree", o.quad_degree, "Assembly quadrature degree")
        ->check(CLI::Range(1, 4))
        ->capture_default_str();
    add_sampling_flags(report, o);
    add_common_flags(report, o);
    report->add_option("--tau", o.tau, "ICHOL drop tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();
    report->add_option("--max-iter", o.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    report->add_flag("--canonical", o.canonical, "Lexicographically smallest matching");
    report->add_flag("--no-plots", o.no_plots, "Skip SVG output");

    auto* check = app.add_subcommand("check", "Run the acceptance criteria");
    check->add_option("--only", o.only, "Criteria to run")->check(CLI::Range(1, 9));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (o.threads > 0)
        Eigen::setNbThreads(o.threads);

    try {
        if (*mesh)
            cmd_mesh(o);
        else if (*assemble)
            cmd_assemble(o);
        else if (*eigs)
            cmd_eigs(o);
        else if (*pair)
            cmd_pair(o);
        else if (*bounds)
            cmd_bounds(o);
        else if (*pcgc)
            cmd_pcg(o);
        else if (*report)
            cmd_report(o, *report);
        else if (*check)
            return cmd_check(o);
        return 0;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
