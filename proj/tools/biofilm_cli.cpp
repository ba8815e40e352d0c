// Command-line front end: forward solve, convergence study, measurement
// synthesis, direct recovery, objective grid scan, and least-squares fitting,
// driven by flags or an INI config file (sections per subcommand, flags
// override file values). All outputs are written atomically (temp + rename).
// Errors leave a machine-readable JSON object on stderr and exit with
// 2 (configuration), 3 (numerical failure), or 4 (assumption failure).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "biofilm/direct_recovery.hpp"
#include "biofilm/errors.hpp"
#include "biofilm/forward_solver.hpp"
#include "biofilm/inverse_fit.hpp"
#include "biofilm/manufactured.hpp"
#include "biofilm/observables.hpp"
#include "biofilm/probe.hpp"
#include "../src/csv_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace biofilm;

namespace {

// ---------------------------------------------------------------------------
// shared option bundles

struct MeshOptions {
    double h = 0.0; // square mesh when > 0
    int I = 0, N = 0;
    double T = 1.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--mesh", h, "square mesh size (dx = dt = h)");
        cmd->add_option("--I", I, "number of space nodes");
        cmd->add_option("--N", N, "number of time levels");
        cmd->add_option("--T", T, "final time")->capture_default_str();
    }

    Grid make_grid() const {
        if (h > 0.0 && (I > 0 || N > 0))
            throw contract_error("give either --mesh or --I/--N, not both");
        if (h > 0.0)
            return square_grid(h, T);
        if (I > 0 || N > 0)
            return Grid{I, N, T};
        return square_grid(0.1, T);
    }
};

struct CaseOptions {
    std::string name = "example1";
    std::vector<double> params; // overrides the case truth; required for custom
    std::string f_table, g_table, s0_table, m0_table;
    std::array<std::string, 4> mu_tables;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--case", name, "example1|example2|custom")->capture_default_str()
            ->check(CLI::IsMember({"example1", "example2", "custom"}));
        cmd->add_option("--params", params,
                        "parameter vector d1,d2,K1,K2,K3,K4,a,b "
                        "(default: the case's true values)")
            ->delimiter(',');
        cmd->add_option("--f-table", f_table, "custom source F as x,t,value CSV");
        cmd->add_option("--g-table", g_table, "custom source G as x,t,value CSV");
        cmd->add_option("--s0-table", s0_table, "custom S0 as x,value CSV");
        cmd->add_option("--m0-table", m0_table, "custom M0 as x,value CSV");
        cmd->add_option("--mu1-table", mu_tables[0], "custom mu1 as t,value CSV");
        cmd->add_option("--mu2-table", mu_tables[1], "custom mu2 as t,value CSV");
        cmd->add_option("--mu3-table", mu_tables[2], "custom mu3 as t,value CSV");
        cmd->add_option("--mu4-table", mu_tables[3], "custom mu4 as t,value CSV");
    }

    bool is_example() const { return name != "custom"; }

    ManufacturedCase example() const {
        if (name == "example1")
            return example1();
        if (name == "example2")
            return example2();
        throw contract_error("operation needs a closed-form case, got \"" +
                             name + "\"");
    }

    void require_file(const std::string& path, const char* flag) const {
        if (path.empty())
            throw contract_error(std::string("custom case needs ") + flag);
        if (!fs::exists(path))
            throw contract_error(std::string(flag) + " file does not exist: " +
                                 path);
    }

    ProblemData problem_data(const Grid& grid) const {
        if (is_example())
            return example().data;
        require_file(f_table, "--f-table");
        require_file(g_table, "--g-table");
        require_file(s0_table, "--s0-table");
        require_file(m0_table, "--m0-table");
        const char* mu_flags[4] = {"--mu1-table", "--mu2-table", "--mu3-table",
                                   "--mu4-table"};
        for (int i = 0; i < 4; ++i)
            require_file(mu_tables[i], mu_flags[i]);
        ProblemData data;
        data.F = tabulated_field(grid, read_space_time_table(f_table, grid));
        data.G = tabulated_field(grid, read_space_time_table(g_table, grid));
        data.S0 = tabulated_space(grid, read_space_table(s0_table, grid));
        data.M0 = tabulated_space(grid, read_space_table(m0_table, grid));
        data.mu1 = tabulated_time(grid, read_time_table(mu_tables[0], grid));
        data.mu2 = tabulated_time(grid, read_time_table(mu_tables[1], grid));
        data.mu3 = tabulated_time(grid, read_time_table(mu_tables[2], grid));
        data.mu4 = tabulated_time(grid, read_time_table(mu_tables[3], grid));
        return data;
    }

    ParamVector parameters() const {
        if (!params.empty()) {
            if (params.size() != 8)
                throw contract_error("--params needs exactly 8 values");
            std::array<double, 8> v;
            std::copy(params.begin(), params.end(), v.begin());
            return ParamVector::from_array(v);
        }
        if (!is_example())
            throw contract_error("custom case needs --params");
        return example().params;
    }
};

struct MeasurementOptions {
    std::string path;     // read from file ...
    bool exact = false;   // ... or sample the closed-form observables ...
    bool solver = false;  // ... or measure a forward solve
    bool flux_only = false;
    double noise = 0.0;
    std::uint64_t seed = 0;

    void add_flags(CLI::App* cmd, bool default_exact) {
        cmd->add_option("--measurements", path, "measurement CSV to invert");
        cmd->add_flag("--exact", exact,
                      default_exact
                          ? "sample the closed-form observables (default)"
                          : "sample the closed-form observables");
        cmd->add_flag("--solver", solver,
                      "measure a forward solve at --params instead");
        cmd->add_flag("--flux-only", flux_only, "omit the biomass column");
        cmd->add_option("--noise", noise,
                        "multiplicative Gaussian noise level on generated data");
        cmd->add_option("--seed", seed, "noise RNG seed")->capture_default_str();
    }

    MeasurementSet make(const CaseOptions& copt, const Grid& grid) const {
        if (!path.empty()) {
            if (exact || solver)
                throw contract_error(
                    "--measurements excludes --exact/--solver");
            if (noise != 0.0)
                throw contract_error(
                    "--noise applies to generated measurements only");
            if (!fs::exists(path))
                throw contract_error("measurement file does not exist: " + path);
            return read_measurements(path);
        }
        if (exact && solver)
            throw contract_error("--exact and --solver are mutually exclusive");
        MeasurementSet set;
        if (solver) {
            const ParamVector params = copt.parameters();
            const FieldSolution sol =
                solve_forward(params, grid, copt.problem_data(grid));
            set = measure_solution(sol, params.d1(), !flux_only);
        } else {
            set = exact_measurements(copt.example(), grid, !flux_only);
        }
        if (noise != 0.0)
            set = add_noise(set, noise, seed);
        return set;
    }
};

// ---------------------------------------------------------------------------
// output helpers

void atomic_write(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw contract_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out)
            throw contract_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_json(const std::string& path, const json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

json params_json(const ParamVector& p) {
    json j;
    for (std::size_t i = 0; i < 8; ++i)
        j[ParamVector::names()[i]] = p.values()[i];
    return j;
}

std::string fmt(double v) { return csv::format_double(v); }

// ---------------------------------------------------------------------------
// subcommand payloads

struct ForwardArgs {
    CaseOptions c;
    MeshOptions m;
    std::string out = "solution.csv";
};

int run_forward(const ForwardArgs& a) {
    const Grid grid = a.m.make_grid();
    const ParamVector params = a.c.parameters();
    const FieldSolution sol = solve_forward(params, grid, a.c.problem_data(grid));
    std::ostringstream csv;
    csv << "x,t,S,M\n";
    for (int n = 0; n < grid.N; ++n)
        for (int i = 0; i < grid.I; ++i)
            csv << fmt(grid.x(i)) << ',' << fmt(grid.t(n)) << ','
                << fmt(sol.S(i, n)) << ',' << fmt(sol.M(i, n)) << '\n';
    atomic_write(a.out, csv.str());
    std::printf("forward: case %s, I=%d N=%d T=%s; wrote %s\n", a.c.name.c_str(),
                grid.I, grid.N, fmt(grid.T).c_str(), a.out.c_str());
    return 0;
}

struct ConvergenceArgs {
    CaseOptions c;
    std::vector<double> meshes{0.1, 0.05, 0.01};
    std::string out = "convergence.csv";
};

int run_convergence(const ConvergenceArgs& a) {
    const ConvergenceStudy study = convergence_study(a.c.example(), a.meshes);
    std::ostringstream csv;
    csv << "h,err_S,err_M,order_S,order_M\n";
    for (const auto& row : study.rows)
        csv << fmt(row.h) << ',' << fmt(row.err_S) << ',' << fmt(row.err_M)
            << ',' << fmt(row.order_S) << ',' << fmt(row.order_M) << '\n';
    atomic_write(a.out, csv.str());
    std::printf("convergence: fitted orders S=%.3f M=%.3f over %zu meshes; wrote %s\n",
                study.lsq_order_S, study.lsq_order_M, study.rows.size(),
                a.out.c_str());
    return 0;
}

struct SynthArgs {
    CaseOptions c;
    MeshOptions m;
    MeasurementOptions meas;
    std::string out = "measurements.csv";
};

int run_synth(const SynthArgs& a) {
    const Grid grid = a.m.make_grid();
    const MeasurementSet set = a.meas.make(a.c, grid);
    write_measurements(set, a.out + ".tmp");
    fs::rename(a.out + ".tmp", a.out);
    std::printf("synth: %zu samples (%s%s%s); wrote %s\n", set.size(),
                to_string(set.provenance).c_str(),
                set.has_biomass() ? ", flux+biomass" : ", flux only",
                set.noise_level > 0.0 ? ", noisy" : "", a.out.c_str());
    return 0;
}

struct RecoverArgs {
    CaseOptions c;
    MeshOptions m;
    std::string probe = "analytic";
    int scan_nx = 21, scan_nt = 21;
    std::vector<double> p0, p1, p2, p5, p6, p7;
    double t3 = -1.0, t4 = -1.0;
    std::string out = "recover.json";
};

int run_recover(const RecoverArgs& a) {
    FieldProbe probe = [&] {
        if (a.probe == "analytic")
            return FieldProbe::from_case(a.c.example());
        const Grid grid = a.m.make_grid();
        const ProblemData data = a.c.problem_data(grid);
        return FieldProbe::from_solution(
            solve_forward(a.c.parameters(), grid, data), data);
    }();

    const bool any_explicit = !a.p0.empty() || !a.p1.empty() || !a.p2.empty() ||
                              !a.p5.empty() || !a.p6.empty() || !a.p7.empty() ||
                              a.t3 >= 0.0 || a.t4 >= 0.0;
    EvaluationPoints pts{};
    if (any_explicit) {
        auto as_point = [](const std::vector<double>& v, const char* flag) {
            if (v.size() != 2)
                throw contract_error(std::string(flag) + " needs x,t");
            return Point{v[0], v[1]};
        };
        if (a.p0.empty() || a.p1.empty() || a.p2.empty() || a.p5.empty() ||
            a.p6.empty() || a.p7.empty() || a.t3 < 0.0 || a.t4 < 0.0)
            throw contract_error("explicit points need all of --p0, --p1, "
                                 "--p2, --t3, --t4, --p5, --p6, --p7");
        pts = EvaluationPoints{as_point(a.p0, "--p0"), as_point(a.p1, "--p1"),
                               as_point(a.p2, "--p2"), a.t3, a.t4,
                               as_point(a.p5, "--p5"), as_point(a.p6, "--p6"),
                               as_point(a.p7, "--p7")};
    } else {
        ScanOptions opt;
        opt.nx = a.scan_nx;
        opt.nt = a.scan_nt;
        if (a.c.is_example())
            opt.T = a.c.example().final_time;
        else
            opt.T = a.m.T;
        pts = scan_points(probe, opt);
    }

    const RecoveryResult res = recover_all(probe, pts);
    json j;
    j["points"] = {{"p0", {pts.p0.x, pts.p0.t}}, {"p1", {pts.p1.x, pts.p1.t}},
                   {"p2", {pts.p2.x, pts.p2.t}}, {"t3", pts.t3},
                   {"t4", pts.t4},               {"p5", {pts.p5.x, pts.p5.t}},
                   {"p6", {pts.p6.x, pts.p6.t}}, {"p7", {pts.p7.x, pts.p7.t}}};
    j["stage1"] = {{"d1", res.stage1.d1},
                   {"curvature", res.stage1.curvature},
                   {"admissible", res.stage1.admissible}};
    j["stage2"] = {{"K1", res.stage2.K1},
                   {"K4", res.stage2.K4},
                   {"determinant", res.stage2.determinant},
                   {"det_quality", res.stage2.det_quality},
                   {"admissible", res.stage2.admissible}};
    j["stage3"] = {{"K2", res.stage3.K2},
                   {"K3", res.stage3.K3},
                   {"determinant", res.stage3.determinant},
                   {"det_quality", res.stage3.det_quality},
                   {"admissible", res.stage3.admissible}};
    j["stage4"] = {{"a", res.stage4.a},
                   {"b", res.stage4.b},
                   {"d2", res.stage4.d2},
                   {"condition", res.stage4.condition},
                   {"admissible", res.stage4.admissible}};
    j["params"] = params_json(res.params);
    write_json(a.out, j);
    std::printf("recover: d1=%s d2=%s K1=%s K2=%s K3=%s K4=%s a=%s b=%s; wrote %s\n",
                fmt(res.params.d1()).c_str(), fmt(res.params.d2()).c_str(),
                fmt(res.params.K1()).c_str(), fmt(res.params.K2()).c_str(),
                fmt(res.params.K3()).c_str(), fmt(res.params.K4()).c_str(),
                fmt(res.params.a()).c_str(), fmt(res.params.b()).c_str(),
                a.out.c_str());
    return 0;
}

struct FitCommonArgs {
    CaseOptions c;
    MeshOptions m;
    MeasurementOptions meas;
    std::string flavor = "auto"; // flux | both | auto
    std::vector<double> lower, upper;

    FitProblem build(const std::array<bool, 8>& unknown) const {
        const Grid grid = m.make_grid();
        FitProblem prob{grid, c.problem_data(grid), meas.make(c, grid)};
        prob.unknown = unknown;
        prob.reference = c.parameters().values();
        if (flavor == "both")
            prob.flavor = ObjectiveFlavor::flux_and_biomass;
        else if (flavor == "auto")
            prob.flavor = prob.measurements.has_biomass()
                              ? ObjectiveFlavor::flux_and_biomass
                              : ObjectiveFlavor::flux_only;
        else
            prob.flavor = ObjectiveFlavor::flux_only;
        auto fill_bounds = [](const std::vector<double>& v,
                              std::array<double, 8>& dst, const char* flag) {
            if (v.empty())
                return;
            if (v.size() != 8)
                throw contract_error(std::string(flag) + " needs exactly 8 values");
            std::copy(v.begin(), v.end(), dst.begin());
        };
        fill_bounds(lower, prob.lower, "--lower");
        fill_bounds(upper, prob.upper, "--upper");
        return prob;
    }
};

struct ScanArgs {
    FitCommonArgs f;
    std::vector<double> a_range{0.0, 4.0, 41.0}; // lo,hi,n
    std::vector<double> b_range{1.0, 4.0, 31.0};
    std::string out = "scan.csv";
};

int run_scan(const ScanArgs& a) {
    if (a.a_range.size() != 3 || a.b_range.size() != 3)
        throw contract_error("--a-range and --b-range need lo,hi,count");
    std::array<bool, 8> unknown{};
    unknown[6] = unknown[7] = true;
    FitProblem prob = a.f.build(unknown);
    const GridScanResult res =
        grid_scan(prob, a.a_range[0], a.a_range[1],
                  static_cast<int>(std::lround(a.a_range[2])), a.b_range[0],
                  a.b_range[1], static_cast<int>(std::lround(a.b_range[2])));
    std::ostringstream csv;
    csv << "a,b,H\n";
    for (std::size_t ia = 0; ia < res.a_values.size(); ++ia)
        for (std::size_t ib = 0; ib < res.b_values.size(); ++ib)
            csv << fmt(res.a_values[ia]) << ',' << fmt(res.b_values[ib]) << ','
                << fmt(res.objective[ia * res.b_values.size() + ib]) << '\n';
    atomic_write(a.out, csv.str());
    std::printf("scan: argmin (a,b)=(%s,%s) H=%s over %zux%zu lattice; wrote %s\n",
                fmt(res.a_min).c_str(), fmt(res.b_min).c_str(),
                fmt(res.min_objective).c_str(), res.a_values.size(),
                res.b_values.size(), a.out.c_str());
    return 0;
}

struct FitArgs {
    FitCommonArgs f;
    std::vector<std::string> unknowns{"a", "b"};
    std::vector<double> guess;
    bool reduce_k2 = false;
    std::string out = "fit.json";
    std::string trace = "fit_trace.csv";
};

int run_fit(const FitArgs& a) {
    std::array<bool, 8> unknown{};
    for (const std::string& name : a.unknowns) {
        if (name == "all") {
            unknown.fill(true);
            continue;
        }
        const auto& names = ParamVector::names();
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
            throw contract_error("unknown parameter name \"" + name + "\"");
        unknown[static_cast<std::size_t>(it - names.begin())] = true;
    }
    if (a.reduce_k2)
        unknown[3] = false;

    FitProblem prob = a.f.build(unknown);
    std::array<double, 8> X0 = prob.reference;
    if (!a.guess.empty()) {
        if (a.guess.size() != 8)
            throw contract_error("--guess needs exactly 8 values");
        std::copy(a.guess.begin(), a.guess.end(), X0.begin());
    }

    const FitReport report =
        a.reduce_k2 ? reduced_fit(prob, X0) : fit(prob, X0);

    json j;
    j["params"] = params_json(report.params);
    j["objective"] = report.objective;
    j["flux_residual_norm"] = report.flux_residual_norm;
    j["biomass_residual_norm"] = report.biomass_residual_norm;
    j["iterations"] = report.iterations;
    j["termination"] = report.termination;
    j["jacobian_condition"] = report.jacobian_condition;
    j["k2_reduced"] = a.reduce_k2;
    write_json(a.out, j);

    std::ostringstream csv;
    csv << "iter,J\n";
    for (std::size_t k = 0; k < report.objective_trace.size(); ++k)
        csv << k << ',' << fmt(report.objective_trace[k]) << '\n';
    atomic_write(a.trace, csv.str());

    std::printf("fit: J=%s after %d iterations (%s); wrote %s, %s\n",
                fmt(report.objective).c_str(), report.iterations,
                report.termination.c_str(), a.out.c_str(), a.trace.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

int classify(const error& e) {
    if (dynamic_cast<const contract_error*>(&e) ||
        dynamic_cast<const parse_error*>(&e) ||
        dynamic_cast<const domain_error*>(&e))
        return 2;
    if (dynamic_cast<const assumption_error*>(&e))
        return 4;
    return 3;
}

const char* code_name(int code) {
    switch (code) {
    case 2: return "configuration";
    case 4: return "assumption";
    default: return "numerical";
    }
}

void emit_error(int code, const std::string& message) {
    json j;
    j["error"] = {{"code", code}, {"kind", code_name(code)}, {"message", message}};
    std::fprintf(stderr, "%s\n", j.dump().c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Substrate-biofilm solver, observable synthesis, and "
                 "parameter recovery"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file with sections per command");

    ForwardArgs fwd;
    auto* cmd_forward =
        app.add_subcommand("forward", "solve the coupled system, write x,t,S,M CSV");
    fwd.c.add_flags(cmd_forward);
    fwd.m.add_flags(cmd_forward);
    cmd_forward->add_option("--out", fwd.out, "output CSV path")->capture_default_str();

    ConvergenceArgs conv;
    auto* cmd_convergence = app.add_subcommand(
        "convergence", "error table of a closed-form case on square meshes");
    conv.c.add_flags(cmd_convergence);
    cmd_convergence
        ->add_option("--meshes", conv.meshes,
                     "strictly decreasing mesh sizes (default 0.1,0.05,0.01)")
        ->delimiter(',');
    cmd_convergence->add_option("--out", conv.out, "output CSV path")->capture_default_str();

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand(
        "synth", "generate measurement series (boundary flux, total biomass)");
    synth.c.add_flags(cmd_synth);
    synth.m.add_flags(cmd_synth);
    synth.meas.add_flags(cmd_synth, true);
    cmd_synth->add_option("--out", synth.out, "output CSV path")->capture_default_str();

    RecoverArgs rec;
    auto* cmd_recover = app.add_subcommand(
        "recover", "closed-form staged recovery of all eight parameters");
    rec.c.add_flags(cmd_recover);
    rec.m.add_flags(cmd_recover);
    cmd_recover
        ->add_option("--probe", rec.probe, "analytic|sampled (default analytic)")
        ->check(CLI::IsMember({"analytic", "sampled"}));
    cmd_recover->add_option("--scan-nx", rec.scan_nx,
                            "point-scan lattice nodes in x")->capture_default_str();
    cmd_recover->add_option("--scan-nt", rec.scan_nt,
                            "point-scan lattice nodes in t")->capture_default_str();
    cmd_recover->add_option("--p0", rec.p0, "stage-1 point x,t")->delimiter(',');
    cmd_recover->add_option("--p1", rec.p1, "stage-2 point x,t")->delimiter(',');
    cmd_recover->add_option("--p2", rec.p2, "stage-2 point x,t")->delimiter(',');
    cmd_recover->add_option("--t3", rec.t3, "stage-3 time");
    cmd_recover->add_option("--t4", rec.t4, "stage-3 time");
    cmd_recover->add_option("--p5", rec.p5, "stage-4 point x,t")->delimiter(',');
    cmd_recover->add_option("--p6", rec.p6, "stage-4 point x,t")->delimiter(',');
    cmd_recover->add_option("--p7", rec.p7, "stage-4 point x,t")->delimiter(',');
    cmd_recover->add_option("--out", rec.out, "output JSON path")->capture_default_str();

    ScanArgs scan;
    auto* cmd_scan = app.add_subcommand(
        "scan", "objective values over a uniform (a, b) lattice");
    scan.f.c.add_flags(cmd_scan);
    scan.f.m.add_flags(cmd_scan);
    scan.f.meas.add_flags(cmd_scan, true);
    cmd_scan->add_option("--flavor", scan.f.flavor, "flux|both|auto")->capture_default_str()
        ->check(CLI::IsMember({"flux", "both", "auto"}));
    cmd_scan->add_option("--a-range", scan.a_range, "a lattice as lo,hi,count")
        ->delimiter(',');
    cmd_scan->add_option("--b-range", scan.b_range, "b lattice as lo,hi,count")
        ->delimiter(',');
    cmd_scan->add_option("--out", scan.out, "output CSV path")->capture_default_str();

    FitArgs fit_args;
    auto* cmd_fit = app.add_subcommand(
        "fit", "bounded least-squares fit of the unknown parameters");
    fit_args.f.c.add_flags(cmd_fit);
    fit_args.f.m.add_flags(cmd_fit);
    fit_args.f.meas.add_flags(cmd_fit, false);
    cmd_fit->add_option("--flavor", fit_args.f.flavor, "flux|both|auto")->capture_default_str()
        ->check(CLI::IsMember({"flux", "both", "auto"}));
    cmd_fit
        ->add_option("--unknowns", fit_args.unknowns,
                     "parameter names to fit, or \"all\" (default a,b)")
        ->delimiter(',');
    cmd_fit->add_option("--guess", fit_args.guess, "initial guess, 8 values")
        ->delimiter(',');
    cmd_fit->add_option("--lower", fit_args.f.lower, "lower bounds, 8 values")
        ->delimiter(',');
    cmd_fit->add_option("--upper", fit_args.f.upper, "upper bounds, 8 values")
        ->delimiter(',');
    cmd_fit->add_flag("--reduce-k2", fit_args.reduce_k2,
                      "eliminate K2 through the integrated biomass balance");
    cmd_fit->add_option("--out", fit_args.out, "report JSON path")->capture_default_str();
    cmd_fit->add_option("--trace", fit_args.trace, "objective trace CSV path")
        ->capture_default_str();

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error(2, e.what());
        return 2;
    }

    try {
        if (cmd_forward->parsed())
            return run_forward(fwd);
        if (cmd_convergence->parsed())
            return run_convergence(conv);
        if (cmd_synth->parsed())
            return run_synth(synth);
        if (cmd_recover->parsed())
            return run_recover(rec);
        if (cmd_scan->parsed())
            return run_scan(scan);
        if (cmd_fit->parsed())
            return run_fit(fit_args);
        emit_error(2, "no command given");
        return 2;
    } catch (const error& e) {
        const int code = classify(e);
        emit_error(code, e.what());
        return code;
    } catch (const std::exception& e) {
        emit_error(3, e.what());
        return 3;
    }
}
