// Command-line harness for the meshless Stokes toolkit: evolutionary global
// collocation runs, steady/evolutionary LHI runs, amplification-spectrum
// stability reports, and the null-control CGM loop. Presets reproduce the
// standard experiment grids; all outputs are CSV with a config-echo comment.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "stokesrbf/control.hpp"
#include "stokesrbf/eigenvalues.hpp"
#include "stokesrbf/geometry.hpp"
#include "stokesrbf/global_solver.hpp"
#include "stokesrbf/lhi_solver.hpp"
#include "stokesrbf/problems.hpp"
#include "stokesrbf/stability.hpp"

namespace fs = std::filesystem;
using namespace stokesrbf;

namespace {

struct CommonOpts {
    int digits = 50;
    int nodes = 362;
    std::string nodes_file;
    unsigned seed = 0;
    std::string kernel = "imq";
    double shape = 0.1;
    double shape_star = 0.0;
    std::string bc = "dirichlet";
    double mu = 1.0;
    int bdf = 2;
    std::vector<double> dts;
    double t_end = 1.0;
    std::string out = "out";
    std::string flavor = "lines";
    std::vector<int> stencils{30};
    std::string preset;
    bool exact_history = false;
};

KernelSpec make_kernel_spec(const CommonOpts& o) {
    KernelSpec ks;
    if (o.kernel == "imq") ks.family = RbfFamily::InverseMultiquadric;
    else if (o.kernel == "gaussian") ks.family = RbfFamily::Gaussian;
    else throw ConfigError("unknown kernel '" + o.kernel + "' (imq|gaussian)");
    ks.shape = o.shape;
    ks.digits = o.digits;
    return ks;
}

BcKind parse_bc(const std::string& s) {
    if (s == "dirichlet") return BcKind::Dirichlet;
    if (s == "slip" || s == "navier-slip") return BcKind::NavierSlip;
    throw ConfigError("unknown bc '" + s + "' (dirichlet|slip)");
}

NodeSet make_nodes(const CommonOpts& o) {
    if (!o.nodes_file.empty()) return load_nodes(o.nodes_file);
    return generate_disk_nodes(o.nodes, o.seed);
}

std::string echo(const std::map<std::string, std::string>& kv) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << ' ';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void ensure_outdir(const std::string& out) { fs::create_directories(out); }

// ---------------------------------------------------------------------------
// evolve: global collocation on the unit-circle problem, dt sweep
// ---------------------------------------------------------------------------

int cmd_evolve(const CommonOpts& o) {
    ensure_outdir(o.out);
    const NodeSet nodes = make_nodes(o);
    const DivFreeKernel kernel = DivFreeKernel::make(make_kernel_spec(o));
    const BcKind bc_kind = parse_bc(o.bc);
    const ReferenceProblem rp = unit_circle_problem(o.mu, kernel.stress_extra_mu);
    const ExactSolution exact = rp.exact();
    const SchemeFlavor flavor =
        o.flavor == "backward" ? SchemeFlavor::BackwardModified : SchemeFlavor::MethodOfLines;
    std::vector<double> dts = o.dts;
    if (dts.empty()) throw ConfigError("evolve needs at least one --dt");

    std::map<std::string, std::string> kv{
        {"cmd", "evolve"},       {"nodes", std::to_string(nodes.total())},
        {"kernel", o.kernel},    {"shape", fmt(o.shape)},
        {"digits", std::to_string(o.digits)}, {"bc", o.bc},
        {"mu", fmt(o.mu)},       {"bdf", std::to_string(o.bdf)},
        {"T", fmt(o.t_end)},     {"flavor", o.flavor},
        {"seed", std::to_string(o.seed)}};
    const std::string config_echo = echo(kv);

    std::ofstream table(fs::path(o.out) / "evolve_table.csv");
    table << "# " << config_echo << "\n";
    table << "dt,err_y_inf,err_gradp_inf\n";

    for (double dt : dts) {
        ScopedDigits guard(o.digits);
        GlobalSystem<BigFloat> sys(nodes, kernel, rp.bc(bc_kind), o.mu, flavor,
                                   bdf_coefficients(o.bdf, dt));
        EvolutionOptions opts;
        opts.t_end = o.t_end;
        opts.exact = &exact;
        opts.bootstrap = o.exact_history ? BootstrapMode::ExactSolution : BootstrapMode::SubstepBdf1;
        auto y0 = [&](Point2 p) { return rp.velocity(p, 0.0); };
        const EvolutionLog<BigFloat> log = run_evolution(sys, y0, rp.source, opts);

        char name[64];
        std::snprintf(name, sizeof name, "evolve_dt%g.csv", dt);
        std::ofstream tr(fs::path(o.out) / name);
        tr << "# " << config_echo << " dt=" << fmt(dt) << "\n";
        tr << "t,err_y_inf,err_gradp_inf\n";
        for (std::size_t i = 0; i < log.times.size(); ++i)
            tr << fmt(log.times[i]) << ',' << fmt(log.err_y_inf[i]) << ','
               << fmt(log.err_gradp_inf[i]) << '\n';

        if (log.non_convergence)
            table << fmt(dt) << ",N.C,N.C\n";
        else
            table << fmt(dt) << ',' << fmt(log.max_err_y) << ',' << fmt(log.max_err_gradp) << '\n';
        std::cout << "dt=" << dt << (log.non_convergence
                                         ? "  N.C"
                                         : "  err_y=" + fmt(log.max_err_y) +
                                               "  err_gradp=" + fmt(log.max_err_gradp))
                  << std::endl;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// lhi: steady Table-2 rows or evolutionary Table-3 grid
// ---------------------------------------------------------------------------

int cmd_lhi(const CommonOpts& o, const std::string& mode, const std::vector<int>& grids) {
    ensure_outdir(o.out);
    const BcKind bc_kind = parse_bc(o.bc);

    if (mode == "steady") {
        const ReferenceProblem rp = square_polynomial_problem(o.mu);
        std::ofstream table(fs::path(o.out) / "lhi_steady.csv");
        std::map<std::string, std::string> kv{{"cmd", "lhi-steady"},
                                              {"kernel", o.kernel},
                                              {"c_star", fmt(o.shape_star)},
                                              {"digits", std::to_string(o.digits)},
                                              {"bc", o.bc},
                                              {"mu", fmt(o.mu)}};
        table << "# " << echo(kv) << "\n";
        table << "total_nodes,local_nodes,c_star,cond,err_inf,err_l2\n";
        for (int n_side : grids)
            for (int st : o.stencils) {
                ScopedDigits guard(o.digits);
                const NodeSet nodes = generate_square_nodes(n_side);
                LhiConfig cfg;
                cfg.kernel = DivFreeKernel::make(make_kernel_spec(o));
                cfg.c_star = o.shape_star;
                cfg.bc = rp.bc(bc_kind);
                cfg.mu = o.mu;
                cfg.mode = LhiMode::Steady;
                LhiSystem<BigFloat> sys = assemble_lhi<BigFloat>(nodes, st, cfg);
                const auto res = sys.solve_steady(rp.source);
                double einf = 0.0, e2 = 0.0, cond = 0.0;
                const std::size_t n_c = nodes.n_interior();
                for (std::size_t i = 0; i < n_c; ++i) {
                    const Vec2 u = rp.velocity(nodes.interior[i], 0.0);
                    const double e1 = res.velocity[i] - u.x, e2c = res.velocity[n_c + i] - u.y;
                    einf = std::max({einf, std::abs(e1), std::abs(e2c)});
                    e2 += e1 * e1 + e2c * e2c;
                }
                for (const auto& d : sys.diagnostics()) cond = std::max(cond, d.cond_estimate);
                char row[160];
                std::snprintf(row, sizeof row, "%zu,%d,%g,%.3g,%.6g,%.6g", nodes.total(), st,
                              o.shape_star, cond, einf, std::sqrt(e2));
                table << row << '\n';
                std::cout << row << std::endl;

                std::ofstream diag(fs::path(o.out) / ("lhi_steady_diag_n" + std::to_string(n_side) +
                                                      "_s" + std::to_string(st) + ".csv"));
                diag << "# " << echo(kv) << "\n";
                diag << "stencil_id,cond_estimate,weight_norm\n";
                for (const auto& d : sys.diagnostics())
                    diag << d.stencil_id << ',' << fmt(d.cond_estimate) << ',' << fmt(d.weight_norm)
                         << '\n';
            }
        return 0;
    }

    // evolutionary grid
    const NodeSet nodes = make_nodes(o);
    const ReferenceProblem rp = unit_circle_problem(o.mu);
    const ExactSolution exact = rp.exact();
    std::ofstream table(fs::path(o.out) / "lhi_evolve.csv");
    std::map<std::string, std::string> kv{{"cmd", "lhi-evolve"},
                                          {"nodes", std::to_string(nodes.total())},
                                          {"kernel", o.kernel},
                                          {"shape", fmt(o.shape)},
                                          {"digits", std::to_string(o.digits)},
                                          {"bc", o.bc},
                                          {"mu", fmt(o.mu)},
                                          {"bdf", std::to_string(o.bdf)},
                                          {"T", fmt(o.t_end)}};
    table << "# " << echo(kv) << "\n";
    table << "bc,stencil,dt,err_y_inf\n";
    if (o.dts.empty()) throw ConfigError("lhi evolve needs at least one --dt");
    for (int st : o.stencils)
        for (double dt : o.dts) {
            ScopedDigits guard(o.digits);
            LhiConfig cfg;
            cfg.kernel = DivFreeKernel::make(make_kernel_spec(o));
            cfg.c_star = o.shape_star;
            cfg.bc = rp.bc(bc_kind);
            cfg.mu = o.mu;
            cfg.mode = LhiMode::Bdf;
            cfg.scheme = bdf_coefficients(o.bdf, dt);
            cfg.estimate_conditioning = false;
            LhiSystem<BigFloat> sys = assemble_lhi<BigFloat>(nodes, st, cfg);
            LhiEvolutionOptions opts;
            opts.t_end = o.t_end;
            opts.exact = &exact;
            opts.bootstrap =
                o.exact_history ? BootstrapMode::ExactSolution : BootstrapMode::SubstepBdf1;
            auto y0 = [&](Point2 p) { return rp.velocity(p, 0.0); };
            const auto log = lhi_run_evolution(sys, y0, rp.source, opts);
            const std::string cell = log.non_convergence ? "N.C" : fmt(log.max_err_y);
            table << o.bc << ',' << st << ',' << fmt(dt) << ',' << cell << '\n';
            std::cout << o.bc << " stencil=" << st << " dt=" << dt << " -> " << cell << std::endl;
        }
    return 0;
}

// ---------------------------------------------------------------------------
// stability: BDF loci and amplification spectra
// ---------------------------------------------------------------------------

int cmd_stability(const CommonOpts& o, const std::string& mode, double dt) {
    ensure_outdir(o.out);
    if (mode == "region") {
        for (int s = 1; s <= 3; ++s) {
            const StabilityRegion region = bdf_region(s);
            write_locus_csv((fs::path(o.out) / ("bdf" + std::to_string(s) + "_locus.csv")).string(),
                            region, "cmd=stability mode=region s=" + std::to_string(s));
        }
        std::cout << "wrote bdf1..bdf3 loci" << std::endl;
        return 0;
    }

    const BcKind bc_kind = parse_bc(o.bc);
    const StabilityRegion region = bdf_region(o.bdf);
    const ReferenceProblem rp = unit_circle_problem(o.mu);
    std::map<std::string, std::string> kv{
        {"cmd", "stability"}, {"mode", mode},
        {"nodes", std::to_string(o.nodes)}, {"kernel", o.kernel},
        {"shape", fmt(o.shape)}, {"digits", std::to_string(o.digits)},
        {"bc", o.bc}, {"mu", fmt(o.mu)},
        {"bdf", std::to_string(o.bdf)}, {"dt", fmt(dt)}};

    if (mode == "global") {
        ScopedDigits guard(o.digits);
        const NodeSet nodes = make_nodes(o);
        const DivFreeKernel kernel = DivFreeKernel::make(make_kernel_spec(o));
        GlobalSystem<BigFloat> sys(nodes, kernel, rp.bc(bc_kind), o.mu,
                                   SchemeFlavor::MethodOfLines, bdf_coefficients(o.bdf, dt));
        const DenseMatrix<BigFloat> k =
            global_amplification(sys.interpolation_matrix(), sys.factors(), sys.h_minus());
        const StabilityReport rep = stability_report(k, region, echo(kv));
        write_eigenvalues_csv((fs::path(o.out) / "eigenvalues.csv").string(), rep);
        write_locus_csv((fs::path(o.out) / "locus.csv").string(), region, echo(kv));
        std::cout << "outside-region eigenvalues: " << rep.n_outside << " / "
                  << rep.eigenvalues.size() << std::endl;
        return rep.n_outside == 0 ? 0 : 0;
    }

    if (mode != "lhi") throw ConfigError("stability mode must be region|global|lhi");
    for (int st : o.stencils) {
        ScopedDigits guard(o.digits);
        const NodeSet nodes = make_nodes(o);
        LhiConfig cfg;
        cfg.kernel = DivFreeKernel::make(make_kernel_spec(o));
        cfg.c_star = o.shape_star;
        cfg.bc = rp.bc(bc_kind);
        cfg.mu = o.mu;
        cfg.mode = LhiMode::Bdf;
        cfg.scheme = bdf_coefficients(o.bdf, dt);
        cfg.estimate_conditioning = false;
        LhiSystem<BigFloat> sys = assemble_lhi<BigFloat>(nodes, st, cfg);
        const DenseMatrix<double> m = lhi_amplification(sys.matrix(), sys.history_block());
        kv["stencil"] = std::to_string(st);
        const StabilityReport rep = stability_report(m, region, echo(kv));
        const std::string tag = "_s" + std::to_string(st) + "_dt" + fmt(dt);
        write_eigenvalues_csv((fs::path(o.out) / ("eigenvalues" + tag + ".csv")).string(), rep);
        write_locus_csv((fs::path(o.out) / "locus.csv").string(), region, echo(kv));
        std::cout << "stencil=" << st << " dt=" << dt
                  << " outside=" << rep.n_outside << "/" << rep.eigenvalues.size() << std::endl;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// control: CGM null-control runs
// ---------------------------------------------------------------------------

int cmd_control(const CommonOpts& o, const std::string& mask_name, const std::string& backend,
                double c1inv, double c2inv, double horizon, double dt, double eps, int max_iter) {
    ensure_outdir(o.out);
    ControlProblem pb;
    pb.backend = backend == "lhi" ? ControlBackend::Lhi : ControlBackend::Global;
    pb.nodes = make_nodes(o);
    pb.kernel = DivFreeKernel::make(make_kernel_spec(o));
    pb.bc_kind = parse_bc(o.bc);
    pb.horizon = horizon;
    pb.dt = dt;
    pb.mu = o.mu;
    pb.c1_inv = c1inv;
    pb.c2_inv = c2inv;
    pb.y0 = control_initial_condition();
    pb.lhi_stencil = o.stencils.front();

    std::map<std::string, std::string> kv{
        {"cmd", "control"}, {"mask", mask_name}, {"backend", backend},
        {"nodes", std::to_string(pb.nodes.total())}, {"kernel", o.kernel},
        {"shape", fmt(o.shape)}, {"digits", std::to_string(o.digits)},
        {"bc", o.bc}, {"mu", fmt(o.mu)},
        {"T", fmt(horizon)}, {"dt", fmt(dt)},
        {"c1inv", fmt(c1inv)}, {"c2inv", fmt(c2inv)}, {"seed", std::to_string(o.seed)}};
    const std::string config_echo = echo(kv);

    ControlSolution sol;
    if (mask_name == "none") {
        // uncontrolled decay: forward solve with v = 0
        ControlSetup setup(pb);
        const ControlField zero = ControlField::zeros(setup.n_steps(), setup.control_nodes().size());
        const ControlTrajectory tr = setup.solve_forward(zero);
        sol.control_nodes = setup.control_nodes();
        sol.state = tr.y;
        sol.times.resize(tr.y.size());
        sol.norm_sq.resize(tr.y.size());
        for (std::size_t m = 0; m < tr.y.size(); ++m) {
            sol.times[m] = m * pb.dt;
            sol.norm_sq[m] = setup.state_mass_norm_sq(tr.y[m]);
        }
        sol.final_norm_sq = sol.norm_sq.back();
        sol.converged = true;
        sol.iterations.push_back({0, 0.0, tr.j_value});
    } else {
        if (mask_name == "both") pb.mask = ControlMask::Both;
        else if (mask_name == "first") pb.mask = ControlMask::FirstOnly;
        else if (mask_name == "second") pb.mask = ControlMask::SecondOnly;
        else throw ConfigError("mask must be none|both|first|second");
        sol = cgm_solve(pb, eps, max_iter);
    }

    const std::string tag = "_" + mask_name;
    write_norms_csv((fs::path(o.out) / ("norms" + tag + ".csv")).string(), sol, config_echo);
    write_iterations_csv((fs::path(o.out) / ("iterations" + tag + ".csv")).string(), sol,
                         config_echo);
    write_slice_csv((fs::path(o.out) / ("slice" + tag + ".csv")).string(), sol, pb.nodes, 0.1,
                    0.05, 0.2, horizon, config_echo);
    std::cout << "mask=" << mask_name << " iterations=" << (sol.iterations.size() - 1)
              << " final_norm_sq=" << sol.final_norm_sq
              << (sol.converged ? "" : " (max-iter)") << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meshless divergence-free RBF solvers for the evolutionary Stokes system,\n"
                 "BDF stability analysis, and null-control experiments."};
    app.set_config("--config", "", "line-oriented 'key = value' configuration file");
    app.require_subcommand(1);

    CommonOpts o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--digits", o.digits, "working precision in decimal digits");
        sub->add_option("--nodes", o.nodes, "disk node count");
        sub->add_option("--nodes-file", o.nodes_file, "external node file (overrides --nodes)");
        sub->add_option("--seed", o.seed, "node layout seed");
        sub->add_option("--kernel", o.kernel, "imq|gaussian");
        sub->add_option("--shape", o.shape, "dimensional shape parameter c");
        sub->add_option("--shape-star", o.shape_star, "nondimensional c*: c = c*/h_local");
        sub->add_option("--bc", o.bc, "dirichlet|slip");
        sub->add_option("--mu", o.mu, "viscosity");
        sub->add_option("--bdf", o.bdf, "BDF order (1..3)");
        sub->add_option("--dt", o.dts, "time step (repeatable for sweeps)");
        sub->add_option("--T", o.t_end, "final time");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--stencil", o.stencils, "LHI stencil size (repeatable)");
        sub->add_flag("--exact-history", o.exact_history,
                      "seed multistep history from the exact solution");
    };

    CLI::App* evolve = app.add_subcommand("evolve", "global collocation on the disk problem");
    add_common(evolve);
    evolve->add_option("--flavor", o.flavor, "lines|backward");

    CLI::App* lhi = app.add_subcommand("lhi", "local Hermite interpolation runs");
    add_common(lhi);
    std::string lhi_mode = "steady";
    std::vector<int> grids{20};
    lhi->add_option("--mode", lhi_mode, "steady|evolve");
    lhi->add_option("--grid", grids, "square grid nodes per side (steady, repeatable)");

    CLI::App* stab = app.add_subcommand("stability", "BDF regions and amplification spectra");
    add_common(stab);
    std::string stab_mode = "region";
    double stab_dt = 0.01;
    stab->add_option("--mode", stab_mode, "region|global|lhi");
    stab->add_option("--step", stab_dt, "dt of the analyzed scheme");

    CLI::App* ctrl = app.add_subcommand("control", "null-control CGM");
    add_common(ctrl);
    std::string mask = "both", backend = "global";
    double c1inv = 300.0, c2inv = 0.0, horizon = 0.25, cdt = 1.0 / 200.0, eps = 1e-8;
    int max_iter = 100;
    ctrl->add_option("--mask", mask, "none|both|first|second");
    ctrl->add_option("--backend", backend, "global|lhi");
    ctrl->add_option("--c1inv", c1inv, "terminal weight 1/c1 (0 disables)");
    ctrl->add_option("--c2inv", c2inv, "penalty weight 1/c2 (0 disables)");
    ctrl->add_option("--horizon", horizon, "control horizon T");
    ctrl->add_option("--step", cdt, "time step");
    ctrl->add_option("--eps", eps, "CGM relative gradient tolerance");
    ctrl->add_option("--max-iter", max_iter, "CGM iteration cap");

    std::string preset;
    for (CLI::App* sub : {evolve, lhi, stab, ctrl})
        sub->add_option("--preset", preset,
                        "table1|table1-mu1e-6|table1-slip|table2|table3|fig2|fig5|fig6|"
                        "control-dirichlet|control-slip");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        // Preset expansion: fill the options the user did not override.
        if (!preset.empty()) {
            if (preset == "table1" || preset == "table1-mu1e-6" || preset == "table1-slip") {
                o.nodes = 362;
                o.kernel = "imq";
                o.shape = 0.1;
                o.bdf = 2;
                if (o.dts.empty()) o.dts = {0.1, 0.01, 0.002, 0.001};
                if (preset == "table1-mu1e-6") o.mu = 1e-6;
                if (preset == "table1-slip") {
                    o.bc = "slip";
                    o.shape = 0.5;  // the flat c=0.1 kernel is spectrally unstable under slip
                }
            } else if (preset == "table2") {
                lhi_mode = "steady";
            } else if (preset == "table3" || preset == "fig6") {
                o.nodes = 1312;
                o.kernel = "imq";
                o.shape = 0.1;
                o.bdf = 2;
                o.stencils = {30, 60};
                if (o.dts.empty()) o.dts = {0.02, 0.01, 0.005, 0.002};
                if (preset == "fig6") stab_mode = "lhi";
            } else if (preset == "fig2") {
                stab_mode = "region";
            } else if (preset == "fig5") {
                o.nodes = 362;
                o.kernel = "imq";
                o.shape = 0.1;
                o.bc = "slip";
                o.mu = 1e-3;
                o.bdf = 2;
                stab_mode = "global";
            } else if (preset == "control-dirichlet" || preset == "control-slip") {
                o.nodes = 800;
                o.kernel = "imq";
                o.shape = 4.0;
                o.digits = 16;
                o.bc = preset == "control-slip" ? "slip" : "dirichlet";
            } else {
                throw ConfigError("unknown preset '" + preset + "'");
            }
        }

        if (evolve->parsed()) return cmd_evolve(o);
        if (lhi->parsed()) {
            if (preset == "table2") {
                // Gaussian block then IMQ block of the steady table
                int rc = 0;
                for (const auto& [fam, rows] :
                     std::vector<std::pair<std::string, std::vector<std::array<double, 3>>>>{
                         {"gaussian", {{20, 50, 1.0}, {35, 25, 1.0}, {35, 80, 1.0}}},
                         {"imq", {{20, 50, 1.0}, {35, 25, 1.0}, {35, 25, 0.01}, {35, 80, 1.0}}}}) {
                    for (const auto& r : rows) {
                        CommonOpts ro = o;
                        ro.kernel = fam;
                        ro.shape_star = r[2];
                        ro.stencils = {static_cast<int>(r[1])};
                        ro.out = o.out + "/table2_" + fam;
                        rc |= cmd_lhi(ro, "steady", {static_cast<int>(r[0])});
                    }
                }
                return rc;
            }
            return cmd_lhi(o, lhi_mode, grids);
        }
        if (stab->parsed()) {
            if (preset == "fig6") {
                int rc = 0;
                for (double dt : o.dts) rc |= cmd_stability(o, "lhi", dt);
                return rc;
            }
            if (stab_mode != "region" && o.dts.size() == 1) stab_dt = o.dts.front();
            return cmd_stability(o, stab_mode, stab_dt);
        }
        if (ctrl->parsed()) {
            if (preset == "control-dirichlet" || preset == "control-slip") {
                int rc = 0;
                for (const char* m : {"none", "both", "first", "second"})
                    rc |= cmd_control(o, m, backend, c1inv, c2inv, horizon, cdt, eps, max_iter);
                return rc;
            }
            return cmd_control(o, mask, backend, c1inv, c2inv, horizon, cdt, eps, max_iter);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << std::endl;
        return 3;
    }
    return 0;
}
