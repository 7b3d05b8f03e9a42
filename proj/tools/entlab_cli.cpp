// Experiment runner: simulate | entrance | contract | density | quasi | examples

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "entlab/coefficients.hpp"
#include "entlab/contraction.hpp"
#include "entlab/density.hpp"
#include "entlab/entrance.hpp"
#include "entlab/io.hpp"
#include "entlab/measures.hpp"
#include "entlab/quasiperiodic.hpp"
#include "entlab/simulator.hpp"

namespace fs = std::filesystem;
using namespace entlab;

namespace {

struct Common {
    std::string example = "ou";
    std::string drift, sigma, alpha_expr = "0", lambda_expr = "0";
    std::map<std::string, double> params;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
};

CoefficientSet build_coefficients(const Common& c) {
    if (!c.drift.empty()) {
        if (c.sigma.empty())
            throw CLI::ValidationError("--sigma required with --drift");
        return make_symbolic(c.drift, c.sigma, c.alpha_expr, c.lambda_expr);
    }
    return make_example(c.example, c.params);
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--example", c.example, "built-in coefficient family");
    app->add_option("--drift", c.drift, "drift expression in (t, x)");
    app->add_option("--sigma", c.sigma, "diffusion expression in (t, x)");
    app->add_option("--alpha", c.alpha_expr, "envelope alpha expression in t");
    app->add_option("--lambda", c.lambda_expr, "envelope lambda expression in t");
    app->add_option("--param", c.params, "family parameter name=value");
    app->add_option("--out", c.out_dir, "output directory");
    app->add_option("--seed", c.seed, "RNG seed");
}

void ensure_dir(const std::string& d) { fs::create_directories(d); }

int finish(const io::Report& rep, const std::string& out_dir) {
    ensure_dir(out_dir);
    rep.write(out_dir + "/report.txt");
    std::cout << rep.str();
    return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for entrance measures of "
                 "time-inhomogeneous SDEs"};
    app.require_subcommand(1);
    app.set_config("--config");

    // ---- simulate ----
    Common sim_c;
    double sim_s = 0.0, sim_t = 1.0, sim_x = 0.0, sim_h = 1e-3;
    std::size_t sim_paths = 1000;
    bool sim_traj = false;
    auto* sim = app.add_subcommand("simulate", "simulate trajectories/ensembles");
    add_common(sim, sim_c);
    sim->add_option("--s", sim_s);
    sim->add_option("--t", sim_t);
    sim->add_option("--x", sim_x);
    sim->add_option("--step", sim_h, "time step");
    sim->add_option("--paths", sim_paths);
    sim->add_flag("--trajectory", sim_traj, "emit one full trajectory");

    // ---- entrance ----
    Common ent_c;
    double ent_t = 0.0, ent_x0 = 0.0, ent_delta0 = 1.0, ent_h = 1e-3,
           ent_beta = 0.1;
    int ent_nstarts = 7;
    std::size_t ent_paths = 20000;
    auto* ent = app.add_subcommand("entrance", "entrance-measure estimation");
    add_common(ent, ent_c);
    ent->add_option("--t", ent_t);
    ent->add_option("--x0", ent_x0);
    ent->add_option("--delta0", ent_delta0);
    ent->add_option("--starts", ent_nstarts);
    ent->add_option("--step", ent_h, "time step");
    ent->add_option("--paths", ent_paths);
    ent->add_option("--beta", ent_beta);

    // ---- contract ----
    std::string con_schedule;
    double con_delta = 0.1, con_R = 20.0, con_varpi = 0.5, con_gstar = 0.5;
    std::string con_out = "out";
    auto* con = app.add_subcommand("contract", "contraction certificate");
    con->add_option("--schedule", con_schedule, "schedule CSV")->required();
    con->add_option("--delta", con_delta);
    con->add_option("--R", con_R);
    con->add_option("--varpi", con_varpi);
    con->add_option("--gamma-star", con_gstar);
    con->add_option("--out", con_out);

    // ---- density ----
    Common den_c;
    double den_s = 0.0, den_t = 1.0, den_x0 = 0.0, den_lo = -8.0, den_hi = 8.0,
           den_dt = 1e-3, den_R = -1.0, den_ball = 1.0;
    int den_cells = 1600;
    auto* den = app.add_subcommand("density", "forward-Kolmogorov density");
    add_common(den, den_c);
    den->add_option("--s", den_s);
    den->add_option("--t", den_t);
    den->add_option("--x0", den_x0);
    den->add_option("--lo", den_lo);
    den->add_option("--hi", den_hi);
    den->add_option("--cells", den_cells);
    den->add_option("--dt", den_dt);
    den->add_option("--R", den_R, "run a minorization sweep over V <= R");
    den->add_option("--ball", den_ball, "minorization ball radius");

    // ---- quasi ----
    Common qua_c;
    double qua_c1 = 1.0, qua_c2 = 1.0, qua_w1 = 0.0, qua_w2 = 0.0,
           qua_burn = 8.0, qua_h = 1e-2;
    int qua_n1 = 16, qua_n2 = 16;
    std::size_t qua_paths = 5000;
    auto* qua = app.add_subcommand("quasi", "quasi-periodic cylinder measure");
    qua->add_option("--c1", qua_c1);
    qua->add_option("--c2", qua_c2);
    qua->add_option("--w1", qua_w1, "first forcing frequency (2 pi / period)");
    qua->add_option("--w2", qua_w2, "second forcing frequency");
    qua->add_option("--n1", qua_n1);
    qua->add_option("--n2", qua_n2);
    qua->add_option("--burn", qua_burn);
    qua->add_option("--step", qua_h, "time step");
    qua->add_option("--paths", qua_paths);
    qua->add_option("--out", qua_c.out_dir);
    qua->add_option("--seed", qua_c.seed);

    // ---- examples ----
    auto* ex = app.add_subcommand("examples", "built-in example catalog");
    auto* ex_list = ex->add_subcommand("list", "list example names");
    std::string ex_name;
    std::string ex_out = "out";
    auto* ex_run = ex->add_subcommand("run", "run an example's oracle suite");
    ex_run->add_option("name", ex_name)->required();
    ex_run->add_option("--out", ex_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            const CoefficientSet c = build_coefficients(sim_c);
            SimConfig cfg;
            cfg.h = sim_h;
            cfg.seed = sim_c.seed;
            cfg.paths = sim_paths;
            cfg.trunc_radius = 10.0 * (1.0 + std::abs(sim_x));
            ensure_dir(sim_c.out_dir);
            io::Report rep;
            rep.kv("command", std::string("simulate"));
            rep.kv("example", c.name);
            rep.kv("s", sim_s);
            rep.kv("t", sim_t);
            rep.kv("x", sim_x);
            rep.kv("h", sim_h);
            rep.kv("paths", static_cast<double>(sim_paths));
            rep.kv("seed", static_cast<double>(cfg.seed));
            if (sim_traj) {
                const Trajectory tr =
                    simulate_path(c, sim_s, Vec{sim_x}, sim_t, cfg);
                io::write_trajectory_csv(tr, sim_c.out_dir + "/trajectory.csv");
            } else {
                const Ensemble e = push_ensemble(c, sim_s, delta_sampler(Vec{sim_x}),
                                                 sim_t, cfg);
                io::write_ensemble_csv(e, sim_c.out_dir + "/ensemble.csv");
                rep.kv("second_moment", e.second_moment());
            }
            return finish(rep, sim_c.out_dir);
        }

        if (*ent) {
            const CoefficientSet c = build_coefficients(ent_c);
            SimConfig cfg;
            cfg.h = ent_h;
            cfg.seed = ent_c.seed;
            cfg.paths = ent_paths;
            cfg.trunc_radius = 10.0 * (1.0 + std::abs(ent_x0));
            MeasureConfig mc;
            mc.beta = ent_beta;
            ensure_dir(ent_c.out_dir);
            const auto starts = geometric_starts(ent_t, ent_delta0, ent_nstarts);
            const EntranceEstimate est =
                estimate_entrance(c, ent_t, starts, ent_x0, cfg, mc);
            io::Report rep;
            rep.kv("command", std::string("entrance"));
            rep.kv("example", c.name);
            rep.kv("t", ent_t);
            rep.kv("x0", ent_x0);
            rep.kv("beta", ent_beta);
            rep.kv("seed", static_cast<double>(cfg.seed));
            for (std::size_t i = 0; i < est.estimates.size(); ++i)
                io::write_measure_csv(est.estimates[i], ent_c.out_dir + "/measure_" +
                                                            std::to_string(i) +
                                                            ".csv");
            std::vector<std::pair<double, double>> curve;
            for (std::size_t i = 0; i + 1 < est.estimates.size(); ++i)
                curve.emplace_back(ent_t - est.starts[i], est.consecutive_rho[i]);
            io::write_curve_csv(curve, ent_c.out_dir + "/curve.csv");
            if (curve.size() >= 5) {
                std::vector<double> grid;
                for (double a = 0.3; a <= 2.51; a += 0.05) grid.push_back(a);
                const RateFit fit = fit_rate(curve, grid);
                rep.kv("fit_alpha", fit.alpha);
                rep.kv("fit_lambda", fit.lambda);
                rep.kv("fit_residual", fit.residual);
            }
            rep.check("entrance estimate converged", est.converged);
            return finish(rep, ent_c.out_dir);
        }

        if (*con) {
            const auto schedule = io::read_schedule_csv(con_schedule);
            const PartitionAnalysis a = analyze_partition(schedule, con_delta);
            const ConditionReport cr =
                check_theorem_conditions(a, con_R, con_varpi, con_gstar);
            io::Report rep;
            rep.kv("command", std::string("contract"));
            rep.kv("entries", static_cast<double>(schedule.size()));
            rep.kv("gamma_max", a.gamma_max);
            rep.kv("K_max", a.k_max);
            rep.kv("delta", con_delta);
            rep.kv("liminf_ratio", a.liminf_ratio);
            rep.kv("limsup_gamma_bar", a.limsup_gamma_bar);
            rep.kv("conditions", cr.diagnostics);
            rep.check("theorem conditions", cr.all_ok);
            if (cr.all_ok) {
                const ContractionCertificate cert = select_beta(
                    a.gamma_max, a.k_max, con_R, con_delta, con_varpi, con_gstar);
                rep.kv("beta1", cert.beta1);
                rep.kv("beta2", cert.beta2);
                rep.kv("c1", cert.c1);
                rep.kv("c2", cert.c2);
                rep.kv("beta", cert.beta);
                rep.kv("r", cert.r);
                rep.kv("C_t_at_top", ct_constant(cert, a, schedule.front().t_hi));
                rep.check("contraction rate r < 1", cert.r < 1.0);
            }
            return finish(rep, con_out);
        }

        if (*den) {
            const CoefficientSet c = build_coefficients(den_c);
            FPGrid grid;
            grid.lo = den_lo;
            grid.hi = den_hi;
            grid.cells = den_cells;
            grid.dt = den_dt;
            ensure_dir(den_c.out_dir);
            io::Report rep;
            rep.kv("command", std::string("density"));
            rep.kv("example", c.name);
            rep.kv("s", den_s);
            rep.kv("t", den_t);
            rep.kv("x0", den_x0);
            const FPResult res = fp_solve(c, den_s, den_x0, den_t, grid);
            rep.kv("mass_deficit", res.mass_deficit);
            io::write_measure_csv(res.density, den_c.out_dir + "/density.csv");
            rep.check("mass deficit below 1e-3", std::abs(res.mass_deficit) < 1e-3);
            if (den_R > 0.0) {
                const MinorizationResult m =
                    minorization(c, den_s, den_t, den_R, den_ball, grid);
                rep.kv("minorization_eta", m.eta);
                rep.kv("minorization_min_density", m.min_density);
                rep.check("local Doeblin eta > 0", m.eta > 0.0);
            }
            return finish(rep, den_c.out_dir);
        }

        if (*qua) {
            if (qua_w1 <= 0.0 || qua_w2 <= 0.0) {
                std::cerr << "quasi: --w1 and --w2 (positive frequencies) are "
                             "required\n";
                return 2;
            }
            const QuasiPeriodicParent parent =
                make_quasi_double_well(qua_c1, qua_c2, qua_w1, qua_w2);
            SimConfig cfg;
            cfg.h = qua_h;
            cfg.seed = qua_c.seed;
            cfg.paths = qua_paths;
            cfg.trunc_radius = 10.0;
            MeasureConfig mc;
            ensure_dir(qua_c.out_dir);
            const CylinderMeasure cm =
                cylinder_invariant(parent, qua_n1, qua_n2, qua_burn, cfg, mc);
            std::ofstream out(qua_c.out_dir + "/cylinder.csv");
            out << "r1_cell,r2_cell,x_cell,mass\n";
            for (int i1 = 0; i1 < cm.n1; ++i1)
                for (int i2 = 0; i2 < cm.n2; ++i2) {
                    const GridMeasure& g = cm.cell(i1, i2);
                    for (std::size_t j = 0; j < g.cell_count(); ++j)
                        if (g.masses()[j] > 0.0)
                            out << i1 << "," << i2 << "," << g.cell_center(j)[0]
                                << "," << g.masses()[j] / (cm.n1 * cm.n2) << "\n";
                }
            io::Report rep;
            rep.kv("command", std::string("quasi"));
            rep.kv("tau1", parent.tau1);
            rep.kv("tau2", parent.tau2);
            rep.kv("cells", static_cast<double>(cm.cells.size()));
            rep.check("cylinder assembled", true);
            return finish(rep, qua_c.out_dir);
        }

        if (*ex) {
            if (*ex_list) {
                for (const auto& n : example_names()) std::cout << n << "\n";
                return 0;
            }
            if (*ex_run) {
                const CoefficientSet c = make_example(ex_name);
                io::Report rep;
                rep.kv("command", "examples run " + ex_name);
                SimConfig cfg;
                cfg.h = 1e-2;
                // the convergence probe needs the histogram noise floor of
                // consecutive estimates to sit below the Cauchy tolerance
                cfg.paths = 100000;
                cfg.trunc_radius = 10.0;
                MeasureConfig mc;
                const auto starts = geometric_starts(0.0, 1.0, 7);
                const EntranceEstimate est =
                    estimate_entrance(c, 0.0, starts, 0.0, cfg, mc);
                rep.check("entrance estimate converged", est.converged);
                for (const auto& truth : example_catalog()) {
                    if (truth.name != ex_name || !truth.has_exact_invariant)
                        continue;
                    const double var = est.final_estimate->second_moment();
                    std::ostringstream det;
                    det << "sample variance " << var << " vs "
                        << truth.invariant_variance;
                    rep.check("invariant variance matches",
                              std::abs(var - truth.invariant_variance) < 0.05,
                              det.str());
                }
                return finish(rep, ex_out);
            }
            std::cerr << "examples: expected 'list' or 'run <name>'\n";
            return 2;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
