// hyplqr: reference profiles, LQR synthesis and closed-loop simulation for
// the reactor and traffic models.
//
// Exit codes: 0 ok, 1 arguments/config, 2 profile solver, 3 synthesis,
// 4 CFL violation or divergence during simulation.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyplqr/config.hpp"
#include "hyplqr/csv.hpp"
#include "hyplqr/errors.hpp"
#include "hyplqr/linearize.hpp"
#include "hyplqr/lqr.hpp"
#include "hyplqr/profile.hpp"
#include "hyplqr/simulate.hpp"
#include "hyplqr/svg.hpp"

namespace fs = std::filesystem;
using namespace hyplqr;

namespace {

// An error already mapped to its exit code.
struct Failure {
    int code;
    std::string message;
};

// Runs one pipeline stage; toolkit errors other than argument errors map to `code`.
template <class Fn>
auto stage(int code, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InvalidArgument&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError&) {
        throw;
    } catch (const CflError& e) {
        throw Failure{code, e.what()};
    } catch (const DivergenceError& e) {
        throw Failure{code, std::string(e.what()) + " at t = " + std::to_string(e.time())};
    } catch (const Error& e) {
        throw Failure{code, e.what()};
    }
}

struct Options {
    std::string command;
    std::string config_path;
    std::string model = "traffic";
    std::string out;
    std::optional<int> n_cells;
    std::optional<std::string> weights;
    std::optional<std::string> point_scaling;
    std::optional<double> dt;
    std::uint64_t seed = 0;
    bool open_loop = false;
};

class Run {
public:
    Run(Options opts, Config cfg) : opts_(std::move(opts)), cfg_(std::move(cfg)) {
        fs::create_directories(dir_());
    }

    std::string path(const std::string& name) {
        artifacts_.push_back(name);
        return (fs::path(dir_()) / name).string();
    }
    void adopt(const std::vector<std::string>& full_paths) {
        for (const auto& p : full_paths) artifacts_.push_back(fs::path(p).filename().string());
    }

    Grid grid() const {
        const double L = opts_.model == "traffic" ? cfg_.traffic.L : 1.0;
        return Grid(L, cfg_.discretization.n_cells);
    }
    HyperbolicModel model() const {
        return opts_.model == "traffic" ? traffic_model(cfg_.traffic) : reactor_model(cfg_.reactor);
    }
    WeightMode weights() const { return cfg_.discretization.weights_for(opts_.model); }
    PointScaling scaling() const { return cfg_.discretization.point_scaling; }

    Profile profile(const Grid& g) const {
        return stage(2, [&] {
            if (opts_.model == "traffic") return traffic_profile(cfg_.traffic, g);
            ProfileSolveOptions po;
            po.tol = cfg_.profile.tol;
            po.t_max = cfg_.profile.t_max;
            return solve_reactor_profile(cfg_.reactor, g, reference_controls(), po);
        });
    }
    Eigen::VectorXd reference_controls() const {
        if (opts_.model == "traffic")
            return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cfg_.traffic.interchanges.size()),
                                             0.02 * cfg_.traffic.rho_C);
        return Eigen::VectorXd::Constant(cfg_.reactor.n_patches, cfg_.reactor.nu0);
    }
    // Reference magnitude for displacement amplitudes.
    double scale() const { return opts_.model == "traffic" ? cfg_.traffic.rho_C : 1.0; }

    const Options& opts() const { return opts_; }
    const Config& cfg() const { return cfg_; }

    void finish(const std::chrono::steady_clock::time_point& start, const nlohmann::ordered_json& extra) {
        nlohmann::ordered_json m;
        m["command"] = opts_.command;
        m["model"] = opts_.model;
        m["config_path"] = opts_.config_path.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(opts_.config_path);
        m["parameters"] = to_json(cfg_);
        m["parameters"]["resolved"] = {{"weights", to_string(weights())}, {"seed", opts_.seed}};
        m["output_directory"] = dir_();
        m["artifacts"] = artifacts_;
        if (!extra.is_null()) m["results"] = extra;
        m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m["version"] = HYPLQR_VERSION;
        std::ofstream((fs::path(dir_()) / "manifest.json").string(), std::ios::binary) << m.dump(2) << '\n';
    }

private:
    std::string dir_() const { return opts_.out; }
    Options opts_;
    Config cfg_;
    std::vector<std::string> artifacts_;
};

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string format_eigenvalue(std::complex<double> z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", z.real());
    std::string s = buf;
    if (z.imag() != 0.0) {
        std::snprintf(buf, sizeof buf, " ± %.4fi", std::abs(z.imag()));
        s += buf;
    }
    return s;
}

void plot_profile(Run& run, const Profile& prof) {
    const char* names_traffic[] = {"density [cars/km]"};
    const char* names_reactor[] = {"temperature theta_1", "conversion theta_2"};
    const bool traffic = run.opts().model == "traffic";
    const std::vector<double> x = prof.grid.nodes();
    for (int i = 0; i < prof.n_states(); ++i) {
        const std::string label = traffic ? names_traffic[0] : names_reactor[i];
        svg::Series s{label, x, to_vec(prof.values.row(i).transpose()), traffic};
        svg::line_plot(run.path("profile_state_" + std::to_string(i + 1) + ".svg"),
                       {"Reference profile", traffic ? "x [km]" : "x", label}, {s});
    }
}

nlohmann::ordered_json cmd_profile(Run& run) {
    const Grid g = run.grid();
    const Profile prof = run.profile(g);
    write_profile_csv(prof, run.path("profile.csv"));
    plot_profile(run, prof);
    const double res = steady_residual(run.model(), prof, run.reference_controls(), run.scaling());
    if (run.opts().model != "traffic") {
        std::cout << "steady-state residual: " << res << '\n';
        return {{"steady_residual", res}};
    }
    // The profile jumps by G_j nu_j at the interchanges, which the transport term does not balance there.
    Eigen::MatrixXd field = steady_residual_field(run.model(), prof, run.reference_controls(), run.scaling());
    for (double a : run.cfg().traffic.interchanges) field.col(g.node_index(a) - 1).setZero();
    const double away = field.cwiseAbs().maxCoeff();
    std::cout << "steady-state residual away from interchanges: " << away << '\n'
              << "steady-state residual at interchanges: " << res << '\n';
    return {{"steady_residual", res}, {"steady_residual_away_from_interchanges", away}};
}

LinearSystem build_system(Run& run, const Profile& prof) {
    return stage(3, [&] { return assemble_system(run.model(), prof, run.weights(), run.scaling()); });
}

nlohmann::ordered_json cmd_linearize(Run& run) {
    const Grid g = run.grid();
    const Profile prof = run.profile(g);
    write_profile_csv(prof, run.path("profile.csv"));
    const LinearSystem sys = build_system(run, prof);
    run.adopt(write_linear_system(sys, run.opts().out));
    return {{"state_dim", sys.dim()}, {"n_controls", sys.n_controls}};
}

void kernel_heatmaps(Run& run, const KernelField& field) {
    const double L = field.grid.length();
    const double h = field.grid.h();
    if (field.n_states == 1) {
        svg::heatmap(run.path("kernel_P.svg"), {"Kernel P(x1, x2)", "x2", "x1"}, field.component(0, 0), h, L, h, L);
        return;
    }
    for (int i = 0; i < field.n_states; ++i) {
        const std::string tag = std::to_string(i + 1) + std::to_string(i + 1);
        svg::heatmap(run.path("kernel_P" + tag + ".svg"), {"Kernel P_" + tag + "(x1, x2)", "x2", "x1"},
                     field.component(i, i), h, L, h, L);
    }
}

nlohmann::ordered_json cmd_lqr(Run& run) {
    const Grid g = run.grid();
    const Profile prof = run.profile(g);
    const LinearSystem sys = build_system(run, prof);
    run.adopt(write_linear_system(sys, run.opts().out));
    const RiccatiSolution sol = stage(3, [&] { return synthesize(sys); });
    write_matrix_csv(sol.P, run.path("P.csv"));
    write_gain_csv(sol.K, run.path("K.csv"));
    write_spectrum_csv(sol.closed_loop_spectrum, run.path("spectrum.csv"));
    const KernelField field = kernel_from_discrete(sol.P, g, sys.n_states, KernelScaling::kernel);
    write_kernel_csv(field, run.path("kernel.csv"));
    kernel_heatmaps(run, field);

    const auto lead = sol.closed_loop_spectrum.values.front();
    std::cout << "least stable closed-loop eigenvalue: " << format_eigenvalue(lead) << '\n'
              << "stability margin: " << stability_margin(sol) << '\n'
              << "relative CARE residual: " << sol.residual << '\n';
    if (sol.ill_conditioned)
        std::cerr << "warning: stable-subspace basis condition " << sol.basis_condition << " exceeds 1e12\n";
    return {{"least_stable_eigenvalue", {lead.real(), lead.imag()}},
            {"stability_margin", stability_margin(sol)},
            {"care_residual", sol.residual},
            {"basis_condition", sol.basis_condition}};
}

SimConfig sim_config(Run& run, const HyperbolicModel& model, const Profile& prof) {
    const auto& sc = run.cfg().simulation;
    const Grid& g = prof.grid;
    const int n = model.n_states, N = g.n_cells();
    SimConfig cfg;
    cfg.t_final = sc.t_final;
    cfg.cfl_safety = sc.cfl_safety;
    cfg.point_scaling = run.scaling();
    cfg.dt = run.opts().dt ? *run.opts().dt : sc.dt ? *sc.dt : cfl_max_dt(model, prof, cfg);

    std::mt19937_64 rng(run.opts().seed);
    std::normal_distribution<double> normal;
    const double scale = run.scale();
    cfg.z0.resize(n * N);
    for (int k = 1; k <= N; ++k)
        for (int i = 0; i < n; ++i) {
            const double shape = std::sin(std::numbers::pi * g.node(k) / g.length());
            cfg.z0[(k - 1) * n + i] = scale * (sc.amplitude * shape + (sc.noise > 0 ? sc.noise * normal(rng) : 0.0));
        }
    if (sc.boundary_amplitude != 0.0) {
        const double a = scale * sc.boundary_amplitude, decay = sc.boundary_decay;
        cfg.boundary = [a, decay, n](double t) { return Eigen::VectorXd::Constant(n, a * std::exp(-decay * t)); };
    }
    return cfg;
}

nlohmann::ordered_json cmd_simulate(Run& run) {
    const Grid g = run.grid();
    const HyperbolicModel model = run.model();
    const Profile prof = run.profile(g);
    const LinearSystem sys = build_system(run, prof);
    const RiccatiSolution sol = stage(3, [&] { return synthesize(sys); });
    const SimConfig cfg = sim_config(run, model, prof);

    const SimResult res = stage(4, [&] { return simulate_closed_loop(model, prof, sol.K, cfg); });
    const DecayMetrics metrics = decay_metrics(res);
    write_trajectory_csv(res, run.path("trajectory.csv"));
    write_controls_csv(res, run.path("controls.csv"));
    write_sim_summary(res, metrics, cfg, run.path("summary.json"));

    std::vector<svg::Series> series{{"closed loop", res.times, res.envelope}};
    std::optional<SimResult> open;
    if (run.opts().open_loop) {
        const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(sol.K.rows(), sol.K.cols());
        open = stage(4, [&] { return simulate_closed_loop(model, prof, zero, cfg); });
        write_trajectory_csv(*open, run.path("open_loop_trajectory.csv"));
        series.push_back({"open loop", open->times, open->envelope});
    }
    {
        std::vector<std::string> header{"t", "closed_loop"};
        if (open) header.push_back("open_loop");
        CsvWriter w(run.path("envelope.csv"), header);
        for (std::size_t s = 0; s < res.times.size(); ++s) {
            std::vector<double> row{res.times[s], res.envelope[s]};
            if (open) row.push_back(open->envelope[s]);
            w.row(row);
        }
    }
    svg::line_plot(run.path("envelope.svg"), {"L2 norm of the displacement", "t", "||z(t)||", true}, series);

    const double ratio = l2_norm(res.final_state, res.h) / res.envelope.front();
    std::cout << "dt: " << res.dt << '\n'
              << "final/initial L2 ratio: " << ratio << '\n'
              << "fitted decay rate: " << metrics.fitted_rate << '\n';
    if (metrics.unstable) std::cout << "envelope grows: closed loop looks unstable\n";
    return {{"dt", res.dt}, {"final_ratio", ratio}, {"fitted_rate", metrics.fitted_rate},
            {"monotone_after", metrics.monotone_after}, {"unstable", metrics.unstable}};
}

nlohmann::ordered_json cmd_residual(Run& run) {
    const HyperbolicModel model = run.model();
    double edge = 0.0;  // max |P(L, x2)| of the kernel-scaled field, last solve
    const auto field_at = [&](int N, ResidualField& out) {
        const double L = run.grid().length();
        const Grid g(L, N);
        const Profile prof = run.profile(g);
        const LinearSystem sys = build_system(run, prof);
        const RiccatiSolution sol = stage(3, [&] { return synthesize(sys); });
        const KernelField field = kernel_from_discrete(sol.P, g, sys.n_states, KernelScaling::kernel);
        out = riccati_pde_residual(field, linearize(model, prof), sys);
        edge = field.values.middleRows((N - 1) * sys.n_states, sys.n_states).cwiseAbs().maxCoeff();
        return g;
    };

    // field at the configured resolution
    ResidualField main_field;
    const Grid g = field_at(run.cfg().discretization.n_cells, main_field);
    {
        CsvWriter w(run.path("residual_field.csv"), {"x1", "x2", "i", "j", "value"});
        const int n = model.n_states;
        for (int a = main_field.first_node; a <= main_field.last_node; ++a)
            for (int b = main_field.first_node; b <= main_field.last_node; ++b)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        w.row({g.node(a), g.node(b), double(i + 1), double(j + 1),
                               main_field.values((a - 1) * n + i, (b - 1) * n + j)});
    }

    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    CsvWriter w(run.path("residual_sweep.csv"),
                {"n_cells", "h", "max_residual", "weak_residual", "outflow_edge_max"});
    std::cout << "n_cells  max_residual  weak_residual  outflow_edge_max\n";
    for (int N : {50, 100, 200}) {
        ResidualField rf;
        const Grid gs = field_at(N, rf);
        w.row({double(N), gs.h(), rf.max_abs, rf.weak, edge});
        table.push_back({{"n_cells", N}, {"max_residual", rf.max_abs}, {"weak_residual", rf.weak},
                         {"outflow_edge_max", edge}});
        std::printf("%7d  %12.6g  %13.6g  %16.6g\n", N, rf.max_abs, rf.weak, edge);
    }
    return {{"sweep", table}};
}

nlohmann::ordered_json cmd_eigs(Run& run) {
    const Grid g = run.grid();
    const Profile prof = run.profile(g);
    const LinearSystem sys = build_system(run, prof);
    const Spectrum open = eigenvalues(sys.F);
    write_spectrum_csv(open, run.path("open_loop_spectrum.csv"));
    std::vector<svg::Series> series;
    const auto add = [&](const char* label, const Spectrum& sp) {
        svg::Series s{label, {}, {}, false, true};
        for (const auto& z : sp.values) {
            s.x.push_back(z.real());
            s.y.push_back(z.imag());
        }
        series.push_back(std::move(s));
    };
    add("open loop", open);
    nlohmann::ordered_json out{{"open_loop_abscissa", open.abscissa()}};
    std::cout << "open-loop spectral abscissa: " << open.abscissa() << '\n';
    if (!run.opts().open_loop) {
        const RiccatiSolution sol = stage(3, [&] { return synthesize(sys); });
        write_spectrum_csv(sol.closed_loop_spectrum, run.path("closed_loop_spectrum.csv"));
        add("closed loop", sol.closed_loop_spectrum);
        out["closed_loop_abscissa"] = sol.closed_loop_spectrum.abscissa();
        std::cout << "least stable closed-loop eigenvalue: "
                  << format_eigenvalue(sol.closed_loop_spectrum.values.front()) << '\n';
    }
    svg::line_plot(run.path("spectrum.svg"), {"Spectrum", "Re", "Im"}, series);
    return out;
}

std::string default_out(const Options& o) {
    const char* root = std::getenv("HYPLQR_OUT");
    return (fs::path(root && *root ? root : "out") / (o.model + "-" + o.command)).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reference profiles, LQR synthesis and closed-loop simulation for hyperbolic PDE models"};
    app.set_version_flag("--version", std::string(HYPLQR_VERSION));
    app.require_subcommand(1);

    Options o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"profile", "Compute the reference profile"},
        {"linearize", "Write the discretized linear model F, G, Q, R"},
        {"lqr", "Solve the Riccati equation, write P, K, spectrum and kernel plots"},
        {"simulate", "Simulate the nonlinear closed loop from a sinusoidal displacement"},
        {"residual", "Riccati-PDE residual of the discrete kernel, with an N sweep"},
        {"eigs", "Open- and closed-loop spectra"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config_path, "JSON configuration file");
        sub->add_option("--model", o.model, "reactor or traffic")->check(CLI::IsMember({"reactor", "traffic"}));
        sub->add_option("--out", o.out, "output directory (default $HYPLQR_OUT/<model>-<command>)");
        sub->add_option("--n-cells", o.n_cells, "number of grid cells N");
        sub->add_option("--weights", o.weights, "unit or cell-width")->check(CLI::IsMember({"unit", "cell-width"}));
        sub->add_option("--point-scaling", o.point_scaling, "unit or delta")->check(CLI::IsMember({"unit", "delta"}));
        sub->add_option("--seed", o.seed, "seed for the initial-condition noise");
        sub->add_option("--dt", o.dt, "simulation time step");
        sub->add_flag("--open-loop", o.open_loop, "simulate: add an open-loop run; eigs: skip synthesis");
        sub->callback([&o, name = name] { o.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        Config cfg = o.config_path.empty() ? Config{} : load_config(o.config_path);
        if (o.n_cells) cfg.discretization.n_cells = *o.n_cells;
        if (o.weights) cfg.discretization.weights = parse_weight_mode(*o.weights);
        if (o.point_scaling) cfg.discretization.point_scaling = parse_point_scaling(*o.point_scaling);
        if (cfg.discretization.n_cells < 2) throw InvalidArgument("--n-cells must be at least 2");
        if (o.out.empty()) o.out = default_out(o);

        Run run(o, cfg);
        nlohmann::ordered_json results;
        if (o.command == "profile") results = cmd_profile(run);
        else if (o.command == "linearize") results = cmd_linearize(run);
        else if (o.command == "lqr") results = cmd_lqr(run);
        else if (o.command == "simulate") results = cmd_simulate(run);
        else if (o.command == "residual") results = cmd_residual(run);
        else results = cmd_eigs(run);
        run.finish(start, results);
        std::cout << "wrote " << o.out << '\n';
        return 0;
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
