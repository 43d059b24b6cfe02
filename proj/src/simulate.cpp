#include "hyplqr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <span>

#include <json.hpp>

#include "hyplqr/csv.hpp"
#include "hyplqr/errors.hpp"
#include "hyplqr/kernels.hpp"

namespace hyplqr {

namespace {

// Shared RK4 driver. `rhs` returns z' and fills the control; `check` runs
// before each step and may throw.
template <class Rhs, class Check>
SimResult integrate(int n, const Grid& grid, const SimConfig& cfg, Rhs rhs, Check check) {
    if (!(cfg.t_final > 0.0) || !(cfg.dt > 0.0)) throw InvalidArgument("t_final and dt must be positive");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) throw InvalidArgument("cfl_safety must be in (0, 1]");
    const int N = grid.n_cells();
    if (cfg.z0.size() != n * N)
        throw InvalidArgument("initial displacement has " + std::to_string(cfg.z0.size()) + " entries, expected " +
                              std::to_string(n * N));

    SimResult res;
    res.n_states = n;
    res.h = grid.h();
    for (int k = 1; k <= N; ++k) res.nodes.push_back(grid.node(k));
    res.steps = std::max(1, static_cast<int>(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
    res.dt = cfg.t_final / res.steps;
    const int cadence = std::max(1, (res.steps + 199) / 200);

    Eigen::VectorXd z = cfg.z0;
    Eigen::VectorXd u;
    const auto record = [&](double t) {
        rhs(t, z, u);
        res.times.push_back(t);
        res.snapshots.push_back(z);
        res.controls.push_back(u);
        res.envelope.push_back(l2_norm(z, res.h));
    };

    const double dt = res.dt;
    Eigen::VectorXd scratch;
    for (int s = 0; s < res.steps; ++s) {
        const double t = s * dt;
        if (s % cadence == 0) record(t);
        check(t, z);
        const Eigen::VectorXd k1 = rhs(t, z, scratch);
        const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, z + 0.5 * dt * k1, scratch);
        const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, z + 0.5 * dt * k2, scratch);
        const Eigen::VectorXd k4 = rhs(t + dt, z + dt * k3, scratch);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!z.allFinite()) throw DivergenceError("state became non-finite", t + dt);
    }
    if (res.steps % cadence == 0) record(cfg.t_final);
    res.final_time = cfg.t_final;
    res.final_state = z;
    return res;
}

double max_speed(const Eigen::MatrixXd& speeds) { return speeds.size() ? speeds.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double l2_norm(const Eigen::VectorXd& z, double h) { return std::sqrt(h * z.squaredNorm()); }

SimResult simulate_closed_loop(const HyperbolicModel& model, const Profile& profile, const Eigen::MatrixXd& K,
                               const SimConfig& cfg) {
    const Grid& grid = profile.grid;
    const int n = model.n_states;
    const int N = grid.n_cells();
    const int m = model.n_controls;
    if (K.rows() != m || K.cols() != n * N)
        throw InvalidArgument("gain is " + std::to_string(K.rows()) + "x" + std::to_string(K.cols()) +
                              ", expected " + std::to_string(m) + "x" + std::to_string(n * N));

    const Eigen::MatrixXd W = input_weights(model.actuation, grid, cfg.point_scaling);
    // W G(zeta^0), the same input matrix the synthesis used
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n * N, m);
    Eigen::MatrixXd f0(n, N);
    for (int k = 1; k <= N; ++k) {
        const Eigen::VectorXd s = profile.values.col(k);
        f0.col(k - 1) = model.source(grid.node(k), s);
        for (int j = 0; j < m; ++j)
            if (W(k - 1, j) != 0.0) B.block((k - 1) * n, j, n, 1) = W(k - 1, j) * model.input_direction(j, s);
    }

    Eigen::MatrixXd speeds(n, N);
    Eigen::MatrixXd padded(n, N + 1);
    Eigen::VectorXd transport(n * N);
    const auto eval_speeds = [&](const Eigen::VectorXd& z) {
        for (int k = 1; k <= N; ++k)
            speeds.col(k - 1) = model.speeds(grid.node(k), profile.values.col(k) + z.segment((k - 1) * n, n));
    };

    const auto rhs = [&](double t, const Eigen::VectorXd& z, Eigen::VectorXd& u) -> Eigen::VectorXd {
        eval_speeds(z);
        padded.col(0) = cfg.boundary ? cfg.boundary(t) : Eigen::VectorXd::Zero(n);
        padded.rightCols(N) = Eigen::Map<const Eigen::MatrixXd>(z.data(), n, N);
        kernels::parallel::upwind_transport(
            {std::span<const double>(speeds.data(), static_cast<std::size_t>(speeds.size())),
             std::span<const double>(padded.data(), static_cast<std::size_t>(padded.size())), n, 1.0 / grid.h(), true},
            std::span<double>(transport.data(), static_cast<std::size_t>(transport.size())));
        Eigen::VectorXd out = transport;
        for (int k = 1; k <= N; ++k) {
            const Eigen::VectorXd s = profile.values.col(k) + z.segment((k - 1) * n, n);
            out.segment((k - 1) * n, n) += model.source(grid.node(k), s) - f0.col(k - 1);
        }
        u = -K * z;
        out += B * u;
        return out;
    };

    const auto check = [&](double t, const Eigen::VectorXd& z) {
        eval_speeds(z);
        const double vmax = max_speed(speeds);
        if (vmax == 0.0) return;
        const double bound = cfg.cfl_safety * grid.h() / vmax;
        if (cfg.dt > bound)
            throw CflError("time step " + std::to_string(cfg.dt) + " exceeds CFL bound " + std::to_string(bound) +
                               " at t = " + std::to_string(t),
                           t, bound);
    };

    return integrate(n, grid, cfg, rhs, check);
}

SimResult simulate_linear(const LinearSystem& sys, const Eigen::MatrixXd& K, const SimConfig& cfg) {
    if (cfg.boundary) throw InvalidArgument("linear simulation takes zero boundary displacement");
    if (K.rows() != sys.n_controls || K.cols() != sys.dim()) throw InvalidArgument("gain has wrong shape");
    const Eigen::MatrixXd A = sys.F - sys.G * K;
    const auto rhs = [&](double, const Eigen::VectorXd& z, Eigen::VectorXd& u) -> Eigen::VectorXd {
        u = -K * z;
        return A * z;
    };
    return integrate(sys.n_states, sys.grid, cfg, rhs, [](double, const Eigen::VectorXd&) {});
}

double cfl_max_dt(const HyperbolicModel& model, const Profile& profile, const SimConfig& cfg) {
    const Grid& grid = profile.grid;
    double vmax = 0.0;
    for (int k = 0; k <= grid.n_cells(); ++k)
        vmax = std::max(vmax, model.speeds(grid.node(k), profile.values.col(k)).cwiseAbs().maxCoeff());
    if (vmax == 0.0) return cfg.t_final;
    return cfg.cfl_safety * grid.h() / (2.0 * vmax);
}

DecayMetrics decay_metrics(const SimResult& res) {
    const std::size_t n = res.envelope.size();
    if (n < 10) throw InvalidArgument("decay metrics need at least 10 snapshots");
    DecayMetrics m;

    // smallest snapshot time after which the envelope never increases
    std::size_t first = n - 1;
    while (first > 0 && res.envelope[first - 1] >= res.envelope[first]) --first;
    m.monotone_after = res.times[first];

    double st = 0, sy = 0, stt = 0, sty = 0;
    int count = 0;
    for (std::size_t i = n / 2; i < n; ++i) {
        if (!(res.envelope[i] > 0.0)) continue;
        const double t = res.times[i], y = std::log(res.envelope[i]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * stt - st * st;
        m.fitted_rate = denom > 0.0 ? -(count * sty - st * sy) / denom : 0.0;
    }
    if (std::abs(m.fitted_rate) < 1e-12) m.fitted_rate = 0.0;
    m.half_life = m.fitted_rate > 0.0 ? std::log(2.0) / m.fitted_rate : std::numeric_limits<double>::infinity();
    m.unstable = m.fitted_rate < 0.0;
    return m;
}

void write_trajectory_csv(const SimResult& res, const std::string& path) {
    CsvWriter w(path, {"t", "x", "state_index", "value"});
    const int n = res.n_states;
    for (std::size_t s = 0; s < res.times.size(); ++s)
        for (std::size_t k = 0; k < res.nodes.size(); ++k)
            for (int i = 0; i < n; ++i)
                w.row({res.times[s], res.nodes[k], double(i + 1), res.snapshots[s][static_cast<Eigen::Index>(k) * n + i]});
}

void write_controls_csv(const SimResult& res, const std::string& path) {
    CsvWriter w(path, {"t", "channel", "u"});
    for (std::size_t s = 0; s < res.times.size(); ++s)
        for (Eigen::Index j = 0; j < res.controls[s].size(); ++j)
            w.row({res.times[s], double(j + 1), res.controls[s][j]});
}

void write_sim_summary(const SimResult& res, const DecayMetrics& m, const SimConfig& cfg, const std::string& path) {
    nlohmann::ordered_json j;
    const auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    j["metrics"] = {{"half_life", finite_or_null(m.half_life)},
                    {"fitted_rate", m.fitted_rate},
                    {"monotone_after", m.monotone_after},
                    {"unstable", m.unstable},
                    {"initial_l2", res.envelope.front()},
                    {"final_l2", l2_norm(res.final_state, res.h)}};
    j["config"] = {{"t_final", cfg.t_final},
                   {"dt", cfg.dt},
                   {"dt_used", res.dt},
                   {"steps", res.steps},
                   {"cfl_safety", cfg.cfl_safety},
                   {"point_scaling", to_string(cfg.point_scaling)},
                   {"snapshots", res.times.size()}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace hyplqr
