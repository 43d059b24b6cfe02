#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hyplqr/errors.hpp"
#include "hyplqr/profile.hpp"

using namespace hyplqr;

namespace {

Eigen::VectorXd uniform(int m, double c) { return Eigen::VectorXd::Constant(m, c); }

// Max error of theta_1 against c (1 - exp(-beta x / v1)) for the reaction-free reactor.
double linear_profile_error(int N) {
    ReactorParams p;
    p.k1 = p.k2 = 0.0;
    p.beta = 1.0;
    const double c = 0.25;
    const Grid g(1.0, N);
    ProfileSolveOptions opts;
    opts.tol = 1e-11;
    const Profile prof = solve_reactor_profile(p, g, uniform(5, c), opts);
    double err = 0.0;
    for (int k = 0; k <= N; ++k) {
        const double exact = c * (1.0 - std::exp(-p.beta * g.node(k) / p.v1));
        err = std::max(err, std::abs(prof.values(0, k) - exact));
    }
    CHECK(prof.values.row(1).cwiseAbs().maxCoeff() == 0.0);
    return err;
}

}  // namespace

TEST_CASE("reactor profile without forcing is zero") {
    ReactorParams p;
    p.beta = 0.0;
    p.k1 = p.k2 = 0.0;
    const Profile prof = solve_reactor_profile(p, Grid(1.0, 20), uniform(5, 0.0));
    CHECK(prof.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reaction-free reactor profile converges to the closed form at first order") {
    const double e50 = linear_profile_error(50);
    const double e100 = linear_profile_error(100);
    const double e200 = linear_profile_error(200);
    CHECK(e100 < 0.05);
    CHECK(e50 / e100 == doctest::Approx(2.0).epsilon(0.25));
    CHECK(e100 / e200 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("default reactor profile is monotone and steady") {
    const ReactorParams p;
    const Grid g(1.0, 100);
    const Eigen::VectorXd nu = uniform(5, p.nu0);
    const Profile prof = solve_reactor_profile(p, g, nu);
    const HyperbolicModel m = reactor_model(p);
    const double res = steady_residual(m, prof, nu);
    CHECK(res <= 1e-10);
    // one more RK4 step moves the state by at most dt * residual (to first order)
    CHECK(reactor_profile_step(p, g) * res <= 10 * 1e-10);
    for (int k = 1; k <= 100; ++k) {
        CHECK(prof.values(0, k) > prof.values(0, k - 1));
        CHECK(prof.values(1, k) >= prof.values(1, k - 1));
    }
    CHECK(prof.values(0, 0) == 0.0);
    CHECK(prof.values(1, 0) == 0.0);
}

TEST_CASE("reactor profile is independent of the initial guess") {
    const ReactorParams p;
    const Grid g(1.0, 40);
    const Eigen::VectorXd nu = uniform(5, p.nu0);
    ProfileSolveOptions a, b;
    b.initial = Eigen::MatrixXd::Constant(2, 41, 0.3);
    const Profile pa = solve_reactor_profile(p, g, nu, a);
    const Profile pb = solve_reactor_profile(p, g, nu, b);
    CHECK((pa.values - pb.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("reactor profile solver reports non-convergence") {
    const ReactorParams p;
    ProfileSolveOptions opts;
    opts.t_max = 0.5;
    CHECK_THROWS_AS(solve_reactor_profile(p, Grid(1.0, 20), uniform(5, p.nu0), opts), ConvergenceError);
    CHECK_THROWS_AS(solve_reactor_profile(p, Grid(1.0, 20), uniform(3, p.nu0)), InvalidArgument);
}

TEST_CASE("traffic profile values") {
    const TrafficParams p;
    const Grid g(10.0, 100);
    const Profile prof = traffic_profile(p, g);
    CHECK(prof.values(0, 0) == doctest::Approx(72.0));
    CHECK(prof.values(0, 19) == doctest::Approx(72.0));
    CHECK(prof.values(0, 20) == doctest::Approx(73.6));  // right-continuous at x = 2
    CHECK(prof.values(0, 30) == doctest::Approx(73.6));
    CHECK(prof.values(0, 90) == doctest::Approx(78.4));
    CHECK(prof.values(0, 100) == doctest::Approx(78.4));
    for (int k = 1; k <= 100; ++k) {
        CHECK(prof.values(0, k) >= prof.values(0, k - 1));
        CHECK(prof.values(0, k) <= 0.98 * p.rho_C + 1e-12);
    }
    CHECK(prof.reference_controls.size() == 4);
    CHECK(prof.reference_controls[0] == doctest::Approx(1.6));
    CHECK_THROWS_AS(traffic_profile(p, Grid(10.0, 33)), InvalidArgument);
}

TEST_CASE("traffic profile is steady away from the interchanges") {
    const TrafficParams p;
    const Grid g(10.0, 100);
    const Profile prof = traffic_profile(p, g);
    const Eigen::MatrixXd r = steady_residual_field(traffic_model(p), prof, prof.reference_controls);
    for (int k = 1; k <= 100; ++k) {
        if (k % 20 == 0 && k < 100) continue;
        CHECK(r(0, k - 1) == 0.0);
    }
}

TEST_CASE("steady residual of a zero profile with zero forcing") {
    ReactorParams p;
    p.k1 = p.k2 = 0.0;
    const Grid g(1.0, 10);
    const Profile zero{g, Eigen::MatrixXd::Zero(2, 11), uniform(5, 0.0)};
    CHECK(steady_residual(reactor_model(p), zero, uniform(5, 0.0)) == 0.0);
}

TEST_CASE("profile csv layout") {
    const TrafficParams p;
    const Profile prof = traffic_profile(p, Grid(10.0, 10));
    const auto path = (std::filesystem::temp_directory_path() / "hyplqr_profile.csv").string();
    write_profile_csv(prof, path);
    std::ifstream in(path, std::ios::binary);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "x,state_1");
    CHECK(first == "0,72");
    std::string all((std::istreambuf_iterator<char>(in)), {});
    CHECK(all.find('\r') == std::string::npos);
}
