#include <doctest.h>

#include <cmath>

#include "hyplqr/errors.hpp"
#include "hyplqr/grid.hpp"
#include "hyplqr/models.hpp"

using namespace hyplqr;

TEST_CASE("grid nodes and spacing") {
    const Grid g = make_grid(1.0, 100);
    CHECK(g.n_nodes() == 101);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(1) == doctest::Approx(0.01));
    CHECK(g.node(100) == 1.0);
    CHECK(make_grid(10.0, 100).h() == doctest::Approx(0.1));

    const Grid tiny = make_grid(1.0, 2);
    CHECK(tiny.nodes() == std::vector<double>{0.0, 0.5, 1.0});

    CHECK(g.node_index(0.37) == 37);
    CHECK(g.node_index(0.375) == -1);
    CHECK(g.cell_midpoint(1) == doctest::Approx(0.005));
}

TEST_CASE("grid rejects degenerate input") {
    CHECK_THROWS_AS(make_grid(1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(make_grid(0.0, 10), InvalidArgument);
    CHECK_THROWS_AS(make_grid(-1.0, 10), InvalidArgument);
}

TEST_CASE("greenshields relations") {
    const TrafficParams p;
    CHECK(greenshields_velocity(0.0, p) == 2.0);
    CHECK(greenshields_velocity(160.0, p) == 0.0);
    CHECK(greenshields_velocity(80.0, p) == 1.0);
    CHECK(greenshields_flux(0.0, p) == 0.0);
    CHECK(greenshields_flux(80.0, p) == 80.0);
    CHECK_THROWS_AS(greenshields_velocity(-1.0, p), DomainError);
    CHECK_THROWS_AS(greenshields_flux(161.0, p), DomainError);

    for (int i = 0; i <= 1000; ++i) {
        const double rho = 160.0 * i / 1000.0;
        CHECK(greenshields_flux(rho, p) == rho * greenshields_velocity(rho, p));
    }
    for (int i = 0; i <= 80; ++i) {
        const double d = i;
        CHECK(greenshields_flux(80.0 + d, p) == doctest::Approx(greenshields_flux(80.0 - d, p)).epsilon(1e-14));
    }
    double best = -1.0, arg = -1.0;
    for (int i = 0; i <= 16000; ++i) {
        const double rho = i * 0.01;
        if (greenshields_flux(rho, p) > best) best = greenshields_flux(rho, p), arg = rho;
    }
    CHECK(arg == doctest::Approx(80.0));
}

TEST_CASE("traffic parameter validation") {
    TrafficParams p;
    CHECK_NOTHROW(p.validate());
    p.rho_C = 70.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = TrafficParams{};
    p.v_C = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = TrafficParams{};
    p.interchanges = {2.0, 2.0, 6.0, 8.0};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = TrafficParams{};
    p.interchanges = {2.0, 4.0, 6.0, 10.0};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("patch indicator and ownership") {
    std::vector<std::pair<double, double>> iv;
    for (int j = 1; j <= 5; ++j) iv.emplace_back(0.2 * (j - 1), 0.2 * j);
    const Actuation act = Actuation::patches(iv, 1.0);
    CHECK(patch_indicator(0.3, 1, act) == 1);  // patch 2 in 1-based terms
    CHECK(patch_indicator(0.3, 0, act) == 0);
    // shared endpoint 0.2 goes to the patch on its right
    CHECK(patch_indicator(0.2, 0, act) == 0);
    CHECK(patch_indicator(0.2, 1, act) == 1);
    // the last patch is closed at L
    CHECK(patch_indicator(1.0, 4, act) == 1);

    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        int owners = 0;
        for (int j = 0; j < 5; ++j) owners += patch_indicator(x, j, act);
        CHECK(owners == 1);
    }
    CHECK_THROWS_AS(Actuation::patches({{0.0, 0.5}, {0.4, 1.0}}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(Actuation::points({3.0, 2.0}, 10.0), InvalidArgument);
    CHECK_THROWS_AS(Actuation::points({11.0}, 10.0), InvalidArgument);
}

TEST_CASE("reactor model evaluation") {
    ReactorParams p;
    const HyperbolicModel m = reactor_model(p);
    CHECK(m.n_states == 2);
    CHECK(m.n_controls == 5);
    CHECK(m.actuation.is_patch());

    const Eigen::Vector2d origin(0.0, 0.0);
    const Eigen::VectorXd f = m.source(0.5, origin);
    CHECK(f[0] == doctest::Approx(p.k1));  // beta * theta_1 vanishes at the origin
    CHECK(f[1] == doctest::Approx(p.k2));

    const Eigen::VectorXd full = m.source(0.5, Eigen::Vector2d(0.4, 1.0));
    CHECK(full[0] == doctest::Approx(-p.beta * 0.4));
    CHECK(full[1] == 0.0);

    for (double t1 : {0.0, 0.5, 2.0})
        for (double x : {0.0, 0.3, 1.0}) {
            const Eigen::MatrixXd D = m.D(x, Eigen::Vector2d(t1, 0.3));
            CHECK(D(0, 0) == -p.v1);
            CHECK(D(1, 1) == -p.v2);
            CHECK(D(0, 1) == 0.0);
        }
    CHECK_THROWS_AS(m.source(0.0, Eigen::Vector2d(-1.0, 0.0)), SingularityError);

    ReactorParams bad;
    bad.v1 = 0.0;
    CHECK_THROWS_AS(reactor_model(bad), InvalidArgument);
}

TEST_CASE("reactor jacobian matches finite differences") {
    ReactorParams p;
    const HyperbolicModel m = reactor_model(p);
    const Eigen::Vector2d s(0.3, 0.4);
    const Eigen::MatrixXd E = m.E(0.1, s);
    const double eps = 1e-6;
    for (int j = 0; j < 2; ++j) {
        Eigen::Vector2d sp = s, sm = s;
        sp[j] += eps;
        sm[j] -= eps;
        const Eigen::VectorXd col = (m.source(0.1, sp) - m.source(0.1, sm)) / (2 * eps);
        CHECK(E(0, j) == doctest::Approx(col[0]).epsilon(1e-7));
        CHECK(E(1, j) == doctest::Approx(col[1]).epsilon(1e-7));
    }
}

TEST_CASE("traffic model speeds") {
    const TrafficParams p;
    const HyperbolicModel m = traffic_model(p);
    CHECK(m.n_states == 1);
    CHECK(m.n_controls == 4);
    CHECK(m.actuation.is_point());
    const auto D = [&](double rho) { return m.speeds(0.0, Eigen::VectorXd::Constant(1, rho))[0]; };
    CHECK(D(80.0) == 0.0);
    CHECK(D(0.0) == -2.0);
    CHECK(D(72.0) == doctest::Approx(-0.2));
    CHECK(D(72.0) != D(80.0));
    CHECK(m.E(1.0, Eigen::VectorXd::Constant(1, 72.0))(0, 0) == 0.0);
    CHECK(m.source(1.0, Eigen::VectorXd::Constant(1, 72.0))[0] == 0.0);
}
