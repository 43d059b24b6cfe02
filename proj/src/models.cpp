#include "hyplqr/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyplqr/errors.hpp"

namespace hyplqr {

Actuation Actuation::patches(std::vector<std::pair<double, double>> intervals, double length) {
    if (intervals.empty()) throw InvalidArgument("patch actuation needs at least one interval");
    for (const auto& [a, b] : intervals) {
        if (!(a < b) || a < 0.0 || b > length)
            throw InvalidArgument("patch [" + std::to_string(a) + ", " + std::to_string(b) +
                                  "] is empty or leaves [0, L]");
    }
    auto sorted = intervals;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].first < sorted[i - 1].second)
            throw InvalidArgument("patch interiors overlap");
    }
    return Actuation(PatchActuation{std::move(intervals)});
}

Actuation Actuation::points(std::vector<double> locations, double length) {
    if (locations.empty()) throw InvalidArgument("point actuation needs at least one location");
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (locations[i] < 0.0 || locations[i] > length)
            throw InvalidArgument("actuation point outside [0, L]");
        if (i > 0 && !(locations[i] > locations[i - 1]))
            throw InvalidArgument("actuation points must be strictly increasing");
    }
    return Actuation(PointActuation{std::move(locations)});
}

int Actuation::n_channels() const noexcept {
    if (is_patch()) return static_cast<int>(patch().intervals.size());
    return static_cast<int>(point().locations.size());
}

int patch_indicator(double x, int j, const Actuation& act) {
    if (!act.is_patch()) throw InvalidArgument("patch_indicator needs patch actuation");
    const auto& iv = act.patch().intervals;
    if (j < 0 || j >= static_cast<int>(iv.size()))
        throw InvalidArgument("channel index " + std::to_string(j) + " out of range");
    const auto [a, b] = iv[static_cast<std::size_t>(j)];
    if (x < a || x > b) return 0;
    if (x == b) {
        // handed over to the right neighbour when one starts here
        for (const auto& other : iv)
            if (other.first == b) return 0;
    }
    return 1;
}

void ReactorParams::validate() const {
    if (!(v1 > 0.0) || !(v2 > 0.0)) throw InvalidArgument("reactor transport speeds must be positive");
    if (!(beta >= 0.0)) throw InvalidArgument("reactor beta must be non-negative");
    if (n_patches < 1) throw InvalidArgument("reactor needs at least one patch");
    if (!(T_in > 0.0) || !(C_A_in > 0.0)) throw InvalidArgument("reactor inlet values must be positive");
    for (double v : {v1, v2, k1, k2, mu, beta, nu0})
        if (!std::isfinite(v)) throw InvalidArgument("reactor parameters must be finite");
}

void TrafficParams::validate() const {
    if (!(rho_M > 0.0) || !(v_M > 0.0) || !(L > 0.0))
        throw InvalidArgument("traffic rho_M, v_M and L must be positive");
    if (std::abs(rho_C - rho_M / 2) > 1e-12 * rho_M)
        throw InvalidArgument("traffic rho_C must equal rho_M / 2");
    if (std::abs(v_C - v_M / 2) > 1e-12 * v_M)
        throw InvalidArgument("traffic v_C must equal v_M / 2");
    if (interchanges.empty()) throw InvalidArgument("traffic needs at least one interchange");
    for (std::size_t i = 0; i < interchanges.size(); ++i) {
        if (!(interchanges[i] > 0.0) || !(interchanges[i] < L))
            throw InvalidArgument("interchanges must lie strictly inside (0, L)");
        if (i > 0 && !(interchanges[i] > interchanges[i - 1]))
            throw InvalidArgument("interchanges must be strictly increasing");
    }
    if (G.size() != interchanges.size())
        throw InvalidArgument("traffic G must have one gain per interchange");
}

namespace {

void check_density(double rho, const TrafficParams& p) {
    if (!(rho >= 0.0 && rho <= p.rho_M))
        throw DomainError("density " + std::to_string(rho) + " outside [0, rho_M]");
}

double arrhenius_exponent(double theta1, double mu) {
    if (std::abs(1.0 + theta1) < 1e-300 || !std::isfinite(theta1))
        throw SingularityError("Arrhenius factor singular at theta_1 = -1");
    return mu * theta1 / (1.0 + theta1);
}

}  // namespace

double greenshields_velocity(double rho, const TrafficParams& p) {
    check_density(rho, p);
    return p.v_M * (1.0 - rho / p.rho_M);
}

double greenshields_flux(double rho, const TrafficParams& p) {
    check_density(rho, p);
    return p.v_M * (1.0 - rho / p.rho_M) * rho;
}

HyperbolicModel reactor_model(const ReactorParams& p) {
    p.validate();
    std::vector<std::pair<double, double>> iv;
    for (int j = 0; j < p.n_patches; ++j)
        iv.emplace_back(static_cast<double>(j) / p.n_patches, static_cast<double>(j + 1) / p.n_patches);
    iv.back().second = 1.0;

    HyperbolicModel m{
        .name = "reactor",
        .n_states = 2,
        .n_controls = p.n_patches,
        .domain_length = 1.0,
        .actuation = Actuation::patches(std::move(iv), 1.0),
        .speeds = {},
        .source = {},
        .source_jacobian = {},
        .input_direction = {},
        .boundary = Eigen::Vector2d::Zero(),
    };
    m.speeds = [p](double, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::Vector2d(-p.v1, -p.v2));
    };
    m.source = [p](double, const Eigen::VectorXd& s) {
        const double rate = (1.0 - s[1]) * std::exp(arrhenius_exponent(s[0], p.mu));
        return Eigen::VectorXd(Eigen::Vector2d(p.k1 * rate - p.beta * s[0], p.k2 * rate));
    };
    m.source_jacobian = [p](double, const Eigen::VectorXd& s) {
        const double e = std::exp(arrhenius_exponent(s[0], p.mu));
        const double d1 = p.mu * (1.0 - s[1]) / ((1.0 + s[0]) * (1.0 + s[0]));
        Eigen::MatrixXd J(2, 2);
        J << e * p.k1 * d1 - p.beta, -e * p.k1,
             e * p.k2 * d1,          -e * p.k2;
        return J;
    };
    m.input_direction = [p](int, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::Vector2d(p.beta, 0.0));
    };
    return m;
}

HyperbolicModel traffic_model(const TrafficParams& p) {
    p.validate();
    HyperbolicModel m{
        .name = "traffic",
        .n_states = 1,
        .n_controls = static_cast<int>(p.interchanges.size()),
        .domain_length = p.L,
        .actuation = Actuation::points(p.interchanges, p.L),
        .speeds = {},
        .source = {},
        .source_jacobian = {},
        .input_direction = {},
        .boundary = Eigen::VectorXd::Constant(1, 0.9 * p.rho_C),
    };
    m.speeds = [p](double, const Eigen::VectorXd& s) {
        return Eigen::VectorXd::Constant(1, -p.v_M * (1.0 - 2.0 * s[0] / p.rho_M));
    };
    m.source = [](double, const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(1)); };
    m.source_jacobian = [](double, const Eigen::VectorXd&) {
        return Eigen::MatrixXd(Eigen::MatrixXd::Zero(1, 1));
    };
    m.input_direction = [p](int j, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, p.G.at(static_cast<std::size_t>(j)));
    };
    return m;
}

}  // namespace hyplqr
