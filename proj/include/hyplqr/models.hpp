#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace hyplqr {

// Controls act uniformly on intervals [a_j, b_j] (patch) ...
struct PatchActuation {
    std::vector<std::pair<double, double>> intervals;
};

// ... or at isolated locations 0 <= a_1 < ... < a_m <= L (point).
struct PointActuation {
    std::vector<double> locations;
};

class Actuation {
public:
    // Throws InvalidArgument unless the intervals lie in [0, L] with disjoint interiors.
    static Actuation patches(std::vector<std::pair<double, double>> intervals, double length);
    // Throws InvalidArgument unless the locations are strictly increasing within [0, L].
    static Actuation points(std::vector<double> locations, double length);

    [[nodiscard]] bool is_patch() const noexcept { return std::holds_alternative<PatchActuation>(v_); }
    [[nodiscard]] bool is_point() const noexcept { return std::holds_alternative<PointActuation>(v_); }
    [[nodiscard]] int n_channels() const noexcept;
    [[nodiscard]] const PatchActuation& patch() const { return std::get<PatchActuation>(v_); }
    [[nodiscard]] const PointActuation& point() const { return std::get<PointActuation>(v_); }

private:
    explicit Actuation(std::variant<PatchActuation, PointActuation> v) : v_(std::move(v)) {}
    std::variant<PatchActuation, PointActuation> v_;
};

// Characteristic function of patch j (0-based). A shared endpoint belongs to
// the patch on its right, so at most one patch owns any x.
int patch_indicator(double x, int j, const Actuation& act);

struct ReactorParams {
    double v1 = 0.1;
    double v2 = 1.0;
    double k1 = 0.05;
    double k2 = 0.05;
    double mu = 5.0;     // Arrhenius activation exponent
    double beta = 0.2;   // jacket heat-transfer coefficient
    double T_in = 320.0;
    double C_A_in = 4.0;
    int n_patches = 5;
    double nu0 = 0.25;   // (T_jacket - T_in) / T_in, same on every patch

    void validate() const;
};

struct TrafficParams {
    double rho_M = 160.0;  // cars/km
    double rho_C = 80.0;
    double v_M = 2.0;      // km/min
    double v_C = 1.0;
    double L = 10.0;       // km
    std::vector<double> interchanges{2.0, 4.0, 6.0, 8.0};
    std::vector<double> G{1.0, 1.0, 1.0, 1.0};  // injection gains, 1/km

    void validate() const;
};

double greenshields_velocity(double rho, const TrafficParams& p);
double greenshields_flux(double rho, const TrafficParams& p);

// Semilinear hyperbolic system
//   dzeta/dt = D(x, zeta) dzeta/dx + f(x, zeta) + sum_j G_j(zeta) chi_j(x) nu_j
// with diagonal D. E(x, zeta) = df/dzeta is the linear coefficient about a profile.
struct HyperbolicModel {
    using VectorFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
    using MatrixFn = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;
    using InputFn = std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)>;

    std::string name;
    int n_states = 0;
    int n_controls = 0;
    double domain_length = 1.0;
    Actuation actuation;
    VectorFn speeds;           // diagonal of D(x, zeta)
    VectorFn source;           // f(x, zeta)
    MatrixFn source_jacobian;  // E(x, zeta)
    InputFn input_direction;   // G_j(zeta), j 0-based
    Eigen::VectorXd boundary;  // reference inflow zeta(t, 0)

    [[nodiscard]] Eigen::MatrixXd D(double x, const Eigen::VectorXd& s) const {
        return speeds(x, s).asDiagonal();
    }
    [[nodiscard]] Eigen::MatrixXd E(double x, const Eigen::VectorXd& s) const {
        return source_jacobian(x, s);
    }
};

// n = 2 (theta_1 temperature, theta_2 conversion), m = n_patches equal patches.
HyperbolicModel reactor_model(const ReactorParams& p);

// n = 1 (density), m = number of interchanges, point actuation.
HyperbolicModel traffic_model(const TrafficParams& p);

}  // namespace hyplqr
