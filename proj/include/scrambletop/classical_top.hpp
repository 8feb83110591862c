// classical_top.hpp: classical driven top, trajectory divergence and Lyapunov exponents
//
// H = α L_z + (β/|L|) L_x² + γ cos(ωt) L_y with flow L̇ = ∇H × L.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace scrambletop::classical {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct ClassicalParams {
    double alpha = 1.0;
    double beta = 1.5;
    double gamma = 0.05;
    double omega = 1.5;

    double tau() const;
    void validate() const;
};

struct IntegrationOptions {
    // RK4 steps per drive period.
    int steps_per_period = 2000;
};

struct VariationalState {
    Vec3 l;
    Mat3 phi = Mat3::Identity();
    double t = 0.0;
    // log of the norm factored out of phi so far
    double log_scale = 0.0;
};

// Unit vector at polar angle θ and azimuth φ.
Vec3 direction(double theta, double phi);

Vec3 eom(const Vec3& l, double t, const ClassicalParams& p);
Mat3 jacobian(const Vec3& l, double t, const ClassicalParams& p);

// One RK4 step of the equations of motion.
Vec3 rk4_step(const Vec3& l, double t, double dt, const ClassicalParams& p);

// Integrates L from t0 for `periods` drive periods, sampling L at every period
// boundary (the first sample is the initial point).
std::vector<Vec3> stroboscopic_trajectory(const Vec3& l0, int periods, const ClassicalParams& p,
                                          const IntegrationOptions& opt = {});

// |L_a(kτ) − L_b(kτ)| for k = 0..periods, where L_a(0) = l0 and L_b(0) = l0 + delta0.
std::vector<double> integrate_pair(const Vec3& l0, const Vec3& delta0, int periods, double dt,
                                   const ClassicalParams& p);

// Co-integrates (L, Φ) over `periods` periods with Φ(0) = I, renormalizing Φ when its
// norm exceeds 1e100.
VariationalState integrate_variational(const Vec3& l0, int periods, const ClassicalParams& p,
                                       const IntegrationOptions& opt = {});

// log|Φ(kτ) δ| − log|δ| for k = 0..periods along one perturbation direction.
std::vector<double> variational_log_growth(const Vec3& l0, const Vec3& delta0, int periods,
                                           const ClassicalParams& p,
                                           const IntegrationOptions& opt = {});

struct LyapunovOptions {
    int periods = 1000;
    int n_dirs = 360;
    IntegrationOptions integration{};
};

// Mean of per-direction exponents log(|Φ(T)δ|/|δ|)/T with T in units of τ, over
// n_dirs perturbations spread evenly in the plane orthogonal to x(0). Raw value,
// no display floor.
double lyapunov(double theta, double phi, const ClassicalParams& p, const LyapunovOptions& opt = {});

// Display cutoff for emitted λ maps.
inline constexpr double kLyapunovFloor = 1e-3;

struct Grid {
    int n_theta = 50;  // θ ∈ [0, π], inclusive endpoints
    int n_phi = 100;   // φ ∈ [0, 2π), n_phi cells

    double theta_at(int i) const;
    double phi_at(int j) const;
    void validate() const;
};

// Raw λ per cell (rows θ, columns φ). `threads` ≤ 1 runs serially.
Eigen::MatrixXd lyapunov_map(const Grid& grid, const ClassicalParams& p, const LyapunovOptions& opt,
                             int threads = 1);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace scrambletop::classical
