#include "scrambletop/classical_top.hpp"

#include "scrambletop/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scrambletop::classical {

double ClassicalParams::tau() const { return 2.0 * std::numbers::pi / omega; }

void ClassicalParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("ClassicalParams: omega must be positive");
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
        throw std::invalid_argument("ClassicalParams: coefficients must be finite");
    }
}

Vec3 direction(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Vec3 eom(const Vec3& l, double t, const ClassicalParams& p) {
    const double r = l.norm();
    if (!(r > 0.0)) throw std::invalid_argument("eom: |L| must be positive");
    const Vec3 grad(2.0 * p.beta * l.x() / r, p.gamma * std::cos(p.omega * t), p.alpha);
    return grad.cross(l);
}

Mat3 jacobian(const Vec3& l, double t, const ClassicalParams& p) {
    const double r = l.norm();
    if (!(r > 0.0)) throw std::invalid_argument("jacobian: |L| must be positive");
    const double r3 = r * r * r;
    const double drive = p.gamma * std::cos(p.omega * t);
    const double b2 = 2.0 * p.beta;
    const double lx = l.x(), ly = l.y(), lz = l.z();
    // ∂(L_x/r)/∂L_k
    const double dx_dx = 1.0 / r - lx * lx / r3;
    const double dx_dy = -lx * ly / r3;
    const double dx_dz = -lx * lz / r3;

    Mat3 jac;
    jac << 0.0, -p.alpha, drive,
        p.alpha - b2 * lz * dx_dx, -b2 * lz * dx_dy, -b2 * (lx / r + lz * dx_dz),
        b2 * ly * dx_dx - drive, b2 * (lx / r + ly * dx_dy), b2 * ly * dx_dz;
    return jac;
}

Vec3 rk4_step(const Vec3& l, double t, double dt, const ClassicalParams& p) {
    const Vec3 k1 = eom(l, t, p);
    const Vec3 k2 = eom(l + 0.5 * dt * k1, t + 0.5 * dt, p);
    const Vec3 k3 = eom(l + 0.5 * dt * k2, t + 0.5 * dt, p);
    const Vec3 k4 = eom(l + dt * k3, t + dt, p);
    return l + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

void check_steps(const IntegrationOptions& opt) {
    if (opt.steps_per_period < 100) {
        throw std::invalid_argument("integration step must not exceed tau/100 (got tau/" +
                                    std::to_string(opt.steps_per_period) + ")");
    }
}

struct Tangent {
    Vec3 l;
    Mat3 phi;
};

Tangent tangent_rhs(const Tangent& s, double t, const ClassicalParams& p) {
    return {eom(s.l, t, p), jacobian(s.l, t, p) * s.phi};
}

Tangent tangent_step(const Tangent& s, double t, double dt, const ClassicalParams& p) {
    const Tangent k1 = tangent_rhs(s, t, p);
    const Tangent k2 = tangent_rhs({s.l + 0.5 * dt * k1.l, s.phi + 0.5 * dt * k1.phi}, t + 0.5 * dt, p);
    const Tangent k3 = tangent_rhs({s.l + 0.5 * dt * k2.l, s.phi + 0.5 * dt * k2.phi}, t + 0.5 * dt, p);
    const Tangent k4 = tangent_rhs({s.l + dt * k3.l, s.phi + dt * k3.phi}, t + dt, p);
    return {s.l + (dt / 6.0) * (k1.l + 2.0 * k2.l + 2.0 * k3.l + k4.l),
            s.phi + (dt / 6.0) * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi)};
}

constexpr double kRenormalizeAbove = 1e100;

// Two unit vectors spanning the plane orthogonal to unit vector n.
std::pair<Vec3, Vec3> orthogonal_plane(const Vec3& n) {
    const Vec3 seed = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 e1 = n.cross(seed).normalized();
    const Vec3 e2 = n.cross(e1).normalized();
    return {e1, e2};
}

}  // namespace

std::vector<Vec3> stroboscopic_trajectory(const Vec3& l0, int periods, const ClassicalParams& p,
                                          const IntegrationOptions& opt) {
    p.validate();
    check_steps(opt);
    const double tau = p.tau();
    const double dt = tau / opt.steps_per_period;
    std::vector<Vec3> samples;
    samples.reserve(static_cast<std::size_t>(periods) + 1);
    samples.push_back(l0);
    Vec3 l = l0;
    for (int k = 0; k < periods; ++k) {
        for (int s = 0; s < opt.steps_per_period; ++s) {
            l = rk4_step(l, k * tau + s * dt, dt, p);
        }
        samples.push_back(l);
    }
    return samples;
}

std::vector<double> integrate_pair(const Vec3& l0, const Vec3& delta0, int periods, double dt,
                                   const ClassicalParams& p) {
    p.validate();
    const double tau = p.tau();
    if (!(dt > 0.0) || dt > tau / 100.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("integrate_pair: step size must lie in (0, tau/100]");
    }
    const int steps = static_cast<int>(std::ceil(tau / dt - 1e-9));
    const double h = tau / steps;
    Vec3 a = l0;
    Vec3 b = l0 + delta0;
    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(periods) + 1);
    series.push_back((a - b).norm());
    for (int k = 0; k < periods; ++k) {
        for (int s = 0; s < steps; ++s) {
            const double t = k * tau + s * h;
            a = rk4_step(a, t, h, p);
            b = rk4_step(b, t, h, p);
        }
        series.push_back((a - b).norm());
    }
    return series;
}

VariationalState integrate_variational(const Vec3& l0, int periods, const ClassicalParams& p,
                                       const IntegrationOptions& opt) {
    p.validate();
    check_steps(opt);
    const double tau = p.tau();
    const double dt = tau / opt.steps_per_period;
    Tangent s{l0, Mat3::Identity()};
    double log_scale = 0.0;
    for (int k = 0; k < periods; ++k) {
        for (int step = 0; step < opt.steps_per_period; ++step) {
            s = tangent_step(s, k * tau + step * dt, dt, p);
        }
        const double norm = s.phi.norm();
        if (norm > kRenormalizeAbove) {
            s.phi /= norm;
            log_scale += std::log(norm);
        }
    }
    return {s.l, s.phi, periods * tau, log_scale};
}

std::vector<double> variational_log_growth(const Vec3& l0, const Vec3& delta0, int periods,
                                           const ClassicalParams& p, const IntegrationOptions& opt) {
    p.validate();
    check_steps(opt);
    const double tau = p.tau();
    const double dt = tau / opt.steps_per_period;
    const double log_d0 = std::log(delta0.norm());
    Tangent s{l0, Mat3::Identity()};
    double log_scale = 0.0;
    std::vector<double> growth;
    growth.reserve(static_cast<std::size_t>(periods) + 1);
    growth.push_back(0.0);
    for (int k = 0; k < periods; ++k) {
        for (int step = 0; step < opt.steps_per_period; ++step) {
            s = tangent_step(s, k * tau + step * dt, dt, p);
        }
        const double norm = s.phi.norm();
        if (norm > kRenormalizeAbove) {
            s.phi /= norm;
            log_scale += std::log(norm);
        }
        growth.push_back(log_scale + std::log((s.phi * delta0).norm()) - log_d0);
    }
    return growth;
}

double lyapunov(double theta, double phi, const ClassicalParams& p, const LyapunovOptions& opt) {
    if (opt.n_dirs < 1) throw std::invalid_argument("lyapunov: n_dirs must be at least 1");
    if (opt.periods < 1) throw std::invalid_argument("lyapunov: duration must be at least one period");
    const Vec3 x0 = direction(theta, phi);
    const VariationalState end = integrate_variational(x0, opt.periods, p, opt.integration);
    const auto [e1, e2] = orthogonal_plane(x0);
    const double magnitude = 1e-9 * x0.norm();
    double sum = 0.0;
    for (int k = 0; k < opt.n_dirs; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / opt.n_dirs;
        const Vec3 delta = magnitude * (std::cos(angle) * e1 + std::sin(angle) * e2);
        const double growth = end.log_scale + std::log((end.phi * delta).norm() / delta.norm());
        sum += growth / opt.periods;
    }
    return sum / opt.n_dirs;
}

double Grid::theta_at(int i) const {
    return n_theta == 1 ? 0.0 : std::numbers::pi * i / (n_theta - 1);
}

double Grid::phi_at(int j) const { return 2.0 * std::numbers::pi * j / n_phi; }

void Grid::validate() const {
    if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("grid resolution must be at least 2x2");
}

Eigen::MatrixXd lyapunov_map(const Grid& grid, const ClassicalParams& p, const LyapunovOptions& opt,
                             int threads) {
    grid.validate();
    Eigen::MatrixXd out(grid.n_theta, grid.n_phi);
    const std::size_t cells = static_cast<std::size_t>(grid.n_theta) * grid.n_phi;
    parallel_for(cells, threads, [&](std::size_t c) {
        const int i = static_cast<int>(c / grid.n_phi);
        const int j = static_cast<int>(c % grid.n_phi);
        out(i, j) = lyapunov(grid.theta_at(i), grid.phi_at(j), p, opt);
    });
    return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_slope: need at least two paired samples");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissa");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace scrambletop::classical
