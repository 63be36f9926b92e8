#include "stokesrbf/problems.hpp"

#include <cmath>

namespace stokesrbf {

namespace {

// Symmetrized gradient of the unit-circle solution, tangential stress data
// 2 mu (D nu).tau with the circle frame nu = x/|x|, tau = rot(nu).
double circle_slip_stress(Point2 p, double t, double mu, double factor) {
    const double s = M_PI * std::sin(M_PI * t);
    const double q = 0.5 * M_PI * (p.x * p.x + p.y * p.y);
    const double cq = std::cos(q);
    const double d11 = -s * M_PI * p.x * p.y * cq;
    const double d22 = -d11;
    const double d12 = 0.5 * s * M_PI * cq * (p.x * p.x - p.y * p.y);
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return 0.0;
    const Vec2 nu{p.x / r, p.y / r};
    const Vec2 tau{-nu.y, nu.x};
    const double dn_t = tau.x * (d11 * nu.x + d12 * nu.y) + tau.y * (d12 * nu.x + d22 * nu.y);
    return factor * 2.0 * mu * dn_t;
}

}  // namespace

ReferenceProblem unit_circle_problem(double mu, bool stress_extra_mu) {
    ReferenceProblem rp;
    rp.velocity = [](Point2 p, double t) {
        const double a = M_PI * std::sin(0.5 * M_PI * (p.x * p.x + p.y * p.y)) * std::sin(M_PI * t);
        return Vec2{-a * p.y, a * p.x};
    };
    rp.pressure = [](Point2 p, double t) { return std::sin(p.x - p.y + t); };
    rp.pressure_gradient = [](Point2 p, double t) {
        const double c = std::cos(p.x - p.y + t);
        return Vec2{c, -c};
    };
    rp.source = [mu](Point2 p, double t) {
        const double r2 = p.x * p.x + p.y * p.y;
        const double q = 0.5 * M_PI * r2;
        const double sq = std::sin(q), cq = std::cos(q);
        const double st = std::sin(M_PI * t), ct = std::cos(M_PI * t);
        const double cp = std::cos(p.x - p.y + t);
        // Lap y = -+ pi sin(pi t) (4 pi {y,x} cos q - pi^2 {y,x} r^2 sin q)
        const double lap1 = -M_PI * st * (4.0 * M_PI * p.y * cq - M_PI * M_PI * p.y * r2 * sq);
        const double lap2 = M_PI * st * (4.0 * M_PI * p.x * cq - M_PI * M_PI * p.x * r2 * sq);
        const double yt1 = -M_PI * M_PI * p.y * sq * ct;
        const double yt2 = M_PI * M_PI * p.x * sq * ct;
        return Vec2{yt1 - mu * lap1 + cp, yt2 - mu * lap2 - cp};
    };
    rp.dirichlet_data.velocity = rp.velocity;
    rp.dirichlet_data.normal = [](Point2, double) { return 0.0; };
    rp.dirichlet_data.tangential_stress = [](Point2, double) { return 0.0; };

    const double factor = stress_extra_mu ? mu : 1.0;
    rp.navier_slip_data.velocity = rp.velocity;
    rp.navier_slip_data.normal = [](Point2, double) { return 0.0; };  // y.nu = 0 on r=1
    rp.navier_slip_data.tangential_stress = [mu, factor](Point2 p, double t) {
        return circle_slip_stress(p, t, mu, factor);
    };
    return rp;
}

ReferenceProblem square_polynomial_problem(double mu, bool stress_extra_mu) {
    ReferenceProblem rp;
    rp.velocity = [](Point2 p, double) {
        return Vec2{20.0 * p.x * p.y * p.y * p.y,
                    5.0 * p.x * p.x * p.x * p.x - 5.0 * p.y * p.y * p.y * p.y};
    };
    rp.pressure = [](Point2 p, double) { return 60.0 * p.x * p.x * p.y - 20.0 * p.y * p.y * p.y; };
    rp.pressure_gradient = [](Point2 p, double) {
        return Vec2{120.0 * p.x * p.y, 60.0 * p.x * p.x - 60.0 * p.y * p.y};
    };
    // mu Lap u exactly cancels grad p for this pair.
    rp.source = [](Point2, double) { return Vec2{0.0, 0.0}; };
    rp.dirichlet_data.velocity = rp.velocity;
    rp.dirichlet_data.normal = [](Point2, double) { return 0.0; };
    rp.dirichlet_data.tangential_stress = [](Point2, double) { return 0.0; };

    const double factor = stress_extra_mu ? mu : 1.0;
    // Side priority mirrors generate_square_nodes (bottom, right, top, left)
    // so corner data matches the frame the node set assigns.
    auto square_normal = [](Point2 p) -> Vec2 {
        if (p.y == 0.0) return {0.0, -1.0};
        if (p.x == 1.0) return {1.0, 0.0};
        if (p.y == 1.0) return {0.0, 1.0};
        return {-1.0, 0.0};
    };
    rp.navier_slip_data.velocity = rp.velocity;
    rp.navier_slip_data.normal = [rp, square_normal](Point2 p, double t) {
        const Vec2 u = rp.velocity(p, t);
        const Vec2 nu = square_normal(p);
        return u.x * nu.x + u.y * nu.y;
    };
    rp.navier_slip_data.tangential_stress = [mu, factor, square_normal](Point2 p, double) {
        // D u entries for the polynomial solution
        const double d11 = 20.0 * p.y * p.y * p.y;
        const double d22 = -20.0 * p.y * p.y * p.y;
        const double d12 = 0.5 * (60.0 * p.x * p.y * p.y + 20.0 * p.x * p.x * p.x);
        const Vec2 nu = square_normal(p);
        const Vec2 tau{-nu.y, nu.x};
        const double dn_t = tau.x * (d11 * nu.x + d12 * nu.y) + tau.y * (d12 * nu.x + d22 * nu.y);
        return factor * 2.0 * mu * dn_t;
    };
    return rp;
}

std::function<Vec2(Point2)> control_initial_condition() {
    return [](Point2 p) {
        const double c = std::cos(0.5 * M_PI * (p.x * p.x + p.y * p.y));
        return Vec2{-M_PI * p.y * c * c, M_PI * p.x * c * c};
    };
}

}  // namespace stokesrbf
