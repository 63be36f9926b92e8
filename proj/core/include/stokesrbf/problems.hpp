#pragma once

#include <functional>

#include "stokesrbf/global_solver.hpp"

namespace stokesrbf {

/// Closed-form Stokes solution with everything the solvers and tests consume:
/// exact fields, matching source term, and boundary data for both BC kinds.
struct ReferenceProblem {
    std::function<Vec2(Point2, double)> velocity;
    std::function<double(Point2, double)> pressure;
    std::function<Vec2(Point2, double)> pressure_gradient;
    std::function<Vec2(Point2, double)> source;  // f = y_t - mu Lap y + grad p
    BoundaryData dirichlet_data;
    BoundaryData navier_slip_data;

    ExactSolution exact() const {
        return ExactSolution{velocity, pressure_gradient};
    }
    BoundaryCondition bc(BcKind kind) const {
        return BoundaryCondition{kind, kind == BcKind::Dirichlet ? dirichlet_data : navier_slip_data};
    }
};

/// Rotational solution on the unit circle,
///   y = pi sin(pi t) sin(pi r^2 / 2) (-x2, x1),  p = sin(x1 - x2 + t).
/// Satisfies y(.,0)=0, y.nu=0 and vanishing tangential stress on r=1.
/// stress_extra_mu must match the kernel switch so the slip data equals the
/// assembled boundary functional applied to the exact fields.
ReferenceProblem unit_circle_problem(double mu, bool stress_extra_mu = true);

/// Steady polynomial solution on the unit square,
///   u = (20 x1 x2^3, 5 x1^4 - 5 x2^4),  p = 60 x1^2 x2 - 20 x2^3,  f = 0.
ReferenceProblem square_polynomial_problem(double mu, bool stress_extra_mu = true);

/// Initial condition of the null-control experiments,
///   y0 = pi cos^2(pi r^2 / 2) (-x2, x1).
std::function<Vec2(Point2)> control_initial_condition();

}  // namespace stokesrbf
