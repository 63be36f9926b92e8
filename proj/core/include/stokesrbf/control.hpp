#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stokesrbf/geometry.hpp"
#include "stokesrbf/global_solver.hpp"
#include "stokesrbf/kernels.hpp"

namespace stokesrbf {

/// Smoothed indicator of the control region: 1/(1 + exp(-2k(radius - |x|))).
double smooth_indicator(Point2 x, double radius = 0.5, double k = 20.0);

enum class ControlMask { Both, FirstOnly, SecondOnly };
enum class ControlBackend { Global, Lhi };

struct ControlProblem {
    ControlBackend backend = ControlBackend::Global;
    NodeSet nodes;
    DivFreeKernel kernel;
    BcKind bc_kind = BcKind::Dirichlet;
    double horizon = 0.25;
    double dt = 1.0 / 200.0;
    double mu = 1.0;
    /// Reciprocal regularization weights: J carries (c1_inv/2)||y(T)||^2 and
    /// (c2_inv/2) of the penalized component's control energy. A disabled
    /// weight is a literal zero, never a division.
    double c1_inv = 300.0;
    double c2_inv = 0.0;
    int penalized_component = -1;  // component hit by c2_inv (-1: none)
    ControlMask mask = ControlMask::Both;
    double indicator_radius = 0.5;
    double indicator_steepness = 20.0;
    double chi_cutoff = 1e-6;  // control dofs live where chi >= cutoff
    std::function<Vec2(Point2)> y0;
    int lhi_stencil = 30;  // backend == Lhi

    bool component_active(int c) const {
        if (mask == ControlMask::Both) return true;
        return (mask == ControlMask::FirstOnly) == (c == 0);
    }
};

/// Control dofs: nodal values on the indicator-supported interior nodes, one
/// slot per time step t_1..t_N (piecewise constant in time within a step).
struct ControlField {
    std::vector<std::vector<Vec2>> v;  // [step][control node]

    static ControlField zeros(std::size_t n_steps, std::size_t n_nodes) {
        ControlField f;
        f.v.assign(n_steps, std::vector<Vec2>(n_nodes, Vec2{0.0, 0.0}));
        return f;
    }
};

struct ControlTrajectory {
    std::vector<std::vector<double>> y;  // [0..N][full nodal state]
    double j_value = 0.0;
};

struct ControlIterRow {
    int iter = 0;
    double residual = 0.0;  // |grad| / |grad_0|
    double j_value = 0.0;
};

struct ControlSolution {
    std::vector<std::size_t> control_nodes;     // global node ids of the dofs
    std::vector<std::vector<Vec2>> control;     // reported force chi*u per step
    std::vector<std::vector<double>> state;     // y trajectory [0..N]
    std::vector<std::vector<double>> adjoint;   // w trajectory [0..N] (last CGM sweep)
    std::vector<double> times;                  // t_0..t_N
    std::vector<double> norm_sq;                // ||y(t)||_L2^2 per time
    std::vector<ControlIterRow> iterations;
    bool converged = false;
    bool max_iter_exceeded = false;
    double final_norm_sq = 0.0;
};

/// Forward/adjoint machinery assembled once per problem. The adjoint sweep is
/// the exact discrete transpose of the forward step in the lumped-mass inner
/// product, so the optimality system is consistent to rounding.
class ControlSetup {
public:
    explicit ControlSetup(ControlProblem problem);
    ~ControlSetup();
    ControlSetup(ControlSetup&&) noexcept;

    const ControlProblem& problem() const;
    std::size_t n_steps() const;
    const std::vector<std::size_t>& control_nodes() const;
    const std::vector<double>& chi() const;     // indicator at the control nodes
    const std::vector<double>& masses() const;  // per state dof

    /// State trajectory driven by the control (RHS = chi * v, masked).
    ControlTrajectory solve_forward(const ControlField& v) const;
    /// Same propagation from a zero initial state (Hessian application).
    ControlTrajectory solve_forward_zero(const ControlField& v) const;
    /// Backward sweep from w(T) = -c1_inv * y_T; returns w[0..N].
    std::vector<std::vector<double>> solve_adjoint(const std::vector<double>& y_T) const;
    /// Exact gradient of the discrete J; masked components are excluded.
    ControlField gradient(const ControlField& v, const ControlTrajectory& fwd,
                          const std::vector<std::vector<double>>& adj) const;

    double j_value(const ControlField& v, const std::vector<double>& y_T) const;
    double inner(const ControlField& a, const ControlField& b) const;
    double state_mass_norm_sq(const std::vector<double>& y) const;

    /// Raw one-step maps (duality tests drive these directly).
    std::vector<double> forward_step(const std::vector<double>& y_prev,
                                     const std::vector<double>& force) const;
    std::vector<double> transpose_step(const std::vector<double>& z) const;

    /// Scatter a control into a full-state force field (chi and mask applied).
    std::vector<double> force_field(const std::vector<Vec2>& v) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Conjugate gradient (Fletcher-Reeves, exact quadratic line search) on the
/// control variable; stops when |grad|/|grad_0| <= eps.
ControlSolution cgm_solve(const ControlProblem& problem, double eps = 1e-8, int max_iter = 100);
ControlSolution cgm_solve(const ControlSetup& setup, double eps = 1e-8, int max_iter = 100);

void write_norms_csv(const std::string& path, const ControlSolution& sol,
                     const std::string& config_echo = {});
void write_iterations_csv(const std::string& path, const ControlSolution& sol,
                          const std::string& config_echo = {});
/// Nodal cut along the plane x = x_plane over t in [t0, t1]:
/// rows (t, y_coord, y1, y2) for nodes with |x - x_plane| <= tol.
void write_slice_csv(const std::string& path, const ControlSolution& sol, const NodeSet& nodes,
                     double x_plane, double tol, double t0, double t1,
                     const std::string& config_echo = {});

}  // namespace stokesrbf
