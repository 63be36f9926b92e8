#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "stokesrbf/dense.hpp"
#include "stokesrbf/geometry.hpp"
#include "stokesrbf/kernels.hpp"
#include "stokesrbf/time_integration.hpp"

namespace stokesrbf {

enum class BcKind { Dirichlet, NavierSlip };

/// Boundary data supplier: velocity for Dirichlet, normal trace and
/// tangential stress values for Navier-slip.
struct BoundaryData {
    std::function<Vec2(Point2, double)> velocity;
    std::function<double(Point2, double)> normal;
    std::function<double(Point2, double)> tangential_stress;

    static BoundaryData homogeneous();
};

struct BoundaryCondition {
    BcKind kind = BcKind::Dirichlet;
    BoundaryData data = BoundaryData::homogeneous();
};

enum class SchemeFlavor { BackwardModified, MethodOfLines, Stationary };

/// Row/column functional of boundary node `g` (global index), component row
/// i in {0,1}. Dirichlet rows are point traces; Navier-slip pairs the normal
/// trace (i=0) with the tangential stress (i=1).
Functional boundary_functional(const NodeSet& nodes, std::size_t g, int i, BcKind kind,
                               double mu, bool stress_extra_mu);

template <class T>
struct StokesState {
    double time = 0.0;
    std::vector<T> alpha;     // ansatz coefficients
    std::vector<T> velocity;  // nodal values: y1(in), y2(in), y1(b), y2(b)
};

struct PointSample {
    Vec2 velocity;
    Vec2 pressure_gradient;
    double pressure;  // gauge fixed to zero mean over the evaluated batch
};

/// Exact solution hooks for error logging.
struct ExactSolution {
    std::function<Vec2(Point2, double)> velocity;
    std::function<Vec2(Point2, double)> pressure_gradient;
};

/// Assembled global collocation system. H+ is time-independent for constant
/// dt, so its factorization is reused across steps.
template <class T>
class GlobalSystem {
public:
    GlobalSystem(NodeSet nodes, DivFreeKernel kernel, BoundaryCondition bc, double mu,
                 SchemeFlavor flavor, BdfScheme scheme);

    const NodeSet& nodes() const { return nodes_; }
    const DivFreeKernel& kernel() const { return kernel_; }
    const BoundaryCondition& bc() const { return bc_; }
    double mu() const { return mu_; }
    SchemeFlavor flavor() const { return flavor_; }
    const BdfScheme& scheme() const { return scheme_; }
    std::size_t n_coeff() const { return 2 * nodes_.total(); }

    const DenseMatrix<T>& h_plus() const { return h_plus_; }
    const LuFactors<T>& factors() const { return *lu_; }
    /// Velocity evaluation matrix A: rows y1(in), y2(in), y1(b), y2(b).
    const DenseMatrix<T>& interpolation_matrix() const { return a_; }
    /// H-: the interior velocity rows of A, boundary rows zero.
    DenseMatrix<T> h_minus() const;

    /// Generalized interpolation of y0 with boundary rows matched to g(.,t0).
    StokesState<T> initial_state(const std::function<Vec2(Point2)>& y0, double t0) const;

    /// One BDF step: solves H+ alpha = (F^{n+s}; g^{n+s}) from s history states
    /// (oldest first) and refreshes nodal velocity.
    StokesState<T> step(const std::vector<const StokesState<T>*>& history,
                        const std::function<Vec2(Point2, double)>& f, double t_next) const;

    /// Stationary solve (flavor Stationary): L rows carry f, boundary rows g.
    StokesState<T> solve_stationary(const std::function<Vec2(Point2, double)>& f) const;

    std::vector<PointSample> evaluate(const StokesState<T>& state,
                                      const std::vector<Point2>& points) const;
    /// Analytic divergence of the evaluated velocity at the given points.
    std::vector<double> divergence(const StokesState<T>& state,
                                   const std::vector<Point2>& points) const;

    std::vector<Functional> column_functionals() const;

private:
    std::vector<T> solve_rhs(std::vector<T> rhs) const;
    void fill_boundary_rows(std::vector<T>& rhs, double t) const;

    NodeSet nodes_;
    DivFreeKernel kernel_;
    BoundaryCondition bc_;
    double mu_;
    SchemeFlavor flavor_;
    BdfScheme scheme_;
    DenseMatrix<T> h_plus_;
    DenseMatrix<T> a_;
    std::shared_ptr<const LuFactors<T>> lu_;
};

template <class T>
GlobalSystem<T> assemble_global(const NodeSet& nodes, const DivFreeKernel& kernel,
                                const BoundaryCondition& bc, double mu, SchemeFlavor flavor,
                                const BdfScheme& scheme) {
    return GlobalSystem<T>(nodes, kernel, bc, mu, flavor, scheme);
}

struct EvolutionOptions {
    double t_end = 1.0;
    BootstrapMode bootstrap = BootstrapMode::SubstepBdf1;
    const ExactSolution* exact = nullptr;
    double blowup_factor = 1e6;
    bool record_trajectory = false;
};

template <class T>
struct EvolutionLog {
    std::vector<double> times;
    std::vector<double> err_y_inf;      // nodal max error per step (exact given)
    std::vector<double> err_gradp_inf;  // pressure-gradient max error at interior nodes
    double max_err_y = 0.0;
    double max_err_gradp = 0.0;
    bool non_convergence = false;
    StokesState<T> final_state;
    std::vector<StokesState<T>> trajectory;  // filled when record_trajectory
};

/// Full trajectory of the evolutionary problem from y0 to t_end.
template <class T>
EvolutionLog<T> run_evolution(const GlobalSystem<T>& sys, const std::function<Vec2(Point2)>& y0,
                              const std::function<Vec2(Point2, double)>& f,
                              const EvolutionOptions& opts);

}  // namespace stokesrbf
