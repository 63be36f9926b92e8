#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "stokesrbf/global_solver.hpp"
#include "stokesrbf/sparse.hpp"

namespace stokesrbf {

enum class LhiMode { Steady, Bdf };

struct LhiConfig {
    DivFreeKernel kernel;
    /// When > 0, the shape parameter is nondimensional: per stencil
    /// c = c_star / local_h (mean nearest-neighbor distance of the stencil).
    double c_star = 0.0;
    BoundaryCondition bc;
    double mu = 1.0;
    LhiMode mode = LhiMode::Steady;
    BdfScheme scheme = bdf_coefficients(1, 0.0);
    bool estimate_conditioning = true;
};

/// Dense local collocation system of one stencil, blocks ordered
/// (I1, I2, B1, B2, L1, L2) to match the data layout d^(k).
template <class T>
struct LocalGram {
    const Stencil* stencil = nullptr;
    DivFreeKernel kernel;  // per-stencil shape applied
    std::size_t n_sc = 0, n_fc = 0, n_pdec = 0;
    DenseMatrix<T> gram;
    std::unique_ptr<LuFactors<T>> lu;
    double cond_estimate = 0.0;

    std::size_t size() const { return 2 * (n_sc + n_fc + n_pdec); }
    /// Column functional of local index j (also the row functional).
    Functional local_functional(const NodeSet& nodes, const LhiConfig& cfg, std::size_t j) const;
};

template <class T>
LocalGram<T> assemble_local(const Stencil& stencil, const NodeSet& nodes, const LhiConfig& cfg);

/// Differentiation weights of one stencil: target functionals applied to the
/// local interpolant at the solution center, as linear weights on d^(k).
template <class T>
struct WeightSet {
    std::vector<T> w1, w2;  // targets for components 1,2
};

/// Solves A^(k) W = J H^(k)(x1) for a generic target J anchored at `eval`.
template <class T>
std::vector<T> compute_weights(const LocalGram<T>& local, const NodeSet& nodes,
                               const LhiConfig& cfg, const Functional& target);

struct LhiStencilDiagnostics {
    std::size_t stencil_id = 0;
    double cond_estimate = 0.0;
    double weight_norm = 0.0;  // max |w| over both targets
    double shape = 0.0;        // dimensional c used
};

template <class T>
struct LhiStepLog {
    std::vector<double> times;
    std::vector<double> err_y_inf;
    double max_err_y = 0.0;
    bool non_convergence = false;
    std::vector<double> final_velocity;  // interior nodal layout y1(in), y2(in)
    std::vector<std::vector<double>> trajectory;  // filled when requested
};

/// Sparse global LHI system: one pair of rows per solution center; unknown
/// velocities at the centers stay in the matrix, boundary data and source
/// contributions fold into the right-hand side.
template <class T>
class LhiSystem {
public:
    LhiSystem(NodeSet nodes, std::vector<Stencil> stencils, LhiConfig cfg);
    ~LhiSystem();
    LhiSystem(LhiSystem&&) noexcept;
    LhiSystem& operator=(LhiSystem&&) noexcept;

    const NodeSet& nodes() const;
    const LhiConfig& config() const;
    const std::vector<Stencil>& stencils() const;
    const SparseMatrix<double>& matrix() const;           // S (weight y-blocks)
    SparseMatrix<double> history_block() const;           // S2 (weight L-blocks)
    const std::vector<LhiStencilDiagnostics>& diagnostics() const;

    /// Linearized boundary reconstruction under homogeneous boundary data:
    /// y_b = bc * y_centers + bp * u, where u is the interior field the PDE
    /// slots see (history-plus-source combination). Rows: y1(b), y2(b).
    struct BoundaryMaps {
        SparseMatrix<double> bc, bp;
    };
    BoundaryMaps boundary_maps() const;

    /// Steady solve (mode Steady): returns interior nodal velocities
    /// (y1 at centers, then y2) and the per-stencil pressure at each center
    /// (gauge per stencil). One multiprecision refinement pass is applied when
    /// the weights were assembled in multiprecision.
    struct SteadyResult {
        std::vector<double> velocity;  // 2 n_c
        std::vector<double> pressure;  // n_c, up to a per-stencil constant
    };
    SteadyResult solve_steady(const std::function<Vec2(Point2, double)>& f) const;

    /// One BDF step (mode Bdf): history holds the s previous interior nodal
    /// velocity fields (oldest first).
    std::vector<double> step(const std::vector<const std::vector<double>*>& history,
                             const std::function<Vec2(Point2, double)>& f, double t_next) const;

    /// Velocity of boundary node b reconstructed from its owning stencil;
    /// `interior` is the current interior field, `f`/`t` rebuild the known
    /// data slots. Used for Navier-slip reporting.
    Vec2 boundary_velocity(std::size_t b, const std::vector<double>& interior,
                           const std::vector<const std::vector<double>*>& history,
                           const std::function<Vec2(Point2, double)>& f, double t) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

template <class T>
LhiSystem<T> assemble_lhi(const NodeSet& nodes, int local_size, const LhiConfig& cfg) {
    return LhiSystem<T>(nodes, build_stencils(nodes, local_size), cfg);
}

struct LhiEvolutionOptions {
    double t_end = 1.0;
    BootstrapMode bootstrap = BootstrapMode::SubstepBdf1;
    const ExactSolution* exact = nullptr;
    double blowup_factor = 1e6;
    bool record_trajectory = false;
};

/// BDF evolution on the sparse LHI system. Error norms over the interior
/// nodes; the NonConvergence flag mirrors the paper's N.C entries.
template <class T>
LhiStepLog<T> lhi_run_evolution(const LhiSystem<T>& sys, const std::function<Vec2(Point2)>& y0,
                                const std::function<Vec2(Point2, double)>& f,
                                const LhiEvolutionOptions& opts);

}  // namespace stokesrbf
