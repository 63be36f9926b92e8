#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stokesrbf/bigfloat.hpp"
#include "stokesrbf/errors.hpp"
#include "stokesrbf/types.hpp"

namespace stokesrbf {

enum class RbfFamily { InverseMultiquadric, Gaussian };

/// Scalar RBF family with shape parameter. `digits` is the working precision
/// used when the kernel is evaluated in multiprecision paths.
struct KernelSpec {
    RbfFamily family = RbfFamily::InverseMultiquadric;
    double shape = 0.1;  // c > 0
    int digits = 50;
};

/// Highest derivative order of psi w.r.t. the squared radius that the closed
/// forms provide. Functional pairs on the divergence-free block need up to 6
/// (two from the block itself plus two per operator side).
inline constexpr int kMaxRadialDerivative = 8;

/// d^k psi / d(r^2)^k for k = 0..max_k at u = r^2. out must hold max_k+1 slots.
/// IMQ: psi = (1 + (c r)^2)^(-1/2); Gaussian: psi = exp(-(c r)^2).
template <class T>
void radial_ladder(const KernelSpec& spec, const T& u, int max_k, T* out);

/// Spec surface: value and the first four radial derivatives.
template <class T>
std::array<T, 5> eval_scalar(const KernelSpec& spec, const T& r2);

/// Block kernel: 2x2 divergence-free velocity block built from psi, scalar
/// pressure block phi. `stress_extra_mu` keeps the extra mu written in front
/// of sigma in the paper's tangential-stress functional (ambiguous there;
/// switchable).
struct DivFreeKernel {
    KernelSpec psi;
    KernelSpec phi;
    bool stress_extra_mu = true;

    static DivFreeKernel make(const KernelSpec& spec) { return DivFreeKernel{spec, spec, true}; }
};

/// Velocity block {-Laplacian I + grad grad^T} psi at x, row-major 2x2.
template <class T>
std::array<T, 4> eval_divfree(const DivFreeKernel& kernel, const T& x1, const T& x2);

// ---------------------------------------------------------------------------
// Linear functionals: finite sums  sum_m  c_m * d^(dx,dy) applied to component
// comp (0,1 velocity; 2 pressure) at an anchor point. They are the common
// currency of the global and local collocation schemes: Gram entries are
// bi-functional applications to the block kernel.
// ---------------------------------------------------------------------------

struct FunctionalTerm {
    double coeff;
    std::uint8_t dx, dy;  // differentiation multi-index
    std::uint8_t comp;    // 0,1 velocity components; 2 pressure
};

struct Functional {
    Point2 anchor{};
    std::vector<FunctionalTerm> terms;

    int max_order() const {
        int m = 0;
        for (const auto& t : terms) m = std::max(m, int(t.dx) + int(t.dy));
        return m;
    }
};

/// delta_z ∘ e_comp (point evaluation of one component).
Functional identity_functional(Point2 z, int comp);
/// Dirichlet boundary row: same functional, boundary semantics.
Functional dirichlet_trace(Point2 z, int comp);
/// delta_z ∘ sum_k e_k nu_k (impermeability row). nu must be unit.
Functional normal_trace(Point2 z, Vec2 nu);
/// Steady interior operator row L_i = delta∘(-mu Lap e_i) + delta∘(d_i e_3).
Functional interior_operator(Point2 z, int comp, double mu);
/// Modified interior row  Lbar_i = delta e_i + dt_beta * L_i.
Functional modified_interior(Point2 z, int comp, double mu, double dt_beta);
/// Tangential stress row: (sigma(y,p) nu) . tau with sigma = -pI + 2 mu D y.
/// The pressure part drops since nu.tau = 0. extra_mu keeps the paper's
/// leading mu factor. Throws BadGeometry unless nu, tau are unit and
/// orthogonal (tolerance 1e-12).
Functional tangential_stress(Point2 z, Vec2 nu, Vec2 tau, double mu, bool extra_mu);
/// d_x e_0 + d_y e_1: evaluates the analytic divergence of a velocity field.
Functional velocity_divergence(Point2 z);
Functional pressure_value(Point2 z);
Functional pressure_gradient(Point2 z, int axis);

/// F^x G^xi [Phi](x_F - x_G): apply F in the first kernel argument and G in
/// the second. Supports operator compositions up to total order 4 on the
/// block kernel; beyond that throws UnsupportedPair.
template <class T>
T apply_functional_pair(const Functional& F, const Functional& G, const DivFreeKernel& kernel);

/// Amortizes ladder/monomial work across several functional pairs anchored at
/// the same two points (assembly fills 2x2 component blocks per node pair).
template <class T>
class KernelPairEvaluator {
public:
    KernelPairEvaluator(const DivFreeKernel& kernel, Point2 xF, Point2 xG);
    ~KernelPairEvaluator();
    KernelPairEvaluator(const KernelPairEvaluator&) = delete;
    KernelPairEvaluator& operator=(const KernelPairEvaluator&) = delete;

    /// Pair value using the stored anchor difference (F.anchor/G.anchor ignored).
    T pair(const Functional& F, const Functional& G);

private:
    struct Impl;
    Impl* impl_;
};

}  // namespace stokesrbf
