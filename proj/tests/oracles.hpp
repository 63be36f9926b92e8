#pragma once

// Test-only oracles, kept independent of the library's symbolic derivative
// path: closed-form scalar kernels plus recursive central differences in
// multiprecision.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "stokesrbf/bigfloat.hpp"
#include "stokesrbf/dense.hpp"
#include "stokesrbf/kernels.hpp"

namespace oracles {

using stokesrbf::BigFloat;
using stokesrbf::DivFreeKernel;
using stokesrbf::Functional;
using stokesrbf::KernelSpec;
using stokesrbf::Point2;

inline BigFloat psi_direct(const KernelSpec& ks, const BigFloat& z1, const BigFloat& z2) {
    const BigFloat c(ks.shape);
    const BigFloat u = z1 * z1 + z2 * z2;
    if (ks.family == stokesrbf::RbfFamily::Gaussian) return exp(-(c * c * u));
    return BigFloat(1.0) / sqrt(BigFloat(1.0) + c * c * u);
}

/// Iterated central differences, d^(ax,ay) f at (z1,z2), uniform step h.
template <class F>
BigFloat fd_partial(const F& f, int ax, int ay, const BigFloat& z1, const BigFloat& z2,
                    const BigFloat& h) {
    if (ax > 0)
        return (fd_partial(f, ax - 1, ay, z1 + h, z2, h) -
                fd_partial(f, ax - 1, ay, z1 - h, z2, h)) /
               (BigFloat(2.0) * h);
    if (ay > 0)
        return (fd_partial(f, 0, ay - 1, z1, z2 + h, h) -
                fd_partial(f, 0, ay - 1, z1, z2 - h, h)) /
               (BigFloat(2.0) * h);
    return f(z1, z2);
}

/// Divergence-free block entry by finite differences on the closed form:
/// -Lap psi delta_ab + d_a d_b psi.
inline BigFloat divfree_entry_fd(const KernelSpec& ks, int a, int b, const BigFloat& z1,
                                 const BigFloat& z2, const BigFloat& h) {
    auto f = [&](const BigFloat& x, const BigFloat& y) { return psi_direct(ks, x, y); };
    BigFloat v = fd_partial(f, (a == 0) + (b == 0), (a == 1) + (b == 1), z1, z2, h);
    if (a == b) v -= fd_partial(f, 2, 0, z1, z2, h) + fd_partial(f, 0, 2, z1, z2, h);
    return v;
}

/// 3x3 block-kernel entry: velocity block over psi, pressure over phi,
/// cross entries zero.
inline BigFloat phi_entry_fd(const DivFreeKernel& k, int a, int b, const BigFloat& z1,
                             const BigFloat& z2, const BigFloat& h) {
    if (a < 2 && b < 2) return divfree_entry_fd(k.psi, a, b, z1, z2, h);
    if (a == 2 && b == 2) return psi_direct(k.phi, z1, z2);
    return BigFloat(0.0);
}

/// F^x G^xi [Phi](x_F - x_G) by nested finite differences (F's operators in x,
/// G's in xi) over the closed-form entries. digits sets the oracle precision.
inline double pair_fd(const Functional& F, const Functional& G, const DivFreeKernel& k,
                      int digits = 50, double step = 1e-5) {
    stokesrbf::ScopedDigits guard(digits);
    const BigFloat h(step);
    BigFloat acc(0.0);
    for (const auto& ft : F.terms)
        for (const auto& gt : G.terms) {
            const bool fv = ft.comp < 2, gv = gt.comp < 2;
            if (fv != gv) continue;
            auto outer = [&](const BigFloat& x1, const BigFloat& x2) {
                auto inner = [&](const BigFloat& xi1, const BigFloat& xi2) {
                    return phi_entry_fd(k, ft.comp, gt.comp, x1 - xi1, x2 - xi2, h);
                };
                return fd_partial(inner, gt.dx, gt.dy, BigFloat(G.anchor.x), BigFloat(G.anchor.y), h);
            };
            acc += BigFloat(ft.coeff * gt.coeff) *
                   fd_partial(outer, ft.dx, ft.dy, BigFloat(F.anchor.x), BigFloat(F.anchor.y), h);
        }
    return acc.to_double();
}

/// Functional applied to an analytic (v1, v2, p) field by finite differences.
template <class Field>
BigFloat apply_to_field_fd(const Functional& F, const Field& field, double step = 1e-9) {
    const BigFloat h(step);
    BigFloat acc(0.0);
    for (const auto& t : F.terms) {
        auto comp = [&](const BigFloat& x, const BigFloat& y) { return field(x, y)[t.comp]; };
        acc += BigFloat(t.coeff) *
               fd_partial(comp, t.dx, t.dy, BigFloat(F.anchor.x), BigFloat(F.anchor.y), h);
    }
    return acc;
}

inline double rel_err(double a, double b, double floor_scale) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_scale});
}

/// Characteristic polynomial by Faddeev-LeVerrier in multiprecision
/// (coefficients of lambda^n ... lambda^0, monic).
std::vector<double> char_poly(const stokesrbf::DenseMatrix<double>& a);

/// Durand-Kerner roots of a monic polynomial (coeffs[k] multiplies z^k).
std::vector<std::complex<double>> poly_roots(const std::vector<std::complex<double>>& monic);
std::vector<std::complex<double>> poly_roots(const std::vector<double>& monic_coeffs);

}  // namespace oracles
