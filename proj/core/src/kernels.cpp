#include "stokesrbf/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace stokesrbf {

namespace {

template <class T>
struct PrecisionGuard {
    explicit PrecisionGuard(const KernelSpec&) {}
};
template <>
struct PrecisionGuard<BigFloat> {
    explicit PrecisionGuard(const KernelSpec& s) : g(s.digits) {}
    ScopedDigits g;
};

// ---------------------------------------------------------------------------
// Symbolic monomial-ladder algebra:  c * z1^px z2^py * f^{(k)}(u), u = |z|^2.
// Differentiation is exact (integer coefficients), so every mixed partial of a
// kernel block entry is a short closed-form sum over the radial ladder.
// ---------------------------------------------------------------------------

struct Mono {
    long long c;
    int px, py, k;
};
using TermSum = std::vector<Mono>;

TermSum canon(TermSum s) {
    std::sort(s.begin(), s.end(), [](const Mono& a, const Mono& b) {
        if (a.k != b.k) return a.k < b.k;
        if (a.px != b.px) return a.px < b.px;
        return a.py < b.py;
    });
    TermSum out;
    for (const Mono& m : s) {
        if (!out.empty() && out.back().k == m.k && out.back().px == m.px && out.back().py == m.py)
            out.back().c += m.c;
        else
            out.push_back(m);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Mono& m) { return m.c == 0; }),
              out.end());
    return out;
}

TermSum d_axis(const TermSum& s, bool x_axis) {
    TermSum r;
    r.reserve(2 * s.size());
    for (const Mono& m : s) {
        const int p = x_axis ? m.px : m.py;
        if (p > 0) {
            Mono t = m;
            t.c *= p;
            (x_axis ? t.px : t.py) -= 1;
            r.push_back(t);
        }
        Mono t = m;
        t.c *= 2;
        (x_axis ? t.px : t.py) += 1;
        t.k += 1;
        r.push_back(t);
    }
    return canon(r);
}

// Block entries: 0 -> Phi_Div(1,1), 1 -> Phi_Div(1,2), 2 -> Phi_Div(2,2) (all
// over psi), 3 -> pressure block (over phi).
constexpr int kMaxPairOrder = 4;

struct DerivativeCache {
    // [entry][ax][ay], ax+ay <= kMaxPairOrder
    TermSum t[4][kMaxPairOrder + 1][kMaxPairOrder + 1];

    DerivativeCache() {
        t[0][0][0] = {{-2, 0, 0, 1}, {-4, 0, 2, 2}};  // -2 psi' - 4 z2^2 psi''
        t[1][0][0] = {{4, 1, 1, 2}};                  //  4 z1 z2 psi''
        t[2][0][0] = {{-2, 0, 0, 1}, {-4, 2, 0, 2}};  // -2 psi' - 4 z1^2 psi''
        t[3][0][0] = {{1, 0, 0, 0}};                  //  phi
        for (int e = 0; e < 4; ++e)
            for (int total = 1; total <= kMaxPairOrder; ++total)
                for (int ax = total; ax >= 0; --ax) {
                    const int ay = total - ax;
                    t[e][ax][ay] = ax > 0 ? d_axis(t[e][ax - 1][ay], true)
                                          : d_axis(t[e][ax][ay - 1], false);
                }
    }
};

const DerivativeCache& derivative_cache() {
    static const DerivativeCache cache;
    return cache;
}

void push_term(std::vector<FunctionalTerm>& ts, double c, int dx, int dy, int comp) {
    if (c == 0.0) return;
    for (auto& t : ts)
        if (t.dx == dx && t.dy == dy && t.comp == comp) {
            t.coeff += c;
            return;
        }
    ts.push_back({c, static_cast<std::uint8_t>(dx), static_cast<std::uint8_t>(dy),
                  static_cast<std::uint8_t>(comp)});
}

void check_frame(Vec2 nu, Vec2 tau) {
    if (std::abs(nu.norm() - 1.0) > 1e-12) throw BadGeometry("normal is not unit length");
    if (std::abs(tau.norm() - 1.0) > 1e-12) throw BadGeometry("tangent is not unit length");
    if (std::abs(nu.dot(tau)) > 1e-12) throw BadGeometry("tangent not orthogonal to normal");
}

}  // namespace

template <class T>
void radial_ladder(const KernelSpec& spec, const T& u, int max_k, T* out) {
    if (max_k < 0 || max_k > kMaxRadialDerivative)
        throw UnsupportedOrder("radial ladder order out of range");
    PrecisionGuard<T> guard(spec);
    const T c2 = T(spec.shape) * T(spec.shape);
    if (spec.family == RbfFamily::Gaussian) {
        out[0] = exp(-(c2 * u));
        for (int k = 1; k <= max_k; ++k) out[k] = out[k - 1] * (-c2);
    } else {
        const T t = T(1.0) + c2 * u;
        out[0] = T(1.0) / sqrt(t);
        const T w = c2 / t;
        for (int k = 1; k <= max_k; ++k)
            out[k] = out[k - 1] * w * T(-(2.0 * k - 1.0) / 2.0);
    }
}

template <class T>
std::array<T, 5> eval_scalar(const KernelSpec& spec, const T& r2) {
    std::array<T, 5> out;
    radial_ladder(spec, r2, 4, out.data());
    return out;
}

template <class T>
std::array<T, 4> eval_divfree(const DivFreeKernel& kernel, const T& x1, const T& x2) {
    PrecisionGuard<T> guard(kernel.psi);
    const T u = x1 * x1 + x2 * x2;
    T lad[3];
    radial_ladder(kernel.psi, u, 2, lad);
    const T four_d2 = T(4.0) * lad[2];
    std::array<T, 4> e;
    e[0] = T(-2.0) * lad[1] - x2 * x2 * four_d2;  // (1,1)
    e[1] = x1 * x2 * four_d2;                     // (1,2)
    e[2] = e[1];                                  // (2,1)
    e[3] = T(-2.0) * lad[1] - x1 * x1 * four_d2;  // (2,2)
    return e;
}

Functional identity_functional(Point2 z, int comp) {
    Functional f{z, {}};
    push_term(f.terms, 1.0, 0, 0, comp);
    return f;
}

Functional dirichlet_trace(Point2 z, int comp) { return identity_functional(z, comp); }

Functional normal_trace(Point2 z, Vec2 nu) {
    if (std::abs(nu.norm() - 1.0) > 1e-12) throw BadGeometry("normal is not unit length");
    Functional f{z, {}};
    push_term(f.terms, nu.x, 0, 0, 0);
    push_term(f.terms, nu.y, 0, 0, 1);
    return f;
}

Functional interior_operator(Point2 z, int comp, double mu) {
    Functional f{z, {}};
    push_term(f.terms, -mu, 2, 0, comp);
    push_term(f.terms, -mu, 0, 2, comp);
    push_term(f.terms, 1.0, comp == 0 ? 1 : 0, comp == 0 ? 0 : 1, 2);
    return f;
}

Functional modified_interior(Point2 z, int comp, double mu, double dt_beta) {
    Functional f{z, {}};
    push_term(f.terms, 1.0, 0, 0, comp);
    push_term(f.terms, -mu * dt_beta, 2, 0, comp);
    push_term(f.terms, -mu * dt_beta, 0, 2, comp);
    push_term(f.terms, dt_beta, comp == 0 ? 1 : 0, comp == 0 ? 0 : 1, 2);
    return f;
}

Functional tangential_stress(Point2 z, Vec2 nu, Vec2 tau, double mu, bool extra_mu) {
    check_frame(nu, tau);
    const double m = extra_mu ? mu * mu : mu;
    const double t[2] = {tau.x, tau.y};
    const double n[2] = {nu.x, nu.y};
    Functional f{z, {}};
    // (sigma nu).tau = 2 mu (D y nu).tau; the -p nu part is annihilated by tau.
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double c = m * t[a] * n[b];
            push_term(f.terms, c, b == 0 ? 1 : 0, b == 0 ? 0 : 1, a);  // d_b e_a
            push_term(f.terms, c, a == 0 ? 1 : 0, a == 0 ? 0 : 1, b);  // d_a e_b
        }
    return f;
}

Functional velocity_divergence(Point2 z) {
    Functional f{z, {}};
    push_term(f.terms, 1.0, 1, 0, 0);
    push_term(f.terms, 1.0, 0, 1, 1);
    return f;
}

Functional pressure_value(Point2 z) {
    Functional f{z, {}};
    push_term(f.terms, 1.0, 0, 0, 2);
    return f;
}

Functional pressure_gradient(Point2 z, int axis) {
    Functional f{z, {}};
    push_term(f.terms, 1.0, axis == 0 ? 1 : 0, axis == 0 ? 0 : 1, 2);
    return f;
}

// ---------------------------------------------------------------------------
// Pair evaluation
// ---------------------------------------------------------------------------

template <class T>
struct KernelPairEvaluator<T>::Impl {
    const DivFreeKernel kernel;
    T p1[2 * kMaxPairOrder + 3];  // z1^p
    T p2[2 * kMaxPairOrder + 3];
    T lad_psi[kMaxRadialDerivative + 1];
    T lad_phi[kMaxRadialDerivative + 1];
    bool have_psi = false, have_phi = false;
    struct Slot {
        bool have = false;
        T val;
    };
    Slot memo[4 * (kMaxPairOrder + 1) * (kMaxPairOrder + 1)];

    Impl(const DivFreeKernel& k, Point2 xF, Point2 xG) : kernel(k) {
        PrecisionGuard<T> guard(kernel.psi);
        const T z1 = T(xF.x) - T(xG.x);
        const T z2 = T(xF.y) - T(xG.y);
        p1[0] = T(1.0);
        p2[0] = T(1.0);
        for (int p = 1; p < 2 * kMaxPairOrder + 3; ++p) {
            p1[p] = p1[p - 1] * z1;
            p2[p] = p2[p - 1] * z2;
        }
    }

    const T* ladder(int entry) {
        const T u = p1[2] + p2[2];
        if (entry < 3) {
            if (!have_psi) {
                radial_ladder(kernel.psi, u, kMaxPairOrder + 2, lad_psi);
                have_psi = true;
            }
            return lad_psi;
        }
        if (!have_phi) {
            radial_ladder(kernel.phi, u, kMaxPairOrder, lad_phi);
            have_phi = true;
        }
        return lad_phi;
    }

    const T& entry_value(int entry, int ax, int ay) {
        Slot& s = memo[(entry * (kMaxPairOrder + 1) + ax) * (kMaxPairOrder + 1) + ay];
        if (!s.have) {
            const TermSum& ts = derivative_cache().t[entry][ax][ay];
            const T* lad = ladder(entry);
            T acc(0.0), term;
            for (const Mono& m : ts) {
                term = T(static_cast<double>(m.c));
                term *= p1[m.px];
                term *= p2[m.py];
                term *= lad[m.k];
                acc += term;
            }
            s.val = std::move(acc);
            s.have = true;
        }
        return s.val;
    }

    T pair(const Functional& F, const Functional& G) {
        PrecisionGuard<T> guard(kernel.psi);
        T acc(0.0), tmp;
        for (const FunctionalTerm& f : F.terms)
            for (const FunctionalTerm& g : G.terms) {
                const bool fv = f.comp < 2, gv = g.comp < 2;
                if (fv != gv) continue;  // zero off-diagonal block
                const int entry = fv ? int(f.comp) + int(g.comp) : 3;
                const int ax = int(f.dx) + int(g.dx);
                const int ay = int(f.dy) + int(g.dy);
                if (ax + ay > kMaxPairOrder)
                    throw UnsupportedPair("operator composition exceeds implemented order 4");
                const double sign = ((g.dx + g.dy) % 2) ? -1.0 : 1.0;
                addmul(acc, T(f.coeff * g.coeff * sign), entry_value(entry, ax, ay), tmp);
            }
        return acc;
    }
};

template <class T>
KernelPairEvaluator<T>::KernelPairEvaluator(const DivFreeKernel& kernel, Point2 xF, Point2 xG)
    : impl_(new Impl(kernel, xF, xG)) {}

template <class T>
KernelPairEvaluator<T>::~KernelPairEvaluator() {
    delete impl_;
}

template <class T>
T KernelPairEvaluator<T>::pair(const Functional& F, const Functional& G) {
    return impl_->pair(F, G);
}

template <class T>
T apply_functional_pair(const Functional& F, const Functional& G, const DivFreeKernel& kernel) {
    KernelPairEvaluator<T> ev(kernel, F.anchor, G.anchor);
    return ev.pair(F, G);
}

template void radial_ladder<double>(const KernelSpec&, const double&, int, double*);
template void radial_ladder<BigFloat>(const KernelSpec&, const BigFloat&, int, BigFloat*);
template std::array<double, 5> eval_scalar<double>(const KernelSpec&, const double&);
template std::array<BigFloat, 5> eval_scalar<BigFloat>(const KernelSpec&, const BigFloat&);
template std::array<double, 4> eval_divfree<double>(const DivFreeKernel&, const double&, const double&);
template std::array<BigFloat, 4> eval_divfree<BigFloat>(const DivFreeKernel&, const BigFloat&, const BigFloat&);
template class KernelPairEvaluator<double>;
template class KernelPairEvaluator<BigFloat>;
template double apply_functional_pair<double>(const Functional&, const Functional&, const DivFreeKernel&);
template BigFloat apply_functional_pair<BigFloat>(const Functional&, const Functional&, const DivFreeKernel&);

}  // namespace stokesrbf
