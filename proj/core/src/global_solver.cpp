#include "stokesrbf/global_solver.hpp"

#include <cmath>
#include <deque>

#include "stokesrbf/parallel.hpp"

namespace stokesrbf {

BoundaryData BoundaryData::homogeneous() {
    BoundaryData d;
    d.velocity = [](Point2, double) { return Vec2{0.0, 0.0}; };
    d.normal = [](Point2, double) { return 0.0; };
    d.tangential_stress = [](Point2, double) { return 0.0; };
    return d;
}

Functional boundary_functional(const NodeSet& nodes, std::size_t g, int i, BcKind kind,
                               double mu, bool stress_extra_mu) {
    const Point2 z = nodes.node(g);
    if (kind == BcKind::Dirichlet) return dirichlet_trace(z, i);
    if (i == 0) return normal_trace(z, nodes.normal_of(g));
    return tangential_stress(z, nodes.normal_of(g), nodes.tangent_of(g), mu, stress_extra_mu);
}

namespace {

/// Row functional of interior node g for component comp, per scheme flavor.
Functional interior_row(const NodeSet& nodes, std::size_t g, int comp, double mu,
                        SchemeFlavor flavor, const BdfScheme& scheme) {
    const Point2 z = nodes.node(g);
    if (flavor == SchemeFlavor::Stationary) return interior_operator(z, comp, mu);
    return modified_interior(z, comp, mu, scheme.dt_beta());
}

}  // namespace

template <class T>
std::vector<Functional> GlobalSystem<T>::column_functionals() const {
    // Ansatz columns: B1(b nodes), B2(b nodes), then the interior family.
    // BackwardModified expands over Lbar columns, the other flavors over L.
    std::vector<Functional> cols(n_coeff());
    const std::size_t n_in = nodes_.n_interior(), n_b = nodes_.n_boundary();
    for (std::size_t b = 0; b < n_b; ++b) {
        const std::size_t g = n_in + b;
        cols[b] = boundary_functional(nodes_, g, 0, bc_.kind, mu_, kernel_.stress_extra_mu);
        cols[n_b + b] = boundary_functional(nodes_, g, 1, bc_.kind, mu_, kernel_.stress_extra_mu);
    }
    for (std::size_t i = 0; i < n_in; ++i) {
        const Point2 z = nodes_.node(i);
        for (int comp = 0; comp < 2; ++comp) {
            Functional f = flavor_ == SchemeFlavor::BackwardModified
                               ? modified_interior(z, comp, mu_, scheme_.dt_beta())
                               : interior_operator(z, comp, mu_);
            cols[2 * n_b + comp * n_in + i] = std::move(f);
        }
    }
    return cols;
}

template <class T>
GlobalSystem<T>::GlobalSystem(NodeSet nodes, DivFreeKernel kernel, BoundaryCondition bc,
                              double mu, SchemeFlavor flavor, BdfScheme scheme)
    : nodes_(std::move(nodes)),
      kernel_(kernel),
      bc_(std::move(bc)),
      mu_(mu),
      flavor_(flavor),
      scheme_(std::move(scheme)) {
    ScopedDigitsFor<T> guard(kernel_.psi.digits);
    const std::size_t n_in = nodes_.n_interior(), n_b = nodes_.n_boundary(), nt = nodes_.total();
    const std::size_t n = n_coeff();
    const std::vector<Functional> cols = column_functionals();

    h_plus_ = DenseMatrix<T>(n, n);
    a_ = DenseMatrix<T>(n, n);

    // Row functionals grouped by anchor node so a node pair shares one
    // evaluator across its 2x2 component block (plus the evaluation rows).
    parallel_for(nt, kernel_.psi.digits, [&](std::size_t r) {
        const Point2 zr = nodes_.node(r);
        Functional row0, row1;
        std::size_t i0, i1;  // H+ row indices for components 0,1
        if (r < n_in) {
            row0 = interior_row(nodes_, r, 0, mu_, flavor_, scheme_);
            row1 = interior_row(nodes_, r, 1, mu_, flavor_, scheme_);
            i0 = r;
            i1 = n_in + r;
        } else {
            const std::size_t b = r - n_in;
            row0 = boundary_functional(nodes_, r, 0, bc_.kind, mu_, kernel_.stress_extra_mu);
            row1 = boundary_functional(nodes_, r, 1, bc_.kind, mu_, kernel_.stress_extra_mu);
            i0 = 2 * n_in + b;
            i1 = 2 * n_in + n_b + b;
        }
        // Velocity evaluation rows of A for this node.
        const Functional ev0 = identity_functional(zr, 0);
        const Functional ev1 = identity_functional(zr, 1);
        const std::size_t a0 = r < n_in ? r : 2 * n_in + (r - n_in);
        const std::size_t a1 = r < n_in ? n_in + r : 2 * n_in + n_b + (r - n_in);

        for (std::size_t cnode = 0; cnode < nt; ++cnode) {
            // Column indices owned by this node.
            std::size_t c0, c1;
            if (cnode < n_in) {
                c0 = 2 * n_b + cnode;
                c1 = 2 * n_b + n_in + cnode;
            } else {
                c0 = cnode - n_in;
                c1 = n_b + (cnode - n_in);
            }
            KernelPairEvaluator<T> pe(kernel_, zr, nodes_.node(cnode));
            h_plus_(i0, c0) = pe.pair(row0, cols[c0]);
            h_plus_(i0, c1) = pe.pair(row0, cols[c1]);
            h_plus_(i1, c0) = pe.pair(row1, cols[c0]);
            h_plus_(i1, c1) = pe.pair(row1, cols[c1]);
            a_(a0, c0) = pe.pair(ev0, cols[c0]);
            a_(a0, c1) = pe.pair(ev0, cols[c1]);
            a_(a1, c0) = pe.pair(ev1, cols[c0]);
            a_(a1, c1) = pe.pair(ev1, cols[c1]);
        }
    });

    lu_ = std::make_shared<const LuFactors<T>>(h_plus_, kernel_.psi.digits);
}

template <class T>
DenseMatrix<T> GlobalSystem<T>::h_minus() const {
    const std::size_t n_in = nodes_.n_interior();
    DenseMatrix<T> hm(n_coeff(), n_coeff());
    for (std::size_t i = 0; i < 2 * n_in; ++i)
        for (std::size_t j = 0; j < n_coeff(); ++j) hm(i, j) = a_(i, j);
    return hm;
}

template <class T>
void GlobalSystem<T>::fill_boundary_rows(std::vector<T>& rhs, double t) const {
    const std::size_t n_in = nodes_.n_interior(), n_b = nodes_.n_boundary();
    for (std::size_t b = 0; b < n_b; ++b) {
        const Point2 p = nodes_.boundary[b];
        if (bc_.kind == BcKind::Dirichlet) {
            const Vec2 g = bc_.data.velocity(p, t);
            rhs[2 * n_in + b] = T(g.x);
            rhs[2 * n_in + n_b + b] = T(g.y);
        } else {
            rhs[2 * n_in + b] = T(bc_.data.normal(p, t));
            rhs[2 * n_in + n_b + b] = T(bc_.data.tangential_stress(p, t));
        }
    }
}

template <class T>
std::vector<T> GlobalSystem<T>::solve_rhs(std::vector<T> rhs) const {
    return lu_->solve(rhs);
}

template <class T>
StokesState<T> GlobalSystem<T>::initial_state(const std::function<Vec2(Point2)>& y0,
                                              double t0) const {
    ScopedDigitsFor<T> guard(kernel_.psi.digits);
    const std::size_t n_in = nodes_.n_interior();
    DenseMatrix<T> m(n_coeff(), n_coeff());
    // A's interior velocity rows plus the system's boundary rows.
    for (std::size_t i = 0; i < 2 * n_in; ++i)
        for (std::size_t j = 0; j < n_coeff(); ++j) m(i, j) = a_(i, j);
    for (std::size_t i = 2 * n_in; i < n_coeff(); ++i)
        for (std::size_t j = 0; j < n_coeff(); ++j) m(i, j) = h_plus_(i, j);

    std::vector<T> rhs(n_coeff(), T(0.0));
    for (std::size_t i = 0; i < n_in; ++i) {
        const Vec2 v = y0(nodes_.interior[i]);
        rhs[i] = T(v.x);
        rhs[n_in + i] = T(v.y);
    }
    fill_boundary_rows(rhs, t0);

    LuFactors<T> lu(std::move(m), kernel_.psi.digits);
    StokesState<T> st;
    st.time = t0;
    st.alpha = lu.solve(rhs);
    st.velocity = a_.multiply(st.alpha);
    return st;
}

template <class T>
StokesState<T> GlobalSystem<T>::step(const std::vector<const StokesState<T>*>& history,
                                     const std::function<Vec2(Point2, double)>& f,
                                     double t_next) const {
    if (flavor_ == SchemeFlavor::Stationary)
        throw NumericsError("step() does not apply to the stationary flavor");
    if (static_cast<int>(history.size()) != scheme_.steps)
        throw HistoryMissing("BDF-" + std::to_string(scheme_.steps) + " needs " +
                             std::to_string(scheme_.steps) + " history states");
    ScopedDigitsFor<T> guard(kernel_.psi.digits);
    const std::size_t n_in = nodes_.n_interior();
    std::vector<T> rhs(n_coeff(), T(0.0));
    const T dtb(scheme_.dt_beta());
    T tmp;
    for (std::size_t i = 0; i < n_in; ++i) {
        const Vec2 fv = f(nodes_.interior[i], t_next);
        rhs[i] = dtb * T(fv.x);
        rhs[n_in + i] = dtb * T(fv.y);
        for (int k = 0; k < scheme_.steps; ++k) {
            const T sk(scheme_.sigma[k]);
            addmul(rhs[i], sk, history[k]->velocity[i], tmp);
            addmul(rhs[n_in + i], sk, history[k]->velocity[n_in + i], tmp);
        }
    }
    fill_boundary_rows(rhs, t_next);

    StokesState<T> st;
    st.time = t_next;
    st.alpha = solve_rhs(std::move(rhs));
    st.velocity = a_.multiply(st.alpha);
    return st;
}

template <class T>
StokesState<T> GlobalSystem<T>::solve_stationary(
    const std::function<Vec2(Point2, double)>& f) const {
    if (flavor_ != SchemeFlavor::Stationary)
        throw NumericsError("solve_stationary requires the Stationary flavor");
    ScopedDigitsFor<T> guard(kernel_.psi.digits);
    const std::size_t n_in = nodes_.n_interior();
    std::vector<T> rhs(n_coeff(), T(0.0));
    for (std::size_t i = 0; i < n_in; ++i) {
        const Vec2 fv = f(nodes_.interior[i], 0.0);
        rhs[i] = T(fv.x);
        rhs[n_in + i] = T(fv.y);
    }
    fill_boundary_rows(rhs, 0.0);
    StokesState<T> st;
    st.time = 0.0;
    st.alpha = solve_rhs(std::move(rhs));
    st.velocity = a_.multiply(st.alpha);
    return st;
}

template <class T>
std::vector<PointSample> GlobalSystem<T>::evaluate(const StokesState<T>& state,
                                                   const std::vector<Point2>& points) const {
    ScopedDigitsFor<T> guard(kernel_.psi.digits);
    if (state.alpha.size() != n_coeff()) throw ShapeMismatch("state does not match system");
    const std::vector<Functional> cols = column_functionals();
    std::vector<PointSample> out(points.size());
    double pressure_mean = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) {
        const Point2 p = points[q];
        const Functional e0 = identity_functional(p, 0);
        const Functional e1 = identity_functional(p, 1);
        const Functional pv = pressure_value(p);
        const Functional gx = pressure_gradient(p, 0);
        const Functional gy = pressure_gradient(p, 1);
        T v0(0.0), v1(0.0), pr(0.0), dpx(0.0), dpy(0.0), tmp;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            KernelPairEvaluator<T> pe(kernel_, p, cols[c].anchor);
            addmul(v0, pe.pair(e0, cols[c]), state.alpha[c], tmp);
            addmul(v1, pe.pair(e1, cols[c]), state.alpha[c], tmp);
            addmul(pr, pe.pair(pv, cols[c]), state.alpha[c], tmp);
            addmul(dpx, pe.pair(gx, cols[c]), state.alpha[c], tmp);
            addmul(dpy, pe.pair(gy, cols[c]), state.alpha[c], tmp);
        }
        out[q].velocity = {to_double(v0), to_double(v1)};
        out[q].pressure_gradient = {to_double(dpx), to_double(dpy)};
        out[q].pressure = to_double(pr);
        pressure_mean += out[q].pressure;
    }
    if (!points.empty()) {
        pressure_mean /= static_cast<double>(points.size());
        for (auto& s : out) s.pressure -= pressure_mean;
    }
    return out;
}

template <class T>
std::vector<double> GlobalSystem<T>::divergence(const StokesState<T>& state,
                                                const std::vector<Point2>& points) const {
    ScopedDigitsFor<T> guard(kernel_.psi.digits);
    const std::vector<Functional> cols = column_functionals();
    std::vector<double> out(points.size());
    for (std::size_t q = 0; q < points.size(); ++q) {
        const Functional dv = velocity_divergence(points[q]);
        T acc(0.0), tmp;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            KernelPairEvaluator<T> pe(kernel_, points[q], cols[c].anchor);
            addmul(acc, pe.pair(dv, cols[c]), state.alpha[c], tmp);
        }
        out[q] = to_double(acc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evolution driver
// ---------------------------------------------------------------------------

namespace {

template <class T>
std::vector<T> exact_nodal_velocity(const NodeSet& nodes,
                                    const std::function<Vec2(Point2, double)>& vel, double t) {
    const std::size_t n_in = nodes.n_interior(), n_b = nodes.n_boundary();
    std::vector<T> v(2 * nodes.total());
    for (std::size_t i = 0; i < n_in; ++i) {
        const Vec2 u = vel(nodes.interior[i], t);
        v[i] = T(u.x);
        v[n_in + i] = T(u.y);
    }
    for (std::size_t b = 0; b < n_b; ++b) {
        const Vec2 u = vel(nodes.boundary[b], t);
        v[2 * n_in + b] = T(u.x);
        v[2 * n_in + n_b + b] = T(u.y);
    }
    return v;
}

}  // namespace

template <class T>
EvolutionLog<T> run_evolution(const GlobalSystem<T>& sys, const std::function<Vec2(Point2)>& y0,
                              const std::function<Vec2(Point2, double)>& f,
                              const EvolutionOptions& opts) {
    ScopedDigitsFor<T> guard(sys.kernel().psi.digits);
    const NodeSet& nodes = sys.nodes();
    const BdfScheme& scheme = sys.scheme();
    const double dt = scheme.dt;
    if (dt <= 0.0) throw ConfigError("evolution requires dt > 0");
    const std::size_t n_in = nodes.n_interior();

    EvolutionLog<T> log;
    auto wrap_y0 = [&](Point2 p, double) { return y0(p); };

    std::deque<StokesState<T>> hist;
    {
        StokesState<T> s0;
        s0.time = 0.0;
        s0.velocity = exact_nodal_velocity<T>(nodes, wrap_y0, 0.0);
        hist.push_back(std::move(s0));
    }
    const double y0_scale = std::max(1.0, norm_inf(hist.front().velocity));

    if (opts.t_end <= 0.5 * dt) {
        log.final_state = sys.initial_state(y0, 0.0);
        log.times.push_back(0.0);
        if (opts.exact) {
            log.err_y_inf.push_back(0.0);
            log.err_gradp_inf.push_back(0.0);
        }
        return log;
    }

    // Missing history states for multistep schemes.
    if (scheme.steps > 1) {
        if (opts.bootstrap == BootstrapMode::ExactSolution) {
            if (!opts.exact) throw ConfigError("exact-solution bootstrap needs an exact solution");
            for (int k = 1; k < scheme.steps; ++k) {
                StokesState<T> s;
                s.time = k * dt;
                s.velocity = exact_nodal_velocity<T>(nodes, opts.exact->velocity, s.time);
                hist.push_back(std::move(s));
            }
        } else {
            GlobalSystem<T> sub(nodes, sys.kernel(), sys.bc(), sys.mu(), sys.flavor(),
                                bdf_coefficients(1, dt / 4.0));
            for (int k = 1; k < scheme.steps; ++k) {
                StokesState<T> cur = hist.back();
                for (int j = 0; j < 4; ++j) {
                    const double t_next = (k - 1) * dt + (j + 1) * dt / 4.0;
                    cur = sub.step({&cur}, f, t_next);
                }
                cur.time = k * dt;
                hist.push_back(std::move(cur));
            }
        }
    }

    // Pressure-gradient rows at interior nodes, for the error log.
    DenseMatrix<T> m_gp;
    if (opts.exact) {
        const std::vector<Functional> cols = sys.column_functionals();
        m_gp = DenseMatrix<T>(2 * n_in, sys.n_coeff());
        parallel_for(n_in, sys.kernel().psi.digits, [&](std::size_t i) {
            const Point2 z = nodes.interior[i];
            const Functional gx = pressure_gradient(z, 0);
            const Functional gy = pressure_gradient(z, 1);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                KernelPairEvaluator<T> pe(sys.kernel(), z, cols[c].anchor);
                m_gp(i, c) = pe.pair(gx, cols[c]);
                m_gp(n_in + i, c) = pe.pair(gy, cols[c]);
            }
        });
    }

    auto record = [&](const StokesState<T>& st) {
        log.times.push_back(st.time);
        if (!opts.exact) return;
        double ey = 0.0;
        const auto ex = exact_nodal_velocity<double>(nodes, opts.exact->velocity, st.time);
        for (std::size_t i = 0; i < ex.size(); ++i)
            ey = std::max(ey, std::abs(to_double(st.velocity[i]) - ex[i]));
        double egp = 0.0;
        if (!st.alpha.empty()) {
            const std::vector<T> gp = m_gp.multiply(st.alpha);
            for (std::size_t i = 0; i < n_in; ++i) {
                const Vec2 gpe = opts.exact->pressure_gradient(nodes.interior[i], st.time);
                egp = std::max(egp, std::abs(to_double(gp[i]) - gpe.x));
                egp = std::max(egp, std::abs(to_double(gp[n_in + i]) - gpe.y));
            }
        }
        log.err_y_inf.push_back(ey);
        log.err_gradp_inf.push_back(egp);
        log.max_err_y = std::max(log.max_err_y, ey);
        log.max_err_gradp = std::max(log.max_err_gradp, egp);
    };

    const long n_steps = std::lround(opts.t_end / dt);
    for (long n = scheme.steps - 1; n < n_steps; ++n) {
        std::vector<const StokesState<T>*> hp;
        for (const auto& h : hist) hp.push_back(&h);
        StokesState<T> next = sys.step(hp, f, (n + 1) * dt);
        if (norm_inf(next.velocity) > opts.blowup_factor * y0_scale) {
            log.non_convergence = true;
            log.final_state = std::move(next);
            return log;
        }
        record(next);
        if (opts.record_trajectory) log.trajectory.push_back(next);
        hist.push_back(std::move(next));
        if (static_cast<int>(hist.size()) > scheme.steps) hist.pop_front();
    }
    log.final_state = hist.back();
    return log;
}

template class GlobalSystem<double>;
template class GlobalSystem<BigFloat>;
template EvolutionLog<double> run_evolution<double>(const GlobalSystem<double>&,
                                                    const std::function<Vec2(Point2)>&,
                                                    const std::function<Vec2(Point2, double)>&,
                                                    const EvolutionOptions&);
template EvolutionLog<BigFloat> run_evolution<BigFloat>(const GlobalSystem<BigFloat>&,
                                                        const std::function<Vec2(Point2)>&,
                                                        const std::function<Vec2(Point2, double)>&,
                                                        const EvolutionOptions&);

}  // namespace stokesrbf
