#include "stokesrbf/lhi_solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <deque>

#include "stokesrbf/parallel.hpp"

namespace stokesrbf {

namespace {

struct LocalIndex {
    std::size_t node;     // global node index
    std::size_t f0, f1;   // local functional indices of components 0,1
};

/// Local nodes with their two functional slots, in (sc, fc, pdec) block order.
std::vector<LocalIndex> local_nodes(const Stencil& st) {
    const std::size_t n_sc = st.sc.size(), n_fc = st.fc.size(), n_pd = st.pdec.size();
    std::vector<LocalIndex> out;
    out.reserve(n_sc + n_fc + n_pd);
    for (std::size_t j = 0; j < n_sc; ++j) out.push_back({st.sc[j], j, n_sc + j});
    for (std::size_t j = 0; j < n_fc; ++j)
        out.push_back({st.fc[j], 2 * n_sc + j, 2 * n_sc + n_fc + j});
    for (std::size_t j = 0; j < n_pd; ++j)
        out.push_back({st.pdec[j], 2 * (n_sc + n_fc) + j, 2 * (n_sc + n_fc) + n_pd + j});
    return out;
}

DivFreeKernel stencil_kernel(const DivFreeKernel& base, double c_star, const Stencil& st) {
    DivFreeKernel k = base;
    if (c_star > 0.0) {
        k.psi.shape = c_star / st.local_h;
        k.phi.shape = c_star / st.local_h;
    }
    return k;
}

}  // namespace

template <class T>
Functional LocalGram<T>::local_functional(const NodeSet& nodes, const LhiConfig& cfg,
                                          std::size_t j) const {
    const Stencil& st = *stencil;
    const std::size_t b0 = 2 * n_sc, l0 = 2 * (n_sc + n_fc);
    if (j < b0) {
        const int comp = j < n_sc ? 0 : 1;
        return identity_functional(nodes.node(st.sc[j % n_sc]), comp);
    }
    if (j < l0) {
        const std::size_t jj = j - b0;
        const int comp = jj < n_fc ? 0 : 1;
        return boundary_functional(nodes, st.fc[jj % n_fc], comp, cfg.bc.kind, cfg.mu,
                                   kernel.stress_extra_mu);
    }
    const std::size_t jj = j - l0;
    const int comp = jj < n_pdec ? 0 : 1;
    const Point2 z = nodes.node(st.pdec[jj % n_pdec]);
    return cfg.mode == LhiMode::Steady
               ? interior_operator(z, comp, cfg.mu)
               : modified_interior(z, comp, cfg.mu, cfg.scheme.dt_beta());
}

template <class T>
LocalGram<T> assemble_local(const Stencil& st, const NodeSet& nodes, const LhiConfig& cfg) {
    LocalGram<T> lg;
    lg.stencil = &st;
    lg.kernel = stencil_kernel(cfg.kernel, cfg.c_star, st);
    lg.n_sc = st.sc.size();
    lg.n_fc = st.fc.size();
    lg.n_pdec = st.pdec.size();
    if (lg.n_pdec == 0) throw StencilTooSmall("stencil has no PDE nodes");
    ScopedDigitsFor<T> guard(lg.kernel.psi.digits);

    const std::size_t m = lg.size();
    std::vector<Functional> fns(m);
    for (std::size_t j = 0; j < m; ++j) fns[j] = lg.local_functional(nodes, cfg, j);

    const std::vector<LocalIndex> locals = local_nodes(st);
    lg.gram = DenseMatrix<T>(m, m);
    for (const LocalIndex& r : locals)
        for (const LocalIndex& c : locals) {
            KernelPairEvaluator<T> pe(lg.kernel, nodes.node(r.node), nodes.node(c.node));
            lg.gram(r.f0, c.f0) = pe.pair(fns[r.f0], fns[c.f0]);
            lg.gram(r.f0, c.f1) = pe.pair(fns[r.f0], fns[c.f1]);
            lg.gram(r.f1, c.f0) = pe.pair(fns[r.f1], fns[c.f0]);
            lg.gram(r.f1, c.f1) = pe.pair(fns[r.f1], fns[c.f1]);
        }

    try {
        lg.lu = std::make_unique<LuFactors<T>>(lg.gram, lg.kernel.psi.digits);
    } catch (const SingularMatrix& e) {
        throw SingularMatrix("local Gram of stencil " + std::to_string(st.center) +
                                 " is singular at the working precision: " + e.what(),
                             e.cond_estimate);
    }
    if (cfg.estimate_conditioning) lg.cond_estimate = lg.lu->cond_estimate();
    return lg;
}

template <class T>
std::vector<T> compute_weights(const LocalGram<T>& local, const NodeSet& nodes,
                               const LhiConfig& cfg, const Functional& target) {
    ScopedDigitsFor<T> guard(local.kernel.psi.digits);
    const std::vector<LocalIndex> locals = local_nodes(*local.stencil);
    const std::size_t m = local.size();
    std::vector<Functional> fns(m);
    for (std::size_t j = 0; j < m; ++j) fns[j] = local.local_functional(nodes, cfg, j);
    std::vector<T> rhs(m, T(0.0));
    for (const LocalIndex& c : locals) {
        KernelPairEvaluator<T> pe(local.kernel, target.anchor, nodes.node(c.node));
        rhs[c.f0] = pe.pair(target, fns[c.f0]);
        rhs[c.f1] = pe.pair(target, fns[c.f1]);
    }
    return local.lu->solve(rhs);
}

// ---------------------------------------------------------------------------
// Sparse global system
// ---------------------------------------------------------------------------

template <class T>
struct LhiSystem<T>::Impl {
    NodeSet nodes;
    std::vector<Stencil> stencils;
    LhiConfig cfg;
    std::size_t n_c = 0;

    struct StencilWeights {
        std::vector<double> w1, w2, wp;
        std::vector<T> w1_hp, w2_hp;
        double shape = 0.0;
    };
    std::vector<StencilWeights> w;
    std::vector<LhiStencilDiagnostics> diag;

    struct BoundaryEval {
        std::size_t owner = static_cast<std::size_t>(-1);
        std::vector<double> we1, we2;
    };
    std::vector<BoundaryEval> bev;

    SparseMatrix<double> S;
    std::optional<SparseMatrix<T>> S_hp;
    Eigen::SparseMatrix<double> S_eigen;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> slu;

    bool is_bdf() const { return cfg.mode == LhiMode::Bdf; }

    // F^{n+s} (or the steady source) of component comp at global interior node g.
    double source_at(std::size_t g, int comp, const std::function<Vec2(Point2, double)>& f,
                     double t, const std::vector<const std::vector<double>*>& history) const {
        const Point2 p = nodes.node(g);
        const Vec2 fv = f(p, t);
        double v = comp == 0 ? fv.x : fv.y;
        if (!is_bdf()) return v;
        v *= cfg.scheme.dt_beta();
        for (std::size_t k = 0; k < history.size(); ++k)
            v += cfg.scheme.sigma[k] * (*history[k])[comp * n_c + g];
        return v;
    }

    double boundary_data(std::size_t g, int comp, double t) const {
        const Point2 p = nodes.node(g);
        if (cfg.bc.kind == BcKind::Dirichlet) {
            const Vec2 gv = cfg.bc.data.velocity(p, t);
            return comp == 0 ? gv.x : gv.y;
        }
        return comp == 0 ? cfg.bc.data.normal(p, t) : cfg.bc.data.tangential_stress(p, t);
    }

    // Full data vector d^(k) given a solved interior field.
    std::vector<double> data_vector(std::size_t k, const std::vector<double>& interior,
                                    const std::vector<const std::vector<double>*>& history,
                                    const std::function<Vec2(Point2, double)>& f, double t) const {
        const Stencil& st = stencils[k];
        const std::size_t n_sc = st.sc.size(), n_fc = st.fc.size(), n_pd = st.pdec.size();
        std::vector<double> d(2 * (n_sc + n_fc + n_pd));
        for (std::size_t j = 0; j < n_sc; ++j) {
            d[j] = interior[st.sc[j]];
            d[n_sc + j] = interior[n_c + st.sc[j]];
        }
        for (std::size_t j = 0; j < n_fc; ++j) {
            d[2 * n_sc + j] = boundary_data(st.fc[j], 0, t);
            d[2 * n_sc + n_fc + j] = boundary_data(st.fc[j], 1, t);
        }
        const std::size_t l0 = 2 * (n_sc + n_fc);
        for (std::size_t j = 0; j < n_pd; ++j) {
            d[l0 + j] = source_at(st.pdec[j], 0, f, t, history);
            d[l0 + n_pd + j] = source_at(st.pdec[j], 1, f, t, history);
        }
        return d;
    }

    // Right-hand side of S u = b: the center source minus the known-data terms.
    std::vector<double> compose_rhs(const std::function<Vec2(Point2, double)>& f, double t,
                                    const std::vector<const std::vector<double>*>& history) const {
        std::vector<double> rhs(2 * n_c, 0.0);
        for (std::size_t k = 0; k < stencils.size(); ++k) {
            const Stencil& st = stencils[k];
            const StencilWeights& sw = w[k];
            const std::size_t n_sc = st.sc.size(), n_fc = st.fc.size(), n_pd = st.pdec.size();
            double r1 = source_at(st.center, 0, f, t, history);
            double r2 = source_at(st.center, 1, f, t, history);
            for (std::size_t j = 0; j < n_fc; ++j) {
                const double g0 = boundary_data(st.fc[j], 0, t);
                const double g1 = boundary_data(st.fc[j], 1, t);
                r1 -= sw.w1[2 * n_sc + j] * g0 + sw.w1[2 * n_sc + n_fc + j] * g1;
                r2 -= sw.w2[2 * n_sc + j] * g0 + sw.w2[2 * n_sc + n_fc + j] * g1;
            }
            const std::size_t l0 = 2 * (n_sc + n_fc);
            for (std::size_t j = 0; j < n_pd; ++j) {
                const double F0 = source_at(st.pdec[j], 0, f, t, history);
                const double F1 = source_at(st.pdec[j], 1, f, t, history);
                r1 -= sw.w1[l0 + j] * F0 + sw.w1[l0 + n_pd + j] * F1;
                r2 -= sw.w2[l0 + j] * F0 + sw.w2[l0 + n_pd + j] * F1;
            }
            rhs[k] = r1;
            rhs[n_c + k] = r2;
        }
        return rhs;
    }
};

template <class T>
LhiSystem<T>::LhiSystem(NodeSet nodes, std::vector<Stencil> stencils, LhiConfig cfg)
    : impl_(std::make_unique<Impl>()) {
    Impl& im = *impl_;
    im.nodes = std::move(nodes);
    im.stencils = std::move(stencils);
    im.cfg = std::move(cfg);
    im.n_c = im.nodes.n_interior();
    if (im.stencils.size() != im.n_c)
        throw ShapeMismatch("LHI expects one stencil per interior node");
    if (im.cfg.mode == LhiMode::Bdf && im.cfg.scheme.dt <= 0.0)
        throw ConfigError("Bdf mode requires a positive dt");

    // Each boundary node is reconstructed from the first stencil containing it.
    im.bev.resize(im.nodes.n_boundary());
    for (std::size_t k = 0; k < im.stencils.size(); ++k)
        for (std::size_t g : im.stencils[k].fc) {
            auto& be = im.bev[g - im.n_c];
            if (be.owner == static_cast<std::size_t>(-1)) be.owner = k;
        }

    im.w.resize(im.n_c);
    im.diag.resize(im.n_c);
    const int digits = im.cfg.kernel.psi.digits;
    parallel_for(im.n_c, digits, [&](std::size_t k) {
        const Stencil& st = im.stencils[k];
        LocalGram<T> lg = assemble_local<T>(st, im.nodes, im.cfg);
        const Point2 zc = im.nodes.node(st.center);
        const Functional j1 = im.cfg.mode == LhiMode::Steady
                                  ? interior_operator(zc, 0, im.cfg.mu)
                                  : modified_interior(zc, 0, im.cfg.mu, im.cfg.scheme.dt_beta());
        const Functional j2 = im.cfg.mode == LhiMode::Steady
                                  ? interior_operator(zc, 1, im.cfg.mu)
                                  : modified_interior(zc, 1, im.cfg.mu, im.cfg.scheme.dt_beta());
        auto& sw = im.w[k];
        sw.w1_hp = compute_weights(lg, im.nodes, im.cfg, j1);
        sw.w2_hp = compute_weights(lg, im.nodes, im.cfg, j2);
        sw.w1.reserve(sw.w1_hp.size());
        sw.w2.reserve(sw.w2_hp.size());
        for (const T& v : sw.w1_hp) sw.w1.push_back(to_double(v));
        for (const T& v : sw.w2_hp) sw.w2.push_back(to_double(v));
        const std::vector<T> wp = compute_weights(lg, im.nodes, im.cfg, pressure_value(zc));
        sw.wp.reserve(wp.size());
        for (const T& v : wp) sw.wp.push_back(to_double(v));
        sw.shape = lg.kernel.psi.shape;

        // Evaluation weights of the boundary nodes this stencil owns.
        for (std::size_t g : st.fc) {
            auto& be = im.bev[g - im.n_c];
            if (be.owner != k) continue;
            const Point2 zb = im.nodes.node(g);
            const std::vector<T> e1 = compute_weights(lg, im.nodes, im.cfg, identity_functional(zb, 0));
            const std::vector<T> e2 = compute_weights(lg, im.nodes, im.cfg, identity_functional(zb, 1));
            be.we1.reserve(e1.size());
            be.we2.reserve(e2.size());
            for (const T& v : e1) be.we1.push_back(to_double(v));
            for (const T& v : e2) be.we2.push_back(to_double(v));
        }

        double wn = 0.0;
        for (double v : sw.w1) wn = std::max(wn, std::abs(v));
        for (double v : sw.w2) wn = std::max(wn, std::abs(v));
        im.diag[k] = {st.center, lg.cond_estimate, wn, lg.kernel.psi.shape};
    });

    // Sparse assembly: unknown velocity coefficients stay in the matrix.
    SparseBuilder<double> sb(2 * im.n_c, 2 * im.n_c);
    std::optional<SparseBuilder<T>> sb_hp;
    if constexpr (std::is_same_v<T, BigFloat>) sb_hp.emplace(2 * im.n_c, 2 * im.n_c);
    for (std::size_t k = 0; k < im.n_c; ++k) {
        const Stencil& st = im.stencils[k];
        const auto& sw = im.w[k];
        const std::size_t n_sc = st.sc.size();
        for (std::size_t j = 0; j < n_sc; ++j) {
            const std::size_t c1 = st.sc[j], c2 = im.n_c + st.sc[j];
            sb.add(k, c1, sw.w1[j]);
            sb.add(k, c2, sw.w1[n_sc + j]);
            sb.add(im.n_c + k, c1, sw.w2[j]);
            sb.add(im.n_c + k, c2, sw.w2[n_sc + j]);
            if (sb_hp) {
                sb_hp->add(k, c1, sw.w1_hp[j]);
                sb_hp->add(k, c2, sw.w1_hp[n_sc + j]);
                sb_hp->add(im.n_c + k, c1, sw.w2_hp[j]);
                sb_hp->add(im.n_c + k, c2, sw.w2_hp[n_sc + j]);
            }
        }
    }
    im.S = sb.build();
    if (sb_hp) im.S_hp = sb_hp->build();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(im.S.nnz());
    for (std::size_t i = 0; i < im.S.rows; ++i)
        for (std::size_t p = im.S.row_offsets[i]; p < im.S.row_offsets[i + 1]; ++p)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(im.S.col_indices[p]),
                              im.S.values[p]);
    im.S_eigen.resize(static_cast<int>(im.S.rows), static_cast<int>(im.S.cols));
    im.S_eigen.setFromTriplets(trip.begin(), trip.end());
    im.S_eigen.makeCompressed();
    im.slu.compute(im.S_eigen);
    if (im.slu.info() != Eigen::Success)
        throw SingularMatrix("sparse LHI matrix factorization failed");
}

template <class T>
LhiSystem<T>::~LhiSystem() = default;
template <class T>
LhiSystem<T>::LhiSystem(LhiSystem&&) noexcept = default;
template <class T>
LhiSystem<T>& LhiSystem<T>::operator=(LhiSystem&&) noexcept = default;

template <class T>
const NodeSet& LhiSystem<T>::nodes() const { return impl_->nodes; }
template <class T>
const LhiConfig& LhiSystem<T>::config() const { return impl_->cfg; }
template <class T>
const std::vector<Stencil>& LhiSystem<T>::stencils() const { return impl_->stencils; }
template <class T>
const SparseMatrix<double>& LhiSystem<T>::matrix() const { return impl_->S; }
template <class T>
const std::vector<LhiStencilDiagnostics>& LhiSystem<T>::diagnostics() const { return impl_->diag; }

template <class T>
SparseMatrix<double> LhiSystem<T>::history_block() const {
    const Impl& im = *impl_;
    SparseBuilder<double> sb(2 * im.n_c, 2 * im.n_c);
    for (std::size_t k = 0; k < im.n_c; ++k) {
        const Stencil& st = im.stencils[k];
        const auto& sw = im.w[k];
        const std::size_t n_sc = st.sc.size(), n_fc = st.fc.size(), n_pd = st.pdec.size();
        const std::size_t l0 = 2 * (n_sc + n_fc);
        for (std::size_t j = 0; j < n_pd; ++j) {
            const std::size_t c1 = st.pdec[j], c2 = im.n_c + st.pdec[j];
            sb.add(k, c1, sw.w1[l0 + j]);
            sb.add(k, c2, sw.w1[l0 + n_pd + j]);
            sb.add(im.n_c + k, c1, sw.w2[l0 + j]);
            sb.add(im.n_c + k, c2, sw.w2[l0 + n_pd + j]);
        }
    }
    return sb.build();
}

template <class T>
typename LhiSystem<T>::BoundaryMaps LhiSystem<T>::boundary_maps() const {
    const Impl& im = *impl_;
    const std::size_t n_b = im.nodes.n_boundary();
    SparseBuilder<double> bc(2 * n_b, 2 * im.n_c);
    SparseBuilder<double> bp(2 * n_b, 2 * im.n_c);
    for (std::size_t b = 0; b < n_b; ++b) {
        const auto& be = im.bev[b];
        if (be.owner == static_cast<std::size_t>(-1))
            throw NumericsError("boundary node " + std::to_string(b) + " not covered by any stencil");
        const Stencil& st = im.stencils[be.owner];
        const std::size_t n_sc = st.sc.size(), n_fc = st.fc.size(), n_pd = st.pdec.size();
        const std::size_t l0 = 2 * (n_sc + n_fc);
        for (std::size_t j = 0; j < n_sc; ++j) {
            bc.add(b, st.sc[j], be.we1[j]);
            bc.add(b, im.n_c + st.sc[j], be.we1[n_sc + j]);
            bc.add(n_b + b, st.sc[j], be.we2[j]);
            bc.add(n_b + b, im.n_c + st.sc[j], be.we2[n_sc + j]);
        }
        for (std::size_t j = 0; j < n_pd; ++j) {
            bp.add(b, st.pdec[j], be.we1[l0 + j]);
            bp.add(b, im.n_c + st.pdec[j], be.we1[l0 + n_pd + j]);
            bp.add(n_b + b, st.pdec[j], be.we2[l0 + j]);
            bp.add(n_b + b, im.n_c + st.pdec[j], be.we2[l0 + n_pd + j]);
        }
    }
    return {bc.build(), bp.build()};
}

template <class T>
typename LhiSystem<T>::SteadyResult LhiSystem<T>::solve_steady(
    const std::function<Vec2(Point2, double)>& f) const {
    const Impl& im = *impl_;
    if (im.cfg.mode != LhiMode::Steady) throw ConfigError("solve_steady requires Steady mode");
    const std::vector<const std::vector<double>*> no_hist;
    std::vector<double> rhs = im.compose_rhs(f, 0.0, no_hist);
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<long>(rhs.size()));
    Eigen::VectorXd x = im.slu.solve(b);

    SteadyResult res;
    res.velocity.assign(x.data(), x.data() + x.size());
    if (im.S_hp) {
        // one multiprecision residual-correction pass
        ScopedDigitsFor<T> guard(im.cfg.kernel.psi.digits);
        std::vector<T> xt(res.velocity.begin(), res.velocity.end());
        std::vector<T> r = im.S_hp->multiply(xt);
        std::vector<double> rd(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) rd[i] = rhs[i] - to_double(r[i]);
        Eigen::Map<const Eigen::VectorXd> rm(rd.data(), static_cast<long>(rd.size()));
        Eigen::VectorXd dx = im.slu.solve(rm);
        for (std::size_t i = 0; i < res.velocity.size(); ++i) res.velocity[i] += dx[i];
    }

    res.pressure.resize(im.n_c);
    for (std::size_t k = 0; k < im.n_c; ++k) {
        const std::vector<double> d = im.data_vector(k, res.velocity, no_hist, f, 0.0);
        double p = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) p += im.w[k].wp[j] * d[j];
        res.pressure[k] = p;
    }
    return res;
}

template <class T>
std::vector<double> LhiSystem<T>::step(const std::vector<const std::vector<double>*>& history,
                                       const std::function<Vec2(Point2, double)>& f,
                                       double t_next) const {
    const Impl& im = *impl_;
    if (im.cfg.mode != LhiMode::Bdf) throw ConfigError("step requires Bdf mode");
    if (static_cast<int>(history.size()) != im.cfg.scheme.steps)
        throw HistoryMissing("BDF-" + std::to_string(im.cfg.scheme.steps) + " needs " +
                             std::to_string(im.cfg.scheme.steps) + " history states");
    std::vector<double> rhs = im.compose_rhs(f, t_next, history);
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<long>(rhs.size()));
    Eigen::VectorXd x = im.slu.solve(b);
    return std::vector<double>(x.data(), x.data() + x.size());
}

template <class T>
Vec2 LhiSystem<T>::boundary_velocity(std::size_t b, const std::vector<double>& interior,
                                     const std::vector<const std::vector<double>*>& history,
                                     const std::function<Vec2(Point2, double)>& f,
                                     double t) const {
    const Impl& im = *impl_;
    const auto& be = im.bev.at(b);
    if (be.owner == static_cast<std::size_t>(-1))
        throw NumericsError("boundary node " + std::to_string(b) + " not covered by any stencil");
    const std::vector<double> d = im.data_vector(be.owner, interior, history, f, t);
    Vec2 v{0.0, 0.0};
    for (std::size_t j = 0; j < d.size(); ++j) {
        v.x += be.we1[j] * d[j];
        v.y += be.we2[j] * d[j];
    }
    return v;
}

// ---------------------------------------------------------------------------
// Evolution driver
// ---------------------------------------------------------------------------

template <class T>
LhiStepLog<T> lhi_run_evolution(const LhiSystem<T>& sys, const std::function<Vec2(Point2)>& y0,
                                const std::function<Vec2(Point2, double)>& f,
                                const LhiEvolutionOptions& opts) {
    const NodeSet& nodes = sys.nodes();
    const LhiConfig& cfg = sys.config();
    if (cfg.mode != LhiMode::Bdf) throw ConfigError("evolution requires Bdf mode");
    const BdfScheme& scheme = cfg.scheme;
    const double dt = scheme.dt;
    const std::size_t n_c = nodes.n_interior();

    auto nodal = [&](const std::function<Vec2(Point2, double)>& fn, double t) {
        std::vector<double> v(2 * n_c);
        for (std::size_t i = 0; i < n_c; ++i) {
            const Vec2 u = fn(nodes.interior[i], t);
            v[i] = u.x;
            v[n_c + i] = u.y;
        }
        return v;
    };

    LhiStepLog<T> log;
    std::deque<std::vector<double>> hist;
    hist.push_back(nodal([&](Point2 p, double) { return y0(p); }, 0.0));
    const double y0_scale = std::max(1.0, norm_inf(hist.front()));

    if (scheme.steps > 1) {
        if (opts.bootstrap == BootstrapMode::ExactSolution) {
            if (!opts.exact) throw ConfigError("exact-solution bootstrap needs an exact solution");
            for (int k = 1; k < scheme.steps; ++k) hist.push_back(nodal(opts.exact->velocity, k * dt));
        } else {
            LhiConfig sub_cfg = cfg;
            sub_cfg.scheme = bdf_coefficients(1, dt / 4.0);
            sub_cfg.estimate_conditioning = false;
            LhiSystem<T> sub(nodes, sys.stencils(), sub_cfg);
            for (int k = 1; k < scheme.steps; ++k) {
                std::vector<double> cur = hist.back();
                for (int j = 0; j < 4; ++j) {
                    const double t_next = (k - 1) * dt + (j + 1) * dt / 4.0;
                    cur = sub.step({&cur}, f, t_next);
                }
                hist.push_back(std::move(cur));
            }
        }
    }

    auto record = [&](const std::vector<double>& v, double t) {
        log.times.push_back(t);
        if (!opts.exact) return;
        double e = 0.0;
        for (std::size_t i = 0; i < n_c; ++i) {
            const Vec2 u = opts.exact->velocity(nodes.interior[i], t);
            e = std::max(e, std::abs(v[i] - u.x));
            e = std::max(e, std::abs(v[n_c + i] - u.y));
        }
        log.err_y_inf.push_back(e);
        log.max_err_y = std::max(log.max_err_y, e);
    };

    const long n_steps = std::lround(opts.t_end / dt);
    for (long n = scheme.steps - 1; n < n_steps; ++n) {
        std::vector<const std::vector<double>*> hp;
        for (const auto& h : hist) hp.push_back(&h);
        std::vector<double> next = sys.step(hp, f, (n + 1) * dt);
        if (norm_inf(next) > opts.blowup_factor * y0_scale) {
            log.non_convergence = true;
            log.final_velocity = std::move(next);
            return log;
        }
        record(next, (n + 1) * dt);
        if (opts.record_trajectory) log.trajectory.push_back(next);
        hist.push_back(std::move(next));
        if (static_cast<int>(hist.size()) > scheme.steps) hist.pop_front();
    }
    log.final_velocity = hist.back();
    return log;
}

template struct LocalGram<double>;
template struct LocalGram<BigFloat>;
template LocalGram<double> assemble_local<double>(const Stencil&, const NodeSet&, const LhiConfig&);
template LocalGram<BigFloat> assemble_local<BigFloat>(const Stencil&, const NodeSet&, const LhiConfig&);
template std::vector<double> compute_weights<double>(const LocalGram<double>&, const NodeSet&,
                                                     const LhiConfig&, const Functional&);
template std::vector<BigFloat> compute_weights<BigFloat>(const LocalGram<BigFloat>&, const NodeSet&,
                                                         const LhiConfig&, const Functional&);
template class LhiSystem<double>;
template class LhiSystem<BigFloat>;
template LhiStepLog<double> lhi_run_evolution<double>(const LhiSystem<double>&,
                                                      const std::function<Vec2(Point2)>&,
                                                      const std::function<Vec2(Point2, double)>&,
                                                      const LhiEvolutionOptions&);
template LhiStepLog<BigFloat> lhi_run_evolution<BigFloat>(const LhiSystem<BigFloat>&,
                                                          const std::function<Vec2(Point2)>&,
                                                          const std::function<Vec2(Point2, double)>&,
                                                          const LhiEvolutionOptions&);

}  // namespace stokesrbf
