#include "stokesrbf/control.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <fstream>

#include "stokesrbf/lhi_solver.hpp"

namespace stokesrbf {

double smooth_indicator(Point2 x, double radius, double k) {
    return 1.0 / (1.0 + std::exp(-2.0 * k * (radius - std::hypot(x.x, x.y))));
}

namespace {

/// One-step linear propagator of the homogeneous-BC BDF1 recursion
/// y^{n+1} = T (y^n + dt f), plus its plain (euclidean) transpose.
class Propagator {
public:
    virtual ~Propagator() = default;
    virtual std::vector<double> forward(const std::vector<double>& y,
                                        const std::vector<double>& force) const = 0;
    virtual std::vector<double> transpose(const std::vector<double>& z) const = 0;
};

template <class T>
class GlobalPropagator : public Propagator {
public:
    GlobalPropagator(const ControlProblem& pb)
        : sys_(pb.nodes, pb.kernel, BoundaryCondition{pb.bc_kind, BoundaryData::homogeneous()},
               pb.mu, SchemeFlavor::MethodOfLines, bdf_coefficients(1, pb.dt)),
          dt_(pb.dt) {}

    std::vector<double> forward(const std::vector<double>& y,
                                const std::vector<double>& force) const override {
        ScopedDigitsFor<T> guard(sys_.kernel().psi.digits);
        const std::size_t n = sys_.n_coeff(), n_in2 = 2 * sys_.nodes().n_interior();
        std::vector<T> rhs(n, T(0.0));
        for (std::size_t i = 0; i < n_in2; ++i) rhs[i] = T(y[i] + dt_ * force[i]);
        const std::vector<T> alpha = sys_.factors().solve(rhs);
        const std::vector<T> out = sys_.interpolation_matrix().multiply(alpha);
        std::vector<double> res(n);
        for (std::size_t i = 0; i < n; ++i) res[i] = to_double(out[i]);
        return res;
    }

    std::vector<double> transpose(const std::vector<double>& z) const override {
        ScopedDigitsFor<T> guard(sys_.kernel().psi.digits);
        const std::size_t n = sys_.n_coeff(), n_in2 = 2 * sys_.nodes().n_interior();
        std::vector<T> zt(n);
        for (std::size_t i = 0; i < n; ++i) zt[i] = T(z[i]);
        const std::vector<T> u = sys_.interpolation_matrix().multiply_transposed(zt);
        const std::vector<T> s = sys_.factors().solve_transposed(u);
        std::vector<double> res(n, 0.0);
        for (std::size_t i = 0; i < n_in2; ++i) res[i] = to_double(s[i]);
        return res;
    }

private:
    GlobalSystem<T> sys_;
    double dt_;
};

Eigen::SparseMatrix<double> to_eigen_sparse(const SparseMatrix<double>& s) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(s.nnz());
    for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t p = s.row_offsets[i]; p < s.row_offsets[i + 1]; ++p)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(s.col_indices[p]), s.values[p]);
    Eigen::SparseMatrix<double> m(static_cast<int>(s.rows), static_cast<int>(s.cols));
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

template <class T>
class LhiPropagator : public Propagator {
public:
    LhiPropagator(const ControlProblem& pb) : dt_(pb.dt) {
        LhiConfig cfg;
        cfg.kernel = pb.kernel;
        cfg.bc = BoundaryCondition{pb.bc_kind, BoundaryData::homogeneous()};
        cfg.mu = pb.mu;
        cfg.mode = LhiMode::Bdf;
        cfg.scheme = bdf_coefficients(1, pb.dt);
        cfg.estimate_conditioning = false;
        LhiSystem<T> sys = assemble_lhi<T>(pb.nodes, pb.lhi_stencil, cfg);
        n_in_ = pb.nodes.n_interior();
        n_b_ = pb.nodes.n_boundary();
        s_ = to_eigen_sparse(sys.matrix());
        s2_ = to_eigen_sparse(sys.history_block());
        const auto maps = sys.boundary_maps();
        bc_ = to_eigen_sparse(maps.bc);
        bp_ = to_eigen_sparse(maps.bp);
        slu_.compute(s_);
        if (slu_.info() != Eigen::Success) throw SingularMatrix("LHI S factorization failed");
        Eigen::SparseMatrix<double> st = s_.transpose();
        slu_t_.compute(st);
        if (slu_t_.info() != Eigen::Success) throw SingularMatrix("LHI S^T factorization failed");
    }

    std::vector<double> forward(const std::vector<double>& y,
                                const std::vector<double>& force) const override {
        const std::size_t n2 = 2 * n_in_;
        Eigen::VectorXd u(n2);
        for (std::size_t i = 0; i < n2; ++i) u[static_cast<long>(i)] = y[i] + dt_ * force[i];
        Eigen::VectorXd rhs = u - s2_ * u;
        Eigen::VectorXd x = slu_.solve(rhs);
        Eigen::VectorXd yb = bc_ * x + bp_ * u;
        std::vector<double> out(n2 + 2 * n_b_);
        for (std::size_t i = 0; i < n2; ++i) out[i] = x[static_cast<long>(i)];
        for (std::size_t i = 0; i < 2 * n_b_; ++i) out[n2 + i] = yb[static_cast<long>(i)];
        return out;
    }

    std::vector<double> transpose(const std::vector<double>& z) const override {
        const std::size_t n2 = 2 * n_in_;
        Eigen::VectorXd zx(n2), zb(2 * n_b_);
        for (std::size_t i = 0; i < n2; ++i) zx[static_cast<long>(i)] = z[i];
        for (std::size_t i = 0; i < 2 * n_b_; ++i) zb[static_cast<long>(i)] = z[n2 + i];
        // T(s) = (Tc u ; Bc Tc u + Bp u), u = s_x + dt f  with Tc = S^{-1}(I - S2)
        Eigen::VectorXd v = zx + bc_.transpose() * zb;
        Eigen::VectorXd w = slu_t_.solve(v);
        Eigen::VectorXd r = w - s2_.transpose() * w + bp_.transpose() * zb;
        std::vector<double> out(n2 + 2 * n_b_, 0.0);
        for (std::size_t i = 0; i < n2; ++i) out[i] = r[static_cast<long>(i)];
        return out;
    }

private:
    std::size_t n_in_ = 0, n_b_ = 0;
    double dt_;
    Eigen::SparseMatrix<double> s_, s2_, bc_, bp_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> slu_, slu_t_;
};

}  // namespace

struct ControlSetup::Impl {
    ControlProblem pb;
    std::unique_ptr<Propagator> prop;
    std::vector<std::size_t> control_nodes;
    std::vector<double> chi;
    std::vector<double> mass;  // per state dof
    std::size_t n_steps = 0;
    std::size_t n_in = 0, n_b = 0;

    std::pair<std::size_t, std::size_t> dof(std::size_t node) const {
        if (node < n_in) return {node, n_in + node};
        const std::size_t b = node - n_in;
        return {2 * n_in + b, 2 * n_in + n_b + b};
    }

    std::vector<double> nodal_y0() const {
        std::vector<double> y(2 * (n_in + n_b), 0.0);
        if (!pb.y0) return y;
        for (std::size_t i = 0; i < n_in + n_b; ++i) {
            const Vec2 v = pb.y0(pb.nodes.node(i));
            const auto [d0, d1] = dof(i);
            y[d0] = v.x;
            y[d1] = v.y;
        }
        return y;
    }

    ControlTrajectory run(const ControlField& v, bool zero_ic) const;
};

ControlSetup::ControlSetup(ControlProblem problem) : impl_(std::make_unique<Impl>()) {
    Impl& im = *impl_;
    im.pb = std::move(problem);
    const ControlProblem& pb = im.pb;
    if (pb.c1_inv <= 0.0 && pb.c2_inv <= 0.0)
        throw ConfigError("at least one regularization weight must be enabled");
    if (pb.dt <= 0.0 || pb.horizon <= 0.0) throw ConfigError("control needs dt > 0 and T > 0");
    im.n_steps = static_cast<std::size_t>(std::lround(pb.horizon / pb.dt));
    if (im.n_steps < 1) throw ConfigError("horizon shorter than one step");
    im.n_in = pb.nodes.n_interior();
    im.n_b = pb.nodes.n_boundary();

    for (std::size_t i = 0; i < im.n_in; ++i) {
        const double c = smooth_indicator(pb.nodes.interior[i], pb.indicator_radius,
                                          pb.indicator_steepness);
        if (c >= pb.chi_cutoff) {
            im.control_nodes.push_back(i);
            im.chi.push_back(c);
        }
    }
    if (im.control_nodes.empty()) throw ConfigError("no nodes inside the control region");

    const Triangulation tri = triangulate(pb.nodes);
    const std::vector<double> m = lumped_masses(pb.nodes, tri);
    im.mass.resize(2 * (im.n_in + im.n_b));
    for (std::size_t i = 0; i < im.n_in + im.n_b; ++i) {
        if (m[i] <= 0.0) throw DegenerateGeometry("node with empty quadrature support");
        const auto [d0, d1] = im.dof(i);
        im.mass[d0] = m[i];
        im.mass[d1] = m[i];
    }

    if (pb.backend == ControlBackend::Global) {
        if (pb.kernel.psi.digits > 17)
            im.prop = std::make_unique<GlobalPropagator<BigFloat>>(pb);
        else
            im.prop = std::make_unique<GlobalPropagator<double>>(pb);
    } else {
        if (pb.kernel.psi.digits > 17)
            im.prop = std::make_unique<LhiPropagator<BigFloat>>(pb);
        else
            im.prop = std::make_unique<LhiPropagator<double>>(pb);
    }
}

ControlSetup::~ControlSetup() = default;
ControlSetup::ControlSetup(ControlSetup&&) noexcept = default;

const ControlProblem& ControlSetup::problem() const { return impl_->pb; }
std::size_t ControlSetup::n_steps() const { return impl_->n_steps; }
const std::vector<std::size_t>& ControlSetup::control_nodes() const { return impl_->control_nodes; }
const std::vector<double>& ControlSetup::chi() const { return impl_->chi; }
const std::vector<double>& ControlSetup::masses() const { return impl_->mass; }

std::vector<double> ControlSetup::force_field(const std::vector<Vec2>& v) const {
    const Impl& im = *impl_;
    if (v.size() != im.control_nodes.size()) throw ShapeMismatch("control field size mismatch");
    std::vector<double> f(im.mass.size(), 0.0);
    for (std::size_t q = 0; q < v.size(); ++q) {
        const auto [d0, d1] = im.dof(im.control_nodes[q]);
        if (im.pb.component_active(0)) f[d0] = im.chi[q] * v[q].x;
        if (im.pb.component_active(1)) f[d1] = im.chi[q] * v[q].y;
    }
    return f;
}

std::vector<double> ControlSetup::forward_step(const std::vector<double>& y_prev,
                                               const std::vector<double>& force) const {
    return impl_->prop->forward(y_prev, force);
}

std::vector<double> ControlSetup::transpose_step(const std::vector<double>& z) const {
    const Impl& im = *impl_;
    std::vector<double> u(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) u[i] = im.mass[i] * z[i];
    std::vector<double> s = im.prop->transpose(u);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] /= im.mass[i];
    return s;
}

ControlTrajectory ControlSetup::Impl::run(const ControlField& v, bool zero_ic) const {
    if (v.v.size() != n_steps) throw ShapeMismatch("control has wrong number of time slots");
    ControlTrajectory out;
    out.y.reserve(n_steps + 1);
    out.y.push_back(zero_ic ? std::vector<double>(mass.size(), 0.0) : nodal_y0());
    for (std::size_t m = 0; m < n_steps; ++m) {
        std::vector<double> f(mass.size(), 0.0);
        for (std::size_t q = 0; q < control_nodes.size(); ++q) {
            const auto [d0, d1] = dof(control_nodes[q]);
            if (pb.component_active(0)) f[d0] = chi[q] * v.v[m][q].x;
            if (pb.component_active(1)) f[d1] = chi[q] * v.v[m][q].y;
        }
        out.y.push_back(prop->forward(out.y.back(), f));
    }
    return out;
}

ControlTrajectory ControlSetup::solve_forward(const ControlField& v) const {
    ControlTrajectory t = impl_->run(v, false);
    t.j_value = j_value(v, t.y.back());
    return t;
}

ControlTrajectory ControlSetup::solve_forward_zero(const ControlField& v) const {
    return impl_->run(v, true);
}

std::vector<std::vector<double>> ControlSetup::solve_adjoint(const std::vector<double>& y_T) const {
    const Impl& im = *impl_;
    std::vector<std::vector<double>> w(im.n_steps + 1);
    std::vector<double> cur(y_T.size());
    for (std::size_t i = 0; i < y_T.size(); ++i) cur[i] = -im.pb.c1_inv * y_T[i];
    w[im.n_steps] = cur;
    for (std::size_t m = im.n_steps; m-- > 0;) {
        cur = transpose_step(cur);
        w[m] = cur;
    }
    return w;
}

ControlField ControlSetup::gradient(const ControlField& v, const ControlTrajectory&,
                                    const std::vector<std::vector<double>>& adj) const {
    const Impl& im = *impl_;
    if (adj.size() != im.n_steps + 1) throw ShapeMismatch("adjoint trajectory length mismatch");
    ControlField g = ControlField::zeros(im.n_steps, im.control_nodes.size());
    for (std::size_t m = 0; m < im.n_steps; ++m) {
        const std::vector<double>& w = adj[m];  // w^{m} pairs with the control of step m+1
        for (std::size_t q = 0; q < im.control_nodes.size(); ++q) {
            const auto [d0, d1] = im.dof(im.control_nodes[q]);
            Vec2 gv{0.0, 0.0};
            if (im.pb.component_active(0)) {
                gv.x = v.v[m][q].x - im.chi[q] * w[d0];
                if (im.pb.penalized_component == 0) gv.x += im.pb.c2_inv * v.v[m][q].x;
            }
            if (im.pb.component_active(1)) {
                gv.y = v.v[m][q].y - im.chi[q] * w[d1];
                if (im.pb.penalized_component == 1) gv.y += im.pb.c2_inv * v.v[m][q].y;
            }
            g.v[m][q] = gv;
        }
    }
    return g;
}

double ControlSetup::inner(const ControlField& a, const ControlField& b) const {
    const Impl& im = *impl_;
    double s = 0.0;
    for (std::size_t m = 0; m < a.v.size(); ++m)
        for (std::size_t q = 0; q < im.control_nodes.size(); ++q) {
            const double mi = im.mass[im.dof(im.control_nodes[q]).first];
            if (im.pb.component_active(0)) s += mi * a.v[m][q].x * b.v[m][q].x;
            if (im.pb.component_active(1)) s += mi * a.v[m][q].y * b.v[m][q].y;
        }
    return im.pb.dt * s;
}

double ControlSetup::state_mass_norm_sq(const std::vector<double>& y) const {
    const Impl& im = *impl_;
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += im.mass[i] * y[i] * y[i];
    return s;
}

double ControlSetup::j_value(const ControlField& v, const std::vector<double>& y_T) const {
    const Impl& im = *impl_;
    double j = 0.5 * inner(v, v);
    if (im.pb.c2_inv > 0.0 && im.pb.penalized_component >= 0 &&
        im.pb.component_active(im.pb.penalized_component)) {
        double s = 0.0;
        for (std::size_t m = 0; m < v.v.size(); ++m)
            for (std::size_t q = 0; q < im.control_nodes.size(); ++q) {
                const double mi = im.mass[im.dof(im.control_nodes[q]).first];
                const double c = im.pb.penalized_component == 0 ? v.v[m][q].x : v.v[m][q].y;
                s += mi * c * c;
            }
        j += 0.5 * im.pb.c2_inv * im.pb.dt * s;
    }
    j += 0.5 * im.pb.c1_inv * state_mass_norm_sq(y_T);
    return j;
}

namespace {

double penalty_form(const ControlSetup& cs, const ControlProblem& pb, const ControlField& a) {
    if (pb.c2_inv <= 0.0 || pb.penalized_component < 0 ||
        !pb.component_active(pb.penalized_component))
        return 0.0;
    double s = 0.0;
    const auto& nodes = cs.control_nodes();  // interior node ids; dof0 == node id
    for (std::size_t m = 0; m < a.v.size(); ++m)
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double c = pb.penalized_component == 0 ? a.v[m][q].x : a.v[m][q].y;
            s += cs.masses()[nodes[q]] * c * c;
        }
    return pb.c2_inv * pb.dt * s;
}

}  // namespace

ControlSolution cgm_solve(const ControlProblem& problem, double eps, int max_iter) {
    ControlSetup setup(problem);
    return cgm_solve(setup, eps, max_iter);
}

ControlSolution cgm_solve(const ControlSetup& setup, double eps, int max_iter) {
    const ControlProblem& pb = setup.problem();
    const std::size_t N = setup.n_steps();
    const std::size_t W = setup.control_nodes().size();

    ControlField u = ControlField::zeros(N, W);
    ControlTrajectory fwd = setup.solve_forward(u);
    std::vector<std::vector<double>> adj = setup.solve_adjoint(fwd.y.back());
    ControlField g = setup.gradient(u, fwd, adj);
    double gn2 = setup.inner(g, g);
    const double g0n = std::sqrt(gn2);

    ControlSolution sol;
    sol.control_nodes = setup.control_nodes();
    sol.iterations.push_back({0, g0n > 0.0 ? 1.0 : 0.0, fwd.j_value});

    ControlField d = ControlField::zeros(N, W);
    auto axpy = [&](ControlField& y, double a, const ControlField& x) {
        for (std::size_t m = 0; m < y.v.size(); ++m)
            for (std::size_t q = 0; q < y.v[m].size(); ++q) {
                y.v[m][q].x += a * x.v[m][q].x;
                y.v[m][q].y += a * x.v[m][q].y;
            }
    };

    int iter = 0;
    bool converged = g0n == 0.0;
    while (!converged && iter < max_iter) {
        if (iter == 0) {
            axpy(d, -1.0, g);
        }
        // exact step on the quadratic: alpha = -<g,d> / <Qd,d>
        ControlTrajectory hess = setup.solve_forward_zero(d);
        const double qdd = setup.inner(d, d) + penalty_form(setup, pb, d) +
                           pb.c1_inv * setup.state_mass_norm_sq(hess.y.back());
        if (qdd <= 0.0) break;
        const double gd = setup.inner(g, d);
        const double alpha = -gd / qdd;
        axpy(u, alpha, d);
        ++iter;

        fwd = setup.solve_forward(u);
        adj = setup.solve_adjoint(fwd.y.back());
        ControlField gn = setup.gradient(u, fwd, adj);
        const double gn2_new = setup.inner(gn, gn);
        const double residual = std::sqrt(gn2_new) / g0n;
        sol.iterations.push_back({iter, residual, fwd.j_value});
        if (residual <= eps) {
            g = std::move(gn);
            converged = true;
            break;
        }
        const double beta = gn2_new / gn2;
        // d = -g_new + beta d
        for (std::size_t m = 0; m < d.v.size(); ++m)
            for (std::size_t q = 0; q < d.v[m].size(); ++q) {
                d.v[m][q].x = -gn.v[m][q].x + beta * d.v[m][q].x;
                d.v[m][q].y = -gn.v[m][q].y + beta * d.v[m][q].y;
            }
        g = std::move(gn);
        gn2 = gn2_new;
    }

    sol.converged = converged;
    sol.max_iter_exceeded = !converged;

    // Final trajectory and reports.
    fwd = setup.solve_forward(u);
    adj = setup.solve_adjoint(fwd.y.back());
    sol.state = fwd.y;
    sol.adjoint = adj;
    sol.control.assign(N, std::vector<Vec2>(W, Vec2{0.0, 0.0}));
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t q = 0; q < W; ++q) {
            const double c = setup.chi()[q];
            sol.control[m][q] = {pb.component_active(0) ? c * u.v[m][q].x : 0.0,
                                 pb.component_active(1) ? c * u.v[m][q].y : 0.0};
        }
    sol.times.resize(N + 1);
    sol.norm_sq.resize(N + 1);
    for (std::size_t m = 0; m <= N; ++m) {
        sol.times[m] = m * pb.dt;
        sol.norm_sq[m] = setup.state_mass_norm_sq(fwd.y[m]);
    }
    sol.final_norm_sq = sol.norm_sq.back();
    return sol;
}

void write_norms_csv(const std::string& path, const ControlSolution& sol,
                     const std::string& config_echo) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    if (!config_echo.empty()) os << "# " << config_echo << '\n';
    os << "t,norm_sq\n";
    char buf[64];
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g", sol.times[i], sol.norm_sq[i]);
        os << buf << '\n';
    }
}

void write_iterations_csv(const std::string& path, const ControlSolution& sol,
                          const std::string& config_echo) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    if (!config_echo.empty()) os << "# " << config_echo << '\n';
    os << "iter,residual,J\n";
    char buf[80];
    for (const auto& row : sol.iterations) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g", row.iter, row.residual, row.j_value);
        os << buf << '\n';
    }
}

void write_slice_csv(const std::string& path, const ControlSolution& sol, const NodeSet& nodes,
                     double x_plane, double tol, double t0, double t1,
                     const std::string& config_echo) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    if (!config_echo.empty()) os << "# " << config_echo << '\n';
    os << "t,y_coord,y1,y2\n";
    const std::size_t n_in = nodes.n_interior(), n_b = nodes.n_boundary();
    char buf[128];
    for (std::size_t m = 0; m < sol.times.size(); ++m) {
        if (sol.times[m] < t0 - 1e-12 || sol.times[m] > t1 + 1e-12) continue;
        for (std::size_t i = 0; i < nodes.total(); ++i) {
            const Point2 p = nodes.node(i);
            if (std::abs(p.x - x_plane) > tol) continue;
            const std::size_t d0 = i < n_in ? i : 2 * n_in + (i - n_in);
            const std::size_t d1 = i < n_in ? n_in + i : 2 * n_in + n_b + (i - n_in);
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12g,%.12g", sol.times[m], p.y,
                          sol.state[m][d0], sol.state[m][d1]);
            os << buf << '\n';
        }
    }
}

}  // namespace stokesrbf
