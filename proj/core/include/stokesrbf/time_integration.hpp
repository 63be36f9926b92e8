#pragma once

#include <vector>

#include "stokesrbf/errors.hpp"

namespace stokesrbf {

/// Normalized BDF form  y^{n+s} = sum_k sigma_k y^{n+k} - dt beta_s L(...) + dt beta_s f.
struct BdfScheme {
    int steps = 1;
    double beta = 1.0;
    std::vector<double> sigma;  // sigma_0 .. sigma_{s-1} (oldest first)
    double dt = 0.0;

    double dt_beta() const { return dt * beta; }
};

/// Throws UnsupportedOrder outside s in {1,2,3}.
inline BdfScheme bdf_coefficients(int s, double dt = 0.0) {
    switch (s) {
        case 1: return {1, 1.0, {1.0}, dt};
        case 2: return {2, 2.0 / 3.0, {-1.0 / 3.0, 4.0 / 3.0}, dt};
        case 3: return {3, 6.0 / 11.0, {2.0 / 11.0, -9.0 / 11.0, 18.0 / 11.0}, dt};
        default: throw UnsupportedOrder("BDF order must be 1, 2 or 3");
    }
}

/// How the s-1 missing history states of a BDF-s run are produced.
enum class BootstrapMode {
    SubstepBdf1,    // refined backward Euler, dt/4 substeps
    ExactSolution,  // seed from a registered exact solution (test harness use)
};

/// Generates the s-1 missing history states by sub-stepped BDF1 at dt/refine,
/// so the startup error stays below the scheme's asymptotic error.
/// bdf1_step(h, t_target, y) advances one backward-Euler step of size h.
template <class State, class StepFn>
std::vector<State> bdf_bootstrap(const BdfScheme& scheme, State y0, double t0,
                                 const StepFn& bdf1_step, int refine = 4) {
    std::vector<State> hist;
    hist.push_back(std::move(y0));
    const double h = scheme.dt / refine;
    for (int k = 1; k < scheme.steps; ++k) {
        State y = hist.back();
        double t = t0 + (k - 1) * scheme.dt;
        for (int j = 0; j < refine; ++j) {
            t += h;
            y = bdf1_step(h, t, y);
        }
        hist.push_back(std::move(y));
    }
    return hist;
}

/// Least-squares slope of log(err) against log(dt): the observed order.
inline double observed_order(const std::vector<double>& dts, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(dts.size());
    for (int i = 0; i < n; ++i) {
        const double x = std::log(dts[i]), y = std::log(errs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace stokesrbf
