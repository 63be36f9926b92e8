#include "oracles.hpp"

namespace oracles {

std::vector<double> char_poly(const stokesrbf::DenseMatrix<double>& a) {
    using stokesrbf::BigFloat;
    using stokesrbf::DenseMatrix;
    stokesrbf::ScopedDigits guard(50);
    const std::size_t n = a.rows();
    DenseMatrix<BigFloat> m(n, n), acc = DenseMatrix<BigFloat>::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = BigFloat(a(i, j));

    // Faddeev-LeVerrier: M_1 = A, c_{n-1} = -tr(M_1);
    // M_k = A (M_{k-1} + c_{n-k+1} I), c_{n-k} = -tr(M_k)/k.
    std::vector<BigFloat> c(n + 1, BigFloat(0.0));
    c[n] = BigFloat(1.0);
    DenseMatrix<BigFloat> mk(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        // mk = m * acc
        BigFloat tmp;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                BigFloat s(0.0);
                for (std::size_t l = 0; l < n; ++l) addmul(s, m(i, l), acc(l, j), tmp);
                mk(i, j) = std::move(s);
            }
        BigFloat tr(0.0);
        for (std::size_t i = 0; i < n; ++i) tr += mk(i, i);
        c[n - k] = -(tr / BigFloat(static_cast<double>(k)));
        acc = mk;
        for (std::size_t i = 0; i < n; ++i) acc(i, i) += c[n - k];
    }
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out[i] = c[i].to_double();
    return out;  // out[k] multiplies lambda^k, out[n] = 1
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& monic) {
    std::vector<std::complex<double>> c(monic.begin(), monic.end());
    return poly_roots(c);
}

std::vector<std::complex<double>> poly_roots(const std::vector<std::complex<double>>& monic) {
    using cd = std::complex<double>;
    const std::size_t n = monic.size() - 1;
    if (n == 0) return {};
    auto eval = [&](cd z) {
        cd v(0.0, 0.0);
        for (std::size_t k = n + 1; k-- > 0;) v = v * z + monic[k];
        return v;
    };
    // Durand-Kerner from staggered starting points.
    std::vector<cd> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = std::polar(0.4 + 0.9 * (i + 1.0) / n, 2.0 * M_PI * i / n + 0.7);
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cd denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (r[i] - r[j]);
            const cd delta = eval(r[i]) / denom;
            r[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return r;
}

}  // namespace oracles
