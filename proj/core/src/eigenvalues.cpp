#include "stokesrbf/eigenvalues.hpp"

#include <lapacke.h>

#include "stokesrbf/errors.hpp"

namespace stokesrbf {

std::vector<std::complex<double>> eigenvalues(const DenseMatrix<double>& A) {
    const std::size_t n = A.rows();
    if (n != A.cols()) throw ShapeMismatch("eigenvalues requires a square matrix");
    if (n == 0) return {};
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = A(i, j);
    std::vector<double> wr(n), wi(n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', static_cast<lapack_int>(n), a.data(),
                      static_cast<lapack_int>(n), wr.data(), wi.data(), nullptr,
                      static_cast<lapack_int>(n), nullptr, static_cast<lapack_int>(n));
    if (info > 0) throw NoConvergence("QR eigenvalue iteration exceeded its iteration cap");
    if (info < 0) throw NumericsError("dgeev: illegal argument " + std::to_string(-info));
    std::vector<std::complex<double>> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = {wr[i], wi[i]};
    return ev;
}

}  // namespace stokesrbf
