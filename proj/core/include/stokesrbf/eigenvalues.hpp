#pragma once

#include <complex>
#include <vector>

#include "stokesrbf/dense.hpp"

namespace stokesrbf {

/// All eigenvalues of a square matrix, unordered. Multiprecision input is
/// down-converted to double first: the stability classifier only needs
/// sign/magnitude of |lambda| relative to a region boundary.
std::vector<std::complex<double>> eigenvalues(const DenseMatrix<double>& A);

template <class T>
std::vector<std::complex<double>> eigenvalues(const DenseMatrix<T>& A) {
    return eigenvalues(A.to_double_matrix());
}

}  // namespace stokesrbf
