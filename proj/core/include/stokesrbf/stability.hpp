#pragma once

#include <complex>
#include <string>
#include <vector>

#include "stokesrbf/dense.hpp"
#include "stokesrbf/sparse.hpp"
#include "stokesrbf/time_integration.hpp"

namespace stokesrbf {

enum class RegionLocation { Inside, Boundary, Outside };

/// Absolute-stability region of the BDF recursion
///   e^{n+s} = lambda sum_k sigma_k e^{n+k},
/// characterized by pi(r, lambda) = r^s - lambda sum_k sigma_k r^k. A point is
/// inside when every root satisfies |r| < 1 (strict, with a declared boundary
/// band of width 2e-9); the locus r = e^{i theta} traces the boundary.
struct StabilityRegion {
    int steps = 1;
    BdfScheme scheme;
    std::vector<std::complex<double>> locus;

    static constexpr double kBoundaryBand = 1e-9;

    /// Root-condition membership test (exact closed-form roots for s <= 3).
    RegionLocation classify(std::complex<double> lambda) const;
    /// max |root| of pi(., lambda).
    double max_root_magnitude(std::complex<double> lambda) const;
};

StabilityRegion bdf_region(int s, int n_samples = 720);

/// Roots of pi(r, lambda) for the given scheme (degree s, closed forms).
std::vector<std::complex<double>> bdf_pi_roots(const BdfScheme& scheme,
                                               std::complex<double> lambda);

/// K = A H+^{-1} H- A^{-1}, computed by two families of linear solves, never
/// explicit inversion.
template <class T>
DenseMatrix<T> global_amplification(const DenseMatrix<T>& A, const LuFactors<T>& h_plus,
                                    const DenseMatrix<T>& h_minus);

template <class T>
DenseMatrix<T> global_amplification(const DenseMatrix<T>& A, const DenseMatrix<T>& h_plus,
                                    const DenseMatrix<T>& h_minus) {
    LuFactors<T> lu(h_plus, default_precision_digits<T>());
    return global_amplification(A, lu, h_minus);
}

/// S1^{-1}(I - S2) from the LHI weight blocks.
DenseMatrix<double> lhi_amplification(const SparseMatrix<double>& s1,
                                      const SparseMatrix<double>& s2);

struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<RegionLocation> location;
    std::size_t n_outside = 0;
    std::string config_echo;

    bool all_inside() const { return n_outside == 0; }
};

template <class T>
StabilityReport stability_report(const DenseMatrix<T>& amplification, const StabilityRegion& region,
                                 std::string config_echo = {});

void write_eigenvalues_csv(const std::string& path, const StabilityReport& report);
void write_locus_csv(const std::string& path, const StabilityRegion& region,
                     const std::string& config_echo = {});

}  // namespace stokesrbf
