#include "stokesrbf/stability.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <fstream>

#include "stokesrbf/eigenvalues.hpp"
#include "stokesrbf/parallel.hpp"

namespace stokesrbf {

namespace {

using cd = std::complex<double>;

cd principal_cbrt(cd z) {
    const double r = std::abs(z);
    if (r == 0.0) return {0.0, 0.0};
    const double th = std::arg(z);
    return std::polar(std::cbrt(r), th / 3.0);
}

}  // namespace

std::vector<cd> bdf_pi_roots(const BdfScheme& scheme, cd lambda) {
    const auto& s = scheme.sigma;
    switch (scheme.steps) {
        case 1:
            return {lambda * s[0]};
        case 2: {
            // r^2 - lambda sigma1 r - lambda sigma0 = 0
            const cd b = -lambda * s[1], c = -lambda * s[0];
            const cd disc = std::sqrt(b * b - 4.0 * c);
            return {(-b + disc) / 2.0, (-b - disc) / 2.0};
        }
        case 3: {
            // r^3 + a2 r^2 + a1 r + a0, Cardano with complex coefficients
            const cd a2 = -lambda * s[2], a1 = -lambda * s[1], a0 = -lambda * s[0];
            const cd p = a1 - a2 * a2 / 3.0;
            const cd q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
            const cd shift = -a2 / 3.0;
            if (std::abs(p) < 1e-300 && std::abs(q) < 1e-300) return {shift, shift, shift};
            const cd d = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
            cd u = principal_cbrt(-q / 2.0 + d);
            if (std::abs(u) < 1e-150) u = principal_cbrt(-q / 2.0 - d);
            const cd w{-0.5, 0.8660254037844386};  // primitive cube root of unity
            std::vector<cd> roots(3);
            cd uk = u;
            for (int k = 0; k < 3; ++k) {
                roots[k] = uk - p / (3.0 * uk) + shift;
                uk *= w;
            }
            return roots;
        }
        default:
            throw UnsupportedOrder("root condition implemented for s <= 3");
    }
}

double StabilityRegion::max_root_magnitude(cd lambda) const {
    double m = 0.0;
    for (const cd& r : bdf_pi_roots(scheme, lambda)) m = std::max(m, std::abs(r));
    return m;
}

RegionLocation StabilityRegion::classify(cd lambda) const {
    const double m = max_root_magnitude(lambda);
    if (m < 1.0 - kBoundaryBand) return RegionLocation::Inside;
    if (m > 1.0 + kBoundaryBand) return RegionLocation::Outside;
    return RegionLocation::Boundary;
}

StabilityRegion bdf_region(int s, int n_samples) {
    StabilityRegion region;
    region.steps = s;
    region.scheme = bdf_coefficients(s);
    region.locus.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double th = 2.0 * M_PI * i / n_samples;
        const cd r = std::polar(1.0, th);
        cd rs(1.0, 0.0), denom(0.0, 0.0), rk(1.0, 0.0);
        for (int k = 0; k < s; ++k) {
            denom += region.scheme.sigma[k] * rk;
            rk *= r;
        }
        rs = rk;  // r^s
        region.locus.push_back(rs / denom);
    }
    return region;
}

template <class T>
DenseMatrix<T> global_amplification(const DenseMatrix<T>& A, const LuFactors<T>& h_plus,
                                    const DenseMatrix<T>& h_minus) {
    const std::size_t n = A.rows();
    if (A.cols() != n || h_minus.rows() != n || h_minus.cols() != n || h_plus.size() != n)
        throw ShapeMismatch("amplification factors must be square and compatible");

    // Y = H+^{-1} H-
    DenseMatrix<T> y(n, n);
    parallel_for(n, [&](std::size_t j) {
        std::vector<T> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = h_minus(i, j);
        col = h_plus.solve(col);
        for (std::size_t i = 0; i < n; ++i) y(i, j) = col[i];
    });

    // Z = A Y
    DenseMatrix<T> z(n, n);
    parallel_for(n, [&](std::size_t i) {
        T tmp;
        for (std::size_t j = 0; j < n; ++j) {
            T acc(0.0);
            for (std::size_t k = 0; k < n; ++k) addmul(acc, A(i, k), y(k, j), tmp);
            z(i, j) = std::move(acc);
        }
    });

    // K A = Z  =>  row_r(K) solves A^T x = row_r(Z)^T
    LuFactors<T> alu(A, default_precision_digits<T>());
    DenseMatrix<T> k(n, n);
    parallel_for(n, [&](std::size_t r) {
        std::vector<T> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = z(r, j);
        row = alu.solve_transposed(row);
        for (std::size_t j = 0; j < n; ++j) k(r, j) = row[j];
    });
    return k;
}

DenseMatrix<double> lhi_amplification(const SparseMatrix<double>& s1,
                                      const SparseMatrix<double>& s2) {
    if (s1.rows != s1.cols || s2.rows != s2.cols || s1.rows != s2.rows)
        throw ShapeMismatch("S1, S2 must be square of equal size");
    const std::size_t n = s1.rows;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(s1.nnz());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = s1.row_offsets[i]; p < s1.row_offsets[i + 1]; ++p)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(s1.col_indices[p]),
                              s1.values[p]);
    Eigen::SparseMatrix<double> m1(static_cast<int>(n), static_cast<int>(n));
    m1.setFromTriplets(trip.begin(), trip.end());
    m1.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(m1);
    if (lu.info() != Eigen::Success) throw SingularMatrix("S1 factorization failed");

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(static_cast<long>(n), static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = s2.row_offsets[i]; p < s2.row_offsets[i + 1]; ++p)
            rhs(static_cast<long>(i), static_cast<long>(s2.col_indices[p])) -= s2.values[p];

    DenseMatrix<double> out(n, n);
    Eigen::MatrixXd x = lu.solve(rhs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = x(static_cast<long>(i), static_cast<long>(j));
    return out;
}

template <class T>
StabilityReport stability_report(const DenseMatrix<T>& amplification,
                                 const StabilityRegion& region, std::string config_echo) {
    StabilityReport rep;
    rep.config_echo = std::move(config_echo);
    rep.eigenvalues = eigenvalues(amplification);
    rep.location.reserve(rep.eigenvalues.size());
    for (const cd& ev : rep.eigenvalues) {
        const RegionLocation loc = region.classify(ev);
        rep.location.push_back(loc);
        if (loc == RegionLocation::Outside) ++rep.n_outside;
    }
    return rep;
}

void write_eigenvalues_csv(const std::string& path, const StabilityReport& report) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    if (!report.config_echo.empty()) os << "# " << report.config_echo << '\n';
    os << "re,im,inside\n";
    char buf[96];
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        const int inside = report.location[i] == RegionLocation::Outside ? 0 : 1;
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d", report.eigenvalues[i].real(),
                      report.eigenvalues[i].imag(), inside);
        os << buf << '\n';
    }
}

void write_locus_csv(const std::string& path, const StabilityRegion& region,
                     const std::string& config_echo) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    if (!config_echo.empty()) os << "# " << config_echo << '\n';
    os << "re,im\n";
    char buf[64];
    for (const cd& z : region.locus) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g", z.real(), z.imag());
        os << buf << '\n';
    }
}

template DenseMatrix<double> global_amplification<double>(const DenseMatrix<double>&,
                                                          const LuFactors<double>&,
                                                          const DenseMatrix<double>&);
template DenseMatrix<BigFloat> global_amplification<BigFloat>(const DenseMatrix<BigFloat>&,
                                                              const LuFactors<BigFloat>&,
                                                              const DenseMatrix<BigFloat>&);
template StabilityReport stability_report<double>(const DenseMatrix<double>&,
                                                  const StabilityRegion&, std::string);
template StabilityReport stability_report<BigFloat>(const DenseMatrix<BigFloat>&,
                                                    const StabilityRegion&, std::string);

}  // namespace stokesrbf
