#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <numeric>
#include <vector>

#include "stokesrbf/bigfloat.hpp"
#include "stokesrbf/errors.hpp"
#include "stokesrbf/parallel.hpp"

namespace stokesrbf {

/// Row-major dense matrix over double or BigFloat.
template <class T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& at(std::size_t i, std::size_t j) {
        if (i >= rows_ || j >= cols_) throw NumericsError("DenseMatrix index out of range");
        return a_[i * cols_ + j];
    }
    const T& at(std::size_t i, std::size_t j) const {
        if (i >= rows_ || j >= cols_) throw NumericsError("DenseMatrix index out of range");
        return a_[i * cols_ + j];
    }
    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    T* row(std::size_t i) { return a_.data() + i * cols_; }
    const T* row(std::size_t i) const { return a_.data() + i * cols_; }

    std::vector<T> multiply(const std::vector<T>& x) const {
        if (x.size() != cols_) throw ShapeMismatch("matrix-vector size mismatch");
        std::vector<T> y(rows_, T(0.0));
        T tmp;
        for (std::size_t i = 0; i < rows_; ++i) {
            const T* r = row(i);
            T acc(0.0);
            for (std::size_t j = 0; j < cols_; ++j) addmul(acc, r[j], x[j], tmp);
            y[i] = std::move(acc);
        }
        return y;
    }

    std::vector<T> multiply_transposed(const std::vector<T>& x) const {
        if (x.size() != rows_) throw ShapeMismatch("matrix^T-vector size mismatch");
        std::vector<T> y(cols_, T(0.0));
        T tmp;
        for (std::size_t i = 0; i < rows_; ++i) {
            const T* r = row(i);
            for (std::size_t j = 0; j < cols_; ++j) addmul(y[j], r[j], x[i], tmp);
        }
        return y;
    }

    double norm_inf() const {  // max row sum
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::abs(to_double((*this)(i, j)));
            best = std::max(best, s);
        }
        return best;
    }
    double norm_1() const {  // max column sum
        std::vector<double> s(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) s[j] += std::abs(to_double((*this)(i, j)));
        double best = 0.0;
        for (double v : s) best = std::max(best, v);
        return best;
    }

    DenseMatrix<double> to_double_matrix() const {
        DenseMatrix<double> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = to_double((*this)(i, j));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

template <class T>
double norm_inf(const std::vector<T>& v) {
    double best = 0.0;
    for (const T& x : v) best = std::max(best, std::abs(to_double(x)));
    return best;
}

/// LU factorization with partial pivoting, kept for reuse across solves.
template <class T>
class LuFactors {
public:
    LuFactors() = default;

    /// Factors A in place. Throws SingularMatrix when a pivot collapses below
    /// the precision floor (max|A| * 10^-(digits+8)).
    explicit LuFactors(DenseMatrix<T> A, int digits = default_precision_digits<T>())
        : lu_(std::move(A)), digits_(digits) {
        const std::size_t n = lu_.rows();
        if (n != lu_.cols()) throw ShapeMismatch("LU requires a square matrix");
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), 0);
        norm1_ = lu_.norm_1();

        double amax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) amax = std::max(amax, std::abs(to_double(lu_(i, j))));
        const T floor_val = pivot_floor(amax, digits);

        double umax = amax > 0.0 ? 0.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (abs_less(lu_(p, k), lu_(i, k))) p = i;
            if (p != k) {
                std::swap(perm_[k], perm_[p]);
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            }
            const T& piv = lu_(k, k);
            if (is_zero(piv) || abs_less(piv, floor_val))
                throw SingularMatrix("pivot below precision floor at column " + std::to_string(k));
            const bool par = n - k > 96 && worker_threads() > 1;
            auto update_row = [&](std::size_t i) {
                T tmp;
                T& lik = lu_(i, k);
                lik /= piv;
                const T* rk = lu_.row(k);
                T* ri = lu_.row(i);
                for (std::size_t j = k + 1; j < n; ++j) submul(ri[j], lik, rk[j], tmp);
            };
            if (par) {
                parallel_for(n - k - 1, digits, [&](std::size_t ii) { update_row(k + 1 + ii); });
            } else {
                for (std::size_t i = k + 1; i < n; ++i) update_row(i);
            }
            for (std::size_t j = k; j < n; ++j)
                umax = std::max(umax, std::abs(to_double(lu_(k, j))));
        }
        growth_ = amax > 0.0 ? umax / amax : 1.0;
    }

    std::size_t size() const { return lu_.rows(); }
    double growth_factor() const { return growth_; }
    int digits() const { return digits_; }

    std::vector<T> solve(const std::vector<T>& b) const {
        if (b.size() != size()) throw ShapeMismatch("rhs length mismatch");
        std::vector<T> x(size());
        for (std::size_t i = 0; i < size(); ++i) x[i] = b[perm_[i]];
        solve_permuted_inplace(x);
        return x;
    }

    /// Solves A^T x = b using the same factors (A^T = U^T L^T P).
    std::vector<T> solve_transposed(const std::vector<T>& b) const {
        const std::size_t n = size();
        if (b.size() != n) throw ShapeMismatch("rhs length mismatch");
        std::vector<T> y = b;
        T tmp;
        // U^T y = b (forward, diagonal from U)
        for (std::size_t j = 0; j < n; ++j) {
            y[j] /= lu_(j, j);
            for (std::size_t i = j + 1; i < n; ++i) submul(y[i], lu_(j, i), y[j], tmp);
        }
        // L^T z = y (backward, unit diagonal)
        for (std::size_t j = n; j-- > 0;) {
            for (std::size_t i = 0; i < j; ++i) submul(y[i], lu_(j, i), y[j], tmp);
        }
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
        return x;
    }

    /// Hager-style 1-norm condition estimate using a few solves.
    double cond_estimate() const {
        const std::size_t n = size();
        if (n == 0) return 0.0;
        std::vector<T> x(n, T(1.0 / static_cast<double>(n)));
        double est = 0.0;
        std::size_t last_j = n;
        for (int it = 0; it < 5; ++it) {
            std::vector<T> y = solve(x);
            double y1 = 0.0;
            for (const T& v : y) y1 += std::abs(to_double(v));
            est = std::max(est, y1);
            std::vector<T> xi(n);
            for (std::size_t i = 0; i < n; ++i) xi[i] = T(to_double(y[i]) >= 0.0 ? 1.0 : -1.0);
            std::vector<T> z = solve_transposed(xi);
            std::size_t j = 0;
            double zmax = -1.0;
            double ztx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double zi = std::abs(to_double(z[i]));
                ztx += to_double(z[i]) * to_double(x[i]);
                if (zi > zmax) { zmax = zi; j = i; }
            }
            if (zmax <= std::abs(ztx) || j == last_j) break;
            last_j = j;
            std::fill(x.begin(), x.end(), T(0.0));
            x[j] = T(1.0);
        }
        return est * norm1_;
    }

private:
    void solve_permuted_inplace(std::vector<T>& x) const {
        const std::size_t n = size();
        T tmp;
        for (std::size_t i = 1; i < n; ++i) {
            const T* ri = lu_.row(i);
            for (std::size_t j = 0; j < i; ++j) submul(x[i], ri[j], x[j], tmp);
        }
        for (std::size_t i = n; i-- > 0;) {
            const T* ri = lu_.row(i);
            for (std::size_t j = i + 1; j < n; ++j) submul(x[i], ri[j], x[j], tmp);
            x[i] /= ri[i];
        }
    }

    static T pivot_floor(double amax, int digits) {
        if (amax == 0.0) return T(0.0);
        double lg = std::log10(amax) - (digits + 8);
        if (lg < -300) return T(0.0);
        return T(std::pow(10.0, lg));
    }

    DenseMatrix<T> lu_;
    std::vector<std::size_t> perm_;
    double growth_ = 1.0;
    double norm1_ = 0.0;
    int digits_ = 16;
};

struct LuSolveInfo {
    double growth = 1.0;
    double cond_estimate = 0.0;
};

/// One-shot LU solve with partial pivoting; reports the growth-factor-based
/// condition diagnostics alongside the solution.
template <class T>
std::vector<T> lu_solve(const DenseMatrix<T>& A, const std::vector<T>& b, LuSolveInfo* info = nullptr) {
    LuFactors<T> f(A);
    if (info) {
        info->growth = f.growth_factor();
        info->cond_estimate = f.cond_estimate();
    }
    return f.solve(b);
}

void dump_matrix(std::ostream& os, const DenseMatrix<double>& m);
void dump_matrix(std::ostream& os, const DenseMatrix<BigFloat>& m);
DenseMatrix<double> load_matrix(std::istream& is);
DenseMatrix<BigFloat> load_matrix_bigfloat(std::istream& is);

}  // namespace stokesrbf
