#pragma once

#include <cstddef>
#include <vector>

#include "stokesrbf/bigfloat.hpp"
#include "stokesrbf/dense.hpp"
#include "stokesrbf/errors.hpp"

namespace stokesrbf {

/// Compressed-row sparse matrix. Column indices are strictly increasing
/// within each row, offsets monotone.
template <class T>
struct SparseMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> row_offsets;  // rows+1 entries
    std::vector<std::size_t> col_indices;
    std::vector<T> values;

    std::size_t nnz() const { return values.size(); }

    void validate() const {
        if (row_offsets.size() != rows + 1) throw ShapeMismatch("bad row offset table");
        if (row_offsets.front() != 0 || row_offsets.back() != values.size())
            throw ShapeMismatch("offsets do not span the value array");
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_offsets[i] > row_offsets[i + 1]) throw ShapeMismatch("offsets not monotone");
            for (std::size_t k = row_offsets[i] + 1; k < row_offsets[i + 1]; ++k)
                if (col_indices[k - 1] >= col_indices[k])
                    throw ShapeMismatch("column indices not strictly increasing");
        }
    }

    std::vector<T> multiply(const std::vector<T>& x) const {
        if (x.size() != cols) throw ShapeMismatch("spmv size mismatch");
        std::vector<T> y(rows, T(0.0));
        T tmp;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
                addmul(y[i], values[k], x[col_indices[k]], tmp);
        return y;
    }

    DenseMatrix<T> to_dense() const {
        DenseMatrix<T> d(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
                d(i, col_indices[k]) = values[k];
        return d;
    }

    SparseMatrix<double> to_double_sparse() const {
        SparseMatrix<double> s;
        s.rows = rows;
        s.cols = cols;
        s.row_offsets = row_offsets;
        s.col_indices = col_indices;
        s.values.reserve(values.size());
        for (const T& v : values) s.values.push_back(to_double(v));
        return s;
    }
};

/// Triplet accumulator; duplicate entries are summed.
template <class T>
class SparseBuilder {
public:
    SparseBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    void add(std::size_t i, std::size_t j, T v) {
        if (i >= rows_ || j >= cols_) throw ShapeMismatch("triplet out of range");
        trip_.push_back({i, j, std::move(v)});
    }

    SparseMatrix<T> build() {
        std::sort(trip_.begin(), trip_.end(), [](const Trip& a, const Trip& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        SparseMatrix<T> s;
        s.rows = rows_;
        s.cols = cols_;
        s.row_offsets.assign(rows_ + 1, 0);
        for (std::size_t t = 0; t < trip_.size(); ++t) {
            if (t > 0 && trip_[t].i == trip_[t - 1].i && trip_[t].j == trip_[t - 1].j) {
                s.values.back() += trip_[t].v;
            } else {
                s.col_indices.push_back(trip_[t].j);
                s.values.push_back(trip_[t].v);
                ++s.row_offsets[trip_[t].i + 1];
            }
        }
        for (std::size_t i = 0; i < rows_; ++i) s.row_offsets[i + 1] += s.row_offsets[i];
        s.validate();
        return s;
    }

private:
    struct Trip {
        std::size_t i, j;
        T v;
    };
    std::size_t rows_, cols_;
    std::vector<Trip> trip_;
};

struct SparseSolveOptions {
    enum class Method { Direct, BiCgStab };
    Method method = Method::Direct;
    double residual_tol = 1e-12;  // on ||Sx-b||_inf relative to problem scale
    int max_iterations = 2000;
};

/// Direct (default) or iterative solve in double precision.
std::vector<double> sparse_solve(const SparseMatrix<double>& S, const std::vector<double>& b,
                                 const SparseSolveOptions& opts = {});

/// Full-precision direct solve (densify + multiprecision LU).
std::vector<BigFloat> sparse_solve(const SparseMatrix<BigFloat>& S, const std::vector<BigFloat>& b,
                                   const SparseSolveOptions& opts = {});

}  // namespace stokesrbf
