#include "stokesrbf/sparse.hpp"

#include <Eigen/Sparse>
#include <algorithm>

namespace stokesrbf {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix<double>& S) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(S.nnz());
    for (std::size_t i = 0; i < S.rows; ++i)
        for (std::size_t k = S.row_offsets[i]; k < S.row_offsets[i + 1]; ++k)
            t.emplace_back(static_cast<int>(i), static_cast<int>(S.col_indices[k]), S.values[k]);
    Eigen::SparseMatrix<double> m(static_cast<int>(S.rows), static_cast<int>(S.cols));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

double problem_scale(const SparseMatrix<double>& S, const std::vector<double>& x,
                     const std::vector<double>& b) {
    double smax = 0.0;
    for (double v : S.values) smax = std::max(smax, std::abs(v));
    return std::max({smax * norm_inf(x), norm_inf(b), 1.0});
}

}  // namespace

std::vector<double> sparse_solve(const SparseMatrix<double>& S, const std::vector<double>& b,
                                 const SparseSolveOptions& opts) {
    if (S.rows != S.cols) throw ShapeMismatch("sparse solve requires a square matrix");
    if (b.size() != S.rows) throw ShapeMismatch("rhs length mismatch");
    S.validate();
    const Eigen::SparseMatrix<double> A = to_eigen(S);
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<long>(b.size()));
    Eigen::VectorXd x;

    if (opts.method == SparseSolveOptions::Method::Direct) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw SingularMatrix("sparse LU factorization failed");
        x = lu.solve(rhs);
        // one refinement pass tightens the residual on mildly conditioned systems
        Eigen::VectorXd r = rhs - A * x;
        x += lu.solve(r);
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> it;
        it.setTolerance(opts.residual_tol);
        it.setMaxIterations(opts.max_iterations);
        it.compute(A);
        x = it.solve(rhs);
        if (it.info() != Eigen::Success)
            throw NoConvergence("BiCGSTAB did not reach the requested tolerance");
    }

    std::vector<double> out(x.data(), x.data() + x.size());
    std::vector<double> r = S.multiply(out);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    if (norm_inf(r) > opts.residual_tol * problem_scale(S, out, b))
        throw NoConvergence("sparse solve residual above configured tolerance");
    return out;
}

std::vector<BigFloat> sparse_solve(const SparseMatrix<BigFloat>& S, const std::vector<BigFloat>& b,
                                   const SparseSolveOptions&) {
    if (S.rows != S.cols) throw ShapeMismatch("sparse solve requires a square matrix");
    if (b.size() != S.rows) throw ShapeMismatch("rhs length mismatch");
    S.validate();
    LuFactors<BigFloat> lu(S.to_dense());
    return lu.solve(b);
}

}  // namespace stokesrbf
