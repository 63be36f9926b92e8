#include "stokesrbf/dense.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace stokesrbf {

namespace {

template <class T, class Fmt>
void dump_impl(std::ostream& os, const DenseMatrix<T>& m, Fmt fmt) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << fmt(m(i, j));
        }
        os << '\n';
    }
}

void read_header(std::istream& is, std::size_t& rows, std::size_t& cols) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty matrix stream", 1);
    std::istringstream hs(line);
    if (!(hs >> rows >> cols)) throw ParseError("expected 'rows cols' header", 1);
}

}  // namespace

void dump_matrix(std::ostream& os, const DenseMatrix<double>& m) {
    dump_impl(os, m, [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    });
}

void dump_matrix(std::ostream& os, const DenseMatrix<BigFloat>& m) {
    dump_impl(os, m, [](const BigFloat& v) { return v.to_string(); });
}

DenseMatrix<double> load_matrix(std::istream& is) {
    std::size_t rows, cols;
    read_header(is, rows, cols);
    DenseMatrix<double> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (!(is >> m(i, j))) throw ParseError("truncated matrix body", static_cast<long>(i + 2));
    return m;
}

DenseMatrix<BigFloat> load_matrix_bigfloat(std::istream& is) {
    std::size_t rows, cols;
    read_header(is, rows, cols);
    DenseMatrix<BigFloat> m(rows, cols);
    std::string tok;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if (!(is >> tok)) throw ParseError("truncated matrix body", static_cast<long>(i + 2));
            m(i, j) = BigFloat::from_string(tok);
        }
    return m;
}

}  // namespace stokesrbf
