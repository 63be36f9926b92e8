#include "stokesrbf/bigfloat.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "stokesrbf/errors.hpp"

namespace stokesrbf {

namespace {
thread_local int g_default_digits = 50;
constexpr double kLog2Of10 = 3.321928094887362;
}  // namespace

void BigFloat::set_default_digits(int digits) {
    if (digits < 2 || digits > 100000) throw ConfigError("BigFloat precision digits out of range");
    g_default_digits = digits;
}

int BigFloat::default_digits() { return g_default_digits; }

mpfr_prec_t BigFloat::bits_for_digits(int digits) {
    return static_cast<mpfr_prec_t>(std::ceil(digits * kLog2Of10)) + 8;
}

mpfr_prec_t BigFloat::default_bits() { return bits_for_digits(g_default_digits); }

int BigFloat::digits() const {
    return static_cast<int>(std::floor((bits() - 8) / kLog2Of10 + 0.5));
}

std::string BigFloat::to_string() const {
    // bits * log10(2) digits identify the value uniquely; two extra to be safe.
    int dec = static_cast<int>(std::ceil(bits() * 0.30102999566398120)) + 2;
    std::vector<char> buf(dec + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", dec - 1, v_);
    return std::string(buf.data());
}

BigFloat BigFloat::from_string(const std::string& s) {
    return from_string(s, g_default_digits);
}

BigFloat BigFloat::from_string(const std::string& s, int digits) {
    BigFloat r;
    mpfr_set_prec(r.v_, bits_for_digits(digits));
    if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
        throw ParseError("unparseable decimal scalar: '" + s + "'");
    return r;
}

BigFloat BigFloat::pi() { return pi(g_default_digits); }

BigFloat BigFloat::pi(int digits) {
    BigFloat r;
    mpfr_set_prec(r.v_, bits_for_digits(digits));
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

}  // namespace stokesrbf
