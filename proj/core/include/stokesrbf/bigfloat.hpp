#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>

namespace stokesrbf {

/// Multiprecision floating-point scalar (binary mantissa/exponent, MPFR
/// backed). The working precision is expressed in decimal digits; every value
/// carries its own precision and binary operations round at the larger of the
/// two operand precisions, so identical inputs give bit-identical results.
class BigFloat {
public:
    BigFloat() { mpfr_init2(v_, default_bits()); mpfr_set_zero(v_, +1); }
    BigFloat(double x) { mpfr_init2(v_, default_bits()); mpfr_set_d(v_, x, MPFR_RNDN); }
    BigFloat(int x) : BigFloat(static_cast<double>(x)) {}
    BigFloat(long x) { mpfr_init2(v_, default_bits()); mpfr_set_si(v_, x, MPFR_RNDN); }

    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~BigFloat() { mpfr_clear(v_); }

    /// Thread-local working precision used for newly constructed values.
    static void set_default_digits(int digits);
    static int default_digits();
    static mpfr_prec_t bits_for_digits(int digits);

    int digits() const;
    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// Decimal serialization with enough digits that parsing at the same
    /// precision recovers the value exactly.
    std::string to_string() const;
    static BigFloat from_string(const std::string& s);
    static BigFloat from_string(const std::string& s, int digits);

    static BigFloat pi();           // at current default precision
    static BigFloat pi(int digits);

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    BigFloat& operator+=(const BigFloat& o) { grow_to(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& o) { grow_to(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& o) { grow_to(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& o) { grow_to(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { a += b; return a; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { a -= b; return a; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { a *= b; return a; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { a /= b; return a; }
    friend BigFloat operator-(BigFloat a) { mpfr_neg(a.v_, a.v_, MPFR_RNDN); return a; }

    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

    /// |a| < |b|, without rounding.
    friend bool abs_less(const BigFloat& a, const BigFloat& b) { return mpfr_cmpabs(a.v_, b.v_) < 0; }

    friend BigFloat abs(BigFloat a) { mpfr_abs(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat sqrt(BigFloat a) { mpfr_sqrt(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat exp(BigFloat a) { mpfr_exp(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat log(BigFloat a) { mpfr_log(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat sin(BigFloat a) { mpfr_sin(a.v_, a.v_, MPFR_RNDN); return a; }
    friend BigFloat cos(BigFloat a) { mpfr_cos(a.v_, a.v_, MPFR_RNDN); return a; }

    /// a -= b*c with a single rounding; tmp supplies scratch space. The result
    /// precision is the largest of the three operands.
    friend void submul(BigFloat& a, const BigFloat& b, const BigFloat& c, BigFloat& tmp) {
        const mpfr_prec_t p = std::max({mpfr_get_prec(a.v_), mpfr_get_prec(b.v_), mpfr_get_prec(c.v_)});
        if (mpfr_get_prec(tmp.v_) != p) mpfr_set_prec(tmp.v_, p);
        if (mpfr_get_prec(a.v_) < p) mpfr_prec_round(a.v_, p, MPFR_RNDN);
        mpfr_fms(tmp.v_, b.v_, c.v_, a.v_, MPFR_RNDN);
        mpfr_neg(a.v_, tmp.v_, MPFR_RNDN);
    }
    /// a += b*c with a single rounding.
    friend void addmul(BigFloat& a, const BigFloat& b, const BigFloat& c, BigFloat& /*tmp*/) {
        const mpfr_prec_t p = std::max({mpfr_get_prec(a.v_), mpfr_get_prec(b.v_), mpfr_get_prec(c.v_)});
        if (mpfr_get_prec(a.v_) < p) mpfr_prec_round(a.v_, p, MPFR_RNDN);
        mpfr_fma(a.v_, b.v_, c.v_, a.v_, MPFR_RNDN);
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

private:
    void grow_to(const BigFloat& o) {
        if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    }
    static mpfr_prec_t default_bits();
    mpfr_t v_;
};

/// Temporarily changes the thread-local default precision.
struct ScopedDigits {
    explicit ScopedDigits(int digits) : saved_(BigFloat::default_digits()) {
        BigFloat::set_default_digits(digits);
    }
    ~ScopedDigits() { BigFloat::set_default_digits(saved_); }
    ScopedDigits(const ScopedDigits&) = delete;
    ScopedDigits& operator=(const ScopedDigits&) = delete;

private:
    int saved_;
};

// Scalar shims so numeric templates can be instantiated with double or BigFloat.
inline double to_double(double x) { return x; }
inline double to_double(const BigFloat& x) { return x.to_double(); }
inline bool abs_less(double a, double b) { return std::abs(a) < std::abs(b); }
inline void submul(double& a, double b, double c, double&) { a -= b * c; }
inline void addmul(double& a, double b, double c, double&) { a += b * c; }
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const BigFloat& x) { return x.is_zero(); }

template <class T>
int default_precision_digits() {
    if constexpr (std::is_same_v<T, BigFloat>)
        return BigFloat::default_digits();
    else
        return 16;
}

/// ScopedDigits when T is BigFloat, no-op otherwise.
template <class T>
struct ScopedDigitsFor {
    explicit ScopedDigitsFor(int) {}
};
template <>
struct ScopedDigitsFor<BigFloat> {
    explicit ScopedDigitsFor(int d) : g(d) {}
    ScopedDigits g;
};

template <class T> struct scalar_name;
template <> struct scalar_name<double> { static constexpr const char* value = "double"; };
template <> struct scalar_name<BigFloat> { static constexpr const char* value = "bigfloat"; };

}  // namespace stokesrbf
