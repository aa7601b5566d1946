#ifndef HGM_BIGFLOAT_HPP
#define HGM_BIGFLOAT_HPP

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hgm/errors.hpp"

namespace hgm {

// Decimal digits -> mpfr bits, with guard bits so that one rounded
// operation stays below 10^(1-D) relative error.
inline mpfr_prec_t bits_for_digits(int digits) {
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

inline int digits_for_bits(mpfr_prec_t bits) {
    return static_cast<int>(std::lround((static_cast<double>(bits) - 8) / 3.3219280948873623));
}

int current_digits();
void set_current_digits(int digits);

// RAII guard for the thread-local working precision (decimal digits).
class PrecisionScope {
    int saved_;

public:
    explicit PrecisionScope(int digits) : saved_(current_digits()) { set_current_digits(digits); }
    ~PrecisionScope() { set_current_digits(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;
};

// Arbitrary-precision real backed by mpfr. Every value carries the
// precision it was created with; binary operations between values of
// different precision throw PrecisionMismatchError (one computation
// context = one precision). Operations with int/double operands are
// allowed at the BigFloat operand's precision (exact inputs).
class BigFloat {
    mpfr_t v_;

    static void check_same(const BigFloat& a, const BigFloat& b) {
        if (mpfr_get_prec(a.v_) != mpfr_get_prec(b.v_))
            throw PrecisionMismatchError("BigFloat precision mismatch: " +
                                         std::to_string(digits_for_bits(mpfr_get_prec(a.v_))) + " vs " +
                                         std::to_string(digits_for_bits(mpfr_get_prec(b.v_))) + " digits");
    }

public:
    BigFloat() { mpfr_init2(v_, bits_for_digits(current_digits())); mpfr_set_zero(v_, 1); }
    BigFloat(double d) { mpfr_init2(v_, bits_for_digits(current_digits())); mpfr_set_d(v_, d, MPFR_RNDN); }
    BigFloat(int i) { mpfr_init2(v_, bits_for_digits(current_digits())); mpfr_set_si(v_, i, MPFR_RNDN); }
    BigFloat(long i) { mpfr_init2(v_, bits_for_digits(current_digits())); mpfr_set_si(v_, i, MPFR_RNDN); }

    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    static BigFloat with_digits(int digits) {
        BigFloat r(tag{}, bits_for_digits(digits));
        mpfr_set_zero(r.v_, 1);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t prec_bits() const { return mpfr_get_prec(v_); }
    int digits() const { return digits_for_bits(prec_bits()); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // arithmetic
    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        check_same(a, b);
        BigFloat r(tag{}, a.prec_bits());
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        check_same(a, b);
        BigFloat r(tag{}, a.prec_bits());
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        check_same(a, b);
        BigFloat r(tag{}, a.prec_bits());
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        check_same(a, b);
        BigFloat r(tag{}, a.prec_bits());
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    BigFloat operator-() const {
        BigFloat r(tag{}, prec_bits());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    BigFloat& operator+=(const BigFloat& b) { check_same(*this, b); mpfr_add(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& b) { check_same(*this, b); mpfr_sub(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& b) { check_same(*this, b); mpfr_mul(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& b) { check_same(*this, b); mpfr_div(v_, v_, b.v_, MPFR_RNDN); return *this; }

    // mixed ops: exact scalar operand, result at this value's precision
    friend BigFloat operator+(const BigFloat& a, double b) { BigFloat r(tag{}, a.prec_bits()); mpfr_add_d(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator+(double a, const BigFloat& b) { return b + a; }
    friend BigFloat operator-(const BigFloat& a, double b) { BigFloat r(tag{}, a.prec_bits()); mpfr_sub_d(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator-(double a, const BigFloat& b) { BigFloat r(tag{}, b.prec_bits()); mpfr_d_sub(r.v_, a, b.v_, MPFR_RNDN); return r; }
    friend BigFloat operator*(const BigFloat& a, double b) { BigFloat r(tag{}, a.prec_bits()); mpfr_mul_d(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator*(double a, const BigFloat& b) { return b * a; }
    friend BigFloat operator/(const BigFloat& a, double b) { BigFloat r(tag{}, a.prec_bits()); mpfr_div_d(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator/(double a, const BigFloat& b) { BigFloat r(tag{}, b.prec_bits()); mpfr_d_div(r.v_, a, b.v_, MPFR_RNDN); return r; }
    friend BigFloat operator+(const BigFloat& a, int b) { BigFloat r(tag{}, a.prec_bits()); mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator+(int a, const BigFloat& b) { return b + a; }
    friend BigFloat operator-(const BigFloat& a, int b) { BigFloat r(tag{}, a.prec_bits()); mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator-(int a, const BigFloat& b) { BigFloat r(tag{}, b.prec_bits()); mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN); return r; }
    friend BigFloat operator*(const BigFloat& a, int b) { BigFloat r(tag{}, a.prec_bits()); mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator*(int a, const BigFloat& b) { return b * a; }
    friend BigFloat operator/(const BigFloat& a, int b) { BigFloat r(tag{}, a.prec_bits()); mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
    friend BigFloat operator/(int a, const BigFloat& b) { BigFloat r(tag{}, b.prec_bits()); mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN); return r; }

    BigFloat& operator*=(double b) { mpfr_mul_d(v_, v_, b, MPFR_RNDN); return *this; }
    BigFloat& operator/=(double b) { mpfr_div_d(v_, v_, b, MPFR_RNDN); return *this; }
    BigFloat& operator+=(double b) { mpfr_add_d(v_, v_, b, MPFR_RNDN); return *this; }
    BigFloat& operator-=(double b) { mpfr_sub_d(v_, v_, b, MPFR_RNDN); return *this; }

    // comparisons
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
    friend bool operator!=(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) != 0; }
    friend bool operator<(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }
    friend bool operator<(double a, const BigFloat& b) { return b > a; }
    friend bool operator>(double a, const BigFloat& b) { return b < a; }
    friend bool operator<=(double a, const BigFloat& b) { return b >= a; }
    friend bool operator>=(double a, const BigFloat& b) { return b <= a; }
    friend bool operator==(double a, const BigFloat& b) { return b == a; }

    // in-place fused helpers for hot loops: this += a*b, this -= a*b
    void add_mul(const BigFloat& a, const BigFloat& b) {
        check_same(a, b);
        mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN);
    }
    void sub_mul(const BigFloat& a, const BigFloat& b) {
        check_same(a, b);
        mpfr_fms(v_, a.v_, b.v_, v_, MPFR_RNDN);
        mpfr_neg(v_, v_, MPFR_RNDN);
    }

    std::string str(int digits = -1) const;

private:
    struct tag {};
    BigFloat(tag, mpfr_prec_t bits) { mpfr_init2(v_, bits); }
    friend BigFloat make_with_bits(mpfr_prec_t bits);
};

inline BigFloat make_with_bits(mpfr_prec_t bits) {
    BigFloat r = BigFloat::with_digits(16);
    mpfr_set_prec(r.raw(), bits);
    mpfr_set_zero(r.raw(), 1);
    return r;
}

// ---- generic scalar shims -------------------------------------------------
// Generic code in namespace hgm calls these unqualified; both the double
// and the BigFloat overloads resolve here.

inline double abs(double x) { return std::fabs(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double pow(double x, long n) { return std::pow(x, static_cast<double>(n)); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline double floor(double x) { return std::floor(x); }
inline bool isfinite(double x) { return std::isfinite(x); }
inline double to_double(double x) { return x; }
inline int digits10(double) { return 16; }
inline double log10(double x) { return std::log10(x); }

BigFloat abs(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat log10(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat pow(const BigFloat& x, long n);
BigFloat pow(const BigFloat& x, const BigFloat& y);
BigFloat floor(const BigFloat& x);
inline bool isfinite(const BigFloat& x) { return x.is_finite(); }
inline double to_double(const BigFloat& x) { return x.to_double(); }
inline int digits10(const BigFloat& x) { return x.digits(); }

BigFloat round_to_digits(const BigFloat& x, int digits);

template <class R>
struct scalar {};

template <>
struct scalar<double> {
    static double from_string(const std::string& s) { return std::stod(s); }
    static double pi() { return 3.141592653589793238462643383279502884; }
    static double from_double(double d) { return d; }
    static int context_digits() { return 16; }
    static const char* name() { return "double"; }
};

template <>
struct scalar<BigFloat> {
    static BigFloat from_string(const std::string& s);
    static BigFloat pi();
    static BigFloat from_double(double d) { return BigFloat(d); }
    static int context_digits() { return current_digits(); }
    static const char* name() { return "bigfloat"; }
};

template <class R>
R from_string(const std::string& s) {
    return scalar<R>::from_string(s);
}

// 10^k at the working precision
template <class R>
R pow10_int(int k) {
    R r = scalar<R>::from_double(1.0);
    R ten = scalar<R>::from_double(10.0);
    for (int i = 0; i < (k >= 0 ? k : -k); ++i) r = (k >= 0) ? r * ten : r / ten;
    return r;
}

std::string format_shortest(double x);
std::string format_shortest(const BigFloat& x);

}  // namespace hgm

#endif
