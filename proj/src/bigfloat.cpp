#include "hgm/bigfloat.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <vector>

namespace hgm {

namespace {
thread_local int tl_digits = 16;
}

int current_digits() { return tl_digits; }

void set_current_digits(int digits) {
    if (digits < 15) throw DomainError("precision must be at least 15 decimal digits");
    tl_digits = digits;
}

#define HGM_UNARY(name, fn)                        \
    BigFloat name(const BigFloat& x) {             \
        BigFloat r = make_with_bits(x.prec_bits());\
        fn(r.raw(), x.raw(), MPFR_RNDN);           \
        return r;                                  \
    }

HGM_UNARY(abs, mpfr_abs)
HGM_UNARY(sqrt, mpfr_sqrt)
HGM_UNARY(exp, mpfr_exp)
HGM_UNARY(log, mpfr_log)
HGM_UNARY(log10, mpfr_log10)
HGM_UNARY(sin, mpfr_sin)
HGM_UNARY(cos, mpfr_cos)

#undef HGM_UNARY

BigFloat floor(const BigFloat& x) {
    BigFloat r = make_with_bits(x.prec_bits());
    mpfr_floor(r.raw(), x.raw());
    return r;
}

BigFloat pow(const BigFloat& x, long n) {
    BigFloat r = make_with_bits(x.prec_bits());
    mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
    return r;
}

BigFloat pow(const BigFloat& x, const BigFloat& y) {
    BigFloat r = make_with_bits(x.prec_bits());
    mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

BigFloat round_to_digits(const BigFloat& x, int digits) {
    BigFloat r = make_with_bits(bits_for_digits(digits));
    mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

BigFloat scalar<BigFloat>::from_string(const std::string& s) {
    BigFloat r = make_with_bits(bits_for_digits(current_digits()));
    if (mpfr_set_str(r.raw(), s.c_str(), 10, MPFR_RNDN) != 0)
        throw DomainError("cannot parse number: " + s);
    return r;
}

BigFloat scalar<BigFloat>::pi() {
    BigFloat r = make_with_bits(bits_for_digits(current_digits()));
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

std::string BigFloat::str(int digits) const {
    if (digits < 0) digits = this->digits();
    char fmt[32];
    std::snprintf(fmt, sizeof fmt, "%%.%dRg", digits);
    char buf[512];
    mpfr_snprintf(buf, sizeof buf, fmt, v_);
    return std::string(buf);
}

std::string format_shortest(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_shortest(const BigFloat& x) {
    // full working precision; round-trips via from_string at the same digits
    return x.str(x.digits() + 2);
}

}  // namespace hgm
