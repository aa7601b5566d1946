#ifndef HGM_JET_HPP
#define HGM_JET_HPP

#include <vector>

#include "hgm/bigfloat.hpp"
#include "hgm/errors.hpp"

namespace hgm {

// Truncated derivative tower: coeffs[k] = f^(k)(t), k = 0..order.
// Products follow the Leibniz rule; the transcendental lifts use the
// standard derivative recurrences so the chain rule is exact.
template <class R>
class Jet {
    std::vector<R> c_;

public:
    Jet() : c_(1, R(0)) {}
    explicit Jet(int order) : c_(order + 1, R(0)) {}
    Jet(int order, const R& value) : c_(order + 1, R(0)) { c_[0] = value; }

    static Jet constant(int order, const R& v) { return Jet(order, v); }
    static Jet variable(int order, const R& t) {
        Jet j(order, t);
        if (order >= 1) j.c_[1] = R(1);
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const R& operator[](int k) const { return c_[k]; }
    R& operator[](int k) { return c_[k]; }
    const R& value() const { return c_[0]; }

    // jet of f' to order-1
    Jet derivative_shift() const {
        if (order() == 0) return Jet(0);
        Jet d(order() - 1);
        for (int k = 0; k < order(); ++k) d[k] = c_[k + 1];
        return d;
    }

    Jet truncated(int new_order) const {
        Jet t(new_order);
        for (int k = 0; k <= new_order && k <= order(); ++k) t[k] = c_[k];
        return t;
    }
};

namespace detail {
inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace detail

template <class R>
Jet<R> operator+(const Jet<R>& a, const Jet<R>& b) {
    if (a.order() != b.order()) throw DomainError("jet order mismatch in +");
    Jet<R> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] + b[k];
    return r;
}

template <class R>
Jet<R> operator-(const Jet<R>& a, const Jet<R>& b) {
    if (a.order() != b.order()) throw DomainError("jet order mismatch in -");
    Jet<R> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] - b[k];
    return r;
}

template <class R>
Jet<R> operator-(const Jet<R>& a) {
    Jet<R> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = -a[k];
    return r;
}

template <class R>
Jet<R> operator*(const R& s, const Jet<R>& a) {
    Jet<R> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = s * a[k];
    return r;
}

template <class R>
Jet<R> jet_mul(const Jet<R>& a, const Jet<R>& b) {
    if (a.order() != b.order()) throw DomainError("jet order mismatch in jet_mul");
    const int r = a.order();
    Jet<R> out(r);
    for (int k = 0; k <= r; ++k) {
        R acc(0);
        for (int i = 0; i <= k; ++i) acc += detail::binom(k, i) * (a[i] * b[k - i]);
        out[k] = acc;
    }
    return out;
}

template <class R>
Jet<R> operator*(const Jet<R>& a, const Jet<R>& b) {
    return jet_mul(a, b);
}

// q = a / b via Leibniz: a^(k) = sum C(k,i) q^(i) b^(k-i)
template <class R>
Jet<R> jet_div(const Jet<R>& a, const Jet<R>& b) {
    if (a.order() != b.order()) throw DomainError("jet order mismatch in jet_div");
    if (b.value() == R(0)) throw SingularPointError("jet_div: division by zero value", 0.0);
    const int r = a.order();
    Jet<R> q(r);
    for (int k = 0; k <= r; ++k) {
        R acc = a[k];
        for (int i = 0; i < k; ++i) acc -= detail::binom(k, i) * (q[i] * b[k - i]);
        q[k] = acc / b.value();
    }
    return q;
}

template <class R>
Jet<R> operator/(const Jet<R>& a, const Jet<R>& b) {
    return jet_div(a, b);
}

// e = exp(u): e^(k) = sum_{j<k} C(k-1,j) e^(j) u^(k-j)
template <class R>
Jet<R> jet_exp(const Jet<R>& u) {
    const int r = u.order();
    Jet<R> e(r);
    e[0] = exp(u.value());
    for (int k = 1; k <= r; ++k) {
        R acc(0);
        for (int j = 0; j < k; ++j) acc += detail::binom(k - 1, j) * (e[j] * u[k - j]);
        e[k] = acc;
    }
    return e;
}

// l = log(u): l' = u'/u, derivatives of l from the jet of u'/u
template <class R>
Jet<R> jet_log(const Jet<R>& u) {
    if (u.value() <= R(0)) throw DomainError("jet_log: argument must be positive");
    const int r = u.order();
    Jet<R> l(r);
    l[0] = log(u.value());
    if (r >= 1) {
        Jet<R> ratio = jet_div(u.derivative_shift(), u.truncated(r - 1));
        for (int k = 1; k <= r; ++k) l[k] = ratio[k - 1];
    }
    return l;
}

// s = sqrt(u): u^(k) = 2 s^(0) s^(k) + sum_{0<i<k} C(k,i) s^(i) s^(k-i)
template <class R>
Jet<R> jet_sqrt(const Jet<R>& u) {
    if (u.value() < R(0)) throw DomainError("jet_sqrt: negative argument");
    if (u.value() == R(0)) throw DomainError("jet_sqrt: zero argument (derivatives singular)");
    const int r = u.order();
    Jet<R> s(r);
    s[0] = sqrt(u.value());
    for (int k = 1; k <= r; ++k) {
        R acc = u[k];
        for (int i = 1; i < k; ++i) acc -= detail::binom(k, i) * (s[i] * s[k - i]);
        s[k] = acc / (R(2) * s[0]);
    }
    return s;
}

template <class R>
Jet<R> jet_pow_int(const Jet<R>& u, long n) {
    const int r = u.order();
    if (n == 0) return Jet<R>::constant(r, R(1));
    bool neg = n < 0;
    unsigned long m = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    Jet<R> acc = Jet<R>::constant(r, R(1));
    Jet<R> base = u;
    while (m) {
        if (m & 1) acc = jet_mul(acc, base);
        m >>= 1;
        if (m) base = jet_mul(base, base);
    }
    if (neg) return jet_div(Jet<R>::constant(r, R(1)), acc);
    return acc;
}

// p = u^alpha for real alpha, from u p' = alpha u' p
template <class R>
Jet<R> jet_pow_real(const Jet<R>& u, const R& alpha) {
    if (u.value() <= R(0)) throw DomainError("jet_pow_real: base must be positive");
    const int r = u.order();
    Jet<R> p(r);
    p[0] = exp(alpha * log(u.value()));
    for (int k = 1; k <= r; ++k) {
        // (u p')^(k-1) = alpha (u' p)^(k-1); isolate p^(k)
        R rhs(0);
        for (int j = 0; j <= k - 1; ++j) rhs += detail::binom(k - 1, j) * (u[k - j] * p[j]);
        rhs = alpha * rhs;
        R lhs(0);
        for (int j = 1; j <= k - 1; ++j) lhs += detail::binom(k - 1, j) * (u[j] * p[k - j]);
        p[k] = (rhs - lhs) / u.value();
    }
    return p;
}

}  // namespace hgm

#endif
