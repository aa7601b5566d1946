#ifndef HGM_REFERENCE_HPP
#define HGM_REFERENCE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "hgm/bigfloat.hpp"
#include "hgm/operator_model.hpp"
#include "hgm/steppers.hpp"

namespace hgm {

inline double gamma_fn(double x) { return std::tgamma(x); }
inline BigFloat gamma_fn(const BigFloat& x) {
    BigFloat r = make_with_bits(x.prec_bits());
    mpfr_gamma(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

template <class R>
R demote(const BigFloat& x, int digits);
template <>
inline double demote<double>(const BigFloat& x, int) {
    return x.to_double();
}
template <>
inline BigFloat demote<BigFloat>(const BigFloat& x, int digits) {
    return round_to_digits(x, digits);
}

// ---- Airy oracle --------------------------------------------------------------
// Maclaurin series for the standard f,g pair at elevated working precision.
// The boost absorbs the cancellation: ~0.35*|t|^1.5 digits for t<0 and
// ~0.61*t^1.5 for t>0 (both f and 1/Ai grow like exp((2/3)t^1.5) there).

inline int airy_work_digits(int D, double t) {
    double a = std::fabs(t);
    double boost = (t > 0 ? 1.45 : 0.8) * std::pow(a, 1.5) / std::log(10.0);
    return D + static_cast<int>(std::ceil(boost)) + 10;
}

template <class R>
struct AiryValues {
    R ai, ai_prime, bi, bi_prime;
};

template <class R>
AiryValues<R> airy(const R& t_in) {
    const double td = to_double(t_in);
    if (std::fabs(td) > 40.0) throw DomainError("airy oracle validated only for |t| <= 40");
    const int D = scalar<R>::context_digits();
    const int Dw = airy_work_digits(D, td);
    PrecisionScope scope(Dw);

    BigFloat t = [&] {
        if constexpr (std::is_same_v<R, BigFloat>)
            return round_to_digits(t_in, Dw);  // widening, exact
        else
            return BigFloat(t_in);
    }();
    BigFloat t3 = t * t * t;

    // f   = sum u_k,  u_0 = 1,    u_{k+1} = u_k t^3 / ((3k+2)(3k+3))
    // f'  = sum v_k,  v_1 = t^2/2, v_{k+1} = v_k t^3 (k+1) / (k (3k+2)(3k+3))
    // g   = sum w_k,  w_0 = t,    w_{k+1} = w_k t^3 / ((3k+3)(3k+4))
    // g'  = sum x_k,  x_0 = 1,    x_{k+1} = x_k t^3 / ((3k+1)(3k+3))
    BigFloat f(1), fp(0), g = t, gp(1);
    BigFloat u(1), v = t * t / 2, w = t, x(1);
    fp += v;
    BigFloat peak(1);
    BigFloat eps = pow10_int<BigFloat>(-(Dw - 2));
    for (long k = 0; k < 100000; ++k) {
        u = u * t3 / static_cast<int>((3 * k + 2) * (3 * k + 3));
        w = w * t3 / static_cast<int>((3 * k + 3) * (3 * k + 4));
        x = x * t3 / static_cast<int>((3 * k + 1) * (3 * k + 3));
        if (k >= 1) v = v * t3 * static_cast<int>(k + 1) / static_cast<int>(k * (3 * k + 2) * (3 * k + 3));
        f += u;
        g += w;
        gp += x;
        if (k >= 1) fp += v;
        BigFloat m = abs(u);
        if (abs(w) > m) m = abs(w);
        if (abs(f) > peak) peak = abs(f);
        if (abs(g) > peak) peak = abs(g);
        if (m < eps * peak && k > 3) break;
    }

    BigFloat three(3);
    BigFloat c1 = 1 / (pow(three, BigFloat(2) / 3) * gamma_fn(BigFloat(2) / 3));
    BigFloat c2 = 1 / (pow(three, BigFloat(1) / 3) * gamma_fn(BigFloat(1) / 3));
    BigFloat s3 = sqrt(three);

    AiryValues<R> out;
    out.ai = demote<R>(c1 * f - c2 * g, D);
    out.ai_prime = demote<R>(c1 * fp - c2 * gp, D);
    out.bi = demote<R>(s3 * (c1 * f + c2 * g), D);
    out.bi_prime = demote<R>(s3 * (c1 * fp + c2 * gp), D);
    return out;
}

template <class R>
R airy_ai(const R& t) {
    return airy(t).ai;
}
template <class R>
R airy_ai_prime(const R& t) {
    return airy(t).ai_prime;
}

// ---- 0F1 ----------------------------------------------------------------------

template <class R>
R hyp0f1(const R& n, const R& z) {
    const int D = scalar<R>::context_digits();
    R eps = pow10_int<R>(-(D + 5));
    R term(1), sum(1), peak(1);
    for (long j = 0; j < 1000000; ++j) {
        R denom = (n + static_cast<int>(j)) * static_cast<int>(j + 1);
        if (denom == R(0)) throw DomainError("hyp0f1: Pochhammer pole (n is a nonpositive integer)");
        term = term * z / denom;
        sum += term;
        if (abs(sum) > peak) peak = abs(sum);
        if (abs(term) < eps * peak && j > 2) return sum;
    }
    throw ConvergenceError("hyp0f1: series did not converge");
}

// ---- adaptive quadrature (composite Gauss with bisection) ----------------------

namespace detail {

template <class R, class F>
R gauss_panel(const F& f, const R& a, const R& b, const std::vector<R>& xs, const std::vector<R>& ws) {
    R mid = (a + b) / 2, half = (b - a) / 2;
    R acc(0);
    for (std::size_t i = 0; i < xs.size(); ++i) acc += ws[i] * f(mid + half * xs[i]);
    return acc * half;
}

template <class R, class F>
void adaptive_rec(const F& f, const R& a, const R& b, const R& whole, const std::vector<R>& xs,
                  const std::vector<R>& ws, const R& tol_abs, int depth, R& acc) {
    R m = (a + b) / 2;
    R left = gauss_panel(f, a, m, xs, ws);
    R right = gauss_panel(f, m, b, xs, ws);
    if (depth <= 0) throw ConvergenceError("adaptive quadrature: refinement did not converge");
    if (abs(left + right - whole) <= tol_abs) {
        acc += left + right;
        return;
    }
    adaptive_rec(f, a, m, left, xs, ws, tol_abs / 2, depth - 1, acc);
    adaptive_rec(f, m, b, right, xs, ws, tol_abs / 2, depth - 1, acc);
}

}  // namespace detail

template <class R, class F>
R adaptive_quadrature(const F& f, const R& a, const R& b, double rel_tol) {
    static thread_local int cached_digits = -1;
    static thread_local std::vector<R> xs, ws;
    if (cached_digits != scalar<R>::context_digits()) {
        legendre_nodes<R>(16, xs, ws);
        cached_digits = scalar<R>::context_digits();
    }
    R whole = detail::gauss_panel(f, a, b, xs, ws);
    R scale = abs(whole);
    if (scale == R(0)) scale = R(1);
    R acc(0);
    detail::adaptive_rec(f, a, b, whole, xs, ws, scalar<R>::from_double(rel_tol) * scale, 60, acc);
    return acc;
}

// ---- H^k_n --------------------------------------------------------------------
// H^k_n(x,y) = int_0^x t^k exp(-t) 0F1(;n;y t) dt, plus y-derivatives obtained
// by differentiating under the integral: d/dy 0F1(;n;yt) = (t/n) 0F1(;n+1;yt).

template <class R>
R hkn_value(int k, int n, const R& x, const R& y, double rel_tol = 1e-12) {
    if (!(x > R(0))) throw DomainError("hkn_value: requires x > 0");
    R nn(n);
    auto f = [&](const R& t) { return pow(t, static_cast<long>(k)) * exp(-t) * hyp0f1(nn, y * t); };
    return adaptive_quadrature(f, R(0), x, rel_tol);
}

// value and first `orders` y-derivatives (orders <= 3 used by the fixtures)
template <class R>
std::vector<R> hkn_with_derivatives(int k, int n, const R& x, const R& y, int orders,
                                    double rel_tol = 1e-12) {
    std::vector<R> out;
    R poch(1);
    for (int m = 0; m <= orders; ++m) {
        if (m > 0) poch = poch * (n + m - 1);
        R nm(n + m);
        R p = poch;
        auto f = [&](const R& t) {
            return pow(t, static_cast<long>(k + m)) * exp(-t) * hyp0f1(nm, y * t) / p;
        };
        out.push_back(adaptive_quadrature(f, R(0), x, rel_tol));
    }
    return out;
}

// The rank-4 ODE in y annihilating H^k_n(x, .).
template <class R>
ScalarOperator<R> hkn_operator(int k, int n, const R& x) {
    std::map<std::string, R> params{{"k", R(k)}, {"n", R(n)}, {"x", x}};
    return parse_operator<R>(
        "t^2*d^4 + (2*n + 2 - t)*t*d^3 + (n*(n+1) - (x + k + n + 3)*t)*d^2 + ((t - n)*x - n*(k+2))*d + "
        "(k+1)*x",
        params);
}

// Gauge by the dominant growth exp(y) y^(1-n+k): bounded solutions.
template <class R>
FirstOrderSystem<R> hkn_gauged_system(int k, int n, const R& x) {
    auto L = hkn_operator(k, n, x);
    auto S = companion_system(L, {R(0)});
    return gauge_transform(S, R(1), R(1 - n + k));
}

// Ratio = H^k_n(x,y) / (y^(1-n+k) e^y), computed in log space.
template <class R>
R log_dominance_ratio(int k, int n, const R& x, const R& y, double rel_tol = 1e-12) {
    R h = hkn_value(k, n, x, y, rel_tol);
    return log(h) - (R(1 - n + k) * log(y) + y);
}

template <class R>
R dominance_ratio(int k, int n, const R& x, const R& y, double rel_tol = 1e-12) {
    return exp(log_dominance_ratio(k, n, x, y, rel_tol));
}

// ---- shipped fixtures ----------------------------------------------------------

template <class R>
struct AsymptoticDescriptor {
    std::string label;
    // leading behavior t^(gnum/gden) * exp(kappa * t^(snum/sden))
    long gnum = 0, gden = 1;
    R kappa;
    long snum = 1, sden = 2;
};

template <class R>
struct Fixtures {
    FirstOrderSystem<R> easy_system;           // the 3x3 instability example
    FirstOrderSystem<R> airy_system;           // companion of y'' = t y
    std::string exp_airy_operator;             // (d-1)(d^2-t), expanded
    std::vector<AsymptoticDescriptor<R>> hkn_asymptotics;  // h1..h4 for generic (k,n)
};

template <class R>
Fixtures<R> fixtures(int k = 10, int n = 1) {
    Fixtures<R> F;
    F.easy_system.dim = 3;
    F.easy_system.P = [](const R&) {
        Matrix<R> P(3, 3);
        P(0, 0) = R(-1);
        P(0, 1) = R(1);
        P(1, 1) = R(-1);
        P(1, 2) = R(1);
        return P;
    };
    F.airy_system.dim = 2;
    F.airy_system.P = [](const R& t) {
        Matrix<R> P(2, 2);
        P(0, 1) = R(1);
        P(1, 0) = t;
        return P;
    };
    F.exp_airy_operator = "d^3 - d^2 - t*d + t - 1";
    // as functions of y at fixed x=1
    AsymptoticDescriptor<R> h1{"h1", -(1 + 2 * n), 4, R(-2), 1, 2};
    AsymptoticDescriptor<R> h2{"h2", -(k + 1), 1, R(0), 1, 2};
    AsymptoticDescriptor<R> h3{"h3", -(1 + 2 * n), 4, R(2), 1, 2};
    AsymptoticDescriptor<R> h4{"h4", 1 - n + k, 1, R(1), 1, 1};
    F.hkn_asymptotics = {h1, h2, h3, h4};
    return F;
}

}  // namespace hgm

#endif
