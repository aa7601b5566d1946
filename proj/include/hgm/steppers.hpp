#ifndef HGM_STEPPERS_HPP
#define HGM_STEPPERS_HPP

#include <mpfr.h>

#include <string>
#include <vector>

#include "hgm/linalg.hpp"
#include "hgm/operator_model.hpp"

namespace hgm {

struct StepperKind {
    enum class Family { Euler, RK4, GaussIRK, RK45 } family = Family::RK4;
    int stages = 0;        // GaussIRK
    double rtol = 1e-6;    // RK45 adaptive
    double atol = 1e-12;

    static StepperKind euler() { return {Family::Euler, 0, 0, 0}; }
    static StepperKind rk4() { return {Family::RK4, 0, 0, 0}; }
    static StepperKind gauss(int s) {
        if (s != 1 && s != 2 && s != 3 && s != 5) throw DomainError("Gauss IRK stages must be 1, 2, 3 or 5");
        return {Family::GaussIRK, s, 0, 0};
    }
    static StepperKind rk45(double rtol, double atol) { return {Family::RK45, 0, rtol, atol}; }

    std::string name() const {
        switch (family) {
            case Family::Euler: return "euler";
            case Family::RK4: return "rk4";
            case Family::GaussIRK: return "gauss" + std::to_string(stages);
            case Family::RK45: return "rk45";
        }
        return {};
    }
};

template <class R>
bool blown_up(const R& x);

template <>
inline bool blown_up<double>(const double& x) {
    return !std::isfinite(x) || std::fabs(x) > 1e277;
}

template <>
inline bool blown_up<BigFloat>(const BigFloat& x) {
    if (!x.is_finite()) return true;
    if (x.is_zero()) return false;
    return mpfr_get_exp(x.raw()) > 332193;  // ~10^100000
}

struct SolveDiagnostics {
    long blowup_index = -1;  // first node whose state exceeded the magnitude cap
    long accepted = 0, rejected = 0;
    std::string note;
};

template <class R>
struct SolutionTable {
    Grid<R> grid;
    std::vector<Vector<R>> states;  // states[i] at grid.node(i); may be shorter after blow-up
    std::string stepper_name;
    int digits = 16;
    SolveDiagnostics diag;

    const Vector<R>& at(long i) const { return states[static_cast<std::size_t>(i)]; }
};

template <class R>
Vector<R> system_rhs(const FirstOrderSystem<R>& S, const R& t, const Vector<R>& F) {
    Vector<R> y = S.P(t) * F;
    if (S.B) y += S.B(t);
    return y;
}

template <class R>
Vector<R> euler_step(const FirstOrderSystem<R>& S, const R& t, const R& h, const Vector<R>& F) {
    Vector<R> y = system_rhs(S, t, F);
    Vector<R> out = F;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * y[i];
    return out;
}

template <class R>
Vector<R> rk4_step(const FirstOrderSystem<R>& S, const R& t, const R& h, const Vector<R>& F) {
    R half = h / 2;
    Vector<R> k1 = system_rhs(S, t, F);
    Vector<R> k2 = system_rhs(S, t + half, F + half * k1);
    Vector<R> k3 = system_rhs(S, t + half, F + half * k2);
    Vector<R> k4 = system_rhs(S, t + h, F + h * k3);
    Vector<R> out = F;
    R w = h / 6;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += w * (k1[i] + R(2) * k2[i] + R(2) * k3[i] + k4[i]);
    return out;
}

// ---- Gauss-Legendre collocation ---------------------------------------------

// Roots of the degree-s Legendre polynomial on [-1,1] by Newton iteration at
// the working precision, plus the Gauss weights.
template <class R>
void legendre_nodes(int s, std::vector<R>& x, std::vector<R>& w) {
    x.assign(s, R(0));
    w.assign(s, R(0));
    const int D = scalar<R>::context_digits();
    R tol = pow10_int<R>(2 - D);
    R pi = scalar<R>::pi();
    for (int i = 0; i < s; ++i) {
        // Chebyshev-style initial guess
        R xi = -cos(pi * (4 * i + 3) / (4 * s + 2));
        for (int iter = 0; iter < 200; ++iter) {
            // evaluate P_s and P_s' by recurrence
            R p0(1), p1 = xi;
            for (int n = 2; n <= s; ++n) {
                R p2 = ((2 * n - 1) * (xi * p1) - (n - 1) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            R dp = (s * (xi * p1 - p0)) / (xi * xi - 1);
            R dx = p1 / dp;
            xi -= dx;
            if (abs(dx) <= tol * (abs(xi) + 1)) break;
        }
        x[i] = xi;
        R p0(1), p1 = xi;
        for (int n = 2; n <= s; ++n) {
            R p2 = ((2 * n - 1) * (xi * p1) - (n - 1) * p0) / n;
            p0 = p1;
            p1 = p2;
        }
        R dp = (s * (xi * p1 - p0)) / (xi * xi - 1);
        w[i] = R(2) / ((R(1) - xi * xi) * dp * dp);
    }
}

// Gauss IRK tableau on [0,1]: c = (x+1)/2, b = w/2, a_ij = int_0^{c_i} l_j.
template <class R>
struct GaussTableau {
    int s;
    std::vector<R> c, b;
    Matrix<R> a;
};

template <class R>
GaussTableau<R> gauss_tableau(int s) {
    std::vector<R> x, w;
    legendre_nodes<R>(s, x, w);
    GaussTableau<R> T;
    T.s = s;
    T.c.resize(s);
    T.b.resize(s);
    for (int i = 0; i < s; ++i) {
        T.c[i] = (x[i] + 1) / 2;
        T.b[i] = w[i] / 2;
    }
    // Lagrange basis polynomials on the c nodes, integrated exactly
    T.a = Matrix<R>(s, s);
    for (int j = 0; j < s; ++j) {
        std::vector<R> poly{R(1)};  // coefficients, low order first
        R denom(1);
        for (int m = 0; m < s; ++m) {
            if (m == j) continue;
            std::vector<R> next(poly.size() + 1, R(0));
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k] -= T.c[m] * poly[k];
                next[k + 1] += poly[k];
            }
            poly = std::move(next);
            denom = denom * (T.c[j] - T.c[m]);
        }
        for (int i = 0; i < s; ++i) {
            R acc(0), xp = T.c[i];
            for (std::size_t k = 0; k < poly.size(); ++k) {
                acc += poly[k] * xp / static_cast<int>(k + 1);
                xp = xp * T.c[i];
            }
            T.a(i, j) = acc / denom;
        }
    }
    return T;
}

// One Gauss-IRK step. For a linear system the stage equations are one
// (s*r) x (s*r) linear solve; no Newton iteration is needed.
template <class R>
Vector<R> gauss_irk_step(const FirstOrderSystem<R>& S, const R& t, const R& h, const Vector<R>& F,
                         const GaussTableau<R>& T) {
    const int s = T.s;
    const int r = S.dim;
    std::vector<Matrix<R>> P(s);
    std::vector<Vector<R>> Bv(s, Vector<R>(r));
    for (int i = 0; i < s; ++i) {
        R ti = t + T.c[i] * h;
        P[i] = S.P(ti);
        if (S.B) Bv[i] = S.B(ti);
    }
    Matrix<R> M(s * r, s * r);
    Vector<R> rhs(s * r);
    for (int i = 0; i < s; ++i) {
        Vector<R> pf = P[i] * F;
        for (int u = 0; u < r; ++u) {
            rhs[i * r + u] = pf[u] + Bv[i][u];
            M(i * r + u, i * r + u) = R(1);
        }
        for (int j = 0; j < s; ++j) {
            R hij = h * T.a(i, j);
            for (int u = 0; u < r; ++u)
                for (int v = 0; v < r; ++v) M(i * r + u, j * r + v) -= hij * P[i](u, v);
        }
    }
    Vector<R> k = lu_solve(M, rhs).x;
    Vector<R> out = F;
    for (int i = 0; i < s; ++i) {
        R w = h * T.b[i];
        for (int u = 0; u < r; ++u) out[u] += w * k[i * r + u];
    }
    return out;
}

template <class R>
Vector<R> gauss_irk_step(const FirstOrderSystem<R>& S, const R& t, const R& h, const Vector<R>& F, int s) {
    return gauss_irk_step(S, t, h, F, gauss_tableau<R>(s));
}

// ---- Dormand-Prince 5(4) -----------------------------------------------------

template <class R>
struct Dp45Work {
    Vector<R> y5, y4;
    std::vector<Vector<R>> k;
};

template <class R>
void dp45_step(const FirstOrderSystem<R>& S, const R& t, const R& h, const Vector<R>& y, Dp45Work<R>& w) {
    auto frac = [](long n, long d) { return R(n) / R(d); };
    w.k.assign(7, Vector<R>(y.size()));
    w.k[0] = system_rhs(S, t, y);
    auto stage = [&](int i, const R& c, std::initializer_list<std::pair<int, R>> as) {
        Vector<R> yi = y;
        for (auto& [j, a] : as)
            for (std::size_t u = 0; u < y.size(); ++u) yi[u] += h * a * w.k[j][u];
        w.k[i] = system_rhs(S, t + c * h, yi);
    };
    stage(1, frac(1, 5), {{0, frac(1, 5)}});
    stage(2, frac(3, 10), {{0, frac(3, 40)}, {1, frac(9, 40)}});
    stage(3, frac(4, 5), {{0, frac(44, 45)}, {1, frac(-56, 15)}, {2, frac(32, 9)}});
    stage(4, frac(8, 9), {{0, frac(19372, 6561)}, {1, frac(-25360, 2187)}, {2, frac(64448, 6561)}, {3, frac(-212, 729)}});
    stage(5, R(1), {{0, frac(9017, 3168)}, {1, frac(-355, 33)}, {2, frac(46732, 5247)}, {3, frac(49, 176)}, {4, frac(-5103, 18656)}});
    // 5th order solution
    w.y5 = y;
    const R b5[6] = {frac(35, 384), R(0), frac(500, 1113), frac(125, 192), frac(-2187, 6784), frac(11, 84)};
    for (int j = 0; j < 6; ++j)
        for (std::size_t u = 0; u < y.size(); ++u) w.y5[u] += h * b5[j] * w.k[j][u];
    w.k[6] = system_rhs(S, t + h, w.y5);
    // embedded 4th order
    const R b4[7] = {frac(5179, 57600), R(0), frac(7571, 16695), frac(393, 640),
                     frac(-92097, 339200), frac(187, 2100), frac(1, 40)};
    w.y4 = y;
    for (int j = 0; j < 7; ++j)
        for (std::size_t u = 0; u < y.size(); ++u) w.y4[u] += h * b4[j] * w.k[j][u];
}

// Fixed-h single DP5 step (used by propagator_matrix for the RK45 kind).
template <class R>
Vector<R> dp5_step(const FirstOrderSystem<R>& S, const R& t, const R& h, const Vector<R>& y) {
    Dp45Work<R> w;
    dp45_step(S, t, h, y, w);
    return w.y5;
}

template <class R>
Vector<R> stepper_step(StepperKind kind, const FirstOrderSystem<R>& S, const R& t, const R& h,
                       const Vector<R>& F) {
    switch (kind.family) {
        case StepperKind::Family::Euler: return euler_step(S, t, h, F);
        case StepperKind::Family::RK4: return rk4_step(S, t, h, F);
        case StepperKind::Family::GaussIRK: return gauss_irk_step(S, t, h, F, kind.stages);
        case StepperKind::Family::RK45: return dp5_step(S, t, h, F);
    }
    throw DomainError("unknown stepper");
}

namespace detail {

// step the matrix state M -> Q(t,h) M; evaluates P once per stage abscissa
template <class R>
Matrix<R> step_matrix(StepperKind kind, const FirstOrderSystem<R>& S, const R& t, const R& h,
                      const Matrix<R>& M, const GaussTableau<R>* T) {
    const int r = S.dim;
    switch (kind.family) {
        case StepperKind::Family::Euler: {
            Matrix<R> K = S.P(t) * M;
            Matrix<R> out = M;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) out(i, j) += h * K(i, j);
            return out;
        }
        case StepperKind::Family::RK4: {
            R half = h / 2;
            auto shifted = [&](const Matrix<R>& K, const R& w) {
                Matrix<R> X = M;
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < r; ++j) X(i, j) += w * K(i, j);
                return X;
            };
            Matrix<R> K1 = S.P(t) * M;
            Matrix<R> Pm = S.P(t + half);
            Matrix<R> K2 = Pm * shifted(K1, half);
            Matrix<R> K3 = Pm * shifted(K2, half);
            Matrix<R> K4 = S.P(t + h) * shifted(K3, h);
            Matrix<R> out = M;
            R w = h / 6;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    out(i, j) += w * (K1(i, j) + R(2) * K2(i, j) + R(2) * K3(i, j) + K4(i, j));
            return out;
        }
        case StepperKind::Family::GaussIRK: {
            const int s = T->s;
            std::vector<Matrix<R>> P(s);
            for (int i = 0; i < s; ++i) P[i] = S.P(t + T->c[i] * h);
            Matrix<R> A(s * r, s * r);
            for (int i = 0; i < s; ++i)
                for (int u = 0; u < r; ++u) {
                    A(i * r + u, i * r + u) = R(1);
                    for (int j = 0; j < s; ++j) {
                        R hij = h * T->a(i, j);
                        for (int v = 0; v < r; ++v) A(i * r + u, j * r + v) -= hij * P[i](u, v);
                    }
                }
            auto f = lu_factor(A);
            Matrix<R> out = M;
            for (int col = 0; col < r; ++col) {
                Vector<R> rhs(s * r);
                for (int i = 0; i < s; ++i) {
                    for (int u = 0; u < r; ++u) {
                        R acc(0);
                        for (int v = 0; v < r; ++v) acc += P[i](u, v) * M(v, col);
                        rhs[i * r + u] = acc;
                    }
                }
                Vector<R> k = f.solve(rhs);
                for (int i = 0; i < s; ++i) {
                    R w = h * T->b[i];
                    for (int u = 0; u < r; ++u) out(u, col) += w * k[i * r + u];
                }
            }
            return out;
        }
        case StepperKind::Family::RK45: {
            // one fixed DP5 step per column (rare path)
            Matrix<R> out(r, r);
            for (int j = 0; j < r; ++j) {
                Vector<R> col(r);
                for (int i = 0; i < r; ++i) col[i] = M(i, j);
                col = dp5_step(S, t, h, col);
                for (int i = 0; i < r; ++i) out(i, j) = col[i];
            }
            return out;
        }
    }
    throw DomainError("unknown stepper");
}

}  // namespace detail

// One-step propagator Q with step(F) = Q F; homogeneous systems only.
template <class R>
Matrix<R> propagator_matrix(StepperKind kind, const FirstOrderSystem<R>& S, const R& t, const R& h) {
    if (!S.homogeneous()) throw DomainError("propagator_matrix: system must be homogeneous");
    GaussTableau<R> T;
    if (kind.family == StepperKind::Family::GaussIRK) T = gauss_tableau<R>(kind.stages);
    return detail::step_matrix(kind, S, t, h, Matrix<R>::identity(S.dim), &T);
}

// Fixed-step initial value solve over a grid. Blow-up truncates the table
// and is recorded as a diagnostic, not an error.
template <class R>
SolutionTable<R> solve_ivp(StepperKind kind, const FirstOrderSystem<R>& S, const Vector<R>& F0,
                           const Grid<R>& grid) {
    SolutionTable<R> out;
    out.grid = grid;
    out.stepper_name = kind.name();
    out.digits = scalar<R>::context_digits();
    out.states.reserve(grid.size());
    out.states.push_back(F0);

    GaussTableau<R> T;
    if (kind.family == StepperKind::Family::GaussIRK) T = gauss_tableau<R>(kind.stages);

    Vector<R> F = F0;
    for (long i = 0; i < grid.N; ++i) {
        R t = grid.node(i);
        if (kind.family == StepperKind::Family::GaussIRK)
            F = gauss_irk_step(S, t, grid.h, F, T);
        else
            F = stepper_step(kind, S, t, grid.h, F);
        bool blown = false;
        for (std::size_t u = 0; u < F.size(); ++u)
            if (blown_up(F[u])) blown = true;
        out.states.push_back(F);
        if (blown) {
            out.diag.blowup_index = i + 1;
            out.diag.note = "state magnitude cap exceeded at t=" + format_shortest(to_double(grid.node(i + 1)));
            break;
        }
    }
    return out;
}

// Adaptive Dormand-Prince 5(4) over [t0,t1] with dense output interpolated
// onto a uniform table of out_nodes+1 nodes (cubic Hermite inside steps).
template <class R>
SolutionTable<R> rk45_solve(const FirstOrderSystem<R>& S, const Vector<R>& F0, const R& t0, const R& t1,
                            double rtol, double atol, long out_nodes = 200, double h_init = 1e-3) {
    if (rtol <= 0 && atol <= 0) throw DomainError("rk45_solve: need rtol > 0 or atol > 0");
    SolutionTable<R> out;
    out.stepper_name = "rk45";
    out.digits = scalar<R>::context_digits();
    if (t1 == t0) {
        out.grid = Grid<R>(t0, R(1), 1);
        out.grid.N = 0;
        out.states.push_back(F0);
        return out;
    }
    out.grid = Grid<R>::over_interval(t0, t1, out_nodes);
    out.states.assign(out.grid.size(), Vector<R>(S.dim));
    out.states[0] = F0;

    const int D = scalar<R>::context_digits();
    R underflow_scale = pow10_int<R>(2 - D);

    R t = t0, h = scalar<R>::from_double(h_init);
    Vector<R> y = F0;
    Vector<R> f_t = system_rhs(S, t, y);
    Dp45Work<R> w;
    long next_out = 1;
    R err_prev = scalar<R>::from_double(1.0);
    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        if (abs(h) < underflow_scale * (abs(t) + 1))
            throw StepUnderflowError("rk45: step size underflow (stiffness or blow-up); last good t=" +
                                         format_shortest(to_double(t)),
                                     to_double(t));
        dp45_step(S, t, h, y, w);
        // scaled RMS error norm
        R err(0);
        for (std::size_t u = 0; u < y.size(); ++u) {
            R sc = scalar<R>::from_double(atol) +
                   scalar<R>::from_double(rtol) * (abs(y[u]) > abs(w.y5[u]) ? abs(y[u]) : abs(w.y5[u]));
            if (sc == R(0)) continue;
            R e = (w.y5[u] - w.y4[u]) / sc;
            err += e * e;
        }
        err = sqrt(err / static_cast<int>(y.size()));
        if (err <= R(1)) {
            // accept; fill output nodes covered by [t, t+h] with Hermite interpolation
            R tn = t + h;
            Vector<R> f_n = w.k[6];
            while (next_out <= out.grid.N && out.grid.node(next_out) <= tn) {
                R tau = out.grid.node(next_out);
                R th = (tau - t) / h;
                for (std::size_t u = 0; u < y.size(); ++u) {
                    R d = w.y5[u] - y[u];
                    out.states[next_out][u] =
                        y[u] + th * d +
                        (th * (th - 1)) * ((R(1) - 2 * th) * d + (th - 1) * (h * f_t[u]) + th * (h * f_n[u]));
                }
                ++next_out;
            }
            t = tn;
            y = w.y5;
            f_t = f_n;
            out.diag.accepted++;
            // PI controller, safety 0.9, growth clamp [0.2, 5]
            R fac;
            if (err == R(0))
                fac = scalar<R>::from_double(5.0);
            else {
                fac = scalar<R>::from_double(0.9) * exp(R(-0.7) / 5 * log(err)) * exp(R(0.4) / 5 * log(err_prev));
                if (fac > R(5)) fac = R(5);
                if (fac < R(0.2)) fac = R(0.2);
            }
            h = h * fac;
            err_prev = (err > R(1e-10)) ? err : R(1e-10);
        } else {
            out.diag.rejected++;
            R fac = scalar<R>::from_double(0.9) * exp(R(-0.2) * log(err));
            if (fac < R(0.2)) fac = R(0.2);
            h = h * fac;
        }
        bool blown = false;
        for (std::size_t u = 0; u < y.size(); ++u)
            if (blown_up(y[u])) blown = true;
        if (blown) {
            out.diag.blowup_index = next_out;
            out.diag.note = "state magnitude cap exceeded near t=" + format_shortest(to_double(t));
            out.states.resize(next_out);
            return out;
        }
    }
    if (next_out == out.grid.N) {  // final node rounding guard
        out.states[out.grid.N] = y;
        ++next_out;
    }
    out.states.resize(next_out);
    return out;
}

}  // namespace hgm

#endif
