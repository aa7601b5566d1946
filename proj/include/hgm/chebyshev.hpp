#ifndef HGM_CHEBYSHEV_HPP
#define HGM_CHEBYSHEV_HPP

#include <vector>

#include "hgm/linalg.hpp"
#include "hgm/operator_model.hpp"

namespace hgm {

// n Chebyshev points of the second kind, ascending, mapped onto [a,b].
template <class R>
struct ChebGrid {
    int n = 0;
    R a, b;
    std::vector<R> x;  // reference points on [-1,1]
    std::vector<R> t;  // mapped points on [a,b]

    R map_scale() const { return R(2) / (b - a); }  // dx/dt
};

template <class R>
ChebGrid<R> cheb_points(int n, const R& a, const R& b) {
    if (n < 2) throw DomainError("cheb_points needs n >= 2");
    if (!(b > a)) throw DomainError("cheb_points needs b > a");
    ChebGrid<R> g;
    g.n = n;
    g.a = a;
    g.b = b;
    g.x.resize(n);
    g.t.resize(n);
    R pi = scalar<R>::pi();
    // sine form keeps the set exactly symmetric; endpoints are exact
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            g.x[i] = R(-1);
        else if (i == n - 1)
            g.x[i] = R(1);
        else if (2 * i == n - 1)
            g.x[i] = R(0);
        else
            g.x[i] = sin(pi * (2 * i - (n - 1)) / (2 * (n - 1)));
    }
    R mid = (a + b) / 2, half = (b - a) / 2;
    for (int i = 0; i < n; ++i) g.t[i] = mid + half * g.x[i];
    return g;
}

// Barycentric weights for second-kind points: (-1)^i, halved at the ends.
template <class R>
std::vector<R> barycentric_weights(int n) {
    std::vector<R> w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = (i % 2 == 0) ? R(1) : R(-1);
        if (i == 0 || i == n - 1) w[i] = w[i] / 2;
    }
    return w;
}

// Row of interpolation weights from grid values to the point t (exact unit
// row when t hits a node).
template <class R>
Vector<R> barycentric_row(const ChebGrid<R>& g, const R& t) {
    auto w = barycentric_weights<R>(g.n);
    Vector<R> row(g.n);
    for (int i = 0; i < g.n; ++i)
        if (t == g.t[i]) {
            row[i] = R(1);
            return row;
        }
    R denom(0);
    for (int i = 0; i < g.n; ++i) denom += w[i] / (t - g.t[i]);
    for (int i = 0; i < g.n; ++i) row[i] = (w[i] / (t - g.t[i])) / denom;
    return row;
}

template <class R>
R barycentric_eval(const ChebGrid<R>& g, const Vector<R>& values, const R& t) {
    if (static_cast<int>(values.size()) != g.n) throw DomainError("barycentric_eval: values size mismatch");
    Vector<R> row = barycentric_row(g, t);
    return dot(row, values);
}

// First-derivative matrix on the grid (negative-sum trick on the diagonal),
// scaled for the [a,b] mapping.
template <class R>
Matrix<R> diff_matrix(const ChebGrid<R>& g) {
    const int n = g.n;
    auto w = barycentric_weights<R>(n);
    Matrix<R> D(n, n);
    for (int i = 0; i < n; ++i) {
        R rowsum(0);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            D(i, j) = (w[j] / w[i]) / (g.x[i] - g.x[j]);
            rowsum += D(i, j);
        }
        D(i, i) = -rowsum;
    }
    R s = g.map_scale();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D(i, j) = D(i, j) * s;
    return D;
}

// Rectangular down-sampled differentiation M(n_out, n; s) = E D^s, where E
// resamples from the n points onto the n_out points.
template <class R>
Matrix<R> rect_diff_matrix(int n_out, int n, int s, const R& a, const R& b) {
    if (n_out < 1 || n < 2 || s < 0) throw DomainError("rect_diff_matrix: invalid dimensions");
    ChebGrid<R> X = cheb_points(n, a, b);
    Matrix<R> M = Matrix<R>::identity(n);
    if (s > 0) {
        Matrix<R> D = diff_matrix(X);
        for (int k = 0; k < s; ++k) M = D * M;
    }
    if (n_out == n) return M;
    ChebGrid<R> Y = cheb_points(n_out, a, b);
    Matrix<R> E(n_out, n);
    for (int i = 0; i < n_out; ++i) {
        Vector<R> row = barycentric_row(X, Y.t[i]);
        for (int j = 0; j < n; ++j) E(i, j) = row[j];
    }
    return E * M;
}

template <class R>
struct SpectralSolution {
    ChebGrid<R> grid;
    Vector<R> values;

    R operator()(const R& t) const { return barycentric_eval(grid, values, t); }
};

// Rows 0..n-r-1: sum_i diag(c_i(Y)) M(n-r,n;i), rhs b(Y);
// rows n-r..n-1: one (derivative-)evaluation row per condition.
template <class R>
std::pair<Matrix<R>, Vector<R>> assemble_spectral(const ScalarOperator<R>& L, const ChebGrid<R>& X,
                                                  const std::vector<DataPoint<R>>& conditions) {
    const int n = X.n;
    const int r = L.rank;
    if (static_cast<int>(conditions.size()) != r)
        throw DomainError("assemble_spectral: need exactly rank-many conditions");
    if (n <= r) throw DomainError("assemble_spectral: n must exceed the rank");
    ChebGrid<R> Y = cheb_points(n - r, X.a, X.b);
    Matrix<R> A(n, n);
    Vector<R> B(n);
    for (int i = 0; i <= r; ++i) {
        if (L.coeffs[i].is_literal_zero()) continue;
        Matrix<R> Mi = rect_diff_matrix(n - r, n, i, X.a, X.b);
        for (int row = 0; row < n - r; ++row) {
            R ci = L.coeffs[i].eval(Y.t[row]);
            if (ci == R(0)) continue;
            for (int col = 0; col < n; ++col) A(row, col) += ci * Mi(row, col);
        }
    }
    for (int row = 0; row < n - r; ++row) B[row] = L.rhs.eval(Y.t[row]);

    Matrix<R> D = diff_matrix(X);
    for (int c = 0; c < r; ++c) {
        const auto& cond = conditions[c];
        if (cond.p < X.a || cond.p > X.b)
            throw DataPointError("condition point outside the interval");
        Vector<R> row = barycentric_row(X, cond.p);
        for (int d = 0; d < cond.deriv_order; ++d) {
            Vector<R> next(n);
            for (int j = 0; j < n; ++j) {
                R acc(0);
                for (int k = 0; k < n; ++k) acc += row[k] * D(k, j);
                next[j] = acc;
            }
            row = next;
        }
        for (int j = 0; j < n; ++j) A(n - r + c, j) = row[j];
        B[n - r + c] = cond.q;
    }
    return {A, B};
}

template <class R>
SpectralSolution<R> solve_spectral(const ScalarOperator<R>& L, const R& a, const R& b, int n,
                                   const std::vector<DataPoint<R>>& conditions) {
    ChebGrid<R> X = cheb_points(n, a, b);
    auto [A, B] = assemble_spectral(L, X, conditions);
    SpectralSolution<R> sol;
    sol.grid = X;
    sol.values = lu_solve(A, B).x;
    return sol;
}

}  // namespace hgm

#endif
