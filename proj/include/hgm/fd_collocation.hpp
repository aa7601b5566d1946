#ifndef HGM_FD_COLLOCATION_HPP
#define HGM_FD_COLLOCATION_HPP

#include <cmath>
#include <vector>

#include "hgm/linalg.hpp"
#include "hgm/operator_model.hpp"
#include "hgm/steppers.hpp"

namespace hgm {

// Backward-difference discretization of L f = b on a uniform grid:
//   sum_k c_k(t_i) nabla^k f_{i+s_k} / h^k ~ b(t_i),  0 <= s_k <= k.
struct StencilPlan {
    std::vector<int> shifts;  // s_k for k = 0..r; empty = default floor(k/2)
    bool normalize_rows = true;

    int shift(int k) const {
        if (shifts.empty()) return k / 2;
        return shifts.at(k);
    }
    static StencilPlan defaults() { return {}; }
};

template <class R>
struct SparseRow {
    std::vector<long> index;
    std::vector<R> value;
    R rhs;
};

// Row provenance for assembled systems.
enum class RowKind { Equation, Constraint };

template <class R>
struct AssembledSystem {
    Matrix<R> A;
    Vector<R> B;
    std::vector<RowKind> provenance;
    std::vector<long> row_site;  // grid index (equation) or data index (constraint)
    bool least_squares = false;
    Grid<R> grid;
    R condition_estimate_value;  // of the raw (pre-normalization) matrix
};

template <class R>
SparseRow<R> difference_row(const ScalarOperator<R>& L, const Grid<R>& grid, long i,
                            const StencilPlan& plan = {}) {
    const int r = L.rank;
    SparseRow<R> row;
    R t = grid.node(i);
    std::vector<R> acc(static_cast<std::size_t>(2 * r + 1), R(0));  // offsets relative to i-r..i+r
    for (int k = 0; k <= r; ++k) {
        if (L.coeffs[k].is_literal_zero()) continue;
        int sk = plan.shift(k);
        if (sk < 0 || sk > k) throw DomainError("stencil shift must satisfy 0 <= s_k <= k");
        if (i + sk - k < 0 || i + sk > grid.N)
            throw StencilRangeError("difference stencil leaves the grid at row " + std::to_string(i));
        R ck = L.coeffs[k].eval(t);
        R hk = pow(grid.h, static_cast<long>(k));
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
            // coefficient of f_{i+sk-j}: c_k (-1)^j C(k,j) / h^k
            R w = ck * ((j % 2 == 0) ? binom : -binom) / hk;
            acc[static_cast<std::size_t>(r + sk - j)] += w;
            binom = binom * (k - j) / (j + 1);
        }
    }
    for (int off = -r; off <= r; ++off) {
        const R& v = acc[static_cast<std::size_t>(r + off)];
        if (v == R(0)) continue;
        row.index.push_back(i + off);
        row.value.push_back(v);
    }
    row.rhs = L.rhs.eval(t);
    return row;
}

// Equation rows at every grid index whose stencil fits, plus one unit
// constraint row per data point (whose p must hit a grid node).
template <class R>
AssembledSystem<R> assemble_method_a(const ScalarOperator<R>& L, const Grid<R>& grid,
                                     const std::vector<DataPoint<R>>& data, const StencilPlan& plan = {},
                                     bool estimate_condition = false) {
    const int r = L.rank;
    int lo = 0, hi = 0;  // stencil reach
    for (int k = 0; k <= r; ++k) {
        if (L.coeffs[k].is_literal_zero()) continue;
        int sk = plan.shift(k);
        lo = std::min(lo, sk - k);
        hi = std::max(hi, sk);
    }
    std::vector<long> rows_at;
    for (long i = 0; i <= grid.N; ++i)
        if (i + lo >= 0 && i + hi <= grid.N) rows_at.push_back(i);

    std::vector<long> data_nodes;
    for (const auto& d : data) {
        R pos = (d.p - grid.t_start) / grid.h;
        long node = std::lround(to_double(pos));
        if (abs(pos - static_cast<int>(node)) > scalar<R>::from_double(1e-9) || node < 0 || node > grid.N)
            throw DataPointError("data point p=" + format_shortest(to_double(d.p)) +
                                 " does not coincide with a grid node");
        if (d.deriv_order != 0)
            throw DataPointError("method A constrains function values only (deriv_order 0)");
        for (long seen : data_nodes)
            if (seen == node) throw DataPointError("duplicate constraint at one node");
        data_nodes.push_back(node);
    }

    const long n_unknowns = grid.N + 1;
    const long n_rows = static_cast<long>(rows_at.size() + data.size());
    if (n_rows < n_unknowns)
        throw DomainError("method A needs at least N+1 equations+constraints (" + std::to_string(n_rows) +
                          " < " + std::to_string(n_unknowns) + ")");

    AssembledSystem<R> sys;
    sys.grid = grid;
    sys.least_squares = n_rows != n_unknowns;
    sys.A = Matrix<R>(n_rows, n_unknowns);
    sys.B = Vector<R>(n_rows);
    std::vector<bool> touched(static_cast<std::size_t>(n_unknowns), false);

    long rix = 0;
    for (long i : rows_at) {
        auto row = difference_row(L, grid, i, plan);
        for (std::size_t j = 0; j < row.index.size(); ++j) {
            sys.A(rix, row.index[j]) = row.value[j];
            touched[static_cast<std::size_t>(row.index[j])] = true;
        }
        sys.B[rix] = row.rhs;
        sys.provenance.push_back(RowKind::Equation);
        sys.row_site.push_back(i);
        ++rix;
    }
    for (std::size_t j = 0; j < data.size(); ++j) {
        sys.A(rix, data_nodes[j]) = R(1);
        sys.B[rix] = data[j].q;
        touched[static_cast<std::size_t>(data_nodes[j])] = true;
        sys.provenance.push_back(RowKind::Constraint);
        sys.row_site.push_back(static_cast<long>(j));
        ++rix;
    }
    for (long j = 0; j < n_unknowns; ++j)
        if (!touched[static_cast<std::size_t>(j)])
            throw DomainError("unknown f_" + std::to_string(j) + " appears in no row");

    if (plan.normalize_rows) {
        for (long i = 0; i < n_rows; ++i) {
            R mx(0);
            for (long j = 0; j < n_unknowns; ++j)
                if (abs(sys.A(i, j)) > mx) mx = abs(sys.A(i, j));
            if (mx == R(0)) continue;
            for (long j = 0; j < n_unknowns; ++j) sys.A(i, j) = sys.A(i, j) / mx;
            sys.B[i] = sys.B[i] / mx;
        }
    }

    // 1-norm estimate for the matrix as it will be solved
    if (estimate_condition && !sys.least_squares)
        sys.condition_estimate_value = condition_estimate(sys.A);
    else
        sys.condition_estimate_value = R(0);
    return sys;
}

template <class R>
struct MethodAResult {
    SolutionTable<R> table;
    R residual;
    R condition_estimate_value;
};

template <class R>
MethodAResult<R> solve_method_a(const AssembledSystem<R>& sys) {
    MethodAResult<R> out;
    Vector<R> f;
    if (sys.least_squares) {
        auto ls = qr_least_squares(sys.A, sys.B);
        f = ls.x;
        out.residual = ls.residual_norm;
    } else {
        auto lin = lu_solve(sys.A, sys.B);
        f = lin.x;
        out.residual = lin.residual;
    }
    out.condition_estimate_value = sys.condition_estimate_value;
    out.table.grid = sys.grid;
    out.table.stepper_name = "method-a";
    out.table.digits = scalar<R>::context_digits();
    out.table.states.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        Vector<R> st(1);
        st[0] = f[i];
        out.table.states.push_back(st);
    }
    return out;
}

}  // namespace hgm

#endif
