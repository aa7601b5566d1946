#ifndef HGM_OPERATOR_MODEL_HPP
#define HGM_OPERATOR_MODEL_HPP

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hgm/expr.hpp"
#include "hgm/jet.hpp"
#include "hgm/linalg.hpp"

namespace hgm {

// L = sum_k c_k(t) d^k acting on scalar functions, plus inhomogeneous b(t).
template <class R>
struct ScalarOperator {
    int rank = 0;
    std::vector<Expr<R>> coeffs;  // c_0 .. c_rank
    Expr<R> rhs;                  // b(t); literal zero when homogeneous
    std::map<std::string, R> params;

    bool homogeneous() const { return rhs.is_literal_zero(); }

    R coeff_at(int k, const R& t) const { return coeffs[k].eval(t); }

    // (L f)(t) from the jet of f at t; the caller subtracts b where needed
    R apply(const Jet<R>& f_jet, const R& t) const {
        if (f_jet.order() < rank) throw DomainError("apply_operator: jet order below operator rank");
        R acc(0);
        for (int k = 0; k <= rank; ++k) {
            if (coeffs[k].is_literal_zero()) continue;
            acc += coeffs[k].eval(t) * f_jet[k];
        }
        return acc;
    }
};

template <class R>
R apply_operator(const ScalarOperator<R>& L, const Jet<R>& f_jet, const R& t) {
    return L.apply(f_jet, t);
}

template <class R>
ScalarOperator<R> parse_operator(const std::string& text, const std::map<std::string, R>& params = {},
                                 const std::string& rhs_text = "0") {
    parsing::Parser<R> p(text, params, /*allow_d=*/true);
    auto poly = p.parse_all();
    int rank = poly.coeff.rbegin()->first;
    if (rank < 0) throw ParseError("operator has negative d power", 1, 1);
    ScalarOperator<R> op;
    op.rank = rank;
    op.params = params;
    op.coeffs.assign(rank + 1, Expr<R>::literal(R(0), "0"));
    for (auto& [k, e] : poly.coeff) op.coeffs[k] = e;
    if (op.coeffs[rank].is_literal_zero())
        throw ParseError("zero leading coefficient (of d^" + std::to_string(rank) + ")", 1, 1);
    op.rhs = parse_expr<R>(rhs_text, params);
    return op;
}

template <class R>
std::string serialize(const ScalarOperator<R>& op) {
    std::string s;
    for (int k = op.rank; k >= 0; --k) {
        if (op.coeffs[k].is_literal_zero() && k != op.rank) continue;
        if (!s.empty()) s += " + ";
        std::string c = op.coeffs[k].str();
        if (k == 0)
            s += c;
        else if (k == 1)
            s += c + "*d";
        else
            s += c + "*d^" + std::to_string(k);
    }
    return s;
}

// F' = P(t) F + B(t); B absent means homogeneous.
template <class R>
struct FirstOrderSystem {
    int dim = 0;
    std::function<Matrix<R>(const R&)> P;
    std::function<Vector<R>(const R&)> B;  // may be empty
    std::vector<R> singular_points;

    bool homogeneous() const { return !B; }
};

// Companion form: state (f, f', ..., f^(r-1)).
template <class R>
FirstOrderSystem<R> companion_system(const ScalarOperator<R>& L, std::vector<R> declared_singular = {}) {
    const int r = L.rank;
    FirstOrderSystem<R> S;
    S.dim = r;
    S.singular_points = std::move(declared_singular);
    auto op = std::make_shared<ScalarOperator<R>>(L);
    S.P = [op, r](const R& t) {
        R lead = op->coeffs[r].eval(t);
        if (lead == R(0))
            throw SingularPointError("leading coefficient vanishes at t", to_double(t));
        Matrix<R> P(r, r);
        for (int i = 0; i + 1 < r; ++i) P(i, i + 1) = R(1);
        for (int j = 0; j < r; ++j) P(r - 1, j) = -(op->coeffs[j].eval(t)) / lead;
        return P;
    };
    if (!L.homogeneous()) {
        S.B = [op, r](const R& t) {
            R lead = op->coeffs[r].eval(t);
            if (lead == R(0))
                throw SingularPointError("leading coefficient vanishes at t", to_double(t));
            Vector<R> B(r);
            B[r - 1] = op->rhs.eval(t) / lead;
            return B;
        };
    }
    return S;
}

// G = g^{-1} F with g(t) = exp(alpha t) t^beta:
// P_new = P - (alpha + beta/t) I; a nonzero B is scaled by g^{-1} too.
template <class R>
FirstOrderSystem<R> gauge_transform(const FirstOrderSystem<R>& S, const R& alpha, const R& beta) {
    FirstOrderSystem<R> G;
    G.dim = S.dim;
    G.singular_points = S.singular_points;
    if (beta != R(0)) G.singular_points.push_back(R(0));
    auto P0 = S.P;
    int dim = S.dim;
    G.P = [P0, alpha, beta, dim](const R& t) {
        Matrix<R> P = P0(t);
        R shift = alpha;
        if (beta != R(0)) {
            if (t == R(0)) throw SingularPointError("gauge factor t^beta singular at t=0", 0.0);
            shift += beta / t;
        }
        for (int i = 0; i < dim; ++i) P(i, i) -= shift;
        return P;
    };
    if (S.B) {
        auto B0 = S.B;
        G.B = [B0, alpha, beta](const R& t) {
            Vector<R> B = B0(t);
            R g = exp(alpha * t);
            if (beta != R(0)) {
                if (t == R(0)) throw SingularPointError("gauge factor t^beta singular at t=0", 0.0);
                g = g * exp(beta * log(t));
            }
            for (std::size_t i = 0; i < B.size(); ++i) B[i] = B[i] / g;
            return B;
        };
    }
    return G;
}

// Uniform grid; nodes derived from t_start + i*h, never accumulated.
template <class R>
struct Grid {
    R t_start;
    R h;
    long N = 0;

    Grid() : t_start(0), h(1) {}
    Grid(const R& start, const R& step, long n) : t_start(start), h(step), N(n) {
        if (!(step > R(0))) throw DomainError("grid step must be positive");
        if (n < 1) throw DomainError("grid needs N >= 1");
    }
    static Grid over_interval(const R& a, const R& b, long n) {
        return Grid(a, (b - a) / static_cast<int>(n), n);
    }

    R node(long i) const { return t_start + static_cast<int>(i) * h; }
    R t_end() const { return node(N); }
    long size() const { return N + 1; }
};

template <class R>
struct DataPoint {
    R p;                  // location
    R q;                  // value (or derivative value)
    int deriv_order = 0;  // 0 = function value
};

}  // namespace hgm

#endif
