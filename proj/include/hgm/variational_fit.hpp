#ifndef HGM_VARIATIONAL_FIT_HPP
#define HGM_VARIATIONAL_FIT_HPP

#include <vector>

#include "hgm/expr.hpp"
#include "hgm/linalg.hpp"
#include "hgm/operator_model.hpp"

namespace hgm {

// Expansion basis {e_k(t)}, each member evaluable as a jet of any order.
template <class R>
struct BasisFamily {
    std::vector<Expr<R>> members;

    std::size_t size() const { return members.size(); }

    static BasisFamily monomial(const R& center, int count) {
        BasisFamily B;
        Expr<R> t = Expr<R>::time();
        Expr<R> shifted = t - Expr<R>::literal(center);
        for (int j = 0; j < count; ++j) B.members.push_back(Expr<R>::pow_int(shifted, j));
        return B;
    }

    // Chebyshev polynomials T_j of the affine map of [a,b] onto [-1,1]
    static BasisFamily chebyshev_on(const R& a, const R& b, int count) {
        BasisFamily B;
        Expr<R> t = Expr<R>::time();
        Expr<R> x = (Expr<R>::literal(R(2)) * t - Expr<R>::literal(a + b)) / Expr<R>::literal(b - a);
        Expr<R> prev = Expr<R>::literal(R(1), "1");
        if (count >= 1) B.members.push_back(prev);
        Expr<R> cur = x;
        if (count >= 2) B.members.push_back(cur);
        for (int j = 2; j < count; ++j) {
            Expr<R> next = Expr<R>::literal(R(2)) * x * cur - prev;
            B.members.push_back(next);
            prev = cur;
            cur = next;
        }
        return B;
    }

    // e_j(t) = t^(gnum/gden) * exp(kappa * t^(snum/sden)) * t^(-j/2)
    static BasisFamily asymptotic_power(long gnum, long gden, const R& kappa, long snum, long sden,
                                        int count) {
        BasisFamily B;
        Expr<R> t = Expr<R>::time();
        Expr<R> osc = Expr<R>::unary(ExprKind::Exp, Expr<R>::literal(kappa) * expr_rational_power_of_t<R>(snum, sden));
        for (int j = 0; j < count; ++j) {
            // t^(gnum/gden - j/2) as a single rational power
            long num = gnum * 2 - static_cast<long>(j) * gden;
            long den = gden * 2;
            B.members.push_back(expr_rational_power_of_t<R>(num, den) * osc);
        }
        return B;
    }

    static BasisFamily user(std::vector<Expr<R>> exprs) {
        BasisFamily B;
        B.members = std::move(exprs);
        return B;
    }
};

template <class R>
R eval_fit(const BasisFamily<R>& basis, const Vector<R>& coeffs, const R& t, int deriv = 0) {
    R acc(0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (deriv == 0)
            acc += coeffs[k] * basis.members[k].eval(t);
        else
            acc += coeffs[k] * basis.members[k].eval_jet(t, deriv)[deriv];
    }
    return acc;
}

// I_N(g) = sum T_j g(t_j) with nonnegative weights on increasing nodes.
template <class R>
struct QuadratureRule {
    std::vector<R> nodes, weights;

    static QuadratureRule trapezoid(const R& a, const R& b, long N) {
        if (!(b > a) || N < 1) throw DomainError("trapezoid rule needs b > a and N >= 1");
        QuadratureRule Q;
        R h = (b - a) / static_cast<int>(N);
        for (long j = 0; j <= N; ++j) {
            Q.nodes.push_back(a + static_cast<int>(j) * h);
            Q.weights.push_back((j == 0 || j == N) ? h / 2 : h);
        }
        return Q;
    }

    // interior Chebyshev points with weights (pi/k) sin^2(i pi / k), the
    // quadrature for the measure sqrt(1-x^2) dx mapped onto [a,b]
    static QuadratureRule chebyshev_weight(const R& a, const R& b, int k) {
        if (k < 2) throw DomainError("chebyshev weight rule needs k >= 2");
        QuadratureRule Q;
        R pi = scalar<R>::pi();
        R half = (b - a) / 2, mid = (a + b) / 2;
        for (int i = 1; i < k; ++i) {
            R theta = pi * i / k;
            Q.nodes.push_back(mid - half * cos(theta));
            R s = sin(theta);
            Q.weights.push_back(pi / k * (s * s) * half);
        }
        return Q;
    }

    R refine_hint() const { return R(0); }
};

template <class R>
struct DesignMatrix {
    Matrix<R> G;  // sqrt(T_j) (L e_k)(t_j)
    Vector<R> g;  // sqrt(T_j) b(t_j)
};

template <class R>
DesignMatrix<R> design_matrix(const ScalarOperator<R>& L, const BasisFamily<R>& basis,
                              const QuadratureRule<R>& quad) {
    const std::size_t M1 = basis.size();
    const std::size_t n = quad.nodes.size();
    DesignMatrix<R> D;
    D.G = Matrix<R>(n, M1);
    D.g = Vector<R>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const R& t = quad.nodes[j];
        R w = sqrt(quad.weights[j]);
        for (std::size_t k = 0; k < M1; ++k) {
            Jet<R> jet = basis.members[k].eval_jet(t, L.rank);
            D.G(j, k) = w * apply_operator(L, jet, t);
        }
        D.g[j] = w * L.rhs.eval(t);
    }
    return D;
}

template <class R>
struct FitResult {
    Vector<R> coefficients;
    R loss;                          // l = ||G F - g||^2 at the returned F
    Vector<R> constraint_residuals;  // fit(p_i) - q_i
    R gram_objective;                // F^T S F when method C produced it
    bool has_gram = false;
};

namespace detail {

template <class R>
Matrix<R> constraint_matrix(const BasisFamily<R>& basis, const std::vector<DataPoint<R>>& data) {
    Matrix<R> C(data.size(), basis.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = i + 1; j < data.size(); ++j)
            if (data[i].p == data[j].p && data[i].deriv_order == data[j].deriv_order)
                throw RankDeficiencyError("duplicate data point", static_cast<int>(j));
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (data[i].deriv_order == 0)
                C(i, k) = basis.members[k].eval(data[i].p);
            else
                C(i, k) = basis.members[k].eval_jet(data[i].p, data[i].deriv_order)[data[i].deriv_order];
        }
    }
    return C;
}

template <class R>
void finish(FitResult<R>& out, const DesignMatrix<R>& D, const Matrix<R>& C,
            const std::vector<DataPoint<R>>& data) {
    Vector<R> r = D.G * out.coefficients - D.g;
    out.loss = dot(r, r);
    out.constraint_residuals = Vector<R>(data.size());
    Vector<R> cf = C * out.coefficients;
    for (std::size_t i = 0; i < data.size(); ++i) out.constraint_residuals[i] = cf[i] - data[i].q;
}

}  // namespace detail

// Method B, hard-constrained: minimize ||G F - g||^2 s.t. fit(p_i) = q_i,
// solved through the KKT system.
template <class R>
FitResult<R> fit_method_b_constrained(const ScalarOperator<R>& L, const BasisFamily<R>& basis,
                                      const QuadratureRule<R>& quad,
                                      const std::vector<DataPoint<R>>& data) {
    const std::size_t m = basis.size();
    if (data.size() > m)
        throw DomainError("method B constrained: more constraints than basis members");
    auto D = design_matrix(L, basis, quad);
    Matrix<R> C = detail::constraint_matrix(basis, data);

    const std::size_t nk = m + data.size();
    Matrix<R> K(nk, nk);
    Vector<R> rhs(nk);
    // 2 G^T G block
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            R acc(0);
            for (std::size_t q = 0; q < D.G.rows(); ++q) acc += D.G(q, i) * D.G(q, j);
            K(i, j) = 2 * acc;
        }
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) {
            K(m + i, j) = C(i, j);
            K(j, m + i) = C(i, j);
        }
    for (std::size_t i = 0; i < m; ++i) {
        R acc(0);
        for (std::size_t q = 0; q < D.G.rows(); ++q) acc += D.G(q, i) * D.g[q];
        rhs[i] = 2 * acc;
    }
    for (std::size_t i = 0; i < data.size(); ++i) rhs[m + i] = data[i].q;

    Vector<R> sol = lu_solve(K, rhs).x;
    FitResult<R> out;
    out.coefficients = Vector<R>(m);
    for (std::size_t i = 0; i < m; ++i) out.coefficients[i] = sol[i];
    detail::finish(out, D, C, data);
    const int Dg = scalar<R>::context_digits();
    R tol = pow10_int<R>(8 - Dg);
    R qmax(0);
    for (auto& d : data)
        if (abs(d.q) > qmax) qmax = abs(d.q);
    for (std::size_t i = 0; i < data.size(); ++i)
        if (abs(out.constraint_residuals[i]) > tol * (qmax + 1))
            throw ConvergenceError("constraint residual above tolerance after KKT solve");
    return out;
}

// Method B, penalized: minimize a l + b sum (fit(p_i)-q_i)^2 + c ||F||^2
// as one stacked linear least-squares problem.
template <class R>
FitResult<R> fit_method_b_penalized(const ScalarOperator<R>& L, const BasisFamily<R>& basis,
                                    const QuadratureRule<R>& quad, const std::vector<DataPoint<R>>& data,
                                    const R& alpha, const R& beta, const R& gamma) {
    if (alpha < R(0) || beta < R(0) || gamma < R(0) || (alpha == R(0) && beta == R(0)))
        throw DomainError("method B penalized: need alpha,beta >= 0, gamma >= 0, alpha+beta > 0");
    auto D = design_matrix(L, basis, quad);
    Matrix<R> C = detail::constraint_matrix(basis, data);
    const std::size_t m = basis.size();
    const std::size_t rows = D.G.rows() + data.size() + (gamma > R(0) ? m : 0);
    Matrix<R> A(rows, m);
    Vector<R> b(rows);
    R sa = sqrt(alpha), sb = sqrt(beta), sc = gamma > R(0) ? sqrt(gamma) : R(0);
    for (std::size_t i = 0; i < D.G.rows(); ++i) {
        for (std::size_t k = 0; k < m; ++k) A(i, k) = sa * D.G(i, k);
        b[i] = sa * D.g[i];
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) A(D.G.rows() + i, k) = sb * C(i, k);
        b[D.G.rows() + i] = sb * data[i].q;
    }
    if (gamma > R(0))
        for (std::size_t k = 0; k < m; ++k) A(D.G.rows() + data.size() + k, k) = sc;

    FitResult<R> out;
    out.coefficients = qr_least_squares(A, b).x;
    detail::finish(out, D, C, data);
    return out;
}

// Gram matrix S = G^T G, so S_ij ~ integral (L e_i)(L e_j) d mu.
template <class R>
Matrix<R> gram_matrix(const ScalarOperator<R>& L, const BasisFamily<R>& basis,
                      const QuadratureRule<R>& quad) {
    auto D = design_matrix(L, basis, quad);
    const std::size_t m = basis.size();
    Matrix<R> S(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            R acc(0);
            for (std::size_t q = 0; q < D.G.rows(); ++q) acc += D.G(q, i) * D.G(q, j);
            S(i, j) = acc;
            S(j, i) = acc;
        }
    return S;
}

enum class MethodCMode { Penalized, Constrained };

// Method C: the Gram quadratic program. Penalized solves the normal
// equations (S + P^T P) F = P^T Q; Constrained minimizes F^T S F subject to
// P F = Q via KKT, falling back to the minimum-norm feasible point when the
// KKT matrix is singular (e.g. a kernel basis with S = 0).
template <class R>
FitResult<R> fit_method_c(const Matrix<R>& S, const BasisFamily<R>& basis,
                          const std::vector<DataPoint<R>>& data, MethodCMode mode) {
    const std::size_t m = basis.size();
    Matrix<R> P = detail::constraint_matrix(basis, data);
    Vector<R> Q(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) Q[i] = data[i].q;

    FitResult<R> out;
    if (mode == MethodCMode::Penalized) {
        Matrix<R> A = S;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                R acc(0);
                for (std::size_t q = 0; q < data.size(); ++q) acc += P(q, i) * P(q, j);
                A(i, j) += acc;
            }
        Vector<R> rhs(m);
        for (std::size_t i = 0; i < m; ++i) {
            R acc(0);
            for (std::size_t q = 0; q < data.size(); ++q) acc += P(q, i) * Q[q];
            rhs[i] = acc;
        }
        out.coefficients = lu_solve(A, rhs).x;
    } else {
        const std::size_t nk = m + data.size();
        Matrix<R> K(nk, nk);
        Vector<R> rhs(nk);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) K(i, j) = 2 * S(i, j);
        for (std::size_t i = 0; i < data.size(); ++i)
            for (std::size_t j = 0; j < m; ++j) {
                K(m + i, j) = P(i, j);
                K(j, m + i) = P(i, j);
            }
        for (std::size_t i = 0; i < data.size(); ++i) rhs[m + i] = Q[i];
        try {
            Vector<R> sol = lu_solve(K, rhs).x;
            out.coefficients = Vector<R>(m);
            for (std::size_t i = 0; i < m; ++i) out.coefficients[i] = sol[i];
        } catch (const SingularMatrixError&) {
            // minimum-norm feasible point plus the S-optimal null-space move
            Matrix<R> PPt(data.size(), data.size());
            for (std::size_t i = 0; i < data.size(); ++i)
                for (std::size_t j = 0; j < data.size(); ++j) {
                    R acc(0);
                    for (std::size_t k = 0; k < m; ++k) acc += P(i, k) * P(j, k);
                    PPt(i, j) = acc;
                }
            Vector<R> lam = lu_solve(PPt, Q).x;
            Vector<R> Fp(m);
            for (std::size_t k = 0; k < m; ++k) {
                R acc(0);
                for (std::size_t i = 0; i < data.size(); ++i) acc += P(i, k) * lam[i];
                Fp[k] = acc;
            }
            Matrix<R> Z = null_space(P);
            const std::size_t nz = Z.cols();
            Matrix<R> ZtSZ(nz, nz);
            Vector<R> ZtSFp(nz);
            Matrix<R> SZ = S * Z;
            Vector<R> SFp = S * Fp;
            for (std::size_t i = 0; i < nz; ++i) {
                for (std::size_t j = 0; j < nz; ++j) {
                    R acc(0);
                    for (std::size_t k = 0; k < m; ++k) acc += Z(k, i) * SZ(k, j);
                    ZtSZ(i, j) = acc;
                }
                R acc(0);
                for (std::size_t k = 0; k < m; ++k) acc += Z(k, i) * SFp[k];
                ZtSFp[i] = acc;
            }
            Vector<R> w(nz);
            try {
                w = lu_solve(ZtSZ, -ZtSFp).x;
            } catch (const SingularMatrixError&) {
                // S vanishes on the feasible set: keep the minimum-norm point
            }
            out.coefficients = Fp + Z * w;
        }
    }
    // objective and residuals
    Vector<R> SF = S * out.coefficients;
    out.gram_objective = dot(out.coefficients, SF);
    out.has_gram = true;
    out.constraint_residuals = Vector<R>(data.size());
    Vector<R> pf = P * out.coefficients;
    for (std::size_t i = 0; i < data.size(); ++i) out.constraint_residuals[i] = pf[i] - Q[i];
    out.loss = out.gram_objective;  // same quadratic form under the shared quadrature
    return out;
}

// Computable surrogate for the quadrature-error term of the loss bound:
// integral |Lf-b|^2 dmu <= loss + e_N, estimated by refining the rule.
template <class R>
R lemma2_bound(const FitResult<R>& fit, const R& refined_quad_loss) {
    return fit.loss + abs(refined_quad_loss - fit.loss);
}

}  // namespace hgm

#endif
