#ifndef HGM_DEFUSING_HPP
#define HGM_DEFUSING_HPP

#include <string>
#include <vector>

#include "hgm/linalg.hpp"
#include "hgm/operator_model.hpp"
#include "hgm/steppers.hpp"

namespace hgm {

// Ordered product Q(N-1,h)...Q(0,h) of one-step propagators, with its eigen
// decomposition and checkpointed partial products for trajectory rebuilds.
template <class R>
struct MatrixFactorial {
    Matrix<R> Q;
    Grid<R> grid;
    StepperKind stepper;
    EigenDecomposition<R> eigen;
    long checkpoint_stride = 0;
    std::vector<Matrix<R>> partials;  // partials[j] = product of the first j*stride factors
};

// Raw ordered product without the eigen step (also used by fixtures whose
// spectrum is degenerate).
template <class R>
Matrix<R> propagator_product(StepperKind kind, const FirstOrderSystem<R>& S, const Grid<R>& grid,
                             long* checkpoint_stride = nullptr, std::vector<Matrix<R>>* partials = nullptr) {
    if (!S.homogeneous()) throw DomainError("matrix_factorial: system must be homogeneous");
    GaussTableau<R> T;
    if (kind.family == StepperKind::Family::GaussIRK) T = gauss_tableau<R>(kind.stages);
    const int r = S.dim;
    Matrix<R> Q = Matrix<R>::identity(r);
    long stride = std::max(1L, grid.N / 1000);
    if (checkpoint_stride) *checkpoint_stride = stride;
    if (partials) {
        partials->clear();
        partials->push_back(Q);
    }
    for (long i = 0; i < grid.N; ++i) {
        R t = grid.node(i);
        Q = detail::step_matrix(kind, S, t, grid.h, Q, &T);
        if (blown_up(max_abs(Q)))
            throw OverflowError("matrix factorial overflow at step " + std::to_string(i) +
                                "; retry at higher precision D");
        if (partials && (i + 1) % stride == 0) partials->push_back(Q);
    }
    return Q;
}

template <class R>
MatrixFactorial<R> matrix_factorial(StepperKind kind, const FirstOrderSystem<R>& S, const Grid<R>& grid) {
    MatrixFactorial<R> mf;
    mf.grid = grid;
    mf.stepper = kind;
    mf.Q = propagator_product(kind, S, grid, &mf.checkpoint_stride, &mf.partials);
    mf.eigen = real_eigen(mf.Q);
    return mf;
}

struct DefusePolicy {
    enum class Cut { SpectralGap, Threshold } cut = Cut::SpectralGap;
    double threshold = 1.0;  // for Cut::Threshold: drop |lambda| >= threshold
    enum class Scaling { MatchComponent, UnitProjection } scaling = Scaling::MatchComponent;
    int match_component = 0;  // j for MatchComponent
};

template <class R>
struct DefuseResult {
    Vector<R> F0_filtered;
    int m = 0;  // first retained eigen index (0-based)
    R c;        // scaling constant
    Vector<R> coefficients;  // f = V^{-1} F0
};

// Algorithm: express F0 over the eigenvectors, drop the fast-growing
// directions (indices < m), rescale, return F0'.
template <class R>
DefuseResult<R> defuse_initial_value(const MatrixFactorial<R>& MF, const Vector<R>& F0,
                                     const DefusePolicy& policy = {}) {
    const int r = static_cast<int>(MF.Q.rows());
    const int D = scalar<R>::context_digits();
    Vector<R> f = lu_solve(MF.eigen.vectors, F0).x;

    int m;
    if (policy.cut == DefusePolicy::Cut::SpectralGap) {
        // cut above the largest relative magnitude gap
        m = 0;
        if (r >= 2) {
            int best = 0;
            R best_ratio = abs(MF.eigen.values[1]) / abs(MF.eigen.values[0]);
            for (int i = 1; i + 1 < r; ++i) {
                R ratio = abs(MF.eigen.values[i + 1]) / abs(MF.eigen.values[i]);
                if (ratio < best_ratio) {
                    best_ratio = ratio;
                    best = i;
                }
            }
            m = best + 1;
        }
    } else {
        m = r;
        for (int i = 0; i < r; ++i)
            if (abs(MF.eigen.values[i]) < scalar<R>::from_double(policy.threshold)) {
                m = i;
                break;
            }
    }
    if (m >= r) throw FilterError("defusing retains nothing: every eigenvalue is above the cut");

    Vector<R> kept(r);
    for (int i = m; i < r; ++i)
        for (int u = 0; u < r; ++u) kept[u] += f[i] * MF.eigen.vectors(u, i);

    DefuseResult<R> out;
    out.m = m;
    out.coefficients = f;
    if (policy.scaling == DefusePolicy::Scaling::MatchComponent) {
        int j = policy.match_component;
        if (j < 0 || j >= r) throw DomainError("MatchComponent index out of range");
        R denom = kept[j];
        if (abs(denom) <= pow10_int<R>(4 - D) * norm2(F0))
            throw FilterError("MatchComponent denominator too small (component " + std::to_string(j) +
                              " nearly vanishes after filtering)");
        out.c = F0[j] / denom;
    } else {
        out.c = R(1);
    }
    out.F0_filtered = out.c * kept;
    return out;
}

// Filter then repropagate with the same stepper over the factorial's grid.
template <class R>
SolutionTable<R> defused_solve(StepperKind kind, const FirstOrderSystem<R>& S, const Grid<R>& grid,
                               const Vector<R>& F0, const DefusePolicy& policy = {}) {
    MatrixFactorial<R> mf = matrix_factorial(kind, S, grid);
    DefuseResult<R> d = defuse_initial_value(mf, F0, policy);
    return solve_ivp(kind, S, d.F0_filtered, grid);
}

// Lemma bound: |Q F0' - F(Nh)| <= |Q F0'| + |F(Nh)| + 2 delta when the
// scheme propagates the true initial vector delta-accurately.
template <class R>
R error_bound(const MatrixFactorial<R>& MF, const Vector<R>& F0_filtered, const R& f_true_norm_estimate,
              const R& delta) {
    if (delta < R(0)) throw DomainError("error_bound: delta must be nonnegative");
    return norm2(MF.Q * F0_filtered) + f_true_norm_estimate + 2 * delta;
}

}  // namespace hgm

#endif
