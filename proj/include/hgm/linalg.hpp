#ifndef HGM_LINALG_HPP
#define HGM_LINALG_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "hgm/bigfloat.hpp"
#include "hgm/errors.hpp"

namespace hgm {

template <class R>
class Vector {
    std::vector<R> d_;

public:
    Vector() = default;
    explicit Vector(std::size_t n) : d_(n, R(0)) {}
    Vector(std::initializer_list<R> xs) : d_(xs) {}
    static Vector unit(std::size_t n, std::size_t j) {
        Vector v(n);
        v[j] = R(1);
        return v;
    }

    std::size_t size() const { return d_.size(); }
    R& operator[](std::size_t i) { return d_[i]; }
    const R& operator[](std::size_t i) const { return d_[i]; }
    auto begin() { return d_.begin(); }
    auto end() { return d_.end(); }
    auto begin() const { return d_.begin(); }
    auto end() const { return d_.end(); }

    Vector& operator+=(const Vector& o) {
        for (std::size_t i = 0; i < size(); ++i) d_[i] += o[i];
        return *this;
    }
    Vector& operator-=(const Vector& o) {
        for (std::size_t i = 0; i < size(); ++i) d_[i] -= o[i];
        return *this;
    }
    friend Vector operator+(Vector a, const Vector& b) { return a += b; }
    friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
    friend Vector operator*(const R& s, Vector v) {
        for (auto& x : v.d_) x = x * s;
        return v;
    }
    friend Vector operator*(Vector v, const R& s) { return s * v; }
    Vector operator-() const {
        Vector r = *this;
        for (auto& x : r.d_) x = -x;
        return r;
    }
};

template <class R>
R dot(const Vector<R>& a, const Vector<R>& b) {
    R s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <class R>
R norm2(const Vector<R>& v) {
    R s(0);
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i];
    return sqrt(s);
}

template <class R>
R norm_inf(const Vector<R>& v) {
    R m(0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (abs(v[i]) > m) m = abs(v[i]);
    return m;
}

template <class R>
class Matrix {
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<R> d_;

public:
    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), d_(r * c, R(0)) {}
    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = R(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    R& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    const R& operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    Matrix& operator+=(const Matrix& o) {
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(const R& s, Matrix m) {
        for (auto& x : m.d_) x = x * s;
        return m;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Vector<R> col(std::size_t j) const {
        Vector<R> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    Vector<R> row(std::size_t i) const {
        Vector<R> v(cols_);
        for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
        return v;
    }
};

template <class R>
Vector<R> operator*(const Matrix<R>& A, const Vector<R>& x) {
    Vector<R> y(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        R acc(0);
        for (std::size_t j = 0; j < A.cols(); ++j) {
            if constexpr (std::is_same_v<R, BigFloat>)
                acc.add_mul(A(i, j), x[j]);
            else
                acc += A(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

template <class R>
Matrix<R> operator*(const Matrix<R>& A, const Matrix<R>& B) {
    Matrix<R> C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const R& a = A(i, k);
            if (a == R(0)) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) {
                if constexpr (std::is_same_v<R, BigFloat>)
                    C(i, j).add_mul(a, B(k, j));
                else
                    C(i, j) += a * B(k, j);
            }
        }
    return C;
}

template <class R>
R norm_inf(const Matrix<R>& A) {
    R m(0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        R s(0);
        for (std::size_t j = 0; j < A.cols(); ++j) s += abs(A(i, j));
        if (s > m) m = s;
    }
    return m;
}

template <class R>
R norm_1(const Matrix<R>& A) {
    R m(0);
    for (std::size_t j = 0; j < A.cols(); ++j) {
        R s(0);
        for (std::size_t i = 0; i < A.rows(); ++i) s += abs(A(i, j));
        if (s > m) m = s;
    }
    return m;
}

template <class R>
R max_abs(const Matrix<R>& A) {
    R m(0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (abs(A(i, j)) > m) m = abs(A(i, j));
    return m;
}

// ---- LU with partial pivoting ----------------------------------------------

template <class R>
struct LuFactors {
    Matrix<R> lu;            // packed L\U
    std::vector<int> perm;   // row permutation
    int sign = 1;

    Vector<R> solve(const Vector<R>& b) const {
        const std::size_t n = lu.rows();
        Vector<R> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
        for (std::size_t i = 1; i < n; ++i) {
            R acc = x[i];
            for (std::size_t j = 0; j < i; ++j) {
                if constexpr (std::is_same_v<R, BigFloat>)
                    acc.sub_mul(lu(i, j), x[j]);
                else
                    acc -= lu(i, j) * x[j];
            }
            x[i] = acc;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            R acc = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j) {
                if constexpr (std::is_same_v<R, BigFloat>)
                    acc.sub_mul(lu(ii, j), x[j]);
                else
                    acc -= lu(ii, j) * x[j];
            }
            x[ii] = acc / lu(ii, ii);
        }
        return x;
    }

    // solve A^T x = b, used by the 1-norm condition estimator
    Vector<R> solve_transposed(const Vector<R>& b) const {
        const std::size_t n = lu.rows();
        Vector<R> y = b;
        for (std::size_t i = 0; i < n; ++i) {
            R acc = y[i];
            for (std::size_t j = 0; j < i; ++j) {
                if constexpr (std::is_same_v<R, BigFloat>)
                    acc.sub_mul(lu(j, i), y[j]);
                else
                    acc -= lu(j, i) * y[j];
            }
            y[i] = acc / lu(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            R acc = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) {
                if constexpr (std::is_same_v<R, BigFloat>)
                    acc.sub_mul(lu(j, ii), y[j]);
                else
                    acc -= lu(j, ii) * y[j];
            }
            y[ii] = acc;
        }
        Vector<R> x(n);
        for (std::size_t i = 0; i < n; ++i) x[perm[i]] = y[i];
        return x;
    }
};

template <class R>
LuFactors<R> lu_factor(Matrix<R> A) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw DomainError("lu_factor: matrix not square");
    LuFactors<R> f;
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        R best = abs(A(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(A(i, k)) > best) {
                best = abs(A(i, k));
                p = i;
            }
        if (best == R(0))
            throw SingularMatrixError("singular matrix: zero pivot at index " + std::to_string(k),
                                      static_cast<int>(k));
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            std::swap(f.perm[k], f.perm[p]);
            f.sign = -f.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            A(i, k) = A(i, k) / A(k, k);
            const R& m = A(i, k);
            if (m == R(0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) {
                if constexpr (std::is_same_v<R, BigFloat>)
                    A(i, j).sub_mul(m, A(k, j));
                else
                    A(i, j) -= m * A(k, j);
            }
        }
    }
    f.lu = std::move(A);
    return f;
}

template <class R>
struct LinearSolve {
    Vector<R> x;
    R residual;  // ||A x - b||_2
};

template <class R>
LinearSolve<R> lu_solve(const Matrix<R>& A, const Vector<R>& b) {
    if (A.rows() != b.size()) throw DomainError("lu_solve: dimension mismatch");
    auto f = lu_factor(A);
    LinearSolve<R> out;
    out.x = f.solve(b);
    out.residual = norm2(A * out.x - b);
    return out;
}

// Hager/Higham style ||A^{-1}||_1 estimate from an existing factorization.
template <class R>
R invnorm1_estimate(const Matrix<R>& A, const LuFactors<R>& f) {
    const std::size_t n = A.rows();
    Vector<R> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = R(1) / static_cast<int>(n);
    R est(0);
    for (int iter = 0; iter < 5; ++iter) {
        Vector<R> y = f.solve(x);
        R n1(0);
        for (std::size_t i = 0; i < n; ++i) n1 += abs(y[i]);
        Vector<R> xi(n);
        for (std::size_t i = 0; i < n; ++i) xi[i] = (y[i] >= R(0)) ? R(1) : R(-1);
        Vector<R> z = f.solve_transposed(xi);
        std::size_t jmax = 0;
        R zmax = abs(z[0]);
        for (std::size_t i = 1; i < n; ++i)
            if (abs(z[i]) > zmax) {
                zmax = abs(z[i]);
                jmax = i;
            }
        est = n1;
        R xdot(0);
        for (std::size_t i = 0; i < n; ++i) xdot += z[i] * x[i];
        if (zmax <= xdot) break;
        x = Vector<R>::unit(n, jmax);
    }
    return est;
}

template <class R>
R condition_estimate(const Matrix<R>& A) {
    auto f = lu_factor(A);
    return norm_1(A) * invnorm1_estimate(A, f);
}

// ---- Householder QR least squares ------------------------------------------

template <class R>
struct LeastSquares {
    Vector<R> x;
    R residual_norm;  // ||A x - b||_2
};

// Minimizes ||A x - b||_2 for m >= n. Columns are equilibrated internally so
// rank detection is scale free; the deficiency test is on the equilibrated R.
template <class R>
LeastSquares<R> qr_least_squares(const Matrix<R>& A_in, const Vector<R>& b_in, double rank_tol_exp_shift = 2.0) {
    const std::size_t m = A_in.rows(), n = A_in.cols();
    if (m < n) throw DomainError("qr_least_squares: need rows >= cols");
    Matrix<R> A = A_in;
    Vector<R> b = b_in;

    std::vector<R> colscale(n, R(1));
    for (std::size_t j = 0; j < n; ++j) {
        R mx(0);
        for (std::size_t i = 0; i < m; ++i)
            if (abs(A(i, j)) > mx) mx = abs(A(i, j));
        if (mx == R(0))
            throw RankDeficiencyError("qr_least_squares: column " + std::to_string(j) + " is zero",
                                      static_cast<int>(j));
        colscale[j] = mx;
        for (std::size_t i = 0; i < m; ++i) A(i, j) = A(i, j) / mx;
    }

    const int D = scalar<R>::context_digits();
    R tol = pow10_int<R>(static_cast<int>(rank_tol_exp_shift) - D);

    // Householder reflections applied to A and b in place
    R rmax(0);
    for (std::size_t k = 0; k < n; ++k) {
        R sigma(0);
        for (std::size_t i = k; i < m; ++i) sigma += A(i, k) * A(i, k);
        sigma = sqrt(sigma);
        if (sigma > rmax) rmax = sigma;
        if (rmax == R(0) || sigma <= tol * rmax)
            throw RankDeficiencyError(
                "qr_least_squares: numerically rank-deficient at column " + std::to_string(k),
                static_cast<int>(k));
        if (A(k, k) > R(0)) sigma = -sigma;
        // v = x - sigma e_k, H = I - 2 vv^T/(v^T v)
        Vector<R> v(m - k);
        v[0] = A(k, k) - sigma;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = A(i, k);
        R vtv(0);
        for (std::size_t i = 0; i < m - k; ++i) vtv += v[i] * v[i];
        A(k, k) = sigma;
        for (std::size_t i = k + 1; i < m; ++i) A(i, k) = R(0);
        if (vtv == R(0)) continue;
        for (std::size_t j = k + 1; j < n; ++j) {
            R s(0);
            for (std::size_t i = 0; i < m - k; ++i) s += v[i] * A(k + i, j);
            s = s * 2 / vtv;
            for (std::size_t i = 0; i < m - k; ++i) A(k + i, j) -= s * v[i];
        }
        R s(0);
        for (std::size_t i = 0; i < m - k; ++i) s += v[i] * b[k + i];
        s = s * 2 / vtv;
        for (std::size_t i = 0; i < m - k; ++i) b[k + i] -= s * v[i];
    }

    LeastSquares<R> out;
    out.x = Vector<R>(n);
    for (std::size_t ii = n; ii-- > 0;) {
        R acc = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= A(ii, j) * out.x[j];
        out.x[ii] = acc / A(ii, ii);
    }
    R rn(0);
    for (std::size_t i = n; i < m; ++i) rn += b[i] * b[i];
    out.residual_norm = sqrt(rn);
    for (std::size_t j = 0; j < n; ++j) out.x[j] = out.x[j] / colscale[j];
    return out;
}

// Orthonormal basis of the null space of C (r x n, r <= n), via full
// Householder QR of C^T. Returns n x (n-r) matrix Z with C Z = 0.
template <class R>
Matrix<R> null_space(const Matrix<R>& C) {
    const std::size_t r = C.rows(), n = C.cols();
    Matrix<R> At = C.transposed();  // n x r
    Matrix<R> Q = Matrix<R>::identity(n);
    for (std::size_t k = 0; k < r; ++k) {
        R sigma(0);
        for (std::size_t i = k; i < n; ++i) sigma += At(i, k) * At(i, k);
        sigma = sqrt(sigma);
        if (sigma == R(0))
            throw RankDeficiencyError("null_space: rank-deficient constraints", static_cast<int>(k));
        if (At(k, k) > R(0)) sigma = -sigma;
        Vector<R> v(n - k);
        v[0] = At(k, k) - sigma;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = At(i, k);
        R vtv(0);
        for (std::size_t i = 0; i < n - k; ++i) vtv += v[i] * v[i];
        At(k, k) = sigma;
        for (std::size_t i = k + 1; i < n; ++i) At(i, k) = R(0);
        if (vtv == R(0)) continue;
        for (std::size_t j = k + 1; j < r; ++j) {
            R s(0);
            for (std::size_t i = 0; i < n - k; ++i) s += v[i] * At(k + i, j);
            s = s * 2 / vtv;
            for (std::size_t i = 0; i < n - k; ++i) At(k + i, j) -= s * v[i];
        }
        // accumulate Q = Q * H_k
        for (std::size_t row = 0; row < n; ++row) {
            R s(0);
            for (std::size_t i = 0; i < n - k; ++i) s += Q(row, k + i) * v[i];
            s = s * 2 / vtv;
            for (std::size_t i = 0; i < n - k; ++i) Q(row, k + i) -= s * v[i];
        }
    }
    Matrix<R> Z(n, n - r);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n - r; ++j) Z(i, j) = Q(i, r + j);
    return Z;
}

// ---- real nonsymmetric eigenproblem ------------------------------------------
// Hessenberg reduction + shifted QR (Wilkinson shifts) + inverse iteration,
// all over the generic scalar so it runs at any precision.

template <class R>
struct EigenDecomposition {
    Vector<R> values;   // sorted by descending magnitude
    Matrix<R> vectors;  // columns, largest component normalized to +1
    R residual;         // max_i ||Q v_i - lambda_i v_i||_2
};

namespace detail {

template <class R>
void hessenberg(Matrix<R>& A) {
    const std::size_t n = A.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        R sigma(0);
        for (std::size_t i = k + 1; i < n; ++i) sigma += A(i, k) * A(i, k);
        sigma = sqrt(sigma);
        if (sigma == R(0)) continue;
        if (A(k + 1, k) > R(0)) sigma = -sigma;
        Vector<R> v(n - k - 1);
        v[0] = A(k + 1, k) - sigma;
        for (std::size_t i = k + 2; i < n; ++i) v[i - k - 1] = A(i, k);
        R vtv(0);
        for (std::size_t i = 0; i < v.size(); ++i) vtv += v[i] * v[i];
        if (vtv == R(0)) continue;
        A(k + 1, k) = sigma;
        for (std::size_t i = k + 2; i < n; ++i) A(i, k) = R(0);
        // A <- H A
        for (std::size_t j = k + 1; j < n; ++j) {
            R s(0);
            for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * A(k + 1 + i, j);
            s = s * 2 / vtv;
            for (std::size_t i = 0; i < v.size(); ++i) A(k + 1 + i, j) -= s * v[i];
        }
        // A <- A H
        for (std::size_t i = 0; i < n; ++i) {
            R s(0);
            for (std::size_t j = 0; j < v.size(); ++j) s += A(i, k + 1 + j) * v[j];
            s = s * 2 / vtv;
            for (std::size_t j = 0; j < v.size(); ++j) A(i, k + 1 + j) -= s * v[j];
        }
    }
}

// one shifted QR sweep on the active window [0, nact) via Givens rotations
template <class R>
void qr_sweep(Matrix<R>& H, std::size_t nact, const R& shift) {
    std::vector<R> cs, sn;
    cs.reserve(nact);
    sn.reserve(nact);
    for (std::size_t i = 0; i < nact; ++i) H(i, i) -= shift;
    for (std::size_t k = 0; k + 1 < nact; ++k) {
        R a = H(k, k), b = H(k + 1, k);
        R r = sqrt(a * a + b * b);
        R c(1), s(0);
        if (r != R(0)) {
            c = a / r;
            s = b / r;
        }
        cs.push_back(c);
        sn.push_back(s);
        for (std::size_t j = k; j < nact; ++j) {
            R x = H(k, j), y = H(k + 1, j);
            H(k, j) = c * x + s * y;
            H(k + 1, j) = c * y - s * x;
        }
    }
    for (std::size_t k = 0; k + 1 < nact; ++k) {
        const R& c = cs[k];
        const R& s = sn[k];
        for (std::size_t i = 0; i <= std::min(k + 2, nact - 1); ++i) {
            R x = H(i, k), y = H(i, k + 1);
            H(i, k) = c * x + s * y;
            H(i, k + 1) = c * y - s * x;
        }
    }
    for (std::size_t i = 0; i < nact; ++i) H(i, i) += shift;
}

}  // namespace detail

struct EigenOptions {
    double tie_tol_exp_shift = 4.0;  // ties when |l_i - l_{i+1}| <= 10^(shift - D) |l_i|
    int max_sweeps_factor = 100;     // max sweeps = factor * r^2
};

template <class R>
EigenDecomposition<R> real_eigen(const Matrix<R>& Q, EigenOptions opts = {}) {
    const std::size_t n = Q.rows();
    if (Q.cols() != n) throw DomainError("real_eigen: matrix not square");
    if (n > 64) throw DomainError("real_eigen: size > 64 unsupported");
    const int D = scalar<R>::context_digits();
    R eps = pow10_int<R>(1 - D);

    Matrix<R> H = Q;
    detail::hessenberg(H);

    std::vector<R> lambdas;
    lambdas.reserve(n);
    std::size_t nact = n;
    long sweeps = 0;
    const long max_sweeps = opts.max_sweeps_factor * static_cast<long>(n) * static_cast<long>(n);
    while (nact > 0) {
        if (nact == 1) {
            lambdas.push_back(H(0, 0));
            nact = 0;
            continue;
        }
        // deflate converged tail
        R off = abs(H(nact - 1, nact - 2));
        R diag = abs(H(nact - 1, nact - 1)) + abs(H(nact - 2, nact - 2));
        if (off <= eps * diag || off == R(0)) {
            lambdas.push_back(H(nact - 1, nact - 1));
            --nact;
            continue;
        }
        if (nact == 2 || abs(H(nact - 2, nact - 3)) <= eps * (abs(H(nact - 2, nact - 2)) + abs(H(nact - 3, nact - 3)))) {
            // 2x2 trailing block that may hold a conjugate pair
            const R& a = H(nact - 2, nact - 2);
            const R& b = H(nact - 2, nact - 1);
            const R& c = H(nact - 1, nact - 2);
            const R& d = H(nact - 1, nact - 1);
            R tr = a + d;
            R disc = (a - d) * (a - d) + R(4) * b * c;
            if (disc < R(0))
                throw ComplexSpectrumError(
                    "complex conjugate eigenvalue pair detected; defusing assumes a real distinct "
                    "spectrum");
            R sq = sqrt(disc);
            R l1 = (tr + sq) / 2;
            R l2 = (tr - sq) / 2;
            // split only when clearly separated; otherwise keep iterating
            if (abs(l1 - l2) > eps * (abs(l1) + abs(l2)) || sweeps > max_sweeps / 2) {
                lambdas.push_back(l1);
                lambdas.push_back(l2);
                nact -= 2;
                continue;
            }
        }
        // Wilkinson shift from trailing 2x2
        const R& a = H(nact - 2, nact - 2);
        const R& b = H(nact - 2, nact - 1);
        const R& c = H(nact - 1, nact - 2);
        const R& d = H(nact - 1, nact - 1);
        R tr = a + d;
        R disc = (a - d) * (a - d) + R(4) * b * c;
        R shift = d;
        if (disc >= R(0)) {
            R sq = sqrt(disc);
            R l1 = (tr + sq) / 2;
            R l2 = (tr - sq) / 2;
            shift = (abs(l1 - d) < abs(l2 - d)) ? l1 : l2;
        }
        detail::qr_sweep(H, nact, shift);
        if (++sweeps > max_sweeps)
            throw ConvergenceError("real_eigen: QR iteration did not converge after " +
                                   std::to_string(max_sweeps) + " sweeps");
    }

    // sort by descending magnitude (growth order)
    std::sort(lambdas.begin(), lambdas.end(), [](const R& x, const R& y) { return abs(x) > abs(y); });
    R tie_tol = pow10_int<R>(static_cast<int>(opts.tie_tol_exp_shift) - D);
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (abs(lambdas[i] - lambdas[i + 1]) <= tie_tol * abs(lambdas[i]))
            throw EigenTieError("eigenvalues " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                " are not distinct at this precision");

    // eigenvectors by inverse iteration on the original matrix
    EigenDecomposition<R> out;
    out.values = Vector<R>(n);
    out.vectors = Matrix<R>(n, n);
    R qn = norm_inf(Q);
    R maxres(0);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = lambdas[k];
        R lam = lambdas[k];
        Matrix<R> S = Q;
        R bump = abs(lam) * pow10_int<R>(2 - D) + qn * pow10_int<R>(4 - 2 * D);
        for (std::size_t i = 0; i < n; ++i) S(i, i) -= lam + bump;
        Vector<R> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = R(1) / static_cast<int>(i + k + 1);
        LuFactors<R> f;
        for (int attempt = 0;; ++attempt) {
            try {
                f = lu_factor(S);
                break;
            } catch (const SingularMatrixError&) {
                if (attempt >= 3) throw;
                bump = (bump == R(0)) ? qn * pow10_int<R>(2 - D) : bump * 16;
                S = Q;
                for (std::size_t i = 0; i < n; ++i) S(i, i) -= lam + bump;
            }
        }
        for (int it = 0; it < 3; ++it) {
            v = f.solve(v);
            R nv = norm_inf(v);
            if (nv == R(0)) throw ConvergenceError("real_eigen: inverse iteration collapsed");
            for (std::size_t i = 0; i < n; ++i) v[i] = v[i] / nv;
        }
        // normalize: largest-magnitude component exactly +1
        std::size_t imax = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (abs(v[i]) > abs(v[imax])) imax = i;
        R piv = v[imax];
        for (std::size_t i = 0; i < n; ++i) v[i] = v[i] / piv;
        // one Rayleigh refinement of the eigenvalue against this vector
        Vector<R> qv = Q * v;
        R num(0), den(0);
        for (std::size_t i = 0; i < n; ++i) {
            num += v[i] * qv[i];
            den += v[i] * v[i];
        }
        out.values[k] = num / den;
        R res = norm2(qv - out.values[k] * v);
        if (res > maxres) maxres = res;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i];
    }
    out.residual = maxres;
    return out;
}

}  // namespace hgm

#endif
