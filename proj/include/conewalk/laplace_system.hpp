/*
   Copyright 2026 The conewalk Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef CONEWALK_LAPLACE_SYSTEM_HPP
#define CONEWALK_LAPLACE_SYSTEM_HPP

#include <optional>
#include <utility>
#include <vector>

#include "conewalk/cone.hpp"

namespace conewalk {

template <class F>
using Matrix = std::vector<std::vector<F>>;

/// Half-Laplacian rows on degree-n homogeneous coefficients a_i (of x1^{n-i} x2^i),
/// followed by the two boundary rows.
template <class F>
struct BoundaryMatrix {
    int n = 0;
    std::optional<F> b;  // nullopt for the vertical ray
    std::pair<F, F> ray;
    Matrix<F> rows;
};

/// Cone wrapper that accepts any b, including b = 0 (closed wedge).
template <class F>
ConeSpec<F> make_cone_from_b_or_raw(const F& b) {
    if (field_traits<F>::sign(b) != 0) return make_cone_from_b(b);
    ConeSpec<F> c;
    c.b = b;
    c.p_alpha = 0;
    return c;
}

template <class F>
BoundaryMatrix<F> build_matrix(int n, const ConeSpec<F>& cone) {
    if (n < 2) throw Error("domain-error", "build_matrix requires n >= 2");
    BoundaryMatrix<F> M;
    M.n = n;
    M.b = cone.b;
    M.ray = cone.ray_point();
    M.rows.assign(n + 1, std::vector<F>(n + 1, from_int<F>(0)));
    for (int s = 0; s <= n - 2; ++s) {
        M.rows[s][s] = binomial_as<F>(n - s, 2);
        M.rows[s][s + 2] = binomial_as<F>(s + 2, 2);
    }
    M.rows[n - 1][0] = from_int<F>(1);
    const auto& [c, sn] = M.ray;
    for (int i = 0; i <= n; ++i) M.rows[n][i] = power(c, n - i) * power(sn, i);
    return M;
}

template <class F>
BoundaryMatrix<F> build_matrix(int n, const std::optional<F>& b) {
    if (b) return build_matrix(n, make_cone_from_b_or_raw(*b));
    return build_matrix(n, make_vertical_cone<F>());
}

template <class F>
std::vector<F> mat_vec(const Matrix<F>& A, const std::vector<F>& x) {
    std::vector<F> y(A.size(), from_int<F>(0));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] = y[i] + A[i][j] * x[j];
    return y;
}

template <class F>
BigFloat max_abs(const Matrix<F>& A) {
    BigFloat m = 0;
    for (const auto& row : A)
        for (const auto& v : row) m = std::max(m, magnitude(v));
    return m;
}

template <class F>
BigFloat max_abs(const std::vector<F>& v) {
    BigFloat m = 0;
    for (const auto& x : v) m = std::max(m, magnitude(x));
    return m;
}

namespace detail {

template <class F>
bool pivot_zero(const F& v, const BigFloat& scale) {
    return negligible(v, scale);
}

/// Fraction-free (Bareiss) elimination with back substitution; exact backends.
template <class F>
std::optional<std::vector<F>> bareiss_solve(Matrix<F> A, std::vector<F> rhs) {
    const std::size_t n = A.size();
    for (std::size_t i = 0; i < n; ++i) A[i].push_back(rhs[i]);
    F prev = from_int<F>(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && field_traits<F>::is_zero(A[p][k])) ++p;
        if (p == n) return std::nullopt;
        std::swap(A[p], A[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j <= n; ++j) A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev;
            A[i][k] = from_int<F>(0);
        }
        prev = A[k][k];
    }
    std::vector<F> x(n, from_int<F>(0));
    for (std::size_t i = n; i-- > 0;) {
        F acc = A[i][n];
        for (std::size_t j = i + 1; j < n; ++j) acc = acc - A[i][j] * x[j];
        x[i] = acc / A[i][i];
    }
    return x;
}

/// Gaussian elimination with partial pivoting; float backends.
template <class F>
std::optional<std::vector<F>> pivoting_solve(Matrix<F> A, std::vector<F> rhs) {
    const std::size_t n = A.size();
    const BigFloat scale = max_abs(A);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (magnitude(A[i][k]) > magnitude(A[p][k])) p = i;
        if (pivot_zero(A[p][k], scale)) return std::nullopt;
        std::swap(A[p], A[k]);
        std::swap(rhs[p], rhs[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const F f = A[i][k] / A[k][k];
            if (field_traits<F>::is_zero(f)) continue;
            for (std::size_t j = k; j < n; ++j) A[i][j] = A[i][j] - f * A[k][j];
            rhs[i] = rhs[i] - f * rhs[k];
        }
    }
    std::vector<F> x(n, from_int<F>(0));
    for (std::size_t i = n; i-- > 0;) {
        F acc = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) acc = acc - A[i][j] * x[j];
        x[i] = acc / A[i][i];
    }
    return x;
}

}  // namespace detail

/// General square solve; nullopt when singular.
template <class F>
std::optional<std::vector<F>> solve_linear(const Matrix<F>& A, const std::vector<F>& rhs) {
    if (A.size() != rhs.size()) throw Error("domain-error", "matrix and right-hand side sizes differ");
    if constexpr (is_exact_v<F>)
        return detail::bareiss_solve(A, rhs);
    else
        return detail::pivoting_solve(A, rhs);
}

namespace detail {
template <class F>
void check_rhs(const BoundaryMatrix<F>& M, const std::vector<F>& rhs) {
    if (static_cast<int>(rhs.size()) != M.n + 1)
        throw Error("precondition-violation", "right-hand side must have n + 1 entries");
    const BigFloat scale = max_abs(rhs);
    if (!negligible(rhs[M.n - 1], scale) || !negligible(rhs[M.n], scale))
        throw Error("precondition-violation", "boundary entries of the right-hand side must be zero");
}
}  // namespace detail

/// Unique solution of M a = rhs; throws "singular-angle" at resonant b.
template <class F>
std::vector<F> solve_system(const BoundaryMatrix<F>& M, const std::vector<F>& rhs) {
    detail::check_rhs(M, rhs);
    auto x = solve_linear(M.rows, rhs);
    if (!x)
        throw Error("singular-angle", "M_{" + std::to_string(M.n) + ",b} is singular: b = tan(q pi / " +
                                          std::to_string(M.n) + ") for some integer q");
    return *x;
}

template <class F>
struct RrefResult {
    Matrix<F> reduced;          // augmented when a right-hand side was given
    std::vector<int> pivots;    // pivot column of each non-zero row
    int rank = 0;
    bool consistent = true;     // only meaningful with a right-hand side
};

/// Reduced row echelon form; optional right-hand side carried as an extra column.
template <class F>
RrefResult<F> rref(Matrix<F> A, const std::vector<F>* rhs = nullptr) {
    const std::size_t rows = A.size();
    const std::size_t cols = rows ? A[0].size() : 0;
    if (rhs)
        for (std::size_t i = 0; i < rows; ++i) A[i].push_back((*rhs)[i]);
    const BigFloat scale = max_abs(A);
    RrefResult<F> out;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        if constexpr (is_exact_v<F>) {
            while (p < rows && field_traits<F>::is_zero(A[p][c])) ++p;
            if (p == rows) continue;
        } else {
            for (std::size_t i = r + 1; i < rows; ++i)
                if (magnitude(A[i][c]) > magnitude(A[p][c])) p = i;
            if (negligible(A[p][c], scale)) continue;
        }
        std::swap(A[p], A[r]);
        const F inv = from_int<F>(1) / A[r][c];
        for (auto& v : A[r]) v = v * inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || field_traits<F>::is_zero(A[i][c])) continue;
            const F f = A[i][c];
            for (std::size_t j = 0; j < A[i].size(); ++j) A[i][j] = A[i][j] - f * A[r][j];
        }
        out.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    out.rank = static_cast<int>(r);
    if (rhs)
        for (std::size_t i = r; i < rows; ++i)
            if (!negligible(A[i][cols], scale)) out.consistent = false;
    out.reduced = std::move(A);
    return out;
}

template <class F>
struct KernelInfo {
    int dimension = 0;
    std::optional<std::vector<F>> basis;  // set when dimension == 1
};

template <class F>
KernelInfo<F> kernel_dimension(const BoundaryMatrix<F>& M) {
    const auto r = rref(M.rows);
    KernelInfo<F> out;
    const int cols = M.n + 1;
    out.dimension = cols - r.rank;
    if (out.dimension == 1) {
        std::vector<bool> is_pivot(cols, false);
        for (int p : r.pivots) is_pivot[p] = true;
        int free_col = 0;
        while (is_pivot[free_col]) ++free_col;
        std::vector<F> v(cols, from_int<F>(0));
        v[free_col] = from_int<F>(1);
        for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.reduced[i][free_col];
        out.basis = std::move(v);
    }
    return out;
}

/// Some solution of M a = rhs, or nullopt when the system is inconsistent.
template <class F>
std::optional<std::vector<F>> solve_any(const BoundaryMatrix<F>& M, const std::vector<F>& rhs) {
    const auto r = rref(M.rows, &rhs);
    if (!r.consistent) return std::nullopt;
    std::vector<F> x(M.n + 1, from_int<F>(0));
    for (std::size_t i = 0; i < r.pivots.size(); ++i) x[r.pivots[i]] = r.reduced[i][M.n + 1];
    return x;
}

/// Elimination of the odd block: lambda_1..lambda_{n_odd} and the final pivot theta.
template <class F>
struct OddTriangularization {
    int n_odd = 0;
    std::vector<F> lambda;  // lambda[k-1] = lambda_{n,k}
    F theta;
};

/// Number of odd-index rows in the half-Laplacian block: floor((n - 1) / 2).
inline int odd_block_size(int n) { return (n - 1) / 2; }

template <class F>
OddTriangularization<F> triangularize_odd(int n, const F& b) {
    if (n < 3) throw Error("domain-error", "triangularize_odd requires n >= 3");
    OddTriangularization<F> out;
    out.n_odd = odd_block_size(n);
    if (out.n_odd >= 1) {
        out.lambda.push_back(-b / binomial_as<F>(n - 1, 2));
        for (int k = 1; k + 1 <= out.n_odd; ++k) {
            const F& lk = out.lambda.back();
            out.lambda.push_back(-(power(b, 2 * k + 1) + lk * binomial_as<F>(2 * k + 1, 2)) /
                                 binomial_as<F>(n - 2 * k - 1, 2));
        }
        const int K = out.n_odd;
        out.theta = power(b, 2 * K + 1) + out.lambda.back() * binomial_as<F>(2 * K + 1, 2);
    } else {
        out.theta = b;
    }
    return out;
}

template <class F>
OddTriangularization<F> triangularize_odd(const BoundaryMatrix<F>& M) {
    if (!M.b) throw Error("domain-error", "the odd-block elimination needs a finite slope b");
    return triangularize_odd(M.n, *M.b);
}

/// Even recursion followed by the odd-block elimination; throws "singular-angle" when theta = 0.
template <class F>
std::vector<F> solve_split(const BoundaryMatrix<F>& M, const std::vector<F>& rhs) {
    detail::check_rhs(M, rhs);
    if (!M.b) throw Error("domain-error", "the split solver needs a finite slope b");
    const int n = M.n;
    const F& b = *M.b;
    std::vector<F> a(n + 1, from_int<F>(0));
    // even indices: a_0 = 0 and row 2k-2 links a_{2k-2}, a_{2k}
    for (int k = 1; 2 * k <= n; ++k)
        a[2 * k] = (rhs[2 * k - 2] - binomial_as<F>(n - 2 * k + 2, 2) * a[2 * k - 2]) / binomial_as<F>(2 * k, 2);
    // odd block, last row: sum b^{2i+1} a_{2i+1} = -sum b^{2k} a_{2k}
    F r = from_int<F>(0);
    for (int k = 0; 2 * k <= n; ++k) r = r - power(b, 2 * k) * a[2 * k];
    if (n == 2) {
        if (negligible(b, BigFloat(1))) throw Error("singular-angle", "b = 0");
        a[1] = r / b;
        return a;
    }
    const auto tri = triangularize_odd(n, b);
    const int K = tri.n_odd;
    for (int k = 1; k <= K; ++k) r = r + tri.lambda[k - 1] * rhs[2 * k - 1];
    BigFloat scale = max_abs(M.rows);
    if (negligible(tri.theta, scale))
        throw Error("singular-angle", "odd-block pivot vanishes: b = tan(q pi / " + std::to_string(n) + ")");
    a[2 * K + 1] = r / tri.theta;
    for (int i = K - 1; i >= 0; --i)
        a[2 * i + 1] = (rhs[2 * i + 1] - binomial_as<F>(2 * i + 3, 2) * a[2 * i + 3]) /
                       binomial_as<F>(n - 2 * i - 1, 2);
    return a;
}

}  // namespace conewalk

#endif  // CONEWALK_LAPLACE_SYSTEM_HPP
