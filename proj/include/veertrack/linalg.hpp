#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "veertrack/scalar.hpp"

namespace veertrack {

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
using Vec = std::vector<T>;

// ---------------------------------------------------------------- exact rational elimination

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(Matrix<Rational>& M, int ncols) {
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < ncols && r < static_cast<int>(M.size()); ++c) {
        int p = -1;
        for (int i = r; i < static_cast<int>(M.size()); ++i)
            if (M[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(M[r], M[p]);
        Rational inv = 1 / M[r][c];
        for (auto& x : M[r]) x *= inv;
        for (int i = 0; i < static_cast<int>(M.size()); ++i) {
            if (i == r || M[i][c] == 0) continue;
            Rational f = M[i][c];
            for (std::size_t j = 0; j < M[i].size(); ++j) M[i][j] -= f * M[r][j];
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

inline int rank(Matrix<Rational> M, int ncols) { return static_cast<int>(rref(M, ncols).size()); }

// Basis of {x : M x = 0}.
inline Matrix<Rational> nullspace(Matrix<Rational> M, int ncols) {
    std::vector<int> piv = rref(M, ncols);
    std::vector<bool> is_piv(ncols, false);
    for (int c : piv) is_piv[c] = true;
    Matrix<Rational> basis;
    for (int f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        Vec<Rational> v(ncols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -M[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Is x a linear combination of the given vectors?
inline bool in_span(const Matrix<Rational>& gens, const Vec<Rational>& x) {
    int n = static_cast<int>(x.size());
    Matrix<Rational> A;
    for (const auto& g : gens) A.push_back(g);
    int r0 = rank(A, n);
    A.push_back(x);
    return rank(A, n) == r0;
}

inline Matrix<Rational> inverse(const Matrix<Rational>& A) {
    int n = static_cast<int>(A.size());
    Matrix<Rational> M(n, Vec<Rational>(2 * n, Rational(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M[i][j] = A[i][j];
        M[i][n + i] = 1;
    }
    auto piv = rref(M, n);
    if (static_cast<int>(piv.size()) != n) throw error("matrix is singular");
    Matrix<Rational> out(n, Vec<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i][j] = M[i][n + j];
    return out;
}

// Scale a rational vector to the primitive integer vector on the same ray.
inline Vec<Rational> primitive(const Vec<Rational>& v) {
    BigInt l = 1, g = 0;
    for (const auto& x : v) {
        BigInt d = boost::multiprecision::denominator(x);
        l = l / boost::multiprecision::gcd(l, d) * d;
    }
    for (const auto& x : v) g = boost::multiprecision::gcd(g, BigInt(boost::multiprecision::numerator(x) * (l / boost::multiprecision::denominator(x))));
    if (g == 0) return v;
    Vec<Rational> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = Rational(boost::multiprecision::numerator(v[i]) * (l / boost::multiprecision::denominator(v[i])) / g);
    return out;
}

// ---------------------------------------------------------------- integer matrices

// Dense square integer matrix with overflow-checked products.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {}

    static IntMatrix identity(int n) {
        IntMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int size() const { return n_; }
    std::int64_t& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    std::int64_t operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    friend IntMatrix operator*(const IntMatrix& A, const IntMatrix& B) {
        IntMatrix C(A.n_);
        for (int i = 0; i < A.n_; ++i)
            for (int k = 0; k < A.n_; ++k) {
                std::int64_t a = A(i, k);
                if (a == 0) continue;
                for (int j = 0; j < A.n_; ++j) {
                    std::int64_t p, s;
                    if (__builtin_mul_overflow(a, B(k, j), &p) || __builtin_add_overflow(C(i, j), p, &s))
                        throw error("integer overflow in transition matrix product");
                    C(i, j) = s;
                }
            }
        return C;
    }

    IntMatrix transpose() const {
        IntMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    template <class T>
    Vec<T> apply(const Vec<T>& x) const {
        Vec<T> y(n_, T(0));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if ((*this)(i, j) != 0) y[i] += T((*this)(i, j)) * x[j];
        return y;
    }

    Matrix<double> to_double() const {
        Matrix<double> m(n_, Vec<double>(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m[i][j] = static_cast<double>((*this)(i, j));
        return m;
    }

    Matrix<Rational> to_rational() const {
        Matrix<Rational> m(n_, Vec<Rational>(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m[i][j] = Rational((*this)(i, j));
        return m;
    }

    // Exact determinant (fraction-free Bareiss elimination).
    BigInt determinant() const {
        int n = n_;
        if (n == 0) return 1;
        std::vector<std::vector<BigInt>> M(n, std::vector<BigInt>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M[i][j] = (*this)(i, j);
        BigInt prev = 1;
        int sign = 1;
        for (int k = 0; k < n - 1; ++k) {
            if (M[k][k] == 0) {
                int p = -1;
                for (int i = k + 1; i < n; ++i)
                    if (M[i][k] != 0) {
                        p = i;
                        break;
                    }
                if (p < 0) return 0;
                std::swap(M[k], M[p]);
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j) M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
            prev = M[k][k];
        }
        return sign * M[n - 1][n - 1];
    }

    bool nonnegative_minus_identity() const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if ((*this)(i, j) - (i == j ? 1 : 0) < 0) return false;
        return true;
    }

private:
    int n_ = 0;
    std::vector<std::int64_t> a_;
};

// ---------------------------------------------------------------- floating helpers

inline Vec<double> matvec(const Matrix<double>& A, const Vec<double>& x) {
    Vec<double> y(A.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
    return y;
}

inline Matrix<double> matmul(const Matrix<double>& A, const Matrix<double>& B) {
    std::size_t n = A.size(), m = B.empty() ? 0 : B[0].size(), k = B.size();
    Matrix<double> C(n, Vec<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
    return C;
}

inline Matrix<double> transpose(const Matrix<double>& A) {
    if (A.empty()) return {};
    Matrix<double> T(A[0].size(), Vec<double>(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[0].size(); ++j) T[j][i] = A[i][j];
    return T;
}

inline double dot(const Vec<double>& a, const Vec<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec<double>& a) { return std::sqrt(dot(a, a)); }

struct PerronResult {
    double root = 0;
    Vec<double> vector;
    int iterations = 0;
    bool converged = false;
};

// Perron root of a nonnegative matrix by power iteration from the all-ones
// vector. Iterating A + I instead of A has the same Perron vector and avoids
// oscillation when A is imprimitive.
inline PerronResult perron_root(const Matrix<double>& A, double tol = 1e-12, int max_iter = 100000) {
    std::size_t n = A.size();
    PerronResult r;
    Vec<double> x(n, 1.0 / static_cast<double>(n));
    double prev = -1;
    for (int it = 1; it <= max_iter; ++it) {
        Vec<double> y = matvec(A, x);
        for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
        double s = 0;
        for (double v : y) s += v;
        if (s <= 0) break;
        for (double& v : y) v /= s;
        double lam = s - 1.0;  // x is normalised to sum 1
        r.iterations = it;
        if (prev >= 0 && std::fabs(lam - prev) <= tol * std::max(1.0, std::fabs(lam))) {
            double diff = 0;
            for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::fabs(y[i] - x[i]));
            if (diff <= 1e-10) {
                r.root = lam;
                r.vector = y;
                r.converged = true;
                return r;
            }
        }
        prev = lam;
        x = y;
    }
    r.root = prev;
    r.vector = x;
    return r;
}

}  // namespace veertrack
