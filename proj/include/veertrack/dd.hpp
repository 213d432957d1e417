#pragma once

#include <cstdint>
#include <vector>

#include "veertrack/linalg.hpp"

namespace veertrack {

namespace detail {

struct ZeroSet {
    std::vector<std::uint64_t> bits;
    explicit ZeroSet(int n = 0) : bits((n + 63) / 64, 0) {}
    void set(int i) { bits[i / 64] |= std::uint64_t(1) << (i % 64); }
    ZeroSet operator&(const ZeroSet& o) const {
        ZeroSet r;
        r.bits.resize(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) r.bits[i] = bits[i] & o.bits[i];
        return r;
    }
    bool contains(const ZeroSet& o) const {
        for (std::size_t i = 0; i < bits.size(); ++i)
            if ((o.bits[i] & ~bits[i]) != 0) return false;
        return true;
    }
    int count() const {
        int c = 0;
        for (auto b : bits) c += __builtin_popcountll(b);
        return c;
    }
};

}  // namespace detail

// Extreme rays of the pointed cone {x : E x = 0, A x >= 0} by the double
// description method (incremental, combinatorial adjacency test), in exact
// arithmetic. Rays come back as primitive integer vectors. Throws if the cone
// is not pointed.
inline Matrix<Rational> extreme_rays(const Matrix<Rational>& E, const Matrix<Rational>& A, int dim) {
    // work inside the subspace E x = 0 with coordinates y: x = B y
    Matrix<Rational> basis = E.empty() ? Matrix<Rational>{} : nullspace(E, dim);
    if (E.empty()) {
        basis.assign(dim, Vec<Rational>(dim, Rational(0)));
        for (int i = 0; i < dim; ++i) basis[i][i] = 1;
    }
    const int k = static_cast<int>(basis.size());
    if (k == 0) return {};
    const int rows = static_cast<int>(A.size());
    Matrix<Rational> AB(rows, Vec<Rational>(k, Rational(0)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < k; ++j)
            for (int l = 0; l < dim; ++l)
                if (A[i][l] != 0 && basis[j][l] != 0) AB[i][j] += A[i][l] * basis[j][l];

    // initial simplicial cone from k independent rows
    std::vector<int> init;
    {
        Matrix<Rational> acc;
        for (int i = 0; i < rows && static_cast<int>(init.size()) < k; ++i) {
            acc.push_back(AB[i]);
            if (rank(acc, k) == static_cast<int>(acc.size()))
                init.push_back(i);
            else
                acc.pop_back();
        }
        if (static_cast<int>(init.size()) < k) throw precondition_error("cone is not pointed");
    }
    Matrix<Rational> R(k);
    for (int a = 0; a < k; ++a) R[a] = AB[init[a]];
    Matrix<Rational> Rinv = inverse(R);

    struct Ray {
        Vec<Rational> y;
        detail::ZeroSet z;
    };
    std::vector<Ray> rays;
    std::vector<bool> done(rows, false);
    for (int a = 0; a < k; ++a) done[init[a]] = true;
    auto zero_set = [&](const Vec<Rational>& y) {
        detail::ZeroSet z(rows);
        for (int i = 0; i < rows; ++i) {
            if (!done[i]) continue;
            Rational v = 0;
            for (int j = 0; j < k; ++j) v += AB[i][j] * y[j];
            if (v == 0) z.set(i);
        }
        return z;
    };
    for (int a = 0; a < k; ++a) {
        Vec<Rational> y(k);
        for (int j = 0; j < k; ++j) y[j] = Rinv[j][a];
        y = primitive(y);
        rays.push_back({y, zero_set(y)});
    }

    for (int i = 0; i < rows; ++i) {
        if (done[i]) continue;
        std::vector<Rational> val(rays.size());
        std::vector<int> pos, neg, zer;
        for (std::size_t r = 0; r < rays.size(); ++r) {
            Rational v = 0;
            for (int j = 0; j < k; ++j) v += AB[i][j] * rays[r].y[j];
            val[r] = v;
            (v > 0 ? pos : v < 0 ? neg : zer).push_back(static_cast<int>(r));
        }
        done[i] = true;
        std::vector<Ray> next;
        for (int r : pos) {
            next.push_back(rays[r]);
        }
        for (int r : zer) {
            next.push_back(rays[r]);
            next.back().z.set(i);
        }
        for (int p : pos)
            for (int q : neg) {
                detail::ZeroSet common = rays[p].z & rays[q].z;
                if (common.count() < k - 2) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
                    if (static_cast<int>(r) == p || static_cast<int>(r) == q) continue;
                    if (rays[r].z.contains(common)) adjacent = false;
                }
                if (!adjacent) continue;
                Vec<Rational> y(k);
                for (int j = 0; j < k; ++j) y[j] = val[p] * rays[q].y[j] - val[q] * rays[p].y[j];
                y = primitive(y);
                Ray nr{y, common};
                nr.z.set(i);
                next.push_back(std::move(nr));
            }
        rays = std::move(next);
    }

    Matrix<Rational> out;
    for (const auto& r : rays) {
        Vec<Rational> x(dim, Rational(0));
        for (int j = 0; j < k; ++j)
            if (r.y[j] != 0)
                for (int l = 0; l < dim; ++l) x[l] += r.y[j] * basis[j][l];
        out.push_back(primitive(x));
    }
    return out;
}

}  // namespace veertrack
