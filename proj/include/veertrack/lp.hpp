#pragma once

#include <vector>

#include "veertrack/linalg.hpp"

namespace veertrack {

struct LPResult {
    enum Status { optimal, infeasible, unbounded } status = infeasible;
    Rational value;
    Vec<Rational> x;
};

// minimize c.x subject to A_eq x = b_eq, A_le x <= b_le, x >= 0.
// Exact two-phase tableau simplex with Bland's rule; meant for the tiny
// feasibility problems of train-track recurrence, not for speed.
inline LPResult lp_minimize(const Vec<Rational>& c, const Matrix<Rational>& A_eq, const Vec<Rational>& b_eq,
                            const Matrix<Rational>& A_le, const Vec<Rational>& b_le) {
    const int n = static_cast<int>(c.size());
    const int m_eq = static_cast<int>(A_eq.size()), m_le = static_cast<int>(A_le.size());
    const int m = m_eq + m_le;
    const int n_slack = m_le, n_art = m;
    const int cols = n + n_slack + n_art;  // rhs stored separately
    Matrix<Rational> T(m, Vec<Rational>(cols, Rational(0)));
    Vec<Rational> rhs(m);
    for (int i = 0; i < m; ++i) {
        const Vec<Rational>& row = i < m_eq ? A_eq[i] : A_le[i - m_eq];
        Rational b = i < m_eq ? b_eq[i] : b_le[i - m_eq];
        for (int j = 0; j < n; ++j) T[i][j] = row[j];
        if (i >= m_eq) T[i][n + (i - m_eq)] = 1;
        if (b < 0) {
            for (auto& v : T[i]) v = -v;
            b = -b;
        }
        T[i][n + n_slack + i] = 1;
        rhs[i] = b;
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + n_slack + i;

    auto pivot = [&](int r, int col) {
        Rational inv = 1 / T[r][col];
        for (auto& v : T[r]) v *= inv;
        rhs[r] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r || T[i][col] == 0) continue;
            Rational f = T[i][col];
            for (int j = 0; j < cols; ++j)
                if (T[r][j] != 0) T[i][j] -= f * T[r][j];
            rhs[i] -= f * rhs[r];
        }
        basis[r] = col;
    };

    // returns false if unbounded
    auto run = [&](const Vec<Rational>& cost, int usable) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < usable && enter < 0; ++j) {
                Rational r = cost[j];
                for (int i = 0; i < m; ++i)
                    if (T[i][j] != 0) r -= cost[basis[i]] * T[i][j];
                if (r < 0) enter = j;
            }
            if (enter < 0) return true;
            int leave = -1;
            Rational best;
            for (int i = 0; i < m; ++i) {
                if (T[i][enter] <= 0) continue;
                Rational ratio = rhs[i] / T[i][enter];
                if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    };

    Vec<Rational> phase1(cols, Rational(0));
    for (int j = n + n_slack; j < cols; ++j) phase1[j] = 1;
    run(phase1, cols);
    Rational infeas = 0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n + n_slack) infeas += rhs[i];
    LPResult res;
    if (infeas != 0) return res;
    // drive remaining (zero-level) artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n + n_slack) continue;
        for (int j = 0; j < n + n_slack; ++j)
            if (T[i][j] != 0) {
                pivot(i, j);
                break;
            }
    }
    Vec<Rational> cost(cols, Rational(0));
    for (int j = 0; j < n; ++j) cost[j] = c[j];
    if (!run(cost, n + n_slack)) {
        res.status = LPResult::unbounded;
        return res;
    }
    res.status = LPResult::optimal;
    res.x.assign(n, Rational(0));
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = rhs[i];
    res.value = 0;
    for (int j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

// Is there x >= 1 (componentwise) with A_eq x = 0 and A_ge x >= 1 ?
// By homogeneity this is strict positivity of a cone point.
inline bool strictly_feasible(const Matrix<Rational>& A_eq, const Matrix<Rational>& A_ge, int n) {
    // substitute x = 1 + y, y >= 0
    Matrix<Rational> Ae, Al;
    Vec<Rational> be, bl;
    for (const auto& row : A_eq) {
        Rational s = 0;
        for (const auto& v : row) s += v;
        Ae.push_back(row);
        be.push_back(-s);
    }
    for (const auto& row : A_ge) {
        Rational s = 0;
        Vec<Rational> neg(n);
        for (int j = 0; j < n; ++j) {
            s += row[j];
            neg[j] = -row[j];
        }
        Al.push_back(neg);  // -row.y <= s - 1
        bl.push_back(s - 1);
    }
    return lp_minimize(Vec<Rational>(n, Rational(0)), Ae, be, Al, bl).status == LPResult::optimal;
}

}  // namespace veertrack
