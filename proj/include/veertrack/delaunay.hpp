#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "veertrack/surface.hpp"

namespace veertrack {

template <class S>
struct FlipRecord {
    int old_edge = -1;  // id of the flipped edge; the new diagonal keeps it
    Period<S> old_period;
    Period<S> new_period;
    std::array<Slot, 4> quad;  // sides in counterclockwise order, signs as traversed
};

template <class S>
struct Diagonal {
    Period<S> period;
    bool flippable = false;
    QuadSites sites;
    std::array<Period<S>, 4> sides;  // delta*C, delta*D, A, B
};

namespace detail {

template <class S>
bool axis_parallel_actual(const Surface<S>& s, const Period<S>& p) {
    if constexpr (scalar_traits<S>::exact) {
        (void)s;
        return p.w == 0 || p.h == 0;
    } else {
        Period<double> a = s.actual(p);
        return std::fabs(a.w) <= scalar_traits<double>::axis_eps || std::fabs(a.h) <= scalar_traits<double>::axis_eps;
    }
}

template <class S>
int slope_of(const Surface<S>& s, const Period<S>& p) {
    if (axis_parallel_actual(s, p)) throw degeneracy_error("axis-parallel saddle connection");
    return ssign(p.w) * ssign(p.h);
}

}  // namespace detail

template <class S>
int slope_sign(const Surface<S>& s, int e) {
    return detail::slope_of(s, s.period(e));
}

// No triangle carries three edges of the same slope sign.
template <class S>
bool is_veering(const Surface<S>& s) {
    for (int t = 0; t < s.num_faces(); ++t) {
        const Face& f = s.topology().face(t);
        int a = slope_sign(s, f[0].edge), b = slope_sign(s, f[1].edge), c = slope_sign(s, f[2].edge);
        if (a == b && b == c) return false;
    }
    return true;
}

// The diagonal that would replace e. It is flippable when the four sides of
// the quadrilateral alternate in slope sign and both new triangles are
// positively oriented.
template <class S>
Diagonal<S> other_diagonal(const Surface<S>& s, int e) {
    Diagonal<S> d;
    d.sites = s.topology().quad(e);
    const QuadSites& q = d.sites;
    Period<S> vA = s.vec(q.A), vB = s.vec(q.B);
    Period<S> vC = q.delta * s.vec(q.C), vD = q.delta * s.vec(q.D);
    d.sides = {vC, vD, vA, vB};
    d.period = vD + vA;
    bool alternating = true;
    for (int k = 0; k < 4; ++k)
        if (detail::slope_of(s, d.sides[k]) == detail::slope_of(s, d.sides[(k + 1) % 4])) alternating = false;
    bool oriented = ssign(cross(vC, d.period)) > 0 && ssign(cross(vD, vA)) > 0;
    if (alternating && detail::axis_parallel_actual(s, d.period))
        throw degeneracy_error("other diagonal of edge '" + s.label(e) + "' is axis-parallel");
    d.flippable = alternating && oriented;
    return d;
}

template <class S>
struct CertificateEntry {
    int edge = -1;
    S edge_length;      // L-infinity length of e (times e^t in exact mode)
    S diagonal_length;  // same for the other diagonal
    bool flippable = false;
};

// The finite list of inequalities that certifies the L-infinity Delaunay property.
template <class S>
std::vector<CertificateEntry<S>> delaunay_certificate(const Surface<S>& s) {
    std::vector<CertificateEntry<S>> out;
    for (int e = 0; e < s.num_edges(); ++e) {
        Diagonal<S> d = other_diagonal(s, e);
        out.push_back({e, s.linf_key(e), s.linf_key(d.period), d.flippable});
    }
    return out;
}

template <class S>
std::vector<int> delaunay_violations(const Surface<S>& s) {
    std::vector<int> out;
    for (const auto& c : delaunay_certificate(s)) {
        if (!c.flippable) continue;
        int cmp = scompare(c.diagonal_length, c.edge_length);
        if (cmp == 0)
            throw degeneracy_error("Delaunay tie at edge '" + s.label(c.edge) + "' (non-unique Delaunay triangulation)");
        if (cmp < 0) out.push_back(c.edge);
    }
    return out;
}

template <class S>
bool is_delaunay(const Surface<S>& s) {
    return delaunay_violations(s).empty();
}

template <class S>
std::pair<Surface<S>, FlipRecord<S>> flip(const Surface<S>& s, int e) {
    Diagonal<S> d = other_diagonal(s, e);
    if (!d.flippable) throw precondition_error("edge '" + s.label(e) + "' is not flippable");
    FlipRecord<S> rec;
    rec.old_edge = e;
    rec.old_period = s.period(e);
    rec.new_period = d.period;
    const QuadSites& q = d.sites;
    rec.quad = {Slot{q.C.edge, q.delta * q.C.sign}, Slot{q.D.edge, q.delta * q.D.sign}, q.A, q.B};
    Surface<S> out = s;
    out.set_period(e, d.period);
    out.flip_combinatorics(e);
    return {std::move(out), rec};
}

// Flip violating edges, longest first (ties broken by label), until none remain.
template <class S>
std::pair<Surface<S>, std::vector<FlipRecord<S>>> greedy_delaunay(const Surface<S>& s, int max_flips = 100000) {
    Surface<S> cur = s;
    std::vector<FlipRecord<S>> log;
    for (;;) {
        std::vector<int> bad = delaunay_violations(cur);
        if (bad.empty()) return {std::move(cur), std::move(log)};
        if (static_cast<int>(log.size()) >= max_flips) throw error("greedy Delaunay reduction did not terminate");
        int pick = bad.front();
        for (int e : bad) {
            int cmp = scompare(cur.linf_key(e), cur.linf_key(pick));
            if (cmp > 0 || (cmp == 0 && cur.label(e) < cur.label(pick))) pick = e;
        }
        auto [next, rec] = flip(cur, pick);
        cur = std::move(next);
        log.push_back(rec);
    }
}

}  // namespace veertrack
