#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "veertrack/period.hpp"
#include "veertrack/triangulation.hpp"

namespace veertrack {

// A triangulated half-translation surface in period coordinates.
//
// Exact mode keeps the stored periods fixed and accumulates the flow in
// `scale` = e^{2t}: the actual period of an edge is (e^t w, e^{-t} h). All
// flow-time comparisons then reduce to rational comparisons. Float mode
// applies the flow to the stored periods directly and keeps scale = 1.
template <class S>
class Surface {
public:
    using scalar = S;
    static constexpr Mode mode = scalar_traits<S>::mode;

    Surface() = default;
    Surface(Triangulation topo, std::vector<Period<S>> periods, std::vector<bool> marked = {})
        : topo_(std::move(topo)), periods_(std::move(periods)), marked_(std::move(marked)) {
        if (static_cast<int>(periods_.size()) != topo_.num_edges())
            throw semantic_error("period count does not match edge count");
        marked_.resize(topo_.num_vertices(), false);
    }

    const Triangulation& topology() const { return topo_; }
    int num_edges() const { return topo_.num_edges(); }
    int num_faces() const { return topo_.num_faces(); }
    int num_vertices() const { return topo_.num_vertices(); }
    const std::string& label(int e) const { return topo_.label(e); }

    const std::vector<Period<S>>& periods() const { return periods_; }
    const Period<S>& period(int e) const { return periods_.at(e); }
    Period<S> vec(const Slot& s) const { return s.sign * periods_[s.edge]; }

    const S& scale() const { return scale_; }
    double time() const { return time_; }

    const std::vector<bool>& marked() const { return marked_; }
    bool is_marked(int v) const { return marked_.at(v); }

    // e^t times the L-infinity length of the actual (flowed) period.
    S linf_key(const Period<S>& p) const { return smax<S>(scale_ * sabs(p.w), sabs(p.h)); }
    S linf_key(int e) const { return linf_key(periods_[e]); }

    // Actual period at the current flow time, in doubles.
    Period<double> actual(const Period<S>& p) const {
        double r = std::sqrt(to_double(scale_));
        return {to_double(p.w) * r, to_double(p.h) / r};
    }
    Period<double> actual(int e) const { return actual(periods_[e]); }

    // Low-level mutators used by the flip and flow code, which always work on copies.
    void set_period(int e, const Period<S>& p) { periods_.at(e) = p; }
    QuadSites flip_combinatorics(int e) { return topo_.flip(e); }
    void set_flow(const S& scale, double time) {
        scale_ = scale;
        time_ = time;
    }

private:
    Triangulation topo_;
    std::vector<Period<S>> periods_;
    std::vector<bool> marked_;
    S scale_{1};
    double time_ = 0.0;
};

struct Violation {
    std::string rule;
    std::string where;
    std::string detail;
};

struct ValidationReport {
    bool passed = true;
    std::vector<Violation> violations;

    void add(std::string rule, std::string where, std::string detail) {
        violations.push_back({std::move(rule), std::move(where), std::move(detail)});
        passed = false;
    }
};

namespace detail {

inline std::string tri_name(int t) { return "triangle " + std::to_string(t); }

template <class S>
bool near_zero(const S& x, double mag) {
    if constexpr (scalar_traits<S>::exact) {
        (void)mag;
        return x == 0;
    } else {
        return std::fabs(x) <= scalar_traits<double>::axis_eps * std::max(1.0, mag);
    }
}

}  // namespace detail

// Interior angle at every corner (radians), from actual periods.
template <class S>
std::vector<std::array<double, 3>> corner_angles(const Surface<S>& s) {
    std::vector<std::array<double, 3>> out(s.num_faces());
    for (int t = 0; t < s.num_faces(); ++t) {
        const Face& f = s.topology().face(t);
        for (int i = 0; i < 3; ++i) {
            Period<double> a = s.actual(s.vec(f[i]));
            Period<double> b = -s.actual(s.vec(f[mod3(i + 2)]));
            out[t][i] = std::atan2(cross(a, b), a.w * b.w + a.h * b.h);
        }
    }
    return out;
}

// Total angle at each vertex, in units of pi.
template <class S>
std::vector<double> vertex_angles(const Surface<S>& s) {
    std::vector<double> total(s.num_vertices(), 0.0);
    auto ang = corner_angles(s);
    for (int t = 0; t < s.num_faces(); ++t)
        for (int i = 0; i < 3; ++i) total[s.topology().vertex({t, i})] += ang[t][i];
    for (double& a : total) a /= std::numbers::pi;
    return total;
}

// Multiset of cone angles k*pi as a map k -> count. Assumes the angles are valid.
template <class S>
std::map<int, int> angle_census(const Surface<S>& s) {
    std::map<int, int> census;
    for (double a : vertex_angles(s)) ++census[static_cast<int>(std::lround(a))];
    return census;
}

template <class S>
ValidationReport validate(const Surface<S>& s) {
    ValidationReport rep;
    const Triangulation& T = s.topology();
    bool geometry_ok = true;
    for (int t = 0; t < s.num_faces(); ++t) {
        const Face& f = T.face(t);
        if (!T.distinct_edges(t)) rep.add("distinct-edges", detail::tri_name(t), "a triangle must have three distinct edges");
        Period<S> sum = s.vec(f[0]) + s.vec(f[1]) + s.vec(f[2]);
        double mag = 0;
        for (const Slot& sl : f) mag = std::max(mag, to_double(linf_length(s.period(sl.edge))));
        if (!detail::near_zero(sum.w, mag) || !detail::near_zero(sum.h, mag)) {
            rep.add("zero-sum", detail::tri_name(t),
                    "signed periods sum to (" + std::to_string(to_double(sum.w)) + ", " + std::to_string(to_double(sum.h)) + ")");
            geometry_ok = false;
        }
        S c = cross(s.vec(f[0]), s.vec(f[1]));
        if (ssign(c) <= 0 || detail::near_zero(c, mag * mag)) {
            rep.add("orientation", detail::tri_name(t), "cross product of the first two sides is not positive");
            geometry_ok = false;
        }
    }
    for (int e = 0; e < s.num_edges(); ++e) {
        Period<double> a = s.actual(e);
        bool flat = scalar_traits<S>::exact ? (s.period(e).w == 0 || s.period(e).h == 0)
                                            : (std::fabs(a.w) <= scalar_traits<double>::axis_eps ||
                                               std::fabs(a.h) <= scalar_traits<double>::axis_eps);
        if (flat) rep.add("axis-parallel", "edge " + s.label(e), "horizontal or vertical saddle connection");
    }
    if (geometry_ok) {
        auto angles = vertex_angles(s);
        for (int v = 0; v < s.num_vertices(); ++v) {
            double k = std::round(angles[v]);
            if (std::fabs(angles[v] - k) > 1e-9 || k < 1) {
                rep.add("cone-angle", "vertex " + std::to_string(v),
                        "total angle " + std::to_string(angles[v]) + " pi is not a positive multiple of pi");
            } else if (k == 1 && !s.is_marked(v)) {
                rep.add("unmarked-pole", "vertex " + std::to_string(v), "cone angle pi is only allowed at marked points");
            }
        }
        S total{0};
        for (int t = 0; t < s.num_faces(); ++t) total += cross(s.vec(T.face(t)[0]), s.vec(T.face(t)[1]));
        if (ssign(total) <= 0) rep.add("area", "surface", "total area is not positive");
    }
    return rep;
}

// Area of a triangle with sides a, b, c (a + b + c = 0), by the cross product.
template <class S>
S triangle_area_shoelace(const Period<S>& a, const Period<S>& b) {
    return cross(a, b) / S(2);
}

// Same area from absolute widths and heights only: enclose the triangle in its
// bounding box and subtract the right triangles in the corners. When the widest
// side differs from the tallest one this is w3*h1 - (w1 h1 + w2 h2 + w3 h3)/2.
template <class S>
S triangle_area_box(const Period<S>& a, const Period<S>& b, const Period<S>& c) {
    std::array<S, 3> w{sabs(a.w), sabs(b.w), sabs(c.w)}, h{sabs(a.h), sabs(b.h), sabs(c.h)};
    int wide = 0, tall = 0;
    for (int i = 1; i < 3; ++i) {
        if (w[wide] < w[i]) wide = i;
        if (h[tall] < h[i]) tall = i;
    }
    S corners = (w[0] * h[0] + w[1] * h[1] + w[2] * h[2]) / S(2);
    if (wide != tall) return w[wide] * h[tall] - corners;
    // one side spans the whole box; the other two meet at an interior corner
    int i = (wide + 1) % 3, j = (wide + 2) % 3;
    S x = w[i] * h[j], y = w[j] * h[i];
    return w[wide] * h[wide] / S(2) - (w[i] * h[i] + w[j] * h[j]) / S(2) - (x < y ? x : y);
}

template <class S>
S area(const Surface<S>& s) {
    S shoelace{0}, box{0};
    for (int t = 0; t < s.num_faces(); ++t) {
        const Face& f = s.topology().face(t);
        Period<S> a = s.vec(f[0]), b = s.vec(f[1]), c = s.vec(f[2]);
        S A = triangle_area_shoelace(a, b);
        if (ssign(A) <= 0) throw degeneracy_error("degenerate triangle " + std::to_string(t) + " (area <= 0)");
        shoelace += A;
        box += triangle_area_box(a, b, c);
    }
    if (scompare(shoelace, box) != 0)
        throw error("area formulas disagree: " + std::to_string(to_double(shoelace)) + " vs " + std::to_string(to_double(box)));
    return shoelace;
}

// g_t: (w, h) -> (e^t w, e^{-t} h).
template <class S>
Surface<S> apply_flow(const Surface<S>& s, double t) {
    Surface<S> out = s;
    if constexpr (scalar_traits<S>::exact) {
        out.set_flow(s.scale() * scalar_traits<S>::from_double(std::exp(2 * t)), s.time() + t);
    } else {
        double a = std::exp(t), b = std::exp(-t);
        for (int e = 0; e < s.num_edges(); ++e) out.set_period(e, {s.period(e).w * a, s.period(e).h * b});
        out.set_flow(1.0, s.time() + t);
    }
    return out;
}

// Exact-mode flow by a given rational factor e^{2t}.
inline Surface<Rational> apply_flow_scale(const Surface<Rational>& s, const Rational& factor) {
    if (factor <= 0) throw precondition_error("flow factor e^{2t} must be positive");
    Surface<Rational> out = s;
    out.set_flow(s.scale() * factor, s.time() + 0.5 * std::log(to_double(factor)));
    return out;
}

// Float copy with the flow applied to the periods.
template <class S>
Surface<double> to_float(const Surface<S>& s) {
    std::vector<Period<double>> p(s.num_edges());
    for (int e = 0; e < s.num_edges(); ++e) p[e] = s.actual(e);
    Surface<double> out(s.topology(), std::move(p), s.marked());
    out.set_flow(1.0, s.time());
    return out;
}

}  // namespace veertrack
