#pragma once

#include <cmath>
#include <random>

#include "veertrack/delaunay.hpp"

namespace veertrack::fixtures {

namespace detail {

template <class S>
S num(long long p, long long q = 1) {
    if constexpr (scalar_traits<S>::exact)
        return Rational(p, q);
    else
        return static_cast<double>(p) / static_cast<double>(q);
}

// Two triangles (+a,+b,+c), (-a,-b,-c): a torus with one marked point.
template <class S>
Surface<S> torus(const Period<S>& a, const Period<S>& b, std::vector<std::string> names = {"e1", "e2", "e3"}) {
    Period<S> c = -(a + b);
    std::vector<Face> faces{Face{Slot{0, 1}, Slot{1, 1}, Slot{2, 1}}, Face{Slot{0, -1}, Slot{1, -1}, Slot{2, -1}}};
    return Surface<S>(Triangulation(std::move(names), std::move(faces)), {a, b, c}, {true});
}

}  // namespace detail

// Torus with periods e1=(1, 0.3), e2=(-0.4, 1), e3=(-0.6, -1.3).
template <class S>
Surface<S> t2() {
    using detail::num;
    return detail::torus<S>({num<S>(1), num<S>(3, 10)}, {num<S>(-2, 5), num<S>(1)});
}

inline constexpr double golden = 1.6180339887498949;
inline constexpr double golden_dilatation = golden * golden;  // (3 + sqrt 5)/2

// The golden torus v1=(phi,1), v2=(1,-phi) sits exactly on a Delaunay tie, so
// the fixture is moved back along its own flow axis by a quarter period.
inline Surface<double> gold(double time_offset = -0.25 * std::log(golden_dilatation)) {
    Period<double> v1{golden, 1.0}, v2{1.0, -golden}, v3 = -(v1 + v2);
    std::vector<Face> faces{Face{Slot{1, 1}, Slot{0, 1}, Slot{2, 1}}, Face{Slot{1, -1}, Slot{0, -1}, Slot{2, -1}}};
    Surface<double> s(Triangulation({"e1", "e2", "e3"}, std::move(faces)), {v1, v2, v3}, {true});
    Surface<double> out = apply_flow(s, time_offset);
    out.set_flow(1.0, 0.0);
    return out;
}

// Pillowcase with four poles, sheared so that no saddle connection is
// axis-parallel, already in L-infinity Delaunay position.
template <class S>
Surface<S> pillow() {
    using detail::num;
    Period<S> across{num<S>(2), num<S>(3, 10)}, up{num<S>(-1, 10), num<S>(1)}, diag{num<S>(-19, 10), num<S>(-13, 10)};
    std::vector<std::string> names{"bot", "top", "side", "d1", "d2", "d3"};
    enum { bot, top, side, d1, d2, d3 };
    std::vector<Face> faces{
        Face{Slot{d2, 1}, Slot{d1, 1}, Slot{bot, 1}},
        Face{Slot{top, -1}, Slot{side, -1}, Slot{d1, -1}},
        Face{Slot{side, 1}, Slot{d3, 1}, Slot{bot, 1}},
        Face{Slot{top, -1}, Slot{d2, -1}, Slot{d3, -1}},
    };
    return Surface<S>(Triangulation(names, std::move(faces)), {across, across, up, diag, up, diag}, {true, true, true, true});
}

// A torus whose vertical direction is close to a rational one: one closed
// curve has width 1/2003, so the flow pushes it through the thin part (around
// t = log(2003)/2) with a long run of same-direction splits.
template <class S>
Surface<S> cusp_torus() {
    using detail::num;
    return greedy_delaunay(detail::torus<S>({num<S>(1), num<S>(3, 10)}, {num<S>(-1, 2003), num<S>(1)})).first;
}

// A generic torus in Delaunay position. Exact coordinates use large random
// denominators so that trajectories run for many events before the discrete
// set of widths forces a vertical saddle connection.
template <class S, class Rng>
Surface<S> random_torus(Rng& rng) {
    for (;;) {
        Period<S> a, b;
        if constexpr (scalar_traits<S>::exact) {
            std::uniform_int_distribution<long long> den(100003, 999983), n(1, 4000000);
            auto r = [&](bool pos) {
                long long q = den(rng), p = n(rng) % (3 * q) + 1;
                if (!pos && (rng() & 1)) p = -p;
                return Rational(p, q);
            };
            a = {r(true), r(false)};
            b = {r(false), r(true)};
        } else {
            std::uniform_real_distribution<double> u(-2.0, 2.0);
            a = {std::fabs(u(rng)) + 0.05, u(rng)};
            b = {u(rng), std::fabs(u(rng)) + 0.05};
        }
        if (ssign(cross(a, b)) <= 0) continue;
        Surface<S> s = detail::torus<S>(a, b);
        if (!validate(s).passed || !is_veering(s)) continue;
        try {
            Surface<S> d = greedy_delaunay(s).first;
            if constexpr (!scalar_traits<S>::exact) {
                // unit area, so different fixtures are comparable
                double r = 1.0 / std::sqrt(area(d));
                for (int e = 0; e < d.num_edges(); ++e) d.set_period(e, {d.period(e).w * r, d.period(e).h * r});
            }
            return d;
        } catch (const degeneracy_error&) {
            continue;
        }
    }
}

}  // namespace veertrack::fixtures
