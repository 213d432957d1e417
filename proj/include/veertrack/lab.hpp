#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "veertrack/cones.hpp"
#include "veertrack/flow.hpp"

namespace veertrack {

// ---------------------------------------------------------------- small numerics

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double residual = 0;  // root mean square of the residuals
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    std::size_t n = x.size();
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    f.r2 = syy > 0 ? 1 - ss / syy : 1;
    return f;
}

// Worker count: VEERTRACK_THREADS if set, else the hardware concurrency.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VEERTRACK_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

// Runs job(i) for i < count on a small pool. Jobs write to their own slots.
template <class F>
void parallel_for(std::size_t count, F&& job) {
    unsigned workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(count);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    job(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- period-space helpers

namespace detail {

// Basis of edge vectors that close up around every triangle: the tangent
// space of one coordinate (all widths, or all heights) in the chart.
inline Matrix<double> cocycle_basis(const Triangulation& T) {
    Matrix<Rational> rows;
    for (int t = 0; t < T.num_faces(); ++t) {
        Vec<Rational> r(T.num_edges(), Rational(0));
        for (const Slot& s : T.face(t)) r[s.edge] += s.sign;
        rows.push_back(std::move(r));
    }
    Matrix<double> out;
    for (const auto& v : nullspace(rows, T.num_edges())) {
        Vec<double> d;
        for (const auto& x : v) d.push_back(to_double(x));
        out.push_back(std::move(d));
    }
    return out;
}

inline Surface<double> with_periods(const Surface<double>& s, const Vec<double>& w, const Vec<double>& h) {
    Surface<double> out = s;
    for (int e = 0; e < s.num_edges(); ++e) out.set_period(e, {w[e], h[e]});
    return out;
}

// Sum of oriented triangle areas, with no validity checks: linear in the
// heights for fixed widths.
inline double signed_area(const Surface<double>& s) {
    double a = 0;
    for (const Face& f : s.topology().faces()) a += cross(s.vec(f[0]), s.vec(f[1]));
    return a / 2;
}

inline Vec<double> widths(const Surface<double>& s) {
    Vec<double> v;
    for (const auto& p : s.periods()) v.push_back(p.w);
    return v;
}

inline Vec<double> heights(const Surface<double>& s) {
    Vec<double> v;
    for (const auto& p : s.periods()) v.push_back(p.h);
    return v;
}

// Random direction in the cocycle space, optionally with zero derivative of
// area when added to the heights (widths fixed), scaled to Euclidean norm 1.
template <class Rng>
Vec<double> random_cocycle(const Surface<double>& s, Rng& rng, bool area_preserving_heights) {
    Matrix<double> basis = cocycle_basis(s.topology());
    if (basis.empty()) throw precondition_error("period space has no deformations");
    std::normal_distribution<double> g(0.0, 1.0);
    Vec<double> c(basis.size());
    for (double& x : c) x = g(rng);
    if (area_preserving_heights) {
        // area is linear in the heights, so differences give the exact gradient
        Vec<double> w = widths(s), h = heights(s);
        double a0 = signed_area(s);
        Vec<double> grad;
        for (const auto& b : basis) {
            Vec<double> hb = h;
            for (std::size_t e = 0; e < hb.size(); ++e) hb[e] += b[e];
            grad.push_back(signed_area(with_periods(s, w, hb)) - a0);
        }
        // area-preserving in coefficient space, then orthogonal in edge space
        // would need a metric change; the constraint is linear so either works
        double gg = dot(grad, grad);
        if (gg > 0) {
            double k = dot(c, grad) / gg;
            for (std::size_t i = 0; i < c.size(); ++i) c[i] -= k * grad[i];
        }
    }
    Vec<double> v(s.num_edges(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t e = 0; e < v.size(); ++e) v[e] += c[i] * basis[i][e];
    double n = norm2(v);
    if (!(n > 0)) throw precondition_error("no admissible perturbation direction");
    for (double& x : v) x /= n;
    return v;
}

template <class S>
bool same_chart(const Surface<S>& a, const Surface<S>& b) {
    if (!(a.topology() == b.topology())) return false;
    for (int e = 0; e < a.num_edges(); ++e)
        if (slope_sign(a, e) != slope_sign(b, e)) return false;
    return true;
}

// Elementary period change of one flip: row e becomes delta*sigma_D at D and sigma_A at A.
inline IntMatrix flip_period_matrix(const QuadSites& q, int n) {
    IntMatrix f = IntMatrix::identity(n);
    f(q.edge, q.edge) = 0;
    f(q.edge, q.D.edge) += q.delta * q.D.sign;
    f(q.edge, q.A.edge) += q.A.sign;
    return f;
}

}  // namespace detail

// Signed integer chart change over events [from, to): periods after = B * periods before.
template <class S>
IntMatrix period_chart_change(const Trajectory<S>& traj, std::size_t from, std::size_t to) {
    int n = traj.start.num_edges();
    IntMatrix B = IntMatrix::identity(n);
    for (std::size_t i = from; i < to; ++i)
        B = detail::flip_period_matrix(traj.states[i].topology().quad(traj.events[i].edge), n) * B;
    return B;
}

// Start surface perturbed by a random cocycle of norm delta, in widths and/or heights.
template <class Rng>
Surface<double> perturb(const Surface<double>& s, double delta, Rng& rng, bool widths = true, bool heights = true) {
    Vec<double> w = detail::widths(s), h = detail::heights(s);
    if (widths) {
        Vec<double> v = detail::random_cocycle(s, rng, false);
        for (std::size_t e = 0; e < w.size(); ++e) w[e] += delta * v[e];
    }
    if (heights) {
        Vec<double> v = detail::random_cocycle(s, rng, false);
        for (std::size_t e = 0; e < h.size(); ++e) h[e] += delta * v[e];
    }
    Surface<double> out = detail::with_periods(s, w, h);
    if (!validate(out).passed || !is_veering(out) || !detail::same_chart(out, s) || !is_delaunay(out))
        throw precondition_error("perturbation escapes the Delaunay chart");
    return out;
}

// ---------------------------------------------------------------- strong-stable contraction

struct ContractionSample {
    double T = 0;
    int trial = 0;
    double d0 = 0;
    double dT = 0;
    double ratio = 0;
    bool chart_changed = false;  // the two words differ; distance taken through the integer chart change
};

struct ContractionFit {
    std::vector<ContractionSample> samples;  // sorted by (trial, T)
    double alpha = 0;                        // fit log ratio = log C - alpha T
    double C = 0;
    double residual = 0;
    double r2 = 0;
};

// Pairs (s, s + v) with v a random height perturbation of norm delta tangent to
// the unit-area locus. Both are flowed; d_E is the Euclidean distance of the
// period vectors in the base trajectory's Delaunay chart at each time. When
// the perturbed run splits differently the same integer chart change is used
// and the sample is flagged.
inline ContractionFit contraction_experiment(const Surface<double>& s, std::vector<double> T_list, double delta,
                                             int trials, std::uint64_t seed) {
    if (T_list.empty() || trials <= 0) throw precondition_error("need at least one time and one trial");
    if (!is_delaunay(s)) throw precondition_error("start surface is not L-infinity Delaunay");
    std::sort(T_list.begin(), T_list.end());
    const double t0 = s.time();
    const double Tmax = T_list.back();
    const int n = s.num_edges();
    Trajectory<double> base = run_flow(s, t0 + Tmax);
    // chart change of the base trajectory after each prefix
    std::vector<IntMatrix> prefix{IntMatrix::identity(n)};
    for (std::size_t i = 0; i < base.events.size(); ++i)
        prefix.push_back(detail::flip_period_matrix(base.states[i].topology().quad(base.events[i].edge), n) * prefix.back());
    auto count_until = [](const Trajectory<double>& tr, double t) {
        std::size_t k = 0;
        while (k < tr.events.size() && tr.events[k].time <= t) ++k;
        return k;
    };

    std::vector<std::vector<ContractionSample>> per_trial(trials);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(trial)};
        std::mt19937_64 rng(seq);
        Vec<double> v = detail::random_cocycle(s, rng, true);
        Vec<double> h = detail::heights(s);
        for (int e = 0; e < n; ++e) h[e] += delta * v[e];
        Surface<double> s2 = detail::with_periods(s, detail::widths(s), h);
        if (!validate(s2).passed || !detail::same_chart(s2, s) || !is_delaunay(s2))
            throw precondition_error("perturbation escapes the Delaunay chart; reduce delta");
        Trajectory<double> other = run_flow(s2, t0 + Tmax);
        for (double T : T_list) {
            double t = t0 + T;
            std::size_t k1 = count_until(base, t), k2 = count_until(other, t);
            bool same = k1 == k2;
            for (std::size_t i = 0; same && i < k1; ++i)
                same = base.events[i].edge == other.events[i].edge && base.events[i].direction == other.events[i].direction;
            // The difference of the two period vectors in the base chart is
            // B * (start difference), flowed. Subtracting two separately
            // flowed surfaces instead would lose the signal to cancellation.
            const IntMatrix& B = prefix[k1];
            double ew = std::exp(T), eh = std::exp(-T), d = 0;
            for (int e = 0; e < n; ++e) {
                double a = 0, b = 0;
                for (int f = 0; f < n; ++f) {
                    a += static_cast<double>(B(e, f)) * (s2.period(f).w - s.period(f).w);
                    b += static_cast<double>(B(e, f)) * (s2.period(f).h - s.period(f).h);
                }
                d += a * ew * a * ew + b * eh * b * eh;
            }
            d = std::sqrt(d);
            ContractionSample cs{T, static_cast<int>(trial), delta, d, d / delta, !same};
            per_trial[trial].push_back(cs);
        }
    });

    ContractionFit fit;
    std::vector<double> xs, ys;
    for (const auto& v : per_trial)
        for (const auto& cs : v) {
            fit.samples.push_back(cs);
            if (!(cs.ratio > 0)) throw error("non-positive contraction ratio");
            xs.push_back(cs.T);
            ys.push_back(std::log(cs.ratio));
        }
    LinearFit lf = fit_line(xs, ys);
    fit.alpha = -lf.slope;
    fit.C = std::exp(lf.intercept);
    fit.residual = lf.residual;
    fit.r2 = lf.r2;
    return fit;
}

// ---------------------------------------------------------------- Hilbert diameter decay

struct HilbertSample {
    std::size_t state = 0;
    double t = 0;
    double diameter = infinite_distance;
};

// Image of the start track's tangential cone under the composed tangential
// transition, measured in the Hilbert metric of each checkpoint's own cone.
template <class S>
std::vector<HilbertSample> hilbert_contraction_experiment(const Trajectory<S>& traj, std::vector<std::size_t> checkpoints) {
    std::sort(checkpoints.begin(), checkpoints.end());
    int n = traj.start.num_edges();
    TangentialChart c0 = tangential_chart(dual_track(traj.states.front(), Direction::vertical).first);
    std::vector<HilbertSample> out;
    for (std::size_t j : checkpoints) {
        if (j >= traj.states.size()) throw precondition_error("checkpoint beyond the trajectory");
        TangentialChart cj = tangential_chart(dual_track(traj.states[j], Direction::vertical).first);
        TransitionPair p = compose_word(traj.events, n, 0, j);
        out.push_back({j, traj.states[j].time(), point_set_diameter(tangential_image(c0, cj, p.tangential))});
    }
    return out;
}

// Hilbert diameter of one period's tangential image: the Birkhoff Delta of the period word.
template <class S>
double period_image_diameter(const Trajectory<S>& traj, const Periodicity<S>& per) {
    int n = traj.start.num_edges();
    TangentialChart a = tangential_chart(dual_track(traj.states[per.m], Direction::vertical).first);
    TangentialChart b = tangential_chart(dual_track(traj.states[per.m2], Direction::vertical).first);
    return point_set_diameter(tangential_image(a, b, compose_word(traj.events, n, per.m, per.m2).tangential));
}

// ---------------------------------------------------------------- closing search

namespace detail {

inline bool tracks_match(const TrainTrack& a, const TrainTrack& b, const TriangulationMap& m) {
    for (int t = 0; t < a.num_switches(); ++t)
        if (mod3(a.large_slot(t) + m.rot[t]) != b.large_slot(m.tri[t])) return false;
    return true;
}

}  // namespace detail

// First pair of states whose labelled triangulations agree up to relabeling
// (slope signs and marked points included) and whose return word is
// pseudo-Anosov on a filling support. Periods are not compared, so this also
// finds near-returns of perturbed orbits.
template <class S>
std::optional<Periodicity<S>> find_return(const Trajectory<S>& traj) {
    const auto& st = traj.states;
    int n = traj.start.num_edges();
    for (std::size_t j = 1; j < st.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const Surface<S>& A = st[j];
            const Surface<S>& B = st[i];
            auto accept = [&](const TriangulationMap& m) {
                for (int e = 0; e < n; ++e)
                    if (slope_sign(A, e) != slope_sign(B, m.edge[e])) return false;
                for (int v = 0; v < A.num_vertices(); ++v)
                    if (A.is_marked(v) != B.is_marked(m.vertex[v])) return false;
                return true;
            };
            for (const auto& m : triangulation_isomorphisms(A.topology(), B.topology(), accept)) {
                std::vector<SplitEvent<S>> word(traj.events.begin() + i, traj.events.begin() + j);
                PAReport rep = analyze_periodic_word(word, m.edge, dual_track(B, Direction::vertical).first);
                if (!rep.is_pA || !(rep.dilatation > 1 + 1e-9)) continue;
                Periodicity<S> p;
                p.m = i;
                p.m2 = j;
                p.relabeling = m.edge;
                p.lambda = rep.dilatation;
                p.word = event_word(traj.events, i, j);
                return p;
            }
        }
    return std::nullopt;
}

struct ClosingResult {
    Surface<double> periodic_point;  // unit area, |widths| = |heights| in the Euclidean norm
    double T_prime = 0;
    double lambda = 1;
    int iterations = 0;
    bool converged = false;
    std::size_t m = 0, m2 = 0;
    std::vector<int> relabeling;
    std::string word;
};

namespace detail {

// Flow representative of a point: unit area and equal Euclidean norms of
// widths and heights, which fixes the position along the flow line.
inline Surface<double> normalize_on_orbit(const Surface<double>& s) {
    Vec<double> w = widths(s), h = heights(s);
    double a = area(s);
    if (!(a > 0)) throw error("iteration left the chart: area is not positive");
    double nw = norm2(w), nh = norm2(h);
    double k = std::sqrt(nh / nw);  // widths *= k, heights /= k
    double r = 1 / std::sqrt(a);
    for (auto& x : w) x *= k * r;
    for (auto& x : h) x *= r / k;
    Surface<double> out = with_periods(s, w, h);
    out.set_flow(1.0, 0.0);
    return out;
}

}  // namespace detail

// Fixed point of the return map of the word events[m, m2) + relabeling.
// Forward: heights go through the signed chart change and relabeling (the
// map expands them by lambda and contracts the rest). Backward: widths go
// through the inverse. Both are normalised each step; the joint fixed point
// is the periodic orbit in the chart of state m.
template <class S>
ClosingResult closing_search(const Trajectory<S>& traj, const Periodicity<S>& match, double tol = 1e-13, int max_iter = 500) {
    const Surface<double> Sm = to_float(traj.states[match.m]);
    const Surface<double> Sm2 = to_float(traj.states[match.m2]);
    const int n = Sm.num_edges();
    IntMatrix B = period_chart_change(traj, match.m, match.m2);
    // per-edge orientation of the relabeling
    std::vector<int> eps(n);
    for (int e = 0; e < n; ++e) {
        int f = match.relabeling[e];
        int sw = (Sm2.period(e).w > 0) == (Sm.period(f).w > 0) ? 1 : -1;
        int sh = (Sm2.period(e).h > 0) == (Sm.period(f).h > 0) ? 1 : -1;
        if (sw != sh) throw precondition_error("relabeling does not respect period orientation");
        eps[e] = sw;
    }
    // R acts on cocycles of the chart at m; B only makes sense there, since a
    // flip forgets the old diagonal. Work in the coordinates given by the free
    // columns of the cocycle basis.
    Matrix<Rational> rel;
    for (int t = 0; t < Sm.num_faces(); ++t) {
        Vec<Rational> r(n, Rational(0));
        for (const Slot& sl : Sm.topology().face(t)) r[sl.edge] += sl.sign;
        rel.push_back(std::move(r));
    }
    Matrix<Rational> Z = nullspace(rel, n);
    const int k = static_cast<int>(Z.size());
    std::vector<int> freecol;
    for (const auto& z : Z)
        for (int e = 0; e < n; ++e)
            if (z[e] == 1 && std::count_if(Z.begin(), Z.end(), [&](const Vec<Rational>& y) { return y[e] != 0; }) == 1) {
                freecol.push_back(e);
                break;
            }
    Matrix<Rational> Rc(k, Vec<Rational>(k, Rational(0)));
    for (int i = 0; i < k; ++i) {
        Vec<Rational> img(n, Rational(0));
        for (int e = 0; e < n; ++e) {
            Rational acc = 0;
            for (int f = 0; f < n; ++f) acc += Rational(B(e, f)) * Z[i][f];
            img[match.relabeling[e]] = eps[e] * acc;
        }
        for (int r = 0; r < k; ++r) Rc[r][i] = img[freecol[r]];
    }
    Matrix<Rational> Rc_inv = inverse(Rc);
    Matrix<double> Zd(k, Vec<double>(n)), Rd(k, Vec<double>(k)), Rinv(k, Vec<double>(k));
    for (int i = 0; i < k; ++i) {
        for (int e = 0; e < n; ++e) Zd[i][e] = to_double(Z[i][e]);
        for (int j = 0; j < k; ++j) {
            Rd[i][j] = to_double(Rc[i][j]);
            Rinv[i][j] = to_double(Rc_inv[i][j]);
        }
    }
    auto coords = [&](const Vec<double>& x) {
        Vec<double> c(k);
        for (int r = 0; r < k; ++r) c[r] = x[freecol[r]];
        return c;
    };
    auto lift = [&](const Vec<double>& c) {
        Vec<double> x(n, 0.0);
        for (int i = 0; i < k; ++i)
            for (int e = 0; e < n; ++e) x[e] += c[i] * Zd[i][e];
        return x;
    };

    ClosingResult res;
    res.m = match.m;
    res.m2 = match.m2;
    res.relabeling = match.relabeling;
    res.word = match.word;
    Vec<double> w = detail::widths(Sm), h = detail::heights(Sm);
    auto unit = [](Vec<double>& v) {
        double k = norm2(v);
        for (double& x : v) x /= k;
        return k;
    };
    unit(w);
    unit(h);
    double lam_w = 1, lam_h = 1;
    for (int it = 1; it <= max_iter; ++it) {
        Vec<double> h2 = lift(matvec(Rd, coords(h))), w2 = lift(matvec(Rinv, coords(w)));
        lam_h = unit(h2);
        lam_w = unit(w2);
        double move = 0;
        for (int e = 0; e < n; ++e) move = std::max({move, std::fabs(h2[e] - h[e]), std::fabs(w2[e] - w[e])});
        w = std::move(w2);
        h = std::move(h2);
        res.iterations = it;
        Surface<double> probe = detail::with_periods(Sm, w, h);
        if (!validate(probe).passed || !detail::same_chart(probe, Sm))
            throw error("closing iteration left the Delaunay chart (perturbation too large)");
        if (move < tol) {
            res.converged = true;
            break;
        }
    }
    Surface<double> p = detail::with_periods(Sm, w, h);
    if (!is_delaunay(p)) throw error("closing iteration left the Delaunay chart (perturbation too large)");
    res.periodic_point = detail::normalize_on_orbit(p);
    res.lambda = lam_w;
    res.T_prime = std::log(lam_w);
    if (std::fabs(lam_w - lam_h) > 1e-6 * lam_w) res.converged = false;
    return res;
}

// Distance from x to the flow orbit through the states of `orbit`: minimum
// over states and relabelings of the sup-distance between flow representatives.
inline double orbit_distance(const Surface<double>& x, const Trajectory<double>& orbit) {
    Surface<double> nx = detail::normalize_on_orbit(x);
    double best = infinite_distance;
    for (const auto& st : orbit.states) {
        Surface<double> ny = detail::normalize_on_orbit(st);
        auto accept = [&](const TriangulationMap& m) {
            for (int e = 0; e < nx.num_edges(); ++e)
                if (slope_sign(nx, e) != slope_sign(ny, m.edge[e])) return false;
            return true;
        };
        for (const auto& m : triangulation_isomorphisms(nx.topology(), ny.topology(), accept)) {
            double d = 0;
            for (int e = 0; e < nx.num_edges(); ++e) {
                const auto& a = nx.period(e);
                const auto& b = ny.period(m.edge[e]);
                double sg = (a.w > 0) == (b.w > 0) ? 1 : -1;
                d = std::max({d, std::fabs(a.w - sg * b.w), std::fabs(a.h - sg * b.h)});
            }
            best = std::min(best, d);
        }
    }
    return best;
}

// ---------------------------------------------------------------- split sets of thick segments

struct ThicketyCase {
    std::string fixture;
    std::size_t i = 0, j = 0;  // states whose vertical tracks match up to relabeling
    double duration = 0;
    double thick_fraction = 1;
    bool filling = false;
};

// Every pair of states with matching labelled vertical tracks, with the thick
// fraction of the segment between them and whether its split edges fill.
template <class S>
std::vector<ThicketyCase> thickety_cases(const Trajectory<S>& traj, double eps, const std::string& name,
                                         std::size_t max_span = 64) {
    std::vector<ThicketyCase> out;
    const auto& st = traj.states;
    std::vector<TrainTrack> tracks;
    for (const auto& s : st) tracks.push_back(dual_track(s, Direction::vertical).first);
    int n = traj.start.num_edges();
    for (std::size_t i = 0; i < st.size(); ++i)
        for (std::size_t j = i + 1; j < st.size() && j - i <= max_span; ++j) {
            auto accept = [&](const TriangulationMap& m) { return detail::tracks_match(tracks[j], tracks[i], m); };
            auto isos = triangulation_isomorphisms(st[j].topology(), st[i].topology(), accept, true);
            if (isos.empty()) continue;
            Trajectory<S> seg;
            seg.start = st[i];
            seg.states.assign(st.begin() + i, st.begin() + j + 1);
            seg.events.assign(traj.events.begin() + i, traj.events.begin() + j);
            seg.t_end = st[j].time();
            ThicketyCase c;
            c.fixture = name;
            c.i = i;
            c.j = j;
            c.duration = seg.t_end - st[i].time();
            c.thick_fraction = thick_fraction(seg, eps).fraction;
            std::vector<bool> support(n, false);
            for (const auto& ev : seg.events) support[ev.edge] = true;
            // the identification of the end track with the start one carries
            // split branches to branches that split too
            const auto& rel = isos.front().edge;
            for (bool grew = true; grew;) {
                grew = false;
                for (int e = 0; e < n; ++e)
                    if (support[e] != support[rel[e]]) support[e] = support[rel[e]] = grew = true;
            }
            c.filling = is_filling_subtrack(tracks[i], support);
            out.push_back(c);
        }
    return out;
}

struct ThicketyReport {
    double eps = 0;
    double fraction_threshold = 0;  // segments at least this thick are tested
    double calibrated_duration = 0; // and at least this long
    std::size_t calibration_cases = 0;
    std::size_t verification_cases = 0;  // thick, long verification segments
    std::vector<ThicketyCase> violations;
};

// Calibrates the shortest duration beyond which every thick calibration
// segment has a filling split set, then counts violations on the other half.
inline ThicketyReport thickety_calibrate(const std::vector<ThicketyCase>& calibration,
                                         const std::vector<ThicketyCase>& verification, double eps,
                                         double fraction_threshold) {
    ThicketyReport r;
    r.eps = eps;
    r.fraction_threshold = fraction_threshold;
    double worst = 0;
    for (const auto& c : calibration) {
        if (c.thick_fraction < fraction_threshold) continue;
        ++r.calibration_cases;
        if (!c.filling) worst = std::max(worst, c.duration);
    }
    r.calibrated_duration = std::nextafter(worst, INFINITY);
    for (const auto& c : verification) {
        if (c.thick_fraction < fraction_threshold || c.duration < r.calibrated_duration) continue;
        ++r.verification_cases;
        if (!c.filling) r.violations.push_back(c);
    }
    return r;
}

}  // namespace veertrack
