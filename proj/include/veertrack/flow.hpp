#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "veertrack/delaunay.hpp"
#include "veertrack/isomorphism.hpp"
#include "veertrack/traintrack.hpp"

namespace veertrack {

// One split of the vertical track. `threshold` is e^{2t} at the event: an
// exact rational in exact mode.
template <class S>
struct SplitEvent {
    S threshold{};
    double time = 0.0;
    int edge = -1;
    SplitDirection direction = SplitDirection::left;
    std::array<int, 2> losers{};
    std::array<int, 2> winners{};
    int batch = 0;  // events sharing a batch index happen at the same instant
};

template <class S>
struct Trajectory {
    Surface<S> start;
    std::vector<SplitEvent<S>> events;
    // states[i] is the surface right after i events, at the time of event i-1
    std::vector<Surface<S>> states;
    double t_end = 0.0;
};

struct FlowOptions {
    bool verify = true;               // re-certify Delaunay and the track after every event
    bool batch_simultaneous = false;  // allow tied events whose quadrilaterals share no edge
};

namespace detail {

template <class S>
struct Candidate {
    int edge;
    S ratio;  // exact: absolute e^{2t*}; float: e^{2(t* - t)}
    int slope;
    QuadSites sites;
};

template <class S>
std::vector<Candidate<S>> split_candidates(const Surface<S>& s, const TrainTrack& tr) {
    std::vector<Candidate<S>> out;
    for (int e = 0; e < s.num_edges(); ++e) {
        if (tr.role(e) != BranchRole::large) continue;
        Diagonal<S> d = other_diagonal(s, e);
        if (!d.flippable) continue;
        S we = sabs(s.period(e).w), he = sabs(s.period(e).h);
        S wd = sabs(d.period.w), hd = sabs(d.period.h);
        if (!(wd < we) || !(hd > he)) continue;
        S r = hd / we;
        if constexpr (scalar_traits<S>::exact) {
            if (!(r > s.scale())) throw precondition_error("surface is not L-infinity Delaunay (event in the past)");
        } else {
            if (!(r > 1.0)) throw precondition_error("surface is not L-infinity Delaunay (event in the past)");
        }
        out.push_back({e, r, detail::slope_of(s, d.period), d.sites});
    }
    return out;
}

template <class S>
double event_time(const Surface<S>& s, const S& ratio) {
    if constexpr (scalar_traits<S>::exact) return s.time() + 0.5 * std::log(to_double(S(ratio / s.scale())));
    else return s.time() + 0.5 * std::log(ratio);
}

template <class S>
Surface<S> flow_to(const Surface<S>& s, double t) {
    return apply_flow(s, t - s.time());
}

// Move the surface to the instant of a candidate, exactly in exact mode.
template <class S>
Surface<S> flow_to_event(const Surface<S>& s, const S& ratio, double t) {
    if constexpr (scalar_traits<S>::exact) {
        Surface<S> out = s;
        out.set_flow(ratio, t);
        return out;
    } else {
        return apply_flow(s, t - s.time());
    }
}

inline std::array<int, 5> star(const QuadSites& q) { return {q.edge, q.A.edge, q.B.edge, q.C.edge, q.D.edge}; }

}  // namespace detail

// All earliest events (several only when thresholds tie). Empty if no edge can split.
template <class S>
std::vector<SplitEvent<S>> next_splits(const Surface<S>& s) {
    TrainTrack tr = dual_track(s, Direction::vertical).first;
    auto cands = detail::split_candidates(s, tr);
    std::vector<SplitEvent<S>> out;
    if (cands.empty()) return out;
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return scompare(a.ratio, b.ratio) < 0; });
    for (const auto& c : cands) {
        if (!out.empty() && scompare(c.ratio, cands.front().ratio) != 0) break;
        SplitEvent<S> ev;
        ev.time = detail::event_time(s, c.ratio);
        if constexpr (scalar_traits<S>::exact) ev.threshold = c.ratio;
        else ev.threshold = std::exp(2 * ev.time);
        ev.edge = c.edge;
        ev.direction = c.slope > 0 ? SplitDirection::left : SplitDirection::right;
        bool left = ev.direction == SplitDirection::left;
        const QuadSites& q = c.sites;
        ev.losers = left ? std::array<int, 2>{q.A.edge, q.C.edge} : std::array<int, 2>{q.B.edge, q.D.edge};
        ev.winners = left ? std::array<int, 2>{q.B.edge, q.D.edge} : std::array<int, 2>{q.A.edge, q.C.edge};
        out.push_back(ev);
    }
    return out;
}

// The next split, or none. Simultaneous events are a degeneracy.
template <class S>
std::optional<SplitEvent<S>> next_split(const Surface<S>& s) {
    auto evs = next_splits(s);
    if (evs.empty()) return std::nullopt;
    if (evs.size() > 1)
        throw degeneracy_error("simultaneous split events at edges '" + s.label(evs[0].edge) + "' and '" +
                               s.label(evs[1].edge) + "'");
    return evs.front();
}

namespace detail {

template <class S>
void certify_between(const Surface<S>& s, double t_next) {
    Surface<S> probe = apply_flow(s, 0.5 * (t_next - s.time()));
    if (!delaunay_violations(probe).empty())
        throw error("Delaunay certificate failed between events near t = " + std::to_string(probe.time()));
}

}  // namespace detail

// Event-driven Teichmuller flow up to time T (absolute) or max_events.
template <class S>
Trajectory<S> run_flow(const Surface<S>& s, double T, int max_events = 1000000, const FlowOptions& opt = {}) {
    Trajectory<S> traj;
    traj.start = s;
    traj.states.push_back(s);
    traj.t_end = T;
    Surface<S> cur = s;
    TrainTrack track = dual_track(cur, Direction::vertical).first;
    int batch = 0;
    while (static_cast<int>(traj.events.size()) < max_events) {
        auto evs = next_splits(cur);
        double t_next = evs.empty() ? T : std::min(T, evs.front().time);
        if (opt.verify && t_next > cur.time()) detail::certify_between(cur, t_next);
        if (evs.empty() || evs.front().time > T) break;
        if (evs.size() > 1) {
            if (!opt.batch_simultaneous)
                throw degeneracy_error("simultaneous split events at edges '" + cur.label(evs[0].edge) + "' and '" +
                                       cur.label(evs[1].edge) + "'");
            // tied flips commute when neither edge borders the other's quadrilateral
            for (const auto& x : evs)
                for (const auto& y : evs) {
                    if (x.edge == y.edge) continue;
                    auto st = detail::star(cur.topology().quad(y.edge));
                    if (std::find(st.begin(), st.end(), x.edge) != st.end())
                        throw degeneracy_error("simultaneous split events at adjacent edges '" + cur.label(x.edge) +
                                               "' and '" + cur.label(y.edge) + "'");
                }
        }
        cur = detail::flow_to_event(cur, evs.front().threshold, evs.front().time);
        for (auto ev : evs) {
            if (static_cast<int>(traj.events.size()) >= max_events) break;
            SplitRecord rec = track.split(ev.edge, ev.direction);
            if (rec.losers != ev.losers) throw error("track split disagrees with the flip");
            cur = flip(cur, ev.edge).first;
            ev.batch = batch;
            traj.events.push_back(ev);
            traj.states.push_back(cur);
        }
        ++batch;
        if (opt.verify && !(track == dual_track(cur, Direction::vertical).first))
            throw error("vertical track after the event is not the split of the previous track");
    }
    return traj;
}

// Surface of the trajectory at absolute time t (within [start, t_end]).
template <class S>
Surface<S> surface_at(const Trajectory<S>& traj, double t) {
    std::size_t i = 0;
    while (i + 1 < traj.states.size() && traj.states[i + 1].time() <= t) ++i;
    return detail::flow_to(traj.states[i], t);
}

template <class S>
std::string event_word(const std::vector<SplitEvent<S>>& evs, std::size_t from = 0, std::size_t to = std::string::npos) {
    std::string w;
    for (std::size_t i = from; i < std::min(to, evs.size()); ++i) w += split_letter(evs[i].direction);
    return w;
}

// ---------------------------------------------------------------- thick part

struct ThickStats {
    double eps = 0;
    double thick_time = 0;
    double total_time = 0;
    double fraction = 1;
};

namespace detail {

// Lebesgue measure of the union of intervals intersected with [0, len].
inline double union_measure(std::vector<std::pair<double, double>> iv, double len) {
    for (auto& p : iv) {
        p.first = std::max(p.first, 0.0);
        p.second = std::min(p.second, len);
    }
    std::sort(iv.begin(), iv.end());
    double total = 0, cur_a = 0, cur_b = -1;
    for (auto [a, b] : iv) {
        if (b <= a) continue;
        if (a > cur_b) {
            if (cur_b > cur_a) total += cur_b - cur_a;
            cur_a = a;
            cur_b = b;
        } else {
            cur_b = std::max(cur_b, b);
        }
    }
    if (cur_b > cur_a) total += cur_b - cur_a;
    return total;
}

}  // namespace detail

// Which short objects count as thin.
//   saddle_connection: the shortest edge of the L-infinity Delaunay
//     triangulation, i.e. the flat saddle-connection systole.
//   vertex_curve: min over vertex curves of both dual tracks of
//     max(transverse, tangential) weight. This one misses curves the current
//     tracks do not yet carry as vertex curves, so it is kept for comparison only.
enum class ThickProxy { saddle_connection, vertex_curve };

// Between events every length is max(a e^{tau}, b e^{-tau}) or a similar
// expression, so the thin set is a union of explicit intervals.
template <class S>
ThickStats thick_fraction(const Trajectory<S>& traj, double eps, ThickProxy proxy = ThickProxy::saddle_connection) {
    ThickStats st;
    st.eps = eps;
    double t0 = traj.start.time();
    st.total_time = traj.t_end - t0;
    if (st.total_time <= 0) return st;
    double thin = 0;
    std::map<std::string, std::vector<std::vector<long long>>> cache;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const Surface<S>& s = traj.states[i];
        double a_t = s.time();
        double b_t = i + 1 < traj.states.size() ? traj.states[i + 1].time() : traj.t_end;
        b_t = std::min(b_t, traj.t_end);
        if (b_t <= a_t || eps <= 0) continue;
        Surface<double> f = to_float(s);
        std::vector<std::pair<double, double>> bad;
        // thin on tau in (log(shrink/eps), log(eps/grow))
        auto add = [&](double grow, double shrink) {
            double lo = shrink > 0 ? std::log(shrink / eps) : -INFINITY;
            double hi = grow > 0 ? std::log(eps / grow) : INFINITY;
            if (hi > lo) bad.emplace_back(lo, hi);
        };
        if (proxy == ThickProxy::saddle_connection) {
            for (int e = 0; e < f.num_edges(); ++e) add(std::fabs(f.period(e).w), std::fabs(f.period(e).h));
        } else {
            for (Direction d : {Direction::vertical, Direction::horizontal}) {
                auto [tr, m] = dual_track(f, d);
                std::string key = std::to_string(static_cast<int>(d));
                for (int t = 0; t < tr.num_switches(); ++t) {
                    for (const Slot& sl : tr.topology().face(t)) key += "," + std::to_string(sl.edge * sl.sign);
                    key += ":" + std::to_string(tr.large_slot(t));
                }
                auto it = cache.find(key);
                if (it == cache.end()) it = cache.emplace(key, vertex_curves(tr)).first;
                for (const auto& c : it->second) {
                    double trans = 0, tang = 0;
                    for (int e = 0; e < tr.num_branches(); ++e) {
                        trans += c[e] * m.transverse[e];
                        tang += c[e] * m.tangential[e];
                    }
                    // widths grow, heights shrink
                    if (d == Direction::vertical) add(trans, tang);
                    else add(tang, trans);
                }
            }
        }
        thin += detail::union_measure(bad, b_t - a_t);
    }
    st.thick_time = st.total_time - thin;
    st.fraction = st.thick_time / st.total_time;
    return st;
}

// ---------------------------------------------------------------- periodicity

template <class S>
struct Periodicity {
    std::size_t m = 0, m2 = 0;      // state indices; the word is events[m, m2)
    std::vector<int> relabeling;    // relabeling[e at m2] = e at m
    double lambda = 1;              // width scaling over one period
    std::string word;
};

namespace detail {

template <class S>
std::pair<double, double> base_size(const Surface<S>& s, int e) {
    Period<double> a = s.actual(e);
    double k = std::exp(s.time());
    return {std::fabs(a.w) / k, std::fabs(a.h) * k};
}

}  // namespace detail

// First recurrence of the labelled Delaunay triangulation, up to relabeling,
// with base periods scaled by (1/lambda, lambda).
template <class S>
std::optional<Periodicity<S>> detect_periodicity(const Trajectory<S>& traj, double tol = 1e-7) {
    const auto& st = traj.states;
    for (std::size_t j = 1; j < st.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const Surface<S>& A = st[j];
            const Surface<S>& B = st[i];
            double lam = 0;
            auto accept = [&](const TriangulationMap& m) {
                double sw_b = 0, sw_a = 0;
                for (int e = 0; e < A.num_edges(); ++e) {
                    sw_a += detail::base_size(A, e).first;
                    sw_b += detail::base_size(B, m.edge[e]).first;
                }
                double l = sw_b / sw_a;
                if (!(l > 1 + 1e-9)) return false;
                for (int e = 0; e < A.num_edges(); ++e) {
                    auto [wa, ha] = detail::base_size(A, e);
                    auto [wb, hb] = detail::base_size(B, m.edge[e]);
                    if (std::fabs(wb - l * wa) > tol * std::max(1.0, wb)) return false;
                    if (std::fabs(hb - ha / l) > tol * std::max(1.0, hb)) return false;
                    if (slope_sign(A, e) != slope_sign(B, m.edge[e])) return false;
                }
                for (int v = 0; v < A.num_vertices(); ++v)
                    if (A.is_marked(v) != B.is_marked(m.vertex[v])) return false;
                lam = l;
                return true;
            };
            auto isos = triangulation_isomorphisms(A.topology(), B.topology(), accept, true);
            if (isos.empty()) continue;
            Periodicity<S> p;
            p.m = i;
            p.m2 = j;
            p.relabeling = isos.front().edge;
            p.lambda = lam;
            p.word = event_word(traj.events, i, j);
            return p;
        }
    return std::nullopt;
}

}  // namespace veertrack
