#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "veertrack/dd.hpp"
#include "veertrack/lp.hpp"
#include "veertrack/surface.hpp"

namespace veertrack {

enum class Direction { vertical, horizontal };
enum class BranchRole { large, mixed, small };
enum class SplitDirection { left, right };

inline const char* direction_name(Direction d) { return d == Direction::vertical ? "vertical" : "horizontal"; }
inline char split_letter(SplitDirection d) { return d == SplitDirection::left ? 'L' : 'R'; }

// Which branches get absorbed by a split. In a left split the losers are the
// sides following e (first position after it) in both triangles.
struct SplitRecord {
    int edge = -1;
    SplitDirection direction = SplitDirection::left;
    std::array<int, 2> losers{};
    std::array<int, 2> winners{};
};

// Train track dual to a triangulation: one switch per triangle, one branch
// per edge, and the large half-branch recorded as a slot index per switch.
class TrainTrack {
public:
    TrainTrack() = default;
    TrainTrack(Triangulation topo, Direction dir, std::vector<int> large_slot, std::vector<bool> marked)
        : topo_(std::move(topo)), dir_(dir), large_(std::move(large_slot)), marked_(std::move(marked)) {
        marked_.resize(topo_.num_vertices(), false);
    }

    const Triangulation& topology() const { return topo_; }
    Direction direction() const { return dir_; }
    int num_branches() const { return topo_.num_edges(); }
    int num_switches() const { return topo_.num_faces(); }
    const std::string& label(int e) const { return topo_.label(e); }
    const std::vector<bool>& marked() const { return marked_; }

    int large_slot(int t) const { return large_[t]; }
    int large_branch(int t) const { return topo_.face(t)[large_[t]].edge; }
    std::array<int, 2> small_branches(int t) const {
        const Face& f = topo_.face(t);
        return {f[mod3(large_[t] + 1)].edge, f[mod3(large_[t] + 2)].edge};
    }
    bool is_large_at(Corner c) const { return large_[c.tri] == c.pos; }

    BranchRole role(int e) const {
        const auto& o = topo_.occurrences(e);
        int n = is_large_at(o[0]) + is_large_at(o[1]);
        return n == 2 ? BranchRole::large : n == 1 ? BranchRole::mixed : BranchRole::small;
    }

    // One row per switch: large - small1 - small2. These are both the switch
    // conditions and the generators of the equivalence space V.
    Matrix<Rational> switch_rows() const {
        Matrix<Rational> rows;
        for (int t = 0; t < num_switches(); ++t) {
            Vec<Rational> r(num_branches(), Rational(0));
            r[large_branch(t)] += 1;
            for (int s : small_branches(t)) r[s] -= 1;
            rows.push_back(std::move(r));
        }
        return rows;
    }

    // Combinatorial split of a large branch. The winners become the large
    // half-branches of the two new switches.
    SplitRecord split(int e, SplitDirection d) {
        if (role(e) != BranchRole::large) throw precondition_error("branch '" + label(e) + "' is not large");
        QuadSites q = topo_.quad(e);
        SplitRecord rec;
        rec.edge = e;
        rec.direction = d;
        bool left = d == SplitDirection::left;
        rec.losers = left ? std::array<int, 2>{q.A.edge, q.C.edge} : std::array<int, 2>{q.B.edge, q.D.edge};
        rec.winners = left ? std::array<int, 2>{q.B.edge, q.D.edge} : std::array<int, 2>{q.A.edge, q.C.edge};
        topo_.flip(e);
        // new faces: t1 = [C, e, B], t2 = [D, A, e]
        large_[q.first.tri] = left ? 2 : 0;
        large_[q.second.tri] = left ? 0 : 1;
        return rec;
    }

    friend bool operator==(const TrainTrack& a, const TrainTrack& b) {
        return a.dir_ == b.dir_ && a.topo_ == b.topo_ && a.large_ == b.large_;
    }

private:
    Triangulation topo_;
    Direction dir_ = Direction::vertical;
    std::vector<int> large_;
    std::vector<bool> marked_;
};

// Transverse weights (widths for the vertical track) and tangential weights
// (rectangle heights), both at the stored periods of the surface.
template <class S>
struct MeasurePair {
    Vec<S> transverse;
    Vec<S> tangential;
};

template <class S>
std::pair<TrainTrack, MeasurePair<S>> dual_track(const Surface<S>& s, Direction dir) {
    const bool vert = dir == Direction::vertical;
    MeasurePair<S> m;
    m.transverse.resize(s.num_edges());
    m.tangential.assign(s.num_edges(), S(0));
    for (int e = 0; e < s.num_edges(); ++e) m.transverse[e] = sabs(vert ? s.period(e).w : s.period(e).h);
    auto other = [&](int e) { return sabs(vert ? s.period(e).h : s.period(e).w); };
    std::vector<int> large(s.num_faces());
    for (int t = 0; t < s.num_faces(); ++t) {
        const Face& f = s.topology().face(t);
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (m.transverse[f[best].edge] < m.transverse[f[i].edge]) best = i;
        for (int i = 0; i < 3; ++i)
            if (i != best && scompare(m.transverse[f[i].edge], m.transverse[f[best].edge]) == 0)
                throw degeneracy_error(std::string("no unique ") + (vert ? "widest" : "tallest") + " edge in triangle " +
                                       std::to_string(t));
        large[t] = best;
        int a = f[mod3(best + 1)].edge, b = f[mod3(best + 2)].edge;
        m.tangential[a] += other(b) / S(2);
        m.tangential[b] += other(a) / S(2);
    }
    return {TrainTrack(s.topology(), dir, std::move(large), s.marked()), std::move(m)};
}

// ---------------------------------------------------------------- complementary regions

struct Region {
    int cusps = 0;
    int marked_points = 0;
    std::vector<int> vertices;
    std::vector<std::vector<int>> sides;  // branch ids along each side between consecutive cusps
};

struct RegionCensus {
    std::vector<Region> regions;

    // n -> number of complementary n-gons
    std::map<int, int> counts() const {
        std::map<int, int> c;
        for (const auto& r : regions) ++c[r.cusps];
        return c;
    }
    int total_cusps() const {
        int n = 0;
        for (const auto& r : regions) n += r.cusps;
        return n;
    }
};

namespace detail {

// Walk the boundary of the complement of the branches marked `present`,
// turning at each switch to the next present half-branch. A turn between two
// small half-branches of a trivalent switch is a cusp.
inline RegionCensus trace_regions(const TrainTrack& tr, const std::vector<bool>& present) {
    const Triangulation& T = tr.topology();
    std::vector<std::array<bool, 3>> used(T.num_faces(), {false, false, false});
    RegionCensus census;
    for (int t0 = 0; t0 < T.num_faces(); ++t0)
        for (int k0 = 0; k0 < 3; ++k0) {
            if (used[t0][k0] || !present[T.face(t0)[k0].edge]) continue;
            Region reg;
            std::set<int> verts;
            std::vector<int> side;
            std::vector<std::vector<int>> sides;
            int first_cusp_side = -1;
            Corner c{t0, k0};
            while (!used[c.tri][c.pos]) {
                used[c.tri][c.pos] = true;
                side.push_back(T.slot(c).edge);
                Corner m = T.mate(c);
                int valence = 0;
                for (int i = 0; i < 3; ++i) valence += present[T.face(m.tri)[i].edge];
                int next = -1;
                for (int step = 1; step <= 3; ++step) {
                    int cand = mod3(m.pos + step);
                    verts.insert(T.vertex({m.tri, cand}));
                    if (present[T.face(m.tri)[cand].edge]) {
                        next = cand;
                        break;
                    }
                }
                bool cusp = valence == 3 && next == mod3(m.pos + 1) && !tr.is_large_at(m) && !tr.is_large_at({m.tri, next});
                if (cusp) {
                    ++reg.cusps;
                    if (first_cusp_side < 0) first_cusp_side = static_cast<int>(sides.size());
                    sides.push_back(side);
                    side.clear();
                }
                c = {m.tri, next};
            }
            // the stretch before the first cusp continues the last side
            if (!sides.empty()) {
                sides.front().insert(sides.front().begin(), side.begin(), side.end());
            } else {
                sides.push_back(side);
            }
            reg.sides = std::move(sides);
            reg.vertices.assign(verts.begin(), verts.end());
            for (int v : reg.vertices) reg.marked_points += tr.marked()[v];
            census.regions.push_back(std::move(reg));
        }
    return census;
}

}  // namespace detail

inline RegionCensus complementary_regions(const TrainTrack& tr) {
    return detail::trace_regions(tr, std::vector<bool>(tr.num_branches(), true));
}

// ---------------------------------------------------------------- vertex curves

// Extreme rays of the transverse measure cone, as minimal integer weights.
inline std::vector<std::vector<long long>> vertex_curves(const TrainTrack& tr) {
    int n = tr.num_branches();
    Matrix<Rational> id(n, Vec<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) id[i][i] = 1;
    Matrix<Rational> rays = extreme_rays(tr.switch_rows(), id, n);
    std::vector<std::vector<long long>> out;
    for (const auto& r : rays) {
        std::vector<long long> v(n);
        for (int i = 0; i < n; ++i) v[i] = static_cast<long long>(boost::multiprecision::numerator(r[i]));
        out.push_back(std::move(v));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

// ---------------------------------------------------------------- filling subtracks

struct ComplementPiece {
    int euler = 0;
    int marked_points = 0;
};

// Components of S minus a subtrack, with Euler characteristics, from the
// cells of the dual decomposition: vertex disks, open branches, open switches.
inline std::vector<ComplementPiece> complement_pieces(const TrainTrack& tr, const std::vector<bool>& in_support) {
    const Triangulation& T = tr.topology();
    int V = T.num_vertices(), E = T.num_edges(), F = T.num_faces();
    std::vector<int> parent(V + E + F);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    std::vector<bool> open_switch(F, true);
    for (int t = 0; t < F; ++t)
        for (const Slot& s : T.face(t))
            if (in_support[s.edge]) open_switch[t] = false;
    for (int e = 0; e < E; ++e) {
        if (in_support[e]) continue;
        auto ends = T.endpoints(e);
        unite(V + e, ends[0]);
        unite(V + e, ends[1]);
        for (const Corner& c : T.occurrences(e))
            if (open_switch[c.tri]) unite(V + e, V + E + c.tri);
    }
    for (int t = 0; t < F; ++t) {
        if (!open_switch[t]) continue;
        for (int i = 0; i < 3; ++i) unite(V + E + t, T.vertex({t, i}));
    }
    std::map<int, ComplementPiece> pieces;
    for (int v = 0; v < V; ++v) {
        auto& p = pieces[find(v)];
        p.euler += 1;
        p.marked_points += tr.marked()[v];
    }
    for (int e = 0; e < E; ++e)
        if (!in_support[e]) pieces[find(V + e)].euler -= 1;
    for (int t = 0; t < F; ++t)
        if (open_switch[t]) pieces[find(V + E + t)].euler += 1;
    std::vector<ComplementPiece> out;
    for (auto& [k, p] : pieces) out.push_back(p);
    return out;
}

// Every complementary region is a disk or a once-punctured disk.
inline bool is_filling_subtrack(const TrainTrack& tr, const std::vector<bool>& support) {
    if (std::none_of(support.begin(), support.end(), [](bool b) { return b; }))
        throw precondition_error("empty support");
    for (const auto& p : complement_pieces(tr, support))
        if (p.euler != 1 || p.marked_points > 1) return false;
    return true;
}

inline std::vector<bool> support_mask(int n, const std::vector<int>& branches) {
    std::vector<bool> m(n, false);
    for (int b : branches) m.at(b) = true;
    return m;
}

// ---------------------------------------------------------------- inessential subgraphs

// The complement of an inessential subgraph, with valence-two switches merged.
struct ReducedTrack {
    std::vector<std::vector<int>> branches;  // chains of original branches
    int trivalent_switches = 0;
    RegionCensus regions;
    bool recurrent = false;
    bool transversely_recurrent = false;
};

struct InessentialResult {
    bool inessential = false;
    std::string reason;
    ReducedTrack reduced;
};

inline InessentialResult detect_inessential(const TrainTrack& tr, const std::vector<bool>& H) {
    InessentialResult res;
    const Triangulation& T = tr.topology();
    int n = tr.num_branches();
    for (int t = 0; t < tr.num_switches(); ++t) {
        auto sm = tr.small_branches(t);
        if (H[tr.large_branch(t)] && !(H[sm[0]] && H[sm[1]])) {
            res.reason = "large half-branch of switch " + std::to_string(t) + " lies in H without both small half-branches";
            return res;
        }
    }
    std::vector<bool> G(n);
    for (int e = 0; e < n; ++e) G[e] = !H[e];
    if (std::none_of(G.begin(), G.end(), [](bool b) { return b; })) {
        res.reason = "H contains every branch";
        return res;
    }
    // chains through valence-two switches
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    Matrix<Rational> eq;
    for (int t = 0; t < tr.num_switches(); ++t) {
        int L = tr.large_branch(t);
        auto sm = tr.small_branches(t);
        int val = G[L] + G[sm[0]] + G[sm[1]];
        if (val == 1) {
            res.reason = "switch " + std::to_string(t) + " becomes a dead end";
            return res;
        }
        if (val == 0) continue;
        Vec<Rational> row(n, Rational(0));
        row[L] += 1;
        for (int s : sm)
            if (G[s]) row[s] -= 1;
        eq.push_back(row);
        if (val == 3) {
            ++res.reduced.trivalent_switches;
        } else {
            int s = G[sm[0]] ? sm[0] : sm[1];
            parent[find(L)] = find(s);
        }
    }
    if (!is_filling_subtrack(tr, G)) {
        res.reason = "complement of H is not filling";
        return res;
    }
    std::map<int, std::vector<int>> chains;
    for (int e = 0; e < n; ++e)
        if (G[e]) chains[find(e)].push_back(e);
    for (auto& [k, c] : chains) res.reduced.branches.push_back(c);
    res.reduced.regions = detail::trace_regions(tr, G);

    // restrict the LPs to branches of G
    std::vector<int> idx(n, -1), keep;
    for (int e = 0; e < n; ++e)
        if (G[e]) {
            idx[e] = static_cast<int>(keep.size());
            keep.push_back(e);
        }
    int m = static_cast<int>(keep.size());
    Matrix<Rational> eq_g;
    for (const auto& row : eq) {
        Vec<Rational> r(m);
        for (int j = 0; j < m; ++j) r[j] = row[keep[j]];
        eq_g.push_back(std::move(r));
    }
    res.reduced.recurrent = strictly_feasible(eq_g, {}, m);

    Matrix<Rational> ineq;
    bool hopeless = false;
    for (const Region& reg : res.reduced.regions.regions) {
        if (reg.marked_points > 0) continue;
        if (reg.cusps < 3) {
            hopeless = true;
            break;
        }
        std::vector<Vec<Rational>> len;
        for (const auto& side : reg.sides) {
            Vec<Rational> l(m, Rational(0));
            for (int e : side) l[idx[e]] += 1;
            len.push_back(std::move(l));
        }
        for (std::size_t j = 0; j < len.size(); ++j) {
            Vec<Rational> r(m, Rational(0));
            for (std::size_t i = 0; i < len.size(); ++i)
                for (int k = 0; k < m; ++k) r[k] += (i == j ? -1 : 1) * len[i][k];
            ineq.push_back(std::move(r));
        }
    }
    res.reduced.transversely_recurrent = !hopeless && strictly_feasible({}, ineq, m);
    if (!res.reduced.recurrent || !res.reduced.transversely_recurrent) {
        res.reason = "reduced complement track is not birecurrent";
        return res;
    }
    res.inessential = true;
    return res;
}

// ---------------------------------------------------------------- resolutions

template <class S>
struct Resolution {
    TrainTrack track;
    std::vector<bool> H;
    Vec<S> mu;
    std::vector<SplitRecord> splits;
};

// The split of large branch e that mu allows: winners are the opposite pair
// with the larger total weight.
template <class S>
std::optional<SplitDirection> compatible_split(const TrainTrack& tr, int e, const Vec<S>& mu) {
    QuadSites q = tr.topology().quad(e);
    S x = mu[q.A.edge] + mu[q.C.edge], y = mu[q.B.edge] + mu[q.D.edge];
    int c = scompare(x, y);
    if (c == 0) return std::nullopt;
    return c < 0 ? SplitDirection::left : SplitDirection::right;
}

// An improvement: a split compatible with mu with at least one loser in H.
template <class S>
std::optional<std::pair<int, SplitDirection>> find_improvement(const TrainTrack& tr, const std::vector<bool>& H, const Vec<S>& mu) {
    std::vector<int> order(tr.num_branches());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return tr.label(a) < tr.label(b); });
    for (int e : order) {
        if (tr.role(e) != BranchRole::large) continue;
        QuadSites q = tr.topology().quad(e);
        bool touches = H[q.A.edge] || H[q.B.edge] || H[q.C.edge] || H[q.D.edge];
        if (!touches) continue;
        auto d = compatible_split(tr, e, mu);
        if (!d) throw degeneracy_error("measure is incompatible with any split of large branch '" + tr.label(e) + "'");
        bool left = *d == SplitDirection::left;
        bool loser_in_h = left ? (H[q.A.edge] || H[q.C.edge]) : (H[q.B.edge] || H[q.D.edge]);
        if (loser_in_h) return std::make_pair(e, *d);
    }
    return std::nullopt;
}

template <class S>
Resolution<S> resolve(const TrainTrack& tr, const std::vector<bool>& H, const Vec<S>& mu, int max_steps = -1) {
    Resolution<S> r{tr, H, mu, {}};
    if (max_steps < 0) max_steps = 4 * tr.num_branches() * tr.num_branches();
    for (int step = 0;; ++step) {
        auto imp = find_improvement(r.track, r.H, r.mu);
        if (!imp) return r;
        if (step >= max_steps) throw error("resolution exceeded its step bound");
        SplitRecord rec = r.track.split(imp->first, imp->second);
        r.mu[rec.edge] = r.mu[rec.edge] - r.mu[rec.losers[0]] - r.mu[rec.losers[1]];
        r.splits.push_back(rec);
    }
}

}  // namespace veertrack
