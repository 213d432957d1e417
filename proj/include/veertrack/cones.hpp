#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "veertrack/dd.hpp"
#include "veertrack/linalg.hpp"
#include "veertrack/traintrack.hpp"

namespace veertrack {

inline constexpr double infinite_distance = std::numeric_limits<double>::infinity();

// A pointed, full-dimensional polyhedral cone held in both representations.
class Cone {
public:
    Cone() = default;

    static Cone from_generators(Matrix<Rational> gens) {
        Cone c;
        c.dim_ = gens.empty() ? 0 : static_cast<int>(gens[0].size());
        if (rank(gens, c.dim_) != c.dim_) throw precondition_error("cone is not full-dimensional");
        c.facets_ = extreme_rays({}, gens, c.dim_);
        c.gens_ = extreme_rays({}, c.facets_, c.dim_);  // drops redundant generators
        c.cache();
        return c;
    }

    static Cone from_facets(Matrix<Rational> facets) {
        Cone c;
        c.dim_ = facets.empty() ? 0 : static_cast<int>(facets[0].size());
        c.gens_ = extreme_rays({}, facets, c.dim_);
        if (rank(c.gens_, c.dim_) != c.dim_) throw precondition_error("cone is not full-dimensional");
        c.facets_ = extreme_rays({}, c.gens_, c.dim_);
        c.cache();
        return c;
    }

    static Cone orthant(int n) {
        Matrix<Rational> id(n, Vec<Rational>(n, Rational(0)));
        for (int i = 0; i < n; ++i) id[i][i] = 1;
        return from_facets(id);
    }

    int dimension() const { return dim_; }
    const Matrix<Rational>& generators() const { return gens_; }
    const Matrix<Rational>& facets() const { return facets_; }
    const Matrix<double>& generators_d() const { return gens_d_; }
    const Matrix<double>& facets_d() const { return facets_d_; }

    // Smallest facet value relative to the point's size: > 0 inside.
    double depth(const Vec<double>& x) const {
        double m = infinite_distance, nx = norm2(x);
        for (const auto& f : facets_d_) m = std::min(m, dot(f, x) / (norm2(f) * nx));
        return m;
    }

private:
    void cache() {
        auto conv = [](const Matrix<Rational>& m) {
            Matrix<double> d;
            for (const auto& r : m) {
                Vec<double> v;
                for (const auto& x : r) v.push_back(to_double(x));
                d.push_back(std::move(v));
            }
            return d;
        };
        gens_d_ = conv(gens_);
        facets_d_ = conv(facets_);
    }

    int dim_ = 0;
    Matrix<Rational> gens_, facets_;
    Matrix<double> gens_d_, facets_d_;
};

namespace detail {

inline double hilbert_from_facets(const Matrix<double>& facets, const Vec<double>& x, const Vec<double>& y,
                                  double tol) {
    double a = 0, b = 0;
    double sx = norm2(x), sy = norm2(y);
    for (const auto& f : facets) {
        double nf = norm2(f);
        double fx = dot(f, x), fy = dot(f, y);
        if (fx <= tol * nf * sx || fy <= tol * nf * sy) return infinite_distance;
        a = std::max(a, fx / fy);
        b = std::max(b, fy / fx);
    }
    return std::max(0.0, std::log(a * b));
}

}  // namespace detail

// log(max_f f(x)/f(y) * max_f f(y)/f(x)); infinite when x or y is on the boundary.
inline double hilbert_distance(const Cone& c, const Vec<double>& x, const Vec<double>& y, double tol = 0.0) {
    return detail::hilbert_from_facets(c.facets_d(), x, y, tol);
}

// Hilbert metric of a cone cut out of a subspace by coordinate inequalities.
inline double hilbert_distance_orthant(const Vec<double>& x, const Vec<double>& y) {
    double a = 0, b = 0;
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0 && y[i] == 0) continue;
        if (x[i] <= 0 || y[i] <= 0) return infinite_distance;
        a = std::max(a, x[i] / y[i]);
        b = std::max(b, y[i] / x[i]);
        any = true;
    }
    return any ? std::max(0.0, std::log(a * b)) : 0.0;
}

// Largest Hilbert distance (in `target`) between images of the generators of `source`.
inline double image_diameter(const Matrix<double>& A, const Cone& source, const Cone& target, double tol = 1e-12) {
    std::vector<Vec<double>> img;
    for (const auto& g : source.generators_d()) {
        Vec<double> y = matvec(A, g);
        for (const auto& f : target.facets_d())
            if (dot(f, y) < -tol * norm2(f) * norm2(y)) throw precondition_error("image is not contained in the target cone");
        img.push_back(std::move(y));
    }
    double d = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        for (std::size_t j = i + 1; j < img.size(); ++j) d = std::max(d, hilbert_distance(target, img[i], img[j]));
    return d;
}

inline double image_diameter(const Matrix<double>& A, const Cone& c) { return image_diameter(A, c, c); }

inline double birkhoff_coefficient(double delta) {
    if (delta < 0) throw precondition_error("diameter must be nonnegative");
    return std::isinf(delta) ? 1.0 : std::tanh(delta / 4);
}

// ---------------------------------------------------------------- transition matrices

// transverse maps measures on the later track to the earlier one;
// tangential maps the earlier to the later and is its transpose.
struct TransitionPair {
    IntMatrix transverse;
    IntMatrix tangential;
};

inline TransitionPair identity_pair(int n) { return {IntMatrix::identity(n), IntMatrix::identity(n)}; }

// I + M_{e,b} + M_{e,c} for losers {b, c}; repeated losers accumulate.
inline TransitionPair split_transition(int edge, const std::array<int, 2>& losers, int n) {
    IntMatrix m = IntMatrix::identity(n);
    for (int b : losers) m(edge, b) += 1;
    IntMatrix t = IntMatrix::identity(n);
    for (int b : losers) t(b, edge) += 1;
    return {m, t};
}

template <class Ev>
TransitionPair split_transition(const Ev& ev, int n) {
    return split_transition(ev.edge, ev.losers, n);
}

// Transverse factors composed in trajectory order, tangential ones in reverse.
template <class Ev>
TransitionPair compose_word(const std::vector<Ev>& events, int n, std::size_t from = 0,
                            std::size_t to = std::numeric_limits<std::size_t>::max()) {
    TransitionPair p = identity_pair(n);
    to = std::min(to, events.size());
    for (std::size_t i = from; i < to; ++i) {
        TransitionPair s = split_transition(events[i], n);
        p.transverse = p.transverse * s.transverse;
        p.tangential = s.tangential * p.tangential;
    }
    return p;
}

struct SplitStep {
    int edge = -1;
    SplitDirection direction = SplitDirection::left;
    std::array<int, 2> losers{};
};

// Per-edge L/R words of a split sequence.
template <class Ev>
std::vector<std::string> edge_words(const std::vector<Ev>& events, int n, std::size_t from = 0,
                                    std::size_t to = std::numeric_limits<std::size_t>::max()) {
    std::vector<std::string> w(n);
    to = std::min(to, events.size());
    for (std::size_t i = from; i < to; ++i) w[events[i].edge] += split_letter(events[i].direction);
    return w;
}

struct Reconstruction {
    std::vector<SplitStep> steps;
    TransitionPair pair;
};

// Rebuild a split order from the start track, the end track and per-edge
// words. A large branch stays large until it splits itself, and distinct large
// branches never share a switch, so any large branch with letters left is ready.
inline Reconstruction reconstruct_from_words(const TrainTrack& start, const TrainTrack& end,
                                             const std::vector<std::string>& words) {
    TrainTrack tr = start;
    int n = tr.num_branches();
    if (static_cast<int>(words.size()) != n) throw precondition_error("one word per branch is required");
    std::vector<std::size_t> pos(n, 0);
    std::size_t remaining = 0;
    for (const auto& w : words) remaining += w.size();
    Reconstruction r;
    r.pair = identity_pair(n);
    while (remaining > 0) {
        int pick = -1;
        for (int e = 0; e < n && pick < 0; ++e)
            if (pos[e] < words[e].size() && tr.role(e) == BranchRole::large) pick = e;
        if (pick < 0) throw error("inconsistent split data: no split is ready");
        char c = words[pick][pos[pick]++];
        if (c != 'L' && c != 'R') throw parse_error("split words use the letters L and R", 0);
        SplitDirection d = c == 'L' ? SplitDirection::left : SplitDirection::right;
        SplitRecord rec = tr.split(pick, d);
        r.steps.push_back({pick, d, rec.losers});
        TransitionPair s = split_transition(pick, rec.losers, n);
        r.pair.transverse = r.pair.transverse * s.transverse;
        r.pair.tangential = s.tangential * r.pair.tangential;
        --remaining;
    }
    if (!(tr == end)) throw error("inconsistent split data: words do not lead to the end track");
    return r;
}

// ---------------------------------------------------------------- tangential quotient cone

// Tangential measures modulo V(tau) in coordinates given by pairings with the
// vertex curves: [r] -> (v_i . r)_i. V pairs to zero with every transverse
// measure, so these coordinates are well defined on the quotient.
struct TangentialChart {
    Matrix<Rational> curves;  // k x E, one vertex curve per row
    Matrix<Rational> cone_generators;  // extreme rays in pairing coordinates

    // Coordinates of a representative r.
    Vec<Rational> coordinates(const Vec<Rational>& r) const {
        Vec<Rational> z;
        for (const auto& c : curves) {
            Rational s = 0;
            for (std::size_t e = 0; e < c.size(); ++e) s += c[e] * r[e];
            z.push_back(s);
        }
        return z;
    }

    // Some representative with the given coordinates.
    Vec<Rational> representative(const Vec<Rational>& z) const {
        int n = curves.empty() ? 0 : static_cast<int>(curves[0].size());
        int k = static_cast<int>(curves.size());
        Matrix<Rational> aug(k, Vec<Rational>(n + 1));
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < n; ++j) aug[i][j] = curves[i][j];
            aug[i][n] = z[i];
        }
        auto piv = rref(aug, n + 1);
        Vec<Rational> r(n, Rational(0));
        for (std::size_t i = 0; i < piv.size(); ++i) {
            if (piv[i] == n) throw precondition_error("point is not in the span of the tangential chart");
            r[piv[i]] = aug[i][n];
        }
        return r;
    }
};

inline TangentialChart tangential_chart(const TrainTrack& tr) {
    TangentialChart ch;
    for (const auto& v : vertex_curves(tr)) {
        Vec<Rational> row;
        for (long long x : v) row.push_back(Rational(x));
        ch.curves.push_back(std::move(row));
    }
    int k = static_cast<int>(ch.curves.size());
    int n = tr.num_branches();
    // subspace of reachable coordinate vectors: annihilated by the left kernel
    Matrix<Rational> pt(n, Vec<Rational>(k));
    for (int i = 0; i < k; ++i)
        for (int e = 0; e < n; ++e) pt[e][i] = ch.curves[i][e];
    Matrix<Rational> eqs = nullspace(pt, k);
    Matrix<Rational> id(k, Vec<Rational>(k, Rational(0)));
    for (int i = 0; i < k; ++i) id[i][i] = 1;
    ch.cone_generators = extreme_rays(eqs, id, k);
    return ch;
}

// Image of the start chart's cone under a composed tangential map, in the
// coordinates of the end chart.
inline Matrix<double> tangential_image(const TangentialChart& from, const TangentialChart& to, const IntMatrix& tangential) {
    Matrix<double> out;
    for (const auto& z : from.cone_generators) {
        Vec<Rational> r = from.representative(z);
        Vec<Rational> img = tangential.apply(r);
        Vec<double> zz;
        for (const auto& x : to.coordinates(img)) zz.push_back(to_double(x));
        out.push_back(std::move(zz));
    }
    return out;
}

inline double point_set_diameter(const Matrix<double>& pts) {
    double d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, hilbert_distance_orthant(pts[i], pts[j]));
    return d;
}

// ---------------------------------------------------------------- periodic words

struct PAReport {
    std::vector<bool> support;  // branches that split over one period, closed under relabeling
    bool filling = false;
    bool is_pA = false;
    double dilatation = 1;          // Perron root of the period transverse matrix
    double tangential_factor = 1;   // reciprocal Perron root of the period tangential matrix
    int contraction_power = 0;      // smallest k with a strictly positive k-th power, 0 if none found
    TransitionPair period_matrix;
};

// Permutation matrix Q with Q(e, relabeling[e]) = 1.
inline IntMatrix relabeling_matrix(const std::vector<int>& relabeling) {
    int n = static_cast<int>(relabeling.size());
    IntMatrix q(n);
    for (int e = 0; e < n; ++e) q(e, relabeling[e]) = 1;
    return q;
}

inline bool strictly_positive(const IntMatrix& m) {
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j)
            if (m(i, j) <= 0) return false;
    return true;
}

template <class Ev>
PAReport analyze_periodic_word(const std::vector<Ev>& word, const std::vector<int>& relabeling, const TrainTrack& track) {
    int n = track.num_branches();
    PAReport rep;
    TransitionPair w = compose_word(word, n);
    IntMatrix q = relabeling_matrix(relabeling);
    rep.period_matrix.transverse = w.transverse * q;
    rep.period_matrix.tangential = q.transpose() * w.tangential;

    rep.support.assign(n, false);
    for (const auto& ev : word) rep.support[ev.edge] = true;
    for (bool grew = true; grew;) {
        grew = false;
        for (int e = 0; e < n; ++e)
            if (rep.support[e] && !rep.support[relabeling[e]]) rep.support[relabeling[e]] = grew = true;
            else if (rep.support[relabeling[e]] && !rep.support[e]) rep.support[e] = grew = true;
    }
    rep.filling = std::any_of(rep.support.begin(), rep.support.end(), [](bool b) { return b; }) &&
                  is_filling_subtrack(track, rep.support);
    rep.is_pA = rep.filling;
    auto pw = perron_root(rep.period_matrix.transverse.to_double());
    auto ph = perron_root(rep.period_matrix.tangential.to_double());
    rep.dilatation = pw.root;
    rep.tangential_factor = ph.root > 0 ? 1.0 / ph.root : 0.0;
    if (rep.is_pA) {
        IntMatrix p = rep.period_matrix.transverse;
        for (int k = 1; k <= n * n; ++k) {
            if (strictly_positive(p)) {
                rep.contraction_power = k;
                break;
            }
            try {
                p = p * rep.period_matrix.transverse;
            } catch (const error&) {
                break;
            }
        }
    }
    return rep;
}

}  // namespace veertrack
