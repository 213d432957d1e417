// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "veertrack/veertrack.hpp"

using namespace veertrack;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Surface<Rational> load(const std::string& name) {
    return parse_surface<Rational>(read_file(std::string(VEERTRACK_FIXTURE_DIR) + "/" + name));
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(10);
    ss << x;
    return ss.str();
}

const double golden_lambda = (3 + std::sqrt(5.0)) / 2;

// ---------------------------------------------------------------- 1

Outcome t2_basics() {
    auto s = load("t2.json");
    bool ok = validate(s).passed && area(s) == Rational(28, 25);
    // expected (edge, diagonal) L-infinity lengths, from the hand computation
    std::map<std::string, std::pair<Rational, Rational>> want{
        {"e1", {1, Rational(23, 10)}}, {"e2", {1, Rational(16, 10)}}, {"e3", {Rational(13, 10), Rational(14, 10)}}};
    int checked = 0;
    for (const auto& c : delaunay_certificate(s)) {
        auto it = want.find(s.label(c.edge));
        if (it == want.end()) return {false, "unknown edge"};
        ok = ok && c.edge_length == it->second.first && c.diagonal_length == it->second.second &&
             c.edge_length < c.diagonal_length;
        ++checked;
    }
    ok = ok && checked == 3 && is_delaunay(s);
    return {ok, "area " + rational_string(area(s)) + ", 3 certificate inequalities checked"};
}

// ---------------------------------------------------------------- 2

template <class S, class Rng>
std::pair<Period<S>, Period<S>> random_veering_triangle(Rng& rng) {
    std::uniform_int_distribution<int> u(-1000, 1000);
    for (;;) {
        Period<S> a, b;
        if constexpr (scalar_traits<S>::exact) {
            a = {Rational(u(rng), 97), Rational(u(rng), 89)};
            b = {Rational(u(rng), 83), Rational(u(rng), 79)};
        } else {
            std::uniform_real_distribution<double> r(-3, 3);
            a = {r(rng), r(rng)};
            b = {r(rng), r(rng)};
        }
        Period<S> c = -(a + b);
        if (axis_parallel(a) || axis_parallel(b) || axis_parallel(c)) continue;
        if (ssign(cross(a, b)) <= 0) continue;
        int sa = slope_sign(a), sb = slope_sign(b), sc = slope_sign(c);
        if (sa == sb && sb == sc) continue;
        return {a, b};
    }
}

Outcome area_formulas() {
    std::mt19937_64 rng(2);
    int exact_bad = 0;
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        auto [a, b] = random_veering_triangle<Rational>(rng);
        if (triangle_area_box(a, b, Period<Rational>(-(a + b))) != triangle_area_shoelace(a, b)) ++exact_bad;
        auto [x, y] = random_veering_triangle<double>(rng);
        double sh = triangle_area_shoelace(x, y), bx = triangle_area_box(x, y, Period<double>(-(x + y)));
        worst = std::max(worst, std::fabs(sh - bx) / std::fabs(sh));
    }
    return {exact_bad == 0 && worst <= 1e-12, std::to_string(exact_bad) + " exact mismatches, worst float rel " + fmt(worst)};
}

// ---------------------------------------------------------------- 3

Outcome next_split_t2() {
    auto ev = next_split(load("t2.json"));
    bool ok = ev && ev->edge == 0 && ev->threshold == Rational(23, 10) && ev->direction == SplitDirection::left;
    return {ok, ev ? "edge e1, threshold " + rational_string(ev->threshold) + ", " + split_letter(ev->direction) : "none"};
}

// ---------------------------------------------------------------- 4

// Returns 1 when the scramble is repaired, 0 when it is not, and -1 when the
// walk ran into an axis-parallel saddle connection (rational lattices have them).
template <class S>
int scramble_and_repair(const Surface<S>& s, std::mt19937_64& rng, long& flips) {
    try {
        Surface<S> cur = s;
        int k = static_cast<int>(rng() % 9);
        for (int i = 0; i < k; ++i) {
            std::vector<int> ok;
            for (int e = 0; e < cur.num_edges(); ++e)
                if (other_diagonal(cur, e).flippable) ok.push_back(e);
            if (ok.empty()) break;
            cur = flip(cur, ok[rng() % ok.size()]).first;
        }
        auto [d, log] = greedy_delaunay(cur);
        flips += static_cast<long>(log.size());
        return delaunay_violations(d).empty() && greedy_delaunay(d).second.empty() && angle_census(d) == angle_census(s);
    } catch (const degeneracy_error&) {
        return -1;
    }
}

Outcome greedy_scrambles() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4);
    int good = 0, redrawn = 0;
    long flips = 0;
    auto t2 = load("t2.json");
    auto pillow = load("pillow.json");
    auto gold = parse_surface<double>(read_file(std::string(VEERTRACK_FIXTURE_DIR) + "/gold.json"));
    auto run = [&](const auto& s) {
        for (int done = 0; done < 100;) {
            int r = scramble_and_repair(s, rng, flips);
            if (r < 0) {
                ++redrawn;
                continue;
            }
            good += r;
            ++done;
        }
    };
    run(t2);
    run(gold);
    run(pillow);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {good == 300 && secs < 10, std::to_string(good) + "/300 certified and idempotent, " + std::to_string(flips) +
                                          " flips, " + std::to_string(redrawn) + " degenerate walks redrawn"};
}

// ---------------------------------------------------------------- 5

Outcome gold_periodicity() {
    auto tr = run_flow(fixtures::gold(), 6.0);
    auto per = detect_periodicity(tr);
    if (!per) return {false, "no period found"};
    std::vector<SplitEvent<double>> word(tr.events.begin() + per->m, tr.events.begin() + per->m2);
    PAReport rep = analyze_periodic_word(word, per->relabeling, dual_track(tr.states[per->m], Direction::vertical).first);
    double lw = rep.dilatation, lh = rep.tangential_factor;
    bool ok = std::fabs(lw - golden_lambda) < 1e-9 && std::fabs(lw * lh - 1) < 1e-9 && rep.filling;
    return {ok, "word " + per->word + ", Perron " + fmt(lw) + ", lw*lh " + fmt(lw * lh) + (rep.filling ? ", filling" : "")};
}

// ---------------------------------------------------------------- 6

double cross_ratio_distance(const Matrix<double>& facets, Vec<double> x, Vec<double> y) {
    Vec<double> ell(x.size(), 0.0);
    for (const auto& f : facets)
        for (std::size_t i = 0; i < x.size(); ++i) ell[i] += f[i];
    double lx = dot(ell, x), ly = dot(ell, y);
    for (auto& v : x) v /= lx;
    for (auto& v : y) v /= ly;
    Vec<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
    double lo = -INFINITY, hi = INFINITY;
    for (const auto& f : facets) {
        double fx = dot(f, x), fd = dot(f, d);
        if (fd > 0) lo = std::max(lo, -fx / fd);
        if (fd < 0) hi = std::min(hi, -fx / fd);
    }
    double left = std::isinf(lo) ? 1.0 : (1 - lo) / (-lo);
    double right = std::isinf(hi) ? 1.0 : hi / (hi - 1);
    return std::log(left * right);
}

Outcome hilbert_metric() {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> u(0, 9);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    double worst = 0;
    int pairs = 0;
    while (pairs < 1000) {
        int dim = 2 + pairs / 50 % 5;
        Matrix<Rational> g;
        int k = dim + static_cast<int>(rng() % 4);
        for (int i = 0; i < k; ++i) {
            Vec<Rational> v(dim);
            for (int j = 0; j < dim; ++j) v[j] = u(rng) + (j == i % dim ? 3 : 0);
            g.push_back(v);
        }
        if (rank(g, dim) < dim) continue;
        Cone c = Cone::from_generators(g);
        for (int t = 0; t < 50; ++t, ++pairs) {
            Vec<double> x(dim, 0.0), y(dim, 0.0);
            for (const auto& gen : c.generators_d()) {
                double a = w(rng), b = w(rng);
                for (int j = 0; j < dim; ++j) {
                    x[j] += a * gen[j];
                    y[j] += b * gen[j];
                }
            }
            worst = std::max(worst, std::fabs(hilbert_distance(c, x, y) - cross_ratio_distance(c.facets_d(), x, y)));
        }
    }
    double q = hilbert_distance(Cone::orthant(2), {1, 1}, {2, 1});
    bool ok = worst <= 1e-10 && std::fabs(q - std::log(2.0)) <= 1e-12;
    return {ok, "worst deviation " + fmt(worst) + " over 1000 pairs; quadrant d " + fmt(q)};
}

// ---------------------------------------------------------------- 7

Outcome birkhoff() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 1.0), v(0.001, 1.0);
    Cone q = Cone::orthant(5);
    double margin = -INFINITY;
    for (int m = 0; m < 20; ++m) {
        Matrix<double> A(5, Vec<double>(5));
        for (auto& r : A)
            for (auto& x : r) x = u(rng);
        double c = birkhoff_coefficient(image_diameter(A, q));
        for (int k = 0; k < 10000; ++k) {
            Vec<double> x(5), y(5);
            for (int i = 0; i < 5; ++i) {
                x[i] = v(rng);
                y[i] = v(rng);
            }
            double before = hilbert_distance(q, x, y);
            if (before < 1e-9) continue;
            margin = std::max(margin, hilbert_distance(q, matvec(A, x), matvec(A, y)) / before - c);
        }
    }
    return {margin <= 1e-12, "max(ratio - tanh(Delta/4)) = " + fmt(margin)};
}

// ---------------------------------------------------------------- 8 and 9

std::vector<Trajectory<Rational>> exact_trajectories(int count) {
    std::mt19937_64 rng(8);
    std::vector<Trajectory<Rational>> out;
    while (static_cast<int>(out.size()) < count) {
        auto s = fixtures::random_torus<Rational>(rng);
        try {
            auto tr = run_flow(s, 6.0, 20);
            if (tr.events.size() >= 5) out.push_back(std::move(tr));
        } catch (const degeneracy_error&) {
        }
    }
    return out;
}

template <class S>
bool check_prefixes(const Trajectory<S>& tr, int& checked) {
    int n = tr.start.num_edges();
    auto t0 = dual_track(tr.states.front(), Direction::vertical).first;
    for (std::size_t k = 1; k <= tr.events.size(); ++k) {
        TransitionPair p = compose_word(tr.events, n, 0, k);
        if (!(p.tangential == p.transverse.transpose())) return false;
        if (!p.transverse.nonnegative_minus_identity()) return false;
        auto det = p.transverse.determinant();
        if (det != 1 && det != -1) return false;
        auto tk = dual_track(tr.states[k], Direction::vertical).first;
        auto rec = reconstruct_from_words(t0, tk, edge_words(tr.events, n, 0, k));
        if (!(rec.pair.transverse == p.transverse) || !(rec.pair.tangential == p.tangential)) return false;
        ++checked;
    }
    return true;
}

Outcome transition_algebra() {
    int checked = 0;
    bool ok = check_prefixes(run_flow(fixtures::gold(), 100.0, 20), checked);
    for (const auto& tr : exact_trajectories(10)) ok = check_prefixes(tr, checked) && ok;
    return {ok, std::to_string(checked) + " prefixes checked"};
}

Outcome tangential_equivalence() {
    auto trajs = exact_trajectories(10);
    trajs.push_back(run_flow(load("t2.json"), 0.5));
    FlowOptions batch;
    batch.batch_simultaneous = true;
    trajs.push_back(run_flow(load("genus2.json"), 3.0, 40, batch));
    int splits = 0;
    bool ok = true;
    for (const auto& tr : trajs) {
        int n = tr.start.num_edges();
        for (std::size_t i = 0; i < tr.events.size(); ++i) {
            auto before = dual_track(tr.states[i], Direction::vertical).second;
            auto [after_track, after] = dual_track(tr.states[i + 1], Direction::vertical);
            Vec<Rational> pushed = split_transition(tr.events[i], n).tangential.apply(before.tangential);
            Vec<Rational> diff(n);
            for (int e = 0; e < n; ++e) diff[e] = after.tangential[e] - pushed[e];
            ok = ok && in_span(after_track.switch_rows(), diff);
            Rational pairing = 0;
            for (int e = 0; e < n; ++e) pairing += after.transverse[e] * after.tangential[e];
            ok = ok && pairing == area(tr.start);
            ++splits;
        }
    }
    return {ok, std::to_string(splits) + " splits over " + std::to_string(trajs.size()) + " trajectories"};
}

// ---------------------------------------------------------------- 10

Outcome strong_stable() {
    double L = std::log(golden_lambda);
    std::vector<double> T;
    for (int k = 1; k <= 5; ++k) T.push_back(k * L);
    auto fit = contraction_experiment(fixtures::gold(), T, 1e-5, 2, 10);
    double per_period = fit.samples[4].ratio / fit.samples[3].ratio;
    double oracle = 1 / (golden_lambda * golden_lambda);
    bool ok = std::fabs(per_period - oracle) <= 1e-3;
    std::string detail = "GOLD period-5 ratio " + fmt(per_period) + " vs " + fmt(oracle);

    std::mt19937_64 rng(2024);
    int found = 0;
    while (found < 3) {
        auto s = fixtures::random_torus<double>(rng);
        if (thick_fraction(run_flow(s, 8.0), 0.3).fraction <= 0.7) continue;
        ++found;
        auto f = contraction_experiment(s, {1, 2, 3, 4, 5, 6, 7, 8}, 1e-6, 4, found);
        ok = ok && f.alpha > 0 && f.r2 > 0.95;
        detail += "; random alpha " + fmt(f.alpha) + " R2 " + fmt(f.r2);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------- 11

Outcome hilbert_contraction() {
    auto tr = run_flow(fixtures::gold(), 8.0);
    auto per = detect_periodicity(tr);
    if (!per) return {false, "no period"};
    std::size_t p = per->m2 - per->m;
    std::vector<std::size_t> cps;
    for (std::size_t j = per->m + p; j < tr.states.size(); j += p) cps.push_back(j);
    auto d = hilbert_contraction_experiment(tr, cps);
    double bound = birkhoff_coefficient(period_image_diameter(tr, *per));
    bool ok = d.size() >= 3;
    double worst = 0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        ok = ok && d[i].diameter <= d[i - 1].diameter;
        worst = std::max(worst, d[i].diameter / d[i - 1].diameter);
    }
    ok = ok && worst <= bound + 1e-12;
    return {ok, std::to_string(d.size()) + " checkpoints, worst per-period ratio " + fmt(worst) + " <= bound " + fmt(bound)};
}

// ---------------------------------------------------------------- 12

Outcome closing() {
    auto t0 = std::chrono::steady_clock::now();
    auto axis = run_flow(fixtures::gold(), 3.0);
    std::vector<ClosingResult> res;
    bool ok = true;
    double worst_T = 0, worst_axis = 0;
    for (std::uint64_t seed : {3u, 4u}) {
        std::mt19937_64 rng(seed);
        auto tr = run_flow(perturb(fixtures::gold(), 1e-3, rng), 12.0);
        auto ret = find_return(tr);
        if (!ret) return {false, "no return found"};
        auto r = closing_search(tr, *ret);
        ok = ok && r.converged;
        worst_T = std::max(worst_T, std::fabs(r.T_prime - std::log(golden_lambda)));
        worst_axis = std::max(worst_axis, orbit_distance(r.periodic_point, axis));
        res.push_back(r);
    }
    double between = orbit_distance(res[0].periodic_point, run_flow(res[1].periodic_point, res[1].T_prime + 0.1));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && worst_T < 1e-6 && worst_axis < 1e-8 && between < 1e-8 && secs < 30;
    return {ok, "|T' - log lambda| " + fmt(worst_T) + ", axis distance " + fmt(worst_axis) + ", orbit gap " + fmt(between)};
}

// ---------------------------------------------------------------- 13

std::vector<std::vector<long long>> brute_vertex_curves(const TrainTrack& tr) {
    Matrix<Rational> rows = tr.switch_rows();
    int n = tr.num_branches();
    std::vector<std::vector<long long>> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (mask >> j & 1) cols.push_back(j);
        Matrix<Rational> sub;
        for (const auto& r : rows) {
            Vec<Rational> s;
            for (int j : cols) s.push_back(r[j]);
            sub.push_back(s);
        }
        auto ker = nullspace(sub, static_cast<int>(cols.size()));
        if (ker.size() != 1) continue;
        auto v = primitive(ker[0]);
        bool pos = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x > 0; });
        bool neg = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x < 0; });
        if (!pos && !neg) continue;
        std::vector<long long> full(n, 0);
        for (std::size_t i = 0; i < cols.size(); ++i)
            full[cols[i]] = static_cast<long long>(boost::multiprecision::numerator(pos ? v[i] : Rational(-v[i])));
        out.push_back(full);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

Outcome vertex_curves_brute() {
    std::vector<Surface<Rational>> surfaces{load("t2.json"), load("pillow.json")};
    std::mt19937_64 rng(13);
    for (int i = 0; i < 4; ++i) surfaces.push_back(fixtures::random_torus<Rational>(rng));
    auto p = load("pillow.json");
    for (int e = 0; e < p.num_edges(); ++e)
        if (other_diagonal(p, e).flippable) surfaces.push_back(flip(p, e).first);
    bool ok = true;
    int tracks = 0;
    for (const auto& s : surfaces)
        for (Direction d : {Direction::vertical, Direction::horizontal}) {
            auto tr = dual_track(s, d).first;
            if (tr.num_branches() > 12) continue;
            auto vc = vertex_curves(tr);
            ok = ok && vc == brute_vertex_curves(tr);
            for (const auto& v : vc)
                for (long long x : v) ok = ok && x <= 2;
            ++tracks;
        }
    auto t2 = vertex_curves(dual_track(load("t2.json"), Direction::vertical).first);
    ok = ok && t2 == std::vector<std::vector<long long>>{{1, 1, 0}, {1, 0, 1}};
    return {ok, std::to_string(tracks) + " tracks match brute force; T2 vertical {(1,1,0),(1,0,1)}"};
}

// ---------------------------------------------------------------- 14

Outcome thickety() {
    const double eps = 0.3, theta = 0.9;
    std::vector<std::vector<ThicketyCase>> families;
    families.push_back(thickety_cases(run_flow(fixtures::gold(), 8.0), eps, "gold"));
    families.push_back(thickety_cases(run_flow(fixtures::cusp_torus<double>(), 4.5), eps, "cusp", 16));
    FlowOptions batch;
    batch.batch_simultaneous = true;
    families.push_back(thickety_cases(run_flow(load("genus2.json"), 3.0, 40, batch), eps, "genus2"));
    std::mt19937_64 rng(14);
    for (int i = 0; i < 12; ++i)
        families.push_back(thickety_cases(run_flow(fixtures::random_torus<double>(rng), 8.0), eps, "random" + std::to_string(i)));
    std::vector<ThicketyCase> cal, ver;
    for (std::size_t i = 0; i < families.size(); ++i)
        (i % 2 == 0 ? cal : ver).insert((i % 2 == 0 ? cal : ver).end(), families[i].begin(), families[i].end());
    auto r = thickety_calibrate(cal, ver, eps, theta);
    std::string detail = "eps " + fmt(eps) + ", thick fraction >= " + fmt(theta) + ", calibrated duration " +
                         fmt(r.calibrated_duration) + ", " + std::to_string(r.verification_cases) + " verification segments, " +
                         std::to_string(r.violations.size()) + " non-filling";
    if (!r.violations.empty())
        detail += " (e.g. " + r.violations[0].fixture + " states " + std::to_string(r.violations[0].i) + ".." +
                  std::to_string(r.violations[0].j) + ", duration " + fmt(r.violations[0].duration) + ")";
    return {r.violations.empty() && r.verification_cases > 0, detail};
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"T2 validation, exact area and Delaunay certificate", t2_basics},
        {"trapezoid and shoelace areas agree on random veering triangles", area_formulas},
        {"next split of T2", next_split_t2},
        {"greedy repair of random flip scrambles", greedy_scrambles},
        {"GOLD periodicity and dilatation", gold_periodicity},
        {"Hilbert metric against the cross-ratio definition", hilbert_metric},
        {"Birkhoff contraction bound", birkhoff},
        {"transition matrix algebra on trajectory prefixes", transition_algebra},
        {"tangential equivalence modulo switch relations", tangential_equivalence},
        {"strong-stable contraction", strong_stable},
        {"Hilbert diameter decay on GOLD", hilbert_contraction},
        {"closing search on a perturbed GOLD orbit", closing},
        {"vertex curves against brute-force supports", vertex_curves_brute},
        {"split sets of long thick segments fill", thickety},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
