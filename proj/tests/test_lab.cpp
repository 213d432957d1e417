#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "veertrack/fixtures.hpp"
#include "veertrack/io.hpp"
#include "veertrack/lab.hpp"

using namespace veertrack;

namespace {

const double log_lambda = std::log(fixtures::golden_dilatation);
// The golden return map [[2,1],[1,1]] has stable eigenvalue (3 - sqrt 5)/2;
// the flow time e^{-T} contributes the same factor again.
const double stable_eigenvalue = std::pow((3 - std::sqrt(5.0)) / 2, 2);

std::vector<double> gold_periods(int k) {
    std::vector<double> t;
    for (int i = 1; i <= k; ++i) t.push_back(i * log_lambda);
    return t;
}

std::vector<Surface<double>> random_fixtures(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Surface<double>> out;
    while (static_cast<int>(out.size()) < count) {
        auto s = fixtures::random_torus<double>(rng);
        if (thick_fraction(run_flow(s, 8.0), 0.3).fraction > 0.7) out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(Lab, FitLineRecoversExactLine) {
    auto f = fit_line({0, 1, 2, 3}, {2, -1, -4, -7});
    EXPECT_NEAR(f.slope, -3, 1e-12);
    EXPECT_NEAR(f.intercept, 2, 1e-12);
    EXPECT_NEAR(f.r2, 1, 1e-12);
}

TEST(Lab, GoldPerPeriodContraction) {
    auto fit = contraction_experiment(fixtures::gold(), gold_periods(5), 1e-5, 3, 11);
    ASSERT_EQ(fit.samples.size(), 15u);
    for (std::size_t i = 0; i < fit.samples.size(); ++i) {
        const auto& s = fit.samples[i];
        double prev = i % 5 == 0 ? 1.0 : fit.samples[i - 1].ratio;
        EXPECT_NEAR(s.ratio / prev, stable_eigenvalue, 1e-3) << s.T;
        EXPECT_FALSE(s.chart_changed);
    }
    EXPECT_NEAR(fit.alpha, 2.0, 1e-3);
}

TEST(Lab, ContractionIsIndependentOfThreadCount) {
    auto s = random_fixtures(1, 21).front();
    setenv("VEERTRACK_THREADS", "1", 1);
    auto a = contraction_experiment(s, {1, 2, 3}, 1e-6, 5, 99);
    setenv("VEERTRACK_THREADS", "3", 1);
    auto b = contraction_experiment(s, {1, 2, 3}, 1e-6, 5, 99);
    unsetenv("VEERTRACK_THREADS");
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].trial, b.samples[i].trial);
        EXPECT_EQ(a.samples[i].ratio, b.samples[i].ratio);
    }
    EXPECT_EQ(a.alpha, b.alpha);
}

TEST(Lab, RatioIsFirstOrderInDelta) {
    auto s = random_fixtures(1, 5).front();
    auto a = contraction_experiment(s, {2, 4}, 1e-5, 2, 3);
    auto b = contraction_experiment(s, {2, 4}, 5e-6, 2, 3);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        EXPECT_NEAR(a.samples[i].ratio / b.samples[i].ratio, 1.0, 0.01);
}

TEST(Lab, RandomThickFixturesContract) {
    for (const auto& s : random_fixtures(3, 2024)) {
        auto fit = contraction_experiment(s, {1, 2, 3, 4, 5, 6, 7, 8}, 1e-6, 4, 1);
        EXPECT_GT(fit.alpha, 0);
        EXPECT_GT(fit.r2, 0.95);
        for (const auto& x : fit.samples)
            if (x.T >= 2) EXPECT_LT(x.ratio, 1);
    }
}

TEST(Lab, OversizedPerturbationIsRejected) {
    EXPECT_THROW(contraction_experiment(fixtures::gold(), {1}, 5.0, 1, 0), precondition_error);
}

TEST(Lab, GoldHilbertDiametersDecayWithinBirkhoff) {
    auto tr = run_flow(fixtures::gold(), 8.0);
    auto per = detect_periodicity(tr);
    ASSERT_TRUE(per.has_value());
    std::size_t p = per->m2 - per->m;
    std::vector<std::size_t> cps;
    for (std::size_t j = per->m + p; j < tr.states.size(); j += p) cps.push_back(j);
    auto d = hilbert_contraction_experiment(tr, cps);
    ASSERT_GE(d.size(), 5u);
    double bound = birkhoff_coefficient(period_image_diameter(tr, *per));
    for (std::size_t i = 1; i < d.size(); ++i) {
        EXPECT_LE(d[i].diameter, d[i - 1].diameter);
        EXPECT_LE(d[i].diameter / d[i - 1].diameter, bound + 1e-12);
    }
    EXPECT_NEAR(d.back().diameter / d[d.size() - 2].diameter, stable_eigenvalue, 1e-2);
}

TEST(Lab, StartCheckpointHasInfiniteDiameter) {
    auto tr = run_flow(fixtures::gold(), 2.0);
    auto d = hilbert_contraction_experiment(tr, {0, 1});
    EXPECT_EQ(d[0].diameter, infinite_distance);
    EXPECT_EQ(d[1].diameter, infinite_distance);  // one split leaves a generator on the boundary
}

TEST(Lab, HilbertAndEuclideanSlopesAgreeOnGold) {
    auto tr = run_flow(fixtures::gold(), 8.0);
    std::vector<std::size_t> cps;
    for (std::size_t j = 2; j < tr.states.size(); ++j) cps.push_back(j);
    std::vector<double> t, logd;
    for (const auto& h : hilbert_contraction_experiment(tr, cps)) {
        t.push_back(h.t);
        logd.push_back(std::log(h.diameter));
    }
    double hilbert_slope = fit_line(t, logd).slope;
    double euclid_slope = -contraction_experiment(fixtures::gold(), gold_periods(5), 1e-5, 1, 0).alpha;
    EXPECT_LT(hilbert_slope, 0);
    EXPECT_LT(euclid_slope, 0);
    double q = hilbert_slope / euclid_slope;
    EXPECT_GT(q, 1.0 / 3);
    EXPECT_LT(q, 3.0);
}

TEST(Lab, HilbertDiametersMonotoneOnRandomTrajectory) {
    auto s = random_fixtures(1, 77).front();
    auto tr = run_flow(s, 6.0);
    std::vector<std::size_t> cps;
    for (std::size_t j = 0; j < tr.states.size(); ++j) cps.push_back(j);
    auto d = hilbert_contraction_experiment(tr, cps);
    for (std::size_t i = 1; i < d.size(); ++i) EXPECT_LE(d[i].diameter, d[i - 1].diameter * (1 + 1e-12));
    EXPECT_LT(d.back().diameter, 1e-2);
}

TEST(Lab, ClosingFindsTheGoldenOrbit) {
    auto axis = run_flow(fixtures::gold(), 3.0);
    std::vector<ClosingResult> results;
    for (std::uint64_t seed : {1u, 2u}) {
        std::mt19937_64 rng(seed);
        auto tr = run_flow(perturb(fixtures::gold(), 1e-3, rng), 12.0);
        EXPECT_FALSE(detect_periodicity(tr).has_value());
        auto ret = find_return(tr);
        ASSERT_TRUE(ret.has_value());
        auto r = closing_search(tr, *ret);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.T_prime, log_lambda, 1e-6);
        EXPECT_LT(orbit_distance(r.periodic_point, axis), 1e-8);
        EXPECT_NEAR(area(r.periodic_point), 1.0, 1e-12);
        results.push_back(r);
    }
    auto second = run_flow(results[1].periodic_point, results[1].T_prime + 0.1);
    EXPECT_LT(orbit_distance(results[0].periodic_point, second), 1e-8);
}

TEST(Lab, ClosingPointIsPeriodic) {
    std::mt19937_64 rng(9);
    auto tr = run_flow(perturb(fixtures::gold(), 1e-3, rng), 6.0);
    auto r = closing_search(tr, *find_return(tr));
    auto again = run_flow(r.periodic_point, r.T_prime + 0.1);
    auto per = detect_periodicity(again, 1e-9);
    ASSERT_TRUE(per.has_value());
    EXPECT_NEAR(std::log(per->lambda), r.T_prime, 1e-9);
}

TEST(Lab, UnperturbedClosingStopsAtOnce) {
    auto tr = run_flow(fixtures::gold(), 3.0);
    auto r = closing_search(tr, *find_return(tr));
    EXPECT_EQ(r.iterations, 1);
    EXPECT_LT(orbit_distance(r.periodic_point, tr), 1e-12);
}

TEST(Lab, NoReturnOnShortTrajectory) {
    auto tr = run_flow(fixtures::gold(), 0.5);
    EXPECT_FALSE(find_return(tr).has_value());
}

TEST(Lab, SplitSetsOfThinAndThickSegments) {
    auto cusp = thickety_cases(run_flow(fixtures::cusp_torus<double>(), 4.5), 0.3, "cusp", 16);
    ASSERT_FALSE(cusp.empty());
    // the cusp torus mostly splits one edge over and over
    for (const auto& c : cusp)
        if (c.thick_fraction < 0.5) EXPECT_FALSE(c.filling);
    auto gold = thickety_cases(run_flow(fixtures::gold(), 5.0), 0.3, "gold");
    for (const auto& c : gold) {
        EXPECT_DOUBLE_EQ(c.thick_fraction, 1.0);
        if (c.j - c.i >= 2) EXPECT_TRUE(c.filling);
    }
}

TEST(Lab, ThicketyCalibration) {
    std::vector<ThicketyCase> cal{{"a", 0, 1, 0.5, 1.0, false}, {"a", 0, 2, 1.5, 1.0, true}, {"a", 0, 3, 3.0, 0.1, false}};
    std::vector<ThicketyCase> ver{{"b", 0, 1, 0.4, 1.0, false}, {"b", 0, 2, 0.7, 1.0, false}, {"b", 0, 3, 2.0, 1.0, true}};
    auto r = thickety_calibrate(cal, ver, 0.3, 0.9);
    EXPECT_NEAR(r.calibrated_duration, 0.5, 1e-12);
    EXPECT_EQ(r.calibration_cases, 2u);
    EXPECT_EQ(r.verification_cases, 2u);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].j, 2u);
}
