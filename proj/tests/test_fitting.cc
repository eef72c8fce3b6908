// Copyright 2026 The seqcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "seqcluster/fitting.h"

namespace seqcluster {
namespace {

/// Rounds to two significant figures.
double two_sig(double v) {
    double scale = std::pow(10.0, std::floor(std::log10(std::abs(v))) - 1);
    return std::round(v / scale) * scale;
}

std::vector<ThresholdPoint> synthetic_threshold(double noise, uint64_t seed) {
    ThresholdFit truth;
    truth.p_th = 0.0039;
    truth.nu = 1.0;
    truth.a = 0.1;
    truth.b = 5;
    truth.c = 40;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<ThresholdPoint> points;
    for (int L : {5, 7, 9, 11}) {
        for (int k = 0; k < 7; k++) {
            double p = 0.0030 + 0.0003 * k;
            double sigma = noise > 0 ? noise : 1e-3;
            points.push_back({p, L, truth.predict(p, L) + noise * gauss(rng), sigma});
        }
    }
    return points;
}

TEST(ThresholdFitTest, RecoversExactAnsatz) {
    ThresholdFit fit = fit_threshold(synthetic_threshold(0.0, 1));
    EXPECT_NEAR(fit.p_th, 0.0039, 1e-9);
    EXPECT_NEAR(fit.nu, 1.0, 1e-5);
    EXPECT_NEAR(fit.a, 0.1, 1e-8);
    EXPECT_NEAR(fit.b, 5.0, 1e-4);
    EXPECT_NEAR(fit.c, 40.0, 1e-1);
    EXPECT_LT(fit.chi2, 1e-12);
}

TEST(ThresholdFitTest, RecoversNoisyAnsatzWithinThreeSigma) {
    for (uint64_t seed = 1; seed <= 10; seed++) {
        ThresholdFit fit = fit_threshold(synthetic_threshold(1e-3, seed));
        EXPECT_GT(fit.std_error[0], 0.0);
        EXPECT_LE(std::abs(fit.p_th - 0.0039), 3 * fit.std_error[0]) << "seed " << seed << "\n" << fit.str();
        EXPECT_GT(fit.nu, 0.0);
    }
}

TEST(ThresholdFitTest, InvariantUnderReorderingAndDuplication) {
    auto points = synthetic_threshold(1e-3, 7);
    ThresholdFit base = fit_threshold(points);
    auto shuffled = points;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(3));
    ThresholdFit reordered = fit_threshold(shuffled);
    EXPECT_EQ(reordered.p_th, base.p_th);
    EXPECT_EQ(reordered.nu, base.nu);
    auto doubled = points;
    doubled.insert(doubled.end(), points.begin(), points.end());
    ThresholdFit dup = fit_threshold(doubled);
    EXPECT_NEAR(dup.p_th, base.p_th, 1e-12);
    EXPECT_NEAR(dup.nu, base.nu, 1e-8);
    EXPECT_EQ(dup.used.size(), base.used.size());
}

TEST(ThresholdFitTest, WindowExcludesFarPoints) {
    auto points = synthetic_threshold(0.0, 1);
    ThresholdFit truth;
    truth.p_th = 0.0039, truth.nu = 1.0, truth.a = 0.1, truth.b = 5, truth.c = 40;
    for (int L : {5, 7, 9, 11}) points.push_back({0.0100, L, truth.predict(0.01, L) + 0.3, 1e-3});
    ThresholdFit fit = fit_threshold(points);
    EXPECT_NEAR(fit.p_th, 0.0039, 1e-9);
    for (const auto &pt : fit.used) EXPECT_LE(std::abs(pt.p - fit.p_th), 0.3 * fit.p_th + 1e-15);
}

TEST(ThresholdFitTest, Rejections) {
    try {
        fit_threshold({});
        FAIL();
    } catch (const FitError &e) {
        EXPECT_NE(std::string(e.what()).find("insufficient points"), std::string::npos);
    }
    // Below threshold everywhere: larger L always better, no crossing.
    std::vector<ThresholdPoint> below;
    for (int L : {5, 7, 9}) {
        for (double p : {0.001, 0.0012, 0.0014, 0.0016}) {
            below.push_back({p, L, 100 * p * p * std::pow(0.3, (L + 1) / 2.0), 1e-6});
        }
    }
    EXPECT_THROW(fit_threshold(below), FitError);
    auto pts = synthetic_threshold(0.0, 1);
    pts[0].sigma = 0.0;
    EXPECT_THROW(fit_threshold(pts), std::invalid_argument);
}

TEST(ThresholdFitTest, PointsFromSweepRowsSkipCensored) {
    SweepRow row;
    row.config.model = ErrorModel::em1(0.004);
    row.config.spec = LatticeSpec::cube(7);
    row.estimate = make_estimate(1000, 100, 100, 0, false);
    SweepRow censored = row;
    censored.estimate.censored = true;
    auto pts = threshold_points({row, censored});
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].L, 7);
    EXPECT_EQ(pts[0].p, 0.004);
    EXPECT_NEAR(pts[0].sigma, (row.estimate.ci_high - row.estimate.ci_low) / 3.919927969, 1e-12);
}

TEST(LossExtrapolationTest, ExactQuadraticRoot) {
    std::vector<LossPoint> curve;
    for (double x : {0.0, 0.05, 0.1, 0.15}) curve.push_back({x, 0.0039 * (1 - x / 0.2) * (1 + x)});
    auto fit = extrapolate_loss_threshold(curve);
    EXPECT_NEAR(fit.loss_threshold, 0.2, 0.2 * 1e-12);
    EXPECT_NEAR(fit.coefficients[0], 0.0039, 1e-15);
    EXPECT_THROW(extrapolate_loss_threshold({{0, 1}, {0.1, 2}}), FitError);
    // Increasing, convex curve: no positive root.
    EXPECT_THROW(extrapolate_loss_threshold({{0, 1}, {0.1, 1.2}, {0.2, 1.5}}), FitError);
}

Estimate fake(double rate) { return make_estimate(1000000, uint64_t(rate * 1e6), uint64_t(rate * 1e6), 0, false); }

TEST(OptimalLTest, StopsAfterTwoIncreases) {
    std::vector<int> Ls{3, 5, 7, 9, 11, 13, 15, 17, 19};
    int calls = 0;
    auto r = find_optimal_L(Ls, [&](int L) {
        calls++;
        return fake(1e-4 * ((L - 9) * (L - 9) + 1));
    });
    EXPECT_EQ(r.L_star, 9);
    EXPECT_NEAR(r.p_star, 1e-4, 1e-12);
    EXPECT_TRUE(r.bracketed);
    EXPECT_FALSE(r.censored);
    EXPECT_EQ(calls, 6);
    EXPECT_EQ(r.trace.back().L, 13);
}

TEST(OptimalLTest, SingleBumpDoesNotStop) {
    std::vector<double> rates{0.01, 0.005, 0.006, 0.002, 0.003, 0.004, 0.009};
    std::vector<int> Ls{3, 5, 7, 9, 11, 13, 15};
    auto r = find_optimal_L(Ls, [&](int L) { return fake(rates[size_t((L - 3) / 2)]); });
    EXPECT_EQ(r.L_star, 9);
    EXPECT_EQ(r.trace.size(), 6u);
}

TEST(OptimalLTest, MonotoneEscalatesToMaxWithFlag) {
    auto r = find_optimal_L({3, 5, 7}, [](int L) { return fake(0.1 / L); });
    EXPECT_EQ(r.L_star, 7);
    EXPECT_FALSE(r.bracketed);
    EXPECT_TRUE(r.censored);
    EXPECT_THROW(find_optimal_L({3, 4}, [](int) { return Estimate{}; }), std::invalid_argument);
    EXPECT_THROW(find_optimal_L({5, 3}, [](int) { return Estimate{}; }), std::invalid_argument);
    EXPECT_THROW(find_optimal_L({}, [](int) { return Estimate{}; }), std::invalid_argument);
}

TEST(OptimalLTest, NoDelayErrorsIsMonotone) {
    RunConfig base;
    base.protocol = Protocol::ProtocolB;
    base.model = ErrorModel::em3a(0.0);
    base.spec = LatticeSpec::cube(3);
    base.master_seed = 5;
    base.stop = StopRule{20000, 0, 20000};
    auto r = find_optimal_L(base, {3, 5, 7});
    EXPECT_FALSE(r.bracketed);
    EXPECT_GE(r.L_star, 5);
    EXPECT_LT(r.trace[1].estimate.rate, r.trace[0].estimate.rate);
}

TEST(DelayFitTest, ExactLineRecovered) {
    std::vector<DelayPoint> pts;
    for (double eta : {1e-5, 3e-5, 1e-4, 3e-4}) pts.push_back({eta, std::exp(-(0.05 / std::sqrt(eta) + 3.0)), 0.0});
    DelayFit fit = fit_delay(pts);
    EXPECT_NEAR(fit.c1, 0.05, 1e-13);
    EXPECT_NEAR(fit.c2, 3.0, 1e-11);
    for (auto &pt : pts) pt.sigma = 0.1 * pt.p_star;
    DelayFit weighted = fit_delay(pts);
    EXPECT_NEAR(weighted.c1, 0.05, 1e-13);
    EXPECT_NEAR(weighted.c2, 3.0, 1e-11);
}

TEST(DelayFitTest, BreakEvenRoundTrip) {
    std::vector<DelayPoint> pts;
    for (double eta : {2e-5, 5e-5, 1e-4, 2e-4}) pts.push_back({eta, std::exp(-(0.096 / std::sqrt(eta) + 3.37)), 0.0});
    DelayFit fit = fit_delay(pts);
    for (double eta : {1e-5, 7e-5, 4e-4}) {
        double target = std::exp(-(0.096 / std::sqrt(eta) + 3.37));
        EXPECT_NEAR(break_even(fit, target), eta, eta * 1e-9);
    }
}

TEST(DelayFitTest, Rejections) {
    EXPECT_THROW(fit_delay({{1e-4, 0.0, 0}, {2e-4, 0.1, 0}, {3e-4, 0.1, 0}}), std::invalid_argument);
    EXPECT_THROW(fit_delay({{-1e-4, 0.1, 0}, {2e-4, 0.1, 0}, {3e-4, 0.1, 0}}), std::invalid_argument);
    EXPECT_THROW(fit_delay({{1e-4, 0.1, 0}, {2e-4, 0.1, 0}}), FitError);
    // Rate growing as eta shrinks.
    EXPECT_THROW(fit_delay({{1e-4, 0.001, 0}, {2e-4, 0.0005, 0}, {4e-4, 0.0001, 0}}), FitError);
}

TEST(BreakEvenTest, PublishedValues) {
    DelayFit dephasing{0.032, 2.93, {}, 0.0};
    DelayFit loss{0.096, 3.37, {}, 0.0};
    EXPECT_DOUBLE_EQ(two_sig(break_even(dephasing, 1e-3)), 6.5e-5);
    EXPECT_DOUBLE_EQ(two_sig(break_even(loss, 1e-3)), 7.4e-4);
    EXPECT_DOUBLE_EQ(two_sig(break_even(loss, 1e-5)), 1.4e-4);
    EXPECT_DOUBLE_EQ(two_sig(break_even(loss, 1e-10)), 2.4e-5);
    EXPECT_DOUBLE_EQ(two_sig(break_even(loss, 1e-15)), 9.5e-6);
    EXPECT_THROW(break_even(loss, 0.5), std::invalid_argument);
    EXPECT_THROW(break_even(loss, 0.0), std::invalid_argument);
    EXPECT_THROW(break_even(DelayFit{-1, 0, {}, 0}, 1e-3), std::invalid_argument);
}

TEST(TauRatioTest, Conversion) {
    EXPECT_NEAR(eta_from_tau_ratio(1.6e-4), 4.8e-4, 1e-18);
    EXPECT_EQ(eta_from_tau_ratio(0.0), 0.0);
    EXPECT_NEAR(eta_from_tau_ratio(1e-5), 3e-5, 1e-19);
    EXPECT_THROW(eta_from_tau_ratio(-1e-5), std::invalid_argument);
}

TEST(SlopeTest, PowerLaw) {
    std::vector<double> x{1e-5, 3e-5, 1e-4}, y;
    for (double v : x) y.push_back(2.0 / std::sqrt(v));
    EXPECT_NEAR(log_log_slope(x, y), -0.5, 1e-12);
    EXPECT_THROW(log_log_slope({1.0}, {1.0}), std::invalid_argument);
}

TEST(FitReportTest, JsonAndText) {
    ThresholdFit fit = fit_threshold(synthetic_threshold(0.0, 1));
    auto doc = fit.to_json();
    EXPECT_EQ(doc["fit"], "threshold");
    EXPECT_EQ(doc["points"].size(), fit.used.size());
    EXPECT_NE(fit.str().find("p_th"), std::string::npos);
    DelayFit d{0.05, 3, {}, 0};
    EXPECT_EQ(d.to_json()["c1"], 0.05);
}

}  // namespace
}  // namespace seqcluster
