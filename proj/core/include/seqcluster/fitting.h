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

// Fits on Monte Carlo output: the finite-size scaling threshold ansatz, the
// quadratic loss-threshold extrapolation, the optimal-L search, the delay-line
// scaling law ln(1/p_*) = c1 eta^{-1/2} + c2, and its break-even points.

#ifndef SEQCLUSTER_FITTING_H
#define SEQCLUSTER_FITTING_H

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqcluster/montecarlo.h"

namespace seqcluster {

/// Raised when data cannot support the requested fit; the message is the diagnostic.
class FitError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Gaussian sigma equivalent of a 95% Wilson interval.
double sigma_from_interval(double ci_low, double ci_high);

/// One logical-error-rate measurement at physical rate p on lattice size L.
struct ThresholdPoint {
    double p = 0.0;
    int L = 1;
    double rate = 0.0;
    double sigma = 0.0;
    bool operator==(const ThresholdPoint &other) const = default;
};

/// Uncensored sweep rows as fit inputs (p is the circuit error rate of the model).
std::vector<ThresholdPoint> threshold_points(const std::vector<SweepRow> &rows);

/// Points sharing (p, L) replaced by one point carrying the inverse-variance mean
/// rate and the root-mean-square-harmonic sigma, so exact duplicates merge into
/// the original point. The result is sorted by (L, p).
std::vector<ThresholdPoint> merge_duplicate_points(const std::vector<ThresholdPoint> &points);

/// p = a + b x d^{1/nu} + c x^2 d^{2/nu} with x = p - p_th and d = (L+1)/2.
struct ThresholdFit {
    double p_th = 0.0;
    double nu = 1.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    /// Standard errors of (p_th, nu, a, b, c) from the inverse normal matrix.
    std::array<double, 5> std_error{};
    /// Weighted residual sum of squares (chi^2) over the points in the window.
    double chi2 = 0.0;
    int dof = 0;
    /// Points inside the final fit window.
    std::vector<ThresholdPoint> used;

    double predict(double p, int L) const;
    nlohmann::json to_json() const;
    std::string str() const;
};

struct ThresholdFitOptions {
    /// Points with |p - p_th| <= window * p_th are kept when refitting.
    double window = 0.3;
    int window_iterations = 2;
    /// Multistart grid: this many p_th starts spread over the sampled p range.
    int p_th_starts = 7;
    std::vector<double> nu_starts = {0.6, 1.0, 1.5};
};

/// Weighted nonlinear least squares of the scaling ansatz. Needs >= 3 distinct L and
/// >= 4 distinct p; throws FitError("insufficient points ...") otherwise, and FitError
/// when the curves do not cross inside the data window.
ThresholdFit fit_threshold(const std::vector<ThresholdPoint> &points, const ThresholdFitOptions &options = {});

/// (p_loss, p_th) pair of a loss-threshold curve.
struct LossPoint {
    double p_loss = 0.0;
    double p_th = 0.0;
};

/// p_th = k0 + k1 p_loss + k2 p_loss^2 and its positive root.
struct LossExtrapolation {
    std::array<double, 3> coefficients{};
    double loss_threshold = 0.0;
    nlohmann::json to_json() const;
    std::string str() const;
};

/// Least-squares quadratic through >= 3 points; returns the smallest root in (0, 1].
/// Throws FitError when there is no such root.
LossExtrapolation extrapolate_loss_threshold(const std::vector<LossPoint> &curve);

struct OptimalLEntry {
    int L = 1;
    Estimate estimate;
};

struct OptimalLResult {
    std::vector<OptimalLEntry> trace;
    int L_star = 0;
    double p_star = 0.0;
    /// The rate rose for two consecutive L after the minimum.
    bool bracketed = false;
    /// Not bracketed, or the estimate at the minimum was censored.
    bool censored = false;
    nlohmann::json to_json() const;
    std::string str() const;
};

/// Walks the ascending odd L values, estimating the rate at each, and stops once
/// the rate has increased for two consecutive L. The minimum of the trace is
/// reported; if the walk reaches the last L it is flagged as not bracketed.
OptimalLResult find_optimal_L(const std::vector<int> &Ls, const std::function<Estimate(int)> &estimate);
/// Monte Carlo version: `base` with its lattice replaced by an L-cube for each L.
OptimalLResult find_optimal_L(const RunConfig &base, const std::vector<int> &Ls,
                              const EstimateOptions &options = {});

/// Optimal rate p_* at delay-line rate eta; sigma <= 0 means unweighted.
struct DelayPoint {
    double eta = 0.0;
    double p_star = 0.0;
    double sigma = 0.0;
};

/// ln(1/p_*) = c1 eta^{-1/2} + c2.
struct DelayFit {
    double c1 = 0.0;
    double c2 = 0.0;
    std::array<double, 2> std_error{};
    double residual_norm = 0.0;

    nlohmann::json to_json() const;
    std::string str() const;
};

/// Weighted linear regression over >= 3 distinct eta. Throws std::invalid_argument on
/// nonpositive eta or p_*, FitError on too few points or non-decaying data (c1 <= 0).
DelayFit fit_delay(const std::vector<DelayPoint> &points);

/// Delay-line rate at which the optimal logical rate equals p_target:
/// eta = (c1 / (ln(1/p_target) - c2))^2. Throws std::invalid_argument unless
/// 0 < p_target < 1, c1 > 0 and ln(1/p_target) > c2.
double break_even(const DelayFit &fit, double p_target);

/// Dephasing rate per time step for pulse separation over coherence time r = tau/T2.
double eta_from_tau_ratio(double r);

/// Least-squares slope of ln(y) against ln(x).
double log_log_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace seqcluster

#endif  // SEQCLUSTER_FITTING_H
