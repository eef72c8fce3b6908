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

#include "seqcluster/fitting.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <utility>

namespace seqcluster {
namespace {

constexpr double kZ95 = 1.959963984540054;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

/// Ansatz evaluated in scaled units: p values are divided by `scale` so every
/// parameter is of order one for the optimiser.
struct Ansatz {
    // Parameters: (p_th, nu, a, b, c) with p_th in scaled units.
    static double value(const Eigen::VectorXd &q, double u, double d) {
        double x = u - q[0];
        double s = std::pow(d, 1.0 / q[1]);
        return q[2] + q[3] * x * s + q[4] * x * x * s * s;
    }
    static void gradient(const Eigen::VectorXd &q, double u, double d, double *g) {
        double x = u - q[0];
        double s = std::pow(d, 1.0 / q[1]);
        double ds = -s * std::log(d) / (q[1] * q[1]);
        g[0] = -q[3] * s - 2.0 * q[4] * x * s * s;
        g[1] = (q[3] * x + 2.0 * q[4] * x * x * s) * ds;
        g[2] = 1.0;
        g[3] = x * s;
        g[4] = x * x * s * s;
    }
};

struct ScaledData {
    std::vector<double> u;
    std::vector<double> d;
    std::vector<double> y;
    std::vector<double> w;  // 1 / sigma
};

struct AnsatzFunctor : Eigen::DenseFunctor<double> {
    const ScaledData *data;
    explicit AnsatzFunctor(const ScaledData &data)
        : Eigen::DenseFunctor<double>(5, int(data.u.size())), data(&data) {}
    int operator()(const Eigen::VectorXd &q, Eigen::VectorXd &r) const {
        for (size_t i = 0; i < data->u.size(); i++) {
            r[Eigen::Index(i)] = (Ansatz::value(q, data->u[i], data->d[i]) - data->y[i]) * data->w[i];
        }
        return 0;
    }
    int df(const Eigen::VectorXd &q, Eigen::MatrixXd &jac) const {
        double g[5];
        for (size_t i = 0; i < data->u.size(); i++) {
            Ansatz::gradient(q, data->u[i], data->d[i], g);
            for (int k = 0; k < 5; k++) jac(Eigen::Index(i), k) = g[k] * data->w[i];
        }
        return 0;
    }
};

double chi2_of(const ScaledData &data, const Eigen::VectorXd &q) {
    double sum = 0.0;
    for (size_t i = 0; i < data.u.size(); i++) {
        double r = (Ansatz::value(q, data.u[i], data.d[i]) - data.y[i]) * data.w[i];
        sum += r * r;
    }
    return sum;
}

/// Weighted linear least squares for (a, b, c) at fixed (p_th, nu).
Eigen::VectorXd linear_start(const ScaledData &data, double p_th, double nu) {
    Eigen::MatrixXd A(data.u.size(), 3);
    Eigen::VectorXd rhs(data.u.size());
    for (size_t i = 0; i < data.u.size(); i++) {
        double x = data.u[i] - p_th;
        double s = std::pow(data.d[i], 1.0 / nu);
        A(Eigen::Index(i), 0) = data.w[i];
        A(Eigen::Index(i), 1) = x * s * data.w[i];
        A(Eigen::Index(i), 2) = x * x * s * s * data.w[i];
        rhs[Eigen::Index(i)] = data.y[i] * data.w[i];
    }
    Eigen::Vector3d abc = A.colPivHouseholderQr().solve(rhs);
    Eigen::VectorXd q(5);
    q << p_th, nu, abc[0], abc[1], abc[2];
    return q;
}

void check_coverage(const std::vector<ThresholdPoint> &points, const std::string &what) {
    std::set<int> Ls;
    std::set<double> ps;
    for (const auto &pt : points) {
        Ls.insert(pt.L);
        ps.insert(pt.p);
    }
    if (Ls.size() < 3 || ps.size() < 4) {
        throw FitError("insufficient points " + what + ": need >= 3 distinct L and >= 4 distinct p, got " +
                       std::to_string(Ls.size()) + " L and " + std::to_string(ps.size()) + " p");
    }
}

struct RawFit {
    Eigen::VectorXd q;
    double chi2 = std::numeric_limits<double>::infinity();
};

RawFit multistart(const ScaledData &data, double u_min, double u_max, const ThresholdFitOptions &options,
                  const std::vector<double> &extra_p_th) {
    std::vector<double> p_starts = extra_p_th;
    int n = std::max(1, options.p_th_starts);
    for (int k = 0; k < n; k++) p_starts.push_back(u_min + (u_max - u_min) * (k + 0.5) / n);
    RawFit best;
    for (double p0 : p_starts) {
        for (double nu0 : options.nu_starts) {
            AnsatzFunctor functor(data);
            Eigen::LevenbergMarquardt<AnsatzFunctor> lm(functor);
            lm.setMaxfev(2000);
            Eigen::VectorXd q = linear_start(data, p0, nu0);
            lm.minimize(q);
            if (!q.allFinite() || q[1] <= 0.0) continue;
            double chi2 = chi2_of(data, q);
            if (chi2 < best.chi2) best = RawFit{q, chi2};
        }
    }
    if (!std::isfinite(best.chi2)) throw FitError("threshold fit did not converge from any start");
    return best;
}

}  // namespace

double sigma_from_interval(double ci_low, double ci_high) { return (ci_high - ci_low) / (2.0 * kZ95); }

std::vector<ThresholdPoint> threshold_points(const std::vector<SweepRow> &rows) {
    std::vector<ThresholdPoint> out;
    for (const auto &row : rows) {
        if (row.estimate.censored) continue;
        out.push_back(ThresholdPoint{row.config.model.p, row.config.spec.L, row.estimate.rate,
                                     sigma_from_interval(row.estimate.ci_low, row.estimate.ci_high)});
    }
    return out;
}

std::vector<ThresholdPoint> merge_duplicate_points(const std::vector<ThresholdPoint> &points) {
    struct Acc {
        double sum_w = 0.0, sum_wy = 0.0;
        int count = 0;
    };
    std::map<std::pair<int, double>, Acc> groups;
    for (const auto &pt : points) {
        if (!(pt.sigma > 0.0) || !std::isfinite(pt.sigma)) {
            throw std::invalid_argument("every fit point needs a positive finite sigma");
        }
        if (!(pt.p > 0.0) || pt.L < 1) throw std::invalid_argument("fit points need p > 0 and L >= 1");
        Acc &acc = groups[{pt.L, pt.p}];
        double w = 1.0 / (pt.sigma * pt.sigma);
        acc.sum_w += w;
        acc.sum_wy += w * pt.rate;
        acc.count++;
    }
    std::vector<ThresholdPoint> out;
    for (const auto &[key, acc] : groups) {
        out.push_back(ThresholdPoint{key.second, key.first, acc.sum_wy / acc.sum_w, 1.0 / std::sqrt(acc.sum_w / acc.count)});
    }
    return out;
}

double ThresholdFit::predict(double p, int L) const {
    double x = p - p_th;
    double s = std::pow((L + 1) / 2.0, 1.0 / nu);
    return a + b * x * s + c * x * x * s * s;
}

nlohmann::json ThresholdFit::to_json() const {
    nlohmann::json points = nlohmann::json::array();
    for (const auto &pt : used) points.push_back({{"p", pt.p}, {"L", pt.L}, {"rate", pt.rate}, {"sigma", pt.sigma}});
    return {{"fit", "threshold"},
            {"p_th", p_th},
            {"nu", nu},
            {"a", a},
            {"b", b},
            {"c", c},
            {"std_error",
             {{"p_th", std_error[0]}, {"nu", std_error[1]}, {"a", std_error[2]}, {"b", std_error[3]}, {"c", std_error[4]}}},
            {"chi2", chi2},
            {"dof", dof},
            {"points", points}};
}

std::string ThresholdFit::str() const {
    std::ostringstream out;
    out << "threshold p_th = " << num(p_th) << " +/- " << num(std_error[0]) << " (" << num(100 * p_th) << "%)\n"
        << "  nu = " << num(nu) << " +/- " << num(std_error[1]) << "\n"
        << "  a = " << num(a) << ", b = " << num(b) << ", c = " << num(c) << "\n"
        << "  chi2/dof = " << num(chi2) << "/" << dof << " over " << used.size() << " points\n";
    return out.str();
}

ThresholdFit fit_threshold(const std::vector<ThresholdPoint> &points, const ThresholdFitOptions &options) {
    if (!(options.window > 0.0) || options.window_iterations < 0) throw std::invalid_argument("bad fit window options");
    if (options.nu_starts.empty()) throw std::invalid_argument("need at least one nu start");
    std::vector<ThresholdPoint> all = merge_duplicate_points(points);
    check_coverage(all, "for a threshold fit");

    double scale = 0.0;
    for (const auto &pt : all) scale = std::max(scale, pt.p);

    auto scaled = [&](const std::vector<ThresholdPoint> &pts) {
        ScaledData data;
        for (const auto &pt : pts) {
            data.u.push_back(pt.p / scale);
            data.d.push_back((pt.L + 1) / 2.0);
            data.y.push_back(pt.rate);
            data.w.push_back(1.0 / pt.sigma);
        }
        return data;
    };
    auto p_range = [](const std::vector<ThresholdPoint> &pts) {
        auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                            [](const auto &x, const auto &y) { return x.p < y.p; });
        return std::pair<double, double>{lo->p, hi->p};
    };

    std::vector<ThresholdPoint> used = all;
    auto [p_lo, p_hi] = p_range(used);
    RawFit fit = multistart(scaled(used), p_lo / scale, p_hi / scale, options, {});
    for (int it = 0; it < options.window_iterations; it++) {
        double centre = fit.q[0] * scale;
        if (!(centre > 0.0)) break;
        std::vector<ThresholdPoint> window;
        for (const auto &pt : all) {
            if (std::abs(pt.p - centre) <= options.window * centre) window.push_back(pt);
        }
        check_coverage(window, "in the fit window around p_th = " + num(centre));
        if (window == used) break;
        used = window;
        std::tie(p_lo, p_hi) = p_range(used);
        fit = multistart(scaled(used), p_lo / scale, p_hi / scale, options, {fit.q[0]});
    }

    ThresholdFit out;
    out.p_th = fit.q[0] * scale;
    out.nu = fit.q[1];
    out.a = fit.q[2];
    out.b = fit.q[3] / scale;
    out.c = fit.q[4] / (scale * scale);
    out.chi2 = fit.chi2;
    out.dof = int(used.size()) - 5;
    out.used = used;

    if (!(out.p_th > p_lo && out.p_th < p_hi) || !(out.b > 0.0)) {
        throw FitError("no crossing in the data window: fitted p_th = " + num(out.p_th) + " with slope b = " +
                       num(out.b) + " for sampled p in [" + num(p_lo) + ", " + num(p_hi) + "]");
    }

    // Standard errors in original units from the inverse normal matrix.
    ScaledData data = scaled(used);
    Eigen::MatrixXd jac(used.size(), 5);
    AnsatzFunctor(data).df(fit.q, jac);
    Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::MatrixXd cov = normal.completeOrthogonalDecomposition().pseudoInverse();
    const double unit[5] = {scale, 1.0, 1.0, 1.0 / scale, 1.0 / (scale * scale)};
    for (int k = 0; k < 5; k++) out.std_error[size_t(k)] = std::sqrt(std::max(0.0, cov(k, k))) * unit[k];
    return out;
}

nlohmann::json LossExtrapolation::to_json() const {
    return {{"fit", "loss_extrapolation"}, {"coefficients", coefficients}, {"loss_threshold", loss_threshold}};
}

std::string LossExtrapolation::str() const {
    return "loss threshold = " + num(loss_threshold) + " (" + num(100 * loss_threshold) + "%) from p_th = " +
           num(coefficients[0]) + " + " + num(coefficients[1]) + " p_loss + " + num(coefficients[2]) + " p_loss^2\n";
}

LossExtrapolation extrapolate_loss_threshold(const std::vector<LossPoint> &curve) {
    std::set<double> distinct;
    for (const auto &pt : curve) {
        if (!std::isfinite(pt.p_loss) || !std::isfinite(pt.p_th)) throw std::invalid_argument("non-finite loss point");
        distinct.insert(pt.p_loss);
    }
    if (distinct.size() < 3) throw FitError("insufficient points: need >= 3 distinct p_loss values");
    Eigen::MatrixXd A(curve.size(), 3);
    Eigen::VectorXd y(curve.size());
    for (size_t i = 0; i < curve.size(); i++) {
        double x = curve[i].p_loss;
        A(Eigen::Index(i), 0) = 1.0;
        A(Eigen::Index(i), 1) = x;
        A(Eigen::Index(i), 2) = x * x;
        y[Eigen::Index(i)] = curve[i].p_th;
    }
    Eigen::Vector3d k = A.colPivHouseholderQr().solve(y);
    LossExtrapolation out;
    out.coefficients = {k[0], k[1], k[2]};

    std::vector<double> roots;
    double scale = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
    if (std::abs(k[2]) <= 1e-14 * scale) {
        if (k[1] != 0.0) roots.push_back(-k[0] / k[1]);
    } else {
        double disc = k[1] * k[1] - 4.0 * k[2] * k[0];
        if (disc >= 0.0) {
            // Numerically stable pair of roots.
            double qv = -0.5 * (k[1] + std::copysign(std::sqrt(disc), k[1]));
            roots.push_back(qv / k[2]);
            if (qv != 0.0) roots.push_back(k[0] / qv);
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (double r : roots) {
        if (r > 0.0 && r <= 1.0) best = std::min(best, r);
    }
    if (!std::isfinite(best)) throw FitError("quadratic p_th(p_loss) has no positive root in (0, 1]");
    out.loss_threshold = best;
    return out;
}

nlohmann::json OptimalLResult::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &e : trace) rows.push_back({{"L", e.L}, {"estimate", e.estimate.to_json()}});
    return {{"fit", "optimal_L"},  {"L_star", L_star},     {"p_star", p_star},
            {"bracketed", bracketed}, {"censored", censored}, {"trace", rows}};
}

std::string OptimalLResult::str() const {
    std::ostringstream out;
    out << "L_* = " << L_star << ", p_* = " << num(p_star) << (bracketed ? "" : " (minimum not bracketed)")
        << (censored ? " [censored]" : "") << "\n";
    for (const auto &e : trace) {
        out << "  L = " << e.L << ": " << num(e.estimate.rate) << " [" << num(e.estimate.ci_low) << ", "
            << num(e.estimate.ci_high) << "]" << (e.estimate.censored ? " censored" : "") << "\n";
    }
    return out.str();
}

OptimalLResult find_optimal_L(const std::vector<int> &Ls, const std::function<Estimate(int)> &estimate) {
    if (Ls.empty()) throw std::invalid_argument("find_optimal_L needs at least one L");
    for (size_t i = 0; i < Ls.size(); i++) {
        if (Ls[i] < 1 || Ls[i] % 2 == 0) throw std::invalid_argument("L values must be odd and positive");
        if (i > 0 && Ls[i] <= Ls[i - 1]) throw std::invalid_argument("L values must be ascending");
    }
    OptimalLResult out;
    int increases = 0;
    for (int L : Ls) {
        Estimate e = estimate(L);
        if (!out.trace.empty()) increases = e.rate > out.trace.back().estimate.rate ? increases + 1 : 0;
        out.trace.push_back(OptimalLEntry{L, e});
        if (increases == 2) {
            out.bracketed = true;
            break;
        }
    }
    size_t best = 0;
    for (size_t i = 1; i < out.trace.size(); i++) {
        if (out.trace[i].estimate.rate < out.trace[best].estimate.rate) best = i;
    }
    out.L_star = out.trace[best].L;
    out.p_star = out.trace[best].estimate.rate;
    out.censored = !out.bracketed || out.trace[best].estimate.censored;
    return out;
}

OptimalLResult find_optimal_L(const RunConfig &base, const std::vector<int> &Ls, const EstimateOptions &options) {
    return find_optimal_L(Ls, [&](int L) {
        RunConfig config = base;
        config.spec = LatticeSpec::cube(L, base.spec.parity_offset);
        return estimate_rate(config, options);
    });
}

nlohmann::json DelayFit::to_json() const {
    return {{"fit", "delay"},
            {"c1", c1},
            {"c2", c2},
            {"std_error", {{"c1", std_error[0]}, {"c2", std_error[1]}}},
            {"residual_norm", residual_norm}};
}

std::string DelayFit::str() const {
    return "ln(1/p_*) = c1 eta^(-1/2) + c2 with c1 = " + num(c1) + " +/- " + num(std_error[0]) + ", c2 = " + num(c2) +
           " +/- " + num(std_error[1]) + "\n";
}

DelayFit fit_delay(const std::vector<DelayPoint> &points) {
    std::set<double> etas;
    bool weighted = !points.empty();
    for (const auto &pt : points) {
        if (!(pt.eta > 0.0) || !std::isfinite(pt.eta)) throw std::invalid_argument("delay fit needs eta > 0");
        if (!(pt.p_star > 0.0) || !(pt.p_star < 1.0)) throw std::invalid_argument("delay fit needs 0 < p_* < 1");
        if (!(pt.sigma > 0.0)) weighted = false;
        etas.insert(pt.eta);
    }
    if (etas.size() < 3) throw FitError("insufficient points: need >= 3 distinct eta values");

    size_t n = points.size();
    std::vector<double> x(n), y(n), w(n);
    for (size_t i = 0; i < n; i++) {
        x[i] = 1.0 / std::sqrt(points[i].eta);
        y[i] = -std::log(points[i].p_star);
        double sy = points[i].sigma / points[i].p_star;
        w[i] = weighted ? 1.0 / (sy * sy) : 1.0;
    }
    double sw = 0, sx = 0, sy = 0;
    for (size_t i = 0; i < n; i++) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; i++) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    DelayFit out;
    out.c1 = sxy / sxx;
    out.c2 = my - out.c1 * mx;
    double rss = 0.0;
    for (size_t i = 0; i < n; i++) {
        double r = y[i] - out.c1 * x[i] - out.c2;
        rss += w[i] * r * r;
    }
    out.residual_norm = std::sqrt(rss);
    // Known sigmas give absolute errors; otherwise scale by the residual variance.
    double s2 = weighted ? 1.0 : (n > 2 ? rss / double(n - 2) : 0.0);
    out.std_error = {std::sqrt(s2 / sxx), std::sqrt(s2 * (1.0 / sw + mx * mx / sxx))};
    if (!(out.c1 > 0.0)) throw FitError("p_* does not decay with decreasing eta (fitted c1 = " + num(out.c1) + ")");
    return out;
}

double break_even(const DelayFit &fit, double p_target) {
    if (!(p_target > 0.0 && p_target < 1.0)) throw std::invalid_argument("break_even needs 0 < p_target < 1");
    if (!(fit.c1 > 0.0)) throw std::invalid_argument("break_even needs c1 > 0");
    double gap = std::log(1.0 / p_target) - fit.c2;
    if (!(gap > 0.0)) throw std::invalid_argument("break_even needs ln(1/p_target) > c2");
    double r = fit.c1 / gap;
    return r * r;
}

double eta_from_tau_ratio(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("tau/T2 ratio must be finite and >= 0");
    return 3.0 * r;
}

double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope needs >= 2 paired values");
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); i++) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log_log_slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(x.size());
    my /= double(y.size());
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("log_log_slope needs distinct x values");
    return sxy / sxx;
}

}  // namespace seqcluster
