// Copyright 2026 The cqbsim Authors
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

#include "cqbsim/fit.h"

#include <cmath>

#include "gtest/gtest.h"

#include "cqbsim/rng.h"

using namespace cqbsim;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(fit, straight_line_matches_normal_equations) {
    Rng rng(3);
    int n = 40;
    VectorXd x(n), y(n);
    for (int i = 0; i < n; i++) {
        x[i] = i * 0.25;
        y[i] = 1.5 - 0.7 * x[i] + 0.05 * rng.normal();
    }
    ResidualFn f = [&](const VectorXd &p) -> VectorXd { return (p[0] + p[1] * x.array() - y.array()).matrix(); };
    FitResult r = levenberg_marquardt(f, VectorXd::Zero(2));
    ASSERT_TRUE(r.converged);
    // Oracle: closed-form simple regression.
    double mx = x.mean(), my = y.mean();
    double sxx = (x.array() - mx).square().sum();
    double sxy = ((x.array() - mx) * (y.array() - my)).sum();
    double b = sxy / sxx, a = my - b * mx;
    ASSERT_NEAR(r.params[0], a, 1e-10);
    ASSERT_NEAR(r.params[1], b, 1e-10);
    double s2 = (y.array() - a - b * x.array()).square().sum() / (n - 2);
    ASSERT_NEAR(r.errors[1], std::sqrt(s2 / sxx), 1e-8);
    ASSERT_NEAR(r.errors[0], std::sqrt(s2 * (1.0 / n + mx * mx / sxx)), 1e-8);
    ASSERT_EQ(r.dof, n - 2);
}

TEST(fit, exponential_recovered) {
    int n = 60;
    VectorXd t(n), y(n);
    for (int i = 0; i < n; i++) {
        t[i] = i * 1e-6;
        y[i] = 0.8 * std::exp(-t[i] / 17e-6) + 0.1;
    }
    ResidualFn f = [&](const VectorXd &p) -> VectorXd {
        return (p[0] * (-t.array() * p[1]).exp() + p[2] - y.array()).matrix();
    };
    std::vector<VectorXd> starts;
    for (double rate : log_spaced(1e3, 1e7, 5)) {
        starts.push_back((VectorXd(3) << 1, rate, 0).finished());
    }
    FitResult r = multi_start(f, starts);
    ASSERT_NEAR(r.params[0], 0.8, 1e-9);
    ASSERT_NEAR(1 / r.params[1], 17e-6, 1e-14);
    ASSERT_NEAR(r.params[2], 0.1, 1e-9);
}

TEST(fit, bounds_respected) {
    ResidualFn f = [](const VectorXd &p) -> VectorXd { return (VectorXd(1) << p[0] + 1).finished(); };
    FitOptions opt;
    opt.lower = VectorXd::Zero(1);
    opt.upper = VectorXd::Constant(1, 5);
    FitResult r = levenberg_marquardt(f, VectorXd::Constant(1, 2), opt);
    ASSERT_GE(r.params[0], 0);
    ASSERT_NEAR(r.params[0], 0, 1e-9);
}

TEST(fit, separable_matches_full) {
    Rng rng(9);
    int n = 80;
    VectorXd t(n), y(n), sigma = VectorXd::Constant(n, 0.01);
    for (int i = 0; i < n; i++) {
        t[i] = i * 0.5e-6;
        y[i] = 0.6 * std::exp(-t[i] / 12e-6) + 0.3 * std::exp(-t[i] / 3e-6) + 0.01 * rng.normal();
    }
    auto basis = [&](const VectorXd &th) -> MatrixXd {
        MatrixXd a(n, 2);
        a.col(0) = (-t.array() * th[0]).exp();
        a.col(1) = (-t.array() * th[1]).exp();
        return a;
    };
    std::vector<VectorXd> starts = {(VectorXd(2) << 5e4, 5e5).finished(), (VectorXd(2) << 1e5, 2e5).finished()};
    FitResult r = fit_separable(basis, y, starts, sigma);
    ASSERT_TRUE(r.converged);
    ASSERT_EQ(r.params.size(), 4);
    // Direct LM over all four parameters from the truth as the oracle optimum.
    ResidualFn full = [&](const VectorXd &p) -> VectorXd {
        VectorXd m = p[2] * (-t.array() * p[0]).exp() + p[3] * (-t.array() * p[1]).exp();
        return ((m - y).array() / sigma.array()).matrix();
    };
    FitResult g = levenberg_marquardt(full, (VectorXd(4) << 1 / 12e-6, 1 / 3e-6, 0.6, 0.3).finished(), {}, false);
    for (int k = 0; k < 4; k++) {
        ASSERT_NEAR(r.params[k], g.params[k], 1e-6 * std::abs(g.params[k])) << k;
        ASSERT_NEAR(r.errors[k], g.errors[k], 1e-3 * g.errors[k]) << k;
    }
    // chi2 of a correct model is close to its dof.
    ASSERT_GT(r.reduced_chi2(), 0.6);
    ASSERT_LT(r.reduced_chi2(), 1.5);
}

TEST(fit, linear_least_squares_weighted) {
    MatrixXd a(3, 1);
    a << 1, 1, 1;
    VectorXd y(3);
    y << 1, 2, 4;
    VectorXd w(3);
    w << 1, 1, 2;
    ASSERT_NEAR(linear_least_squares(a, y)[0], 7.0 / 3, 1e-14);
    ASSERT_NEAR(linear_least_squares(a, y, w)[0], 11.0 / 4, 1e-14);
}

TEST(fit, log_spaced) {
    auto v = log_spaced(1, 1e4, 5);
    ASSERT_EQ(v.size(), 5u);
    ASSERT_NEAR(v[2], 100, 1e-10);
    ASSERT_NEAR(v[4], 1e4, 1e-9);
}
