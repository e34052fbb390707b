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

#ifndef CQBSIM_FIT_H
#define CQBSIM_FIT_H

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqbsim/io.h"

namespace cqbsim {

/// Residual vector r(p) to be minimized in the least-squares sense.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

struct FitOptions {
    int max_iterations = 500;
    double tolerance = 1e-12;  ///< relative change in chi2 and in the parameters
    double initial_lambda = 1e-3;
    Eigen::VectorXd lower;  ///< optional box bounds, empty for none
    Eigen::VectorXd upper;
};

struct FitResult {
    Eigen::VectorXd params;
    Eigen::VectorXd errors;  ///< 1 sigma, sqrt(diag(covariance))
    Eigen::MatrixXd covariance;
    Eigen::VectorXd residuals;
    double chi2 = 0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> names;

    double reduced_chi2() const {
        return dof > 0 ? chi2 / dof : 0;
    }
    double value(const std::string &name) const;
    double error(const std::string &name) const;
    Json to_json() const;
};

/// Forward-difference-free Jacobian: central differences with per-parameter steps.
Eigen::MatrixXd numeric_jacobian(const ResidualFn &f, const Eigen::VectorXd &p);

/// Levenberg-Marquardt. When `scale_by_chi2` is set the covariance is multiplied by the
/// reduced chi2 (unknown noise level); otherwise residuals are taken as already
/// normalized by their sigma.
FitResult levenberg_marquardt(const ResidualFn &f, const Eigen::VectorXd &p0, const FitOptions &opt = {},
                              bool scale_by_chi2 = true);

/// Runs levenberg_marquardt from every start and keeps the lowest chi2.
FitResult multi_start(const ResidualFn &f, const std::vector<Eigen::VectorXd> &starts, const FitOptions &opt = {},
                      bool scale_by_chi2 = true);

/// `n` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

/// Linear least squares y ~ A c with optional weights 1/sigma^2.
Eigen::VectorXd linear_least_squares(const Eigen::MatrixXd &a, const Eigen::VectorXd &y,
                                     const Eigen::VectorXd &weights = {});

/// Separable model y = sum_k c_k basis_k(x; theta). `basis(theta)` returns the
/// n_points x n_linear design matrix. Theta is found by LM on the variable-projection
/// residual, then all parameters (theta first, then c) are polished jointly for the
/// covariance.
FitResult fit_separable(const std::function<Eigen::MatrixXd(const Eigen::VectorXd &)> &basis, const Eigen::VectorXd &y,
                        const std::vector<Eigen::VectorXd> &theta_starts, const Eigen::VectorXd &sigma = {},
                        const FitOptions &opt = {});

}  // namespace cqbsim

#endif
