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
#include <limits>

#include "cqbsim/errors.h"

namespace cqbsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double FitResult::value(const std::string &name) const {
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return params[static_cast<Eigen::Index>(k)];
        }
    }
    throw ConfigError("no fit parameter named " + name, name);
}

double FitResult::error(const std::string &name) const {
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return errors[static_cast<Eigen::Index>(k)];
        }
    }
    throw ConfigError("no fit parameter named " + name, name);
}

Json FitResult::to_json() const {
    Json j;
    Json p;
    for (Eigen::Index k = 0; k < params.size(); k++) {
        std::string key = static_cast<size_t>(k) < names.size() ? names[k] : "p" + std::to_string(k);
        p[key] = {{"value", params[k]}, {"error", errors.size() > k ? errors[k] : 0.0}};
    }
    j["params"] = p;
    j["chi2"] = chi2;
    j["dof"] = dof;
    j["iterations"] = iterations;
    j["converged"] = converged;
    return j;
}

static VectorXd clamp(const VectorXd &p, const FitOptions &opt) {
    VectorXd q = p;
    if (opt.lower.size() == p.size()) {
        q = q.cwiseMax(opt.lower);
    }
    if (opt.upper.size() == p.size()) {
        q = q.cwiseMin(opt.upper);
    }
    return q;
}

static MatrixXd jacobian(const ResidualFn &f, const VectorXd &p, const VectorXd &typical) {
    VectorXd r0 = f(p);
    MatrixXd j(r0.size(), p.size());
    for (Eigen::Index k = 0; k < p.size(); k++) {
        double scale = std::max(std::abs(p[k]), typical.size() ? std::abs(typical[k]) : 0.0);
        double h = 6e-6 * (scale > 0 ? scale : 1.0);
        VectorXd a = p, b = p;
        a[k] += h;
        b[k] -= h;
        j.col(k) = (f(a) - f(b)) / (2 * h);
    }
    return j;
}

MatrixXd numeric_jacobian(const ResidualFn &f, const VectorXd &p) {
    return jacobian(f, p, VectorXd());
}

static bool finite(const VectorXd &v) {
    return v.allFinite();
}

FitResult levenberg_marquardt(const ResidualFn &f, const VectorXd &p0, const FitOptions &opt, bool scale_by_chi2) {
    FitResult res;
    VectorXd p = clamp(p0, opt);
    VectorXd r = f(p);
    if (!finite(r)) {
        throw NumericError("fit residuals are not finite at the initial point", "fit");
    }
    double chi2 = r.squaredNorm();
    double lambda = opt.initial_lambda;
    int it = 0;
    bool converged = false;
    for (; it < opt.max_iterations; it++) {
        MatrixXd j = jacobian(f, p, p0);
        MatrixXd a = j.transpose() * j;
        VectorXd g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() <= 1e-300) {
            converged = true;
            break;
        }
        bool accepted = false;
        for (int tries = 0; tries < 40; tries++) {
            MatrixXd damped = a;
            for (Eigen::Index k = 0; k < a.rows(); k++) {
                damped(k, k) += lambda * std::max(a(k, k), 1e-300);
            }
            VectorXd step = damped.ldlt().solve(-g);
            VectorXd trial = clamp(p + step, opt);
            VectorXd rt = f(trial);
            double c2 = finite(rt) ? rt.squaredNorm() : std::numeric_limits<double>::infinity();
            if (c2 <= chi2) {
                double rel_chi = (chi2 - c2) / std::max(chi2, 1e-300);
                double rel_step = ((trial - p).cwiseAbs().array() /
                                   (p.cwiseAbs().array() + p0.cwiseAbs().array() + 1e-300))
                                      .maxCoeff();
                p = trial;
                r = rt;
                chi2 = c2;
                lambda = std::max(lambda / 10, 1e-12);
                accepted = true;
                if (rel_chi < opt.tolerance && rel_step < std::sqrt(opt.tolerance)) {
                    converged = true;
                }
                break;
            }
            lambda *= 10;
        }
        if (!accepted) {
            // No downhill step at any damping: at a minimum within round-off.
            converged = true;
            break;
        }
        if (converged || chi2 == 0) {
            converged = true;
            break;
        }
    }
    res.params = p;
    res.residuals = r;
    res.chi2 = chi2;
    res.iterations = it;
    res.converged = converged;
    res.dof = static_cast<int>(r.size() - p.size());
    MatrixXd j = jacobian(f, p, p0);
    MatrixXd cov = (j.transpose() * j).completeOrthogonalDecomposition().pseudoInverse();
    if (scale_by_chi2 && res.dof > 0) {
        cov *= chi2 / res.dof;
    }
    res.covariance = cov;
    res.errors = cov.diagonal().cwiseMax(0).cwiseSqrt();
    return res;
}

FitResult multi_start(const ResidualFn &f, const std::vector<VectorXd> &starts, const FitOptions &opt,
                      bool scale_by_chi2) {
    if (starts.empty()) {
        throw ConfigError("multi_start needs at least one start", "starts");
    }
    FitResult best;
    bool have = false;
    for (const auto &s : starts) {
        FitResult r;
        try {
            r = levenberg_marquardt(f, s, opt, scale_by_chi2);
        } catch (const NumericError &) {
            continue;
        }
        if (!have || r.chi2 < best.chi2) {
            best = r;
            have = true;
        }
    }
    if (!have) {
        throw ConvergenceError("every fit start failed", "fit");
    }
    return best;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v;
    for (int k = 0; k < n; k++) {
        double u = n > 1 ? static_cast<double>(k) / (n - 1) : 0;
        v.push_back(std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))));
    }
    return v;
}

VectorXd linear_least_squares(const MatrixXd &a, const VectorXd &y, const VectorXd &weights) {
    if (weights.size() == 0) {
        return a.colPivHouseholderQr().solve(y);
    }
    VectorXd s = weights.cwiseSqrt();
    MatrixXd aw = s.asDiagonal() * a;
    VectorXd yw = s.cwiseProduct(y);
    return aw.colPivHouseholderQr().solve(yw);
}

FitResult fit_separable(const std::function<MatrixXd(const VectorXd &)> &basis, const VectorXd &y,
                        const std::vector<VectorXd> &theta_starts, const VectorXd &sigma, const FitOptions &opt) {
    bool weighted = sigma.size() == y.size();
    VectorXd inv = weighted ? VectorXd(sigma.cwiseInverse()) : VectorXd(VectorXd::Ones(y.size()));
    VectorXd w = inv.cwiseProduct(inv);
    auto projected = [&](const VectorXd &th) -> VectorXd {
        MatrixXd a = basis(th);
        VectorXd c = linear_least_squares(a, y, w);
        return inv.cwiseProduct(a * c - y);
    };
    FitResult outer = multi_start(projected, theta_starts, opt, !weighted);
    VectorXd th = outer.params;
    MatrixXd a = basis(th);
    VectorXd c = linear_least_squares(a, y, w);
    Eigen::Index nt = th.size(), nc = c.size();
    VectorXd all(nt + nc);
    all << th, c;
    ResidualFn full = [&](const VectorXd &p) -> VectorXd {
        MatrixXd b = basis(p.head(nt));
        return inv.cwiseProduct(b * p.tail(nc) - y);
    };
    FitOptions polish = opt;
    if (opt.lower.size() == nt) {
        polish.lower = VectorXd::Constant(nt + nc, -std::numeric_limits<double>::infinity());
        polish.lower.head(nt) = opt.lower;
    }
    if (opt.upper.size() == nt) {
        polish.upper = VectorXd::Constant(nt + nc, std::numeric_limits<double>::infinity());
        polish.upper.head(nt) = opt.upper;
    }
    FitResult r = levenberg_marquardt(full, all, polish, !weighted);
    r.converged = r.converged && outer.converged;
    r.iterations += outer.iterations;
    return r;
}

}  // namespace cqbsim
