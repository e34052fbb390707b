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

#include "cqbsim/propagator.h"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cqbsim/errors.h"

namespace cqbsim {

using Mat9 = Eigen::Matrix<cdouble, 9, 9>;
using Vec9 = Eigen::Matrix<cdouble, 9, 1>;

CQBState CQBState::basis(int k) {
    if (k < 0 || k > 2) {
        throw ConfigError("basis index must be 0, 1 or 2", "state");
    }
    CQBState s;
    s.rho(k, k) = 1;
    return s;
}

CQBState CQBState::from_ket(const Vec3 &psi) {
    double n = psi.norm();
    if (!(n > 0)) {
        throw ConfigError("zero state vector", "state");
    }
    Vec3 v = psi / n;
    CQBState s;
    s.rho = v * v.adjoint();
    return s;
}

CQBState CQBState::from_qubit_ket(const Vec2 &psi) {
    Vec3 v(psi(0), psi(1), 0);
    return from_ket(v);
}

void CQBState::validate(double tol) const {
    double asym = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 10 * tol) {
        throw NumericError("density matrix not Hermitian (" + fmt(asym) + ")", "rho");
    }
    double tr = rho.trace().real();
    if (std::abs(tr - 1) > tol) {
        throw NumericError("density matrix trace " + fmt(tr), "rho");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es((rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
        throw NumericError("density matrix not positive (" + fmt(es.eigenvalues().minCoeff()) + ")", "rho");
    }
}

void LeakageRates::validate() const {
    auto check = [](double v, const char *name) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw ConfigError(std::string(name) + " must be finite and >= 0", name);
        }
    };
    check(leak_from_1, "leak_from_1");
    check(leak_from_0, "leak_from_0");
    check(gamma_cqb, "gamma_cqb");
    check(gamma_phi, "gamma_phi");
}

const char *frame_name(ZFrame f) {
    return f == ZFrame::Lab ? "lab" : "rotating";
}

Mat2 step_propagator(double delta, double eps, double dt) {
    double r = std::hypot(delta, eps);
    if (r == 0) {
        return Mat2::Identity();
    }
    double a = kPi * r * dt;
    double c = std::cos(a);
    double s = std::sin(a);
    double nx = eps / r;
    double nz = delta / r;
    Mat2 m;
    m << cdouble(c, -s * nz), cdouble(0, -s * nx), cdouble(0, -s * nx), cdouble(c, s * nz);
    return m;
}

static void check_finite(const std::vector<double> &eps) {
    for (double e : eps) {
        if (!std::isfinite(e)) {
            throw NumericError("non-finite waveform sample", "samples");
        }
    }
}

Mat2 propagate_samples(double delta, const std::vector<double> &eps, double dt) {
    check_finite(eps);
    Mat2 u = Mat2::Identity();
    size_t k = 0;
    while (k < eps.size()) {
        // Equal consecutive samples (idles) collapse to one exact step.
        size_t j = k + 1;
        while (j < eps.size() && eps[j] == eps[k]) {
            j++;
        }
        u = step_propagator(delta, eps[k], dt * static_cast<double>(j - k)) * u;
        k = j;
    }
    return u;
}

Vec2 propagate_ket(double delta, const Vec2 &psi, const std::vector<double> &eps, double dt) {
    check_finite(eps);
    Vec2 v = psi;
    size_t k = 0;
    while (k < eps.size()) {
        size_t j = k + 1;
        while (j < eps.size() && eps[j] == eps[k]) {
            j++;
        }
        v = step_propagator(delta, eps[k], dt * static_cast<double>(j - k)) * v;
        k = j;
    }
    return v;
}

static BlochPoint bloch_of(const Vec2 &v, double t) {
    cdouble c = std::conj(v[0]) * v[1];
    return {t, 2 * c.real(), 2 * c.imag(), std::norm(v[0]) - std::norm(v[1])};
}

std::vector<BlochPoint> bloch_trace(double delta, const Vec2 &psi, const std::vector<double> &eps, double dt,
                                   int stride) {
    if (stride < 1) {
        throw ConfigError("stride must be >= 1", "stride");
    }
    check_finite(eps);
    std::vector<BlochPoint> out = {bloch_of(psi, 0)};
    Vec2 v = psi;
    for (size_t k = 0; k < eps.size(); k++) {
        v = step_propagator(delta, eps[k], dt) * v;
        if ((k + 1) % static_cast<size_t>(stride) == 0 || k + 1 == eps.size()) {
            out.push_back(bloch_of(v, static_cast<double>(k + 1) * dt));
        }
    }
    return out;
}

Mat2 unitary_of_waveform(const CQBSpec &spec, const Waveform &w, ZFrame frame) {
    Mat2 u = propagate_samples(spec.delta, w.samples(), w.sample_period());
    if (frame == ZFrame::Rotating) {
        u = rot_z(-kTwoPi * spec.delta * w.duration()) * u;
    }
    return special_unitary(u);
}

CQBState evolve_coherent(const CQBSpec &spec, const CQBState &state, const Waveform &w) {
    Mat2 u = propagate_samples(spec.delta, w.samples(), w.sample_period());
    Mat3 u3 = Mat3::Identity();
    u3.block<2, 2>(0, 0) = u;
    CQBState out;
    out.rho = u3 * state.rho * u3.adjoint();
    out.time = state.time + w.duration();
    return out;
}

namespace {

// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
Mat9 kron3(const Mat3 &a, const Mat3 &b) {
    Mat9 m;
    for (int i = 0; i < 3; i++) {
        for (int j = 0; j < 3; j++) {
            m.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
        }
    }
    return m;
}

Mat9 dissipator(const LeakageRates &r) {
    std::vector<Mat3> jumps;
    auto add = [&](double rate, int to, int from) {
        if (rate > 0) {
            Mat3 l = Mat3::Zero();
            l(to, from) = std::sqrt(rate);
            jumps.push_back(l);
        }
    };
    add(r.leak_from_1, 2, 1);
    add(r.leak_from_0, 2, 0);
    add(r.gamma_cqb / 2, 0, 1);
    add(r.gamma_cqb / 2, 1, 0);
    if (r.gamma_phi > 0) {
        Mat3 l = Mat3::Zero();
        l(0, 0) = std::sqrt(r.gamma_phi / 2);
        l(1, 1) = -std::sqrt(r.gamma_phi / 2);
        jumps.push_back(l);
    }
    Mat3 id = Mat3::Identity();
    Mat9 d = Mat9::Zero();
    for (const auto &l : jumps) {
        Mat3 ll = l.adjoint() * l;
        d += kron3(l.conjugate(), l) - 0.5 * kron3(id, ll) - 0.5 * kron3(ll.transpose(), id);
    }
    return d;
}

Mat9 hamiltonian_generator(double delta, double eps) {
    Mat3 h = Mat3::Zero();
    h(0, 0) = kPi * delta;
    h(1, 1) = -kPi * delta;
    h(0, 1) = kPi * eps;
    h(1, 0) = kPi * eps;
    Mat3 id = Mat3::Identity();
    return cdouble(0, -1) * (kron3(id, h) - kron3(h.transpose(), id));
}

Vec9 vec(const Mat3 &m) {
    Vec9 v;
    for (int j = 0; j < 3; j++) {
        for (int i = 0; i < 3; i++) {
            v(3 * j + i) = m(i, j);
        }
    }
    return v;
}

Mat3 unvec(const Vec9 &v) {
    Mat3 m;
    for (int j = 0; j < 3; j++) {
        for (int i = 0; i < 3; i++) {
            m(i, j) = v(3 * j + i);
        }
    }
    return m;
}

}  // namespace

CQBState evolve_lindblad(const CQBSpec &spec, const LeakageRates &rates, const CQBState &state, const Waveform &w) {
    rates.validate();
    const auto &eps = w.samples();
    check_finite(eps);
    double dt = w.sample_period();
    if (rates.total() == 0) {
        return evolve_coherent(spec, state, w);
    }
    if (rates.total() * dt > 0.1) {
        throw NumericError("step too large for the configured rates (dt * Gamma > 0.1)", "sample_period");
    }
    Mat9 d = dissipator(rates);
    Mat9 half_d = (d * (dt / 2)).exp();
    Vec9 v = vec(state.rho);
    size_t k = 0;
    while (k < eps.size()) {
        size_t j = k + 1;
        while (j < eps.size() && eps[j] == eps[k]) {
            j++;
        }
        if (j - k >= 4) {
            Mat9 g = (hamiltonian_generator(spec.delta, eps[k]) + d) * (dt * static_cast<double>(j - k));
            v = g.exp() * v;
        } else {
            for (size_t m = k; m < j; m++) {
                Mat2 u = step_propagator(spec.delta, eps[m], dt);
                Mat3 u3 = Mat3::Identity();
                u3.block<2, 2>(0, 0) = u;
                v = half_d * v;
                Mat3 r = unvec(v);
                r = u3 * r * u3.adjoint();
                v = half_d * vec(r);
            }
        }
        k = j;
    }
    CQBState out;
    out.rho = unvec(v);
    out.rho = (out.rho + out.rho.adjoint()) / 2.0;
    out.time = state.time + w.duration();
    return out;
}

std::vector<double> idle_populations(const LeakageRates &rates, const CQBState &state, double duration) {
    Mat9 g = (dissipator(rates) + hamiltonian_generator(1.0, 0)) * duration;
    // The populations do not depend on Delta at eps = 0; Delta = 1 Hz keeps the
    // exponent well conditioned.
    Mat3 r = unvec(g.exp() * vec(state.rho));
    return {r(0, 0).real(), r(1, 1).real(), r(2, 2).real()};
}

}  // namespace cqbsim
