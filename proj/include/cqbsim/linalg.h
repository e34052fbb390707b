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

#ifndef CQBSIM_LINALG_H
#define CQBSIM_LINALG_H

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace cqbsim {

using cdouble = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3cd;
using Vec4 = Eigen::Vector4cd;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();

/// exp(-i (theta/2) n.sigma) for a unit axis n.
Mat2 su2_rotation(double theta, double nx, double ny, double nz);

/// X(theta) = exp(-i sigma_x theta / 2); likewise Y, Z.
Mat2 rot_x(double theta);
Mat2 rot_y(double theta);
Mat2 rot_z(double theta);

/// Rescales U so that det(U) = 1. The branch of the square root is chosen so the
/// first nonzero diagonal entry has a nonnegative real part.
Mat2 special_unitary(const Mat2 &u);

/// Phase-invariant overlap |tr(U^dag V)| / d.
double trace_fidelity(const Mat2 &u, const Mat2 &v);
double trace_fidelity(const Mat4 &u, const Mat4 &v);

/// Max-norm deviation of U^dag U from the identity.
double unitarity_error(const Mat2 &u);
double unitarity_error(const Mat4 &u);

/// Pauli decomposition of an SU(2) matrix: U = a0 I - i (ax X + ay Y + az Z).
struct PauliCoefficients {
    double a0, ax, ay, az;
};
PauliCoefficients pauli_coefficients(const Mat2 &su2);

Mat4 kron(const Mat2 &a, const Mat2 &b);

}  // namespace cqbsim

#endif
