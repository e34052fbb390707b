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

#include "cqbsim/linalg.h"

#include <cmath>

#include "cqbsim/errors.h"

namespace cqbsim {

const char *error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
            return "config";
        case ErrorKind::Numeric:
            return "numeric";
        case ErrorKind::Convergence:
            return "convergence";
    }
    return "unknown";
}

Mat2 pauli_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

Mat2 pauli_y() {
    Mat2 m;
    m << 0, cdouble(0, -1), cdouble(0, 1), 0;
    return m;
}

Mat2 pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

Mat2 su2_rotation(double theta, double nx, double ny, double nz) {
    double c = std::cos(theta / 2);
    double s = std::sin(theta / 2);
    Mat2 m;
    m << cdouble(c, -s * nz), cdouble(-s * ny, -s * nx), cdouble(s * ny, -s * nx), cdouble(c, s * nz);
    return m;
}

Mat2 rot_x(double theta) {
    return su2_rotation(theta, 1, 0, 0);
}

Mat2 rot_y(double theta) {
    return su2_rotation(theta, 0, 1, 0);
}

Mat2 rot_z(double theta) {
    return su2_rotation(theta, 0, 0, 1);
}

Mat2 special_unitary(const Mat2 &u) {
    cdouble det = u.determinant();
    if (std::abs(det) == 0) {
        throw NumericError("special_unitary: singular matrix");
    }
    Mat2 v = u / std::sqrt(det);
    cdouble pivot = std::abs(v(0, 0)) > 1e-12 ? v(0, 0) : v(0, 1);
    if (pivot.real() < 0 || (pivot.real() == 0 && pivot.imag() < 0)) {
        v = -v;
    }
    return v;
}

double trace_fidelity(const Mat2 &u, const Mat2 &v) {
    return std::abs((u.adjoint() * v).trace()) / 2.0;
}

double trace_fidelity(const Mat4 &u, const Mat4 &v) {
    return std::abs((u.adjoint() * v).trace()) / 4.0;
}

double unitarity_error(const Mat2 &u) {
    return (u.adjoint() * u - Mat2::Identity()).cwiseAbs().maxCoeff();
}

double unitarity_error(const Mat4 &u) {
    return (u.adjoint() * u - Mat4::Identity()).cwiseAbs().maxCoeff();
}

PauliCoefficients pauli_coefficients(const Mat2 &su2) {
    PauliCoefficients p;
    p.a0 = su2.trace().real() / 2;
    p.ax = -(pauli_x() * su2).trace().imag() / 2;
    p.ay = -(pauli_y() * su2).trace().imag() / 2;
    p.az = -(pauli_z() * su2).trace().imag() / 2;
    return p;
}

Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 m;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return m;
}

}  // namespace cqbsim
