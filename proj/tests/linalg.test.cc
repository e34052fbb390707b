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

#include <unsupported/Eigen/MatrixFunctions>

#include "gtest/gtest.h"

#include "cqbsim/io.h"
#include "cqbsim/parallel.h"
#include "cqbsim/rng.h"

using namespace cqbsim;

TEST(linalg, rotations_match_exponential) {
    for (double th : {0.3, kPi / 2, kPi, 4.0}) {
        Mat2 gx = cdouble(0, -th / 2) * pauli_x();
        Mat2 gy = cdouble(0, -th / 2) * pauli_y();
        Mat2 gz = cdouble(0, -th / 2) * pauli_z();
        ASSERT_LT((rot_x(th) - gx.exp()).cwiseAbs().maxCoeff(), 1e-14);
        ASSERT_LT((rot_y(th) - gy.exp()).cwiseAbs().maxCoeff(), 1e-14);
        ASSERT_LT((rot_z(th) - gz.exp()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(linalg, z_pi_special_unitary_form) {
    Mat2 z = rot_z(kPi);
    ASSERT_NEAR(std::abs(z(0, 0) - cdouble(0, -1)), 0, 1e-15);
    ASSERT_NEAR(std::abs(z(1, 1) - cdouble(0, 1)), 0, 1e-15);
}

TEST(linalg, special_unitary_and_fidelity) {
    Mat2 u = std::polar(1.0, 0.77) * rot_y(1.1) * rot_z(0.4);
    Mat2 s = special_unitary(u);
    ASSERT_NEAR(std::abs(s.determinant() - 1.0), 0, 1e-14);
    ASSERT_NEAR(trace_fidelity(s, rot_y(1.1) * rot_z(0.4)), 1, 1e-14);
    ASSERT_NEAR(trace_fidelity(Mat2(rot_x(kPi / 2) * rot_x(-kPi / 2)), Mat2(Mat2::Identity())), 1, 1e-15);
    auto p = pauli_coefficients(rot_y(0.6));
    ASSERT_NEAR(p.a0, std::cos(0.3), 1e-15);
    ASSERT_NEAR(p.ay, std::sin(0.3), 1e-15);
    ASSERT_NEAR(p.ax, 0, 1e-15);
}

TEST(linalg, kron) {
    Mat4 k = kron(pauli_z(), pauli_x());
    ASSERT_EQ(k(0, 1), cdouble(1));
    ASSERT_EQ(k(2, 3), cdouble(-1));
    ASSERT_LT(unitarity_error(k), 1e-15);
}

TEST(rng, deterministic_streams) {
    Rng a = Rng::derive(5, 3), b = Rng::derive(5, 3), c = Rng::derive(5, 4);
    ASSERT_EQ(a.next_u64(), b.next_u64());
    ASSERT_NE(Rng::derive(5, 3).next_u64(), c.next_u64());
    Rng n(1);
    double sum = 0, sq = 0;
    for (int k = 0; k < 200000; k++) {
        double x = n.normal();
        sum += x;
        sq += x * x;
    }
    ASSERT_NEAR(sum / 200000, 0, 0.01);
    ASSERT_NEAR(sq / 200000, 1, 0.01);
    Rng u(2);
    for (int k = 0; k < 1000; k++) {
        ASSERT_LT(u.below(24), 24u);
    }
}

TEST(parallel, order_fixed_results) {
    auto f = [](size_t i) { return static_cast<double>(i * i); };
    auto a = parallel_map(100, 1, f);
    auto b = parallel_map(100, 4, f);
    ASSERT_EQ(a, b);
    ASSERT_THROW(parallel_map(10, 3,
                              [](size_t i) -> int {
                                  if (i == 7) {
                                      throw std::runtime_error("x");
                                  }
                                  return 0;
                              }),
                 std::runtime_error);
}

TEST(io, float_format) {
    ASSERT_EQ(fmt(1.0), "1.00000000000e+00");
    ASSERT_EQ(fmt(-0.0), "0.00000000000e+00");
    ASSERT_EQ(fmt(65.4e6), "6.54000000000e+07");
    Json j;
    j["a"] = 0.1;
    j["b"] = {1, 2.5};
    j["s"] = "x";
    ASSERT_EQ(dump_json(j), "{\n  \"a\": 1.00000000000e-01,\n  \"b\": [1, 2.50000000000e+00],\n  \"s\": \"x\"\n}\n");
    ASSERT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
    ASSERT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}
