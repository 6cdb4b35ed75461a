// Copyright 2026 The revquant Authors
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

#include "revquant/linalg.hpp"

#include "gtest/gtest.h"

#include "revquant/channels.hpp"
#include "test_util.hpp"

using namespace revquant;
using revquant::test::random_complex;
using revquant::test::random_hermitian;
using revquant::test::random_psd;

namespace {

Matrix diag(std::initializer_list<double> xs) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) m(k, k) = x, ++k;
  return m;
}

Matrix half_identity_plus_x() { return 0.5 * (pauli::I() + pauli::X()); }

}  // namespace

TEST(hermitian_eig, identity) {
  const auto eig = hermitian_eig(Matrix::Identity(2, 2));
  EXPECT_NEAR(eig.values(0), 1.0, 1e-14);
  EXPECT_NEAR(eig.values(1), 1.0, 1e-14);
}

TEST(hermitian_eig, diagonal_sorted_descending) {
  const auto eig = hermitian_eig(diag({1.0, 3.0}));
  EXPECT_NEAR(eig.values(0), 3.0, 1e-14);
  EXPECT_NEAR(eig.values(1), 1.0, 1e-14);
  // Eigenvectors are |1>, |0> up to phase.
  EXPECT_NEAR(std::abs(eig.vectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(eig.vectors(0, 1)), 1.0, 1e-14);

  const auto already = hermitian_eig(diag({3.0, 1.0}));
  EXPECT_NEAR(std::abs(already.vectors(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(already.vectors(1, 1)), 1.0, 1e-14);
}

TEST(hermitian_eig, pauli_x) {
  const auto eig = hermitian_eig(pauli::X());
  EXPECT_NEAR(eig.values(0), 1.0, 1e-14);
  EXPECT_NEAR(eig.values(1), -1.0, 1e-14);
  // |+> and |-> up to a phase.
  EXPECT_NEAR(std::abs(eig.vectors.col(0).dot(test::plus_ket())), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(eig.vectors.col(1).dot(test::minus_ket())), 1.0, 1e-14);
}

TEST(hermitian_eig, rejects_non_hermitian_with_defect) {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  try {
    hermitian_eig(m);
    FAIL() << "expected NotHermitianError";
  } catch (const NotHermitianError& ex) {
    EXPECT_NEAR(ex.asymmetry(), std::sqrt(2.0), 1e-14);
    EXPECT_NE(std::string(ex.what()).find("1.41"), std::string::npos);
  }
}

TEST(hermitian_eig, reconstruction_property) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.between(1, 8);
    Matrix h = random_hermitian(d, rng);
    h *= rng.uniform(0.0, 10.0) / std::max(1e-12, h.norm());
    const auto eig = hermitian_eig(h);
    const Matrix back = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    EXPECT_LE((back - h).norm(), 1e-9);
    EXPECT_TRUE(is_unitary(eig.vectors, 1e-10));
    for (int k = 1; k < d; ++k) EXPECT_GE(eig.values(k - 1), eig.values(k));
  }
}

TEST(psd_sqrt, examples) {
  EXPECT_LE((psd_sqrt(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm(), 1e-14);
  EXPECT_LE((psd_sqrt(diag({4.0, 0.0})) - diag({2.0, 0.0})).norm(), 1e-14);
  EXPECT_LE((psd_sqrt(half_identity_plus_x()) - half_identity_plus_x()).norm(), 1e-14);
}

TEST(psd_sqrt, clips_inside_band_and_rejects_outside) {
  const Matrix slightly = diag({1.0, -1e-12});
  EXPECT_LE((psd_sqrt(slightly) - diag({1.0, 0.0})).norm(), 1e-14);
  try {
    psd_sqrt(diag({1.0, -0.25}));
    FAIL() << "expected NotPsdError";
  } catch (const NotPsdError& ex) {
    EXPECT_NEAR(ex.eigenvalue(), -0.25, 1e-14);
  }
}

TEST(psd_pinv_sqrt, examples) {
  EXPECT_LE((psd_pinv_sqrt(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_LE((psd_pinv_sqrt(diag({4.0, 0.0})) - diag({0.5, 0.0})).norm(), 1e-14);
  EXPECT_LE((psd_pinv_sqrt(diag({0.5, 0.5})) - diag({std::sqrt(2.0), std::sqrt(2.0)})).norm(), 1e-13);
  EXPECT_THROW(psd_pinv_sqrt(diag({1.0, -1.0})), NotPsdError);
}

TEST(support_projector, examples) {
  EXPECT_LE((support_projector(diag({0.3, 0.7})) - Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_LE((support_projector(diag({1.0, 0.0})) - diag({1.0, 0.0})).norm(), 1e-14);
  EXPECT_LE((support_projector(half_identity_plus_x()) - half_identity_plus_x()).norm(), 1e-14);
}

TEST(support_projector, cutoff_is_scale_relative) {
  // 1e-13 relative to a top eigenvalue of 1e3 is below the 1e-12 floor.
  const Matrix m = diag({1e3, 1e-10});
  EXPECT_EQ(psd_rank(m, 0.0), 1);
  EXPECT_EQ(psd_rank(diag({1.0, 1e-10}), 0.0), 2);
  EXPECT_EQ(psd_rank(1e6 * diag({1.0, 1e-10}), 0.0), 2);
}

TEST(psd_functions, random_psd_properties) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.between(1, 8);
    const int rank = rng.between(1, d);
    const Matrix m = random_psd(d, rank, rng);
    const Matrix root = psd_sqrt(m);
    EXPECT_LE((root * root - m).norm(), 1e-8);
    const Matrix inv = psd_pinv_sqrt(m);
    const Matrix p = support_projector(m);
    EXPECT_LE((inv * m * inv - p).norm(), 1e-8);
    EXPECT_LE((p * p - p).norm(), 1e-8);
    EXPECT_LE((p * m * p - m).norm(), 1e-8);
    EXPECT_EQ(psd_rank(m), rank);
  }
}

TEST(trace_norm, examples) {
  EXPECT_NEAR(trace_norm(Matrix::Identity(3, 3)), 3.0, 1e-14);
  EXPECT_NEAR(trace_norm(diag({1.0, -2.0})), 3.0, 1e-14);
  Matrix jordan(2, 2);
  jordan << 0, 1, 0, 0;
  EXPECT_NEAR(trace_norm(jordan), 1.0, 1e-14);
}

TEST(frobenius_norm, examples) {
  EXPECT_NEAR(frobenius_norm(Matrix::Identity(2, 2)), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(frobenius_norm(Matrix::Zero(3, 3)), 0.0);
  EXPECT_NEAR(frobenius_norm(Matrix::Ones(2, 2)), 2.0, 1e-15);
}

TEST(norms, trace_norm_dominates_trace_and_is_unitarily_invariant) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.between(1, 6);
    const Matrix m = random_complex(d, d, rng);
    EXPECT_GE(trace_norm(m) + 1e-12, std::abs(m.trace()));
    const Matrix u = haar_unitary(d, rng);
    const Matrix v = haar_unitary(d, rng);
    EXPECT_NEAR(trace_norm(u * m * v), trace_norm(m), 1e-9);
    EXPECT_NEAR(frobenius_norm(u * m * v), frobenius_norm(m), 1e-9);
  }
}

TEST(haar_unitary, scalar_is_unit_modulus) {
  const Matrix u = haar_unitary(1, std::uint64_t{99});
  EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-15);
}

TEST(haar_unitary, unitary_for_many_seeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 1 + static_cast<int>(seed % 9);
    const Matrix u = haar_unitary(d, seed);
    EXPECT_LT((u.adjoint() * u - Matrix::Identity(d, d)).norm(), 1e-10);
  }
}

TEST(haar_unitary, deterministic_per_seed) {
  const Matrix a = haar_unitary(2, std::uint64_t{42});
  const Matrix b = haar_unitary(2, std::uint64_t{42});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, haar_unitary(2, std::uint64_t{43}));
}

TEST(haar_unitary, first_moment_is_near_zero) {
  // E[U] = 0 and E|U_00|^2 = 1/d for Haar unitaries.
  const int d = 3;
  const int n = 4000;
  Matrix mean = Matrix::Zero(d, d);
  double second = 0.0;
  Rng rng(1234);
  for (int i = 0; i < n; ++i) {
    const Matrix u = haar_unitary(d, rng);
    mean += u / static_cast<double>(n);
    second += std::norm(u(0, 0)) / n;
  }
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_NEAR(second, 1.0 / d, 0.02);
}

TEST(rng, cross_platform_stream_is_pinned) {
  // mt19937_64's 10000th output for the default seed is fixed by the standard.
  std::mt19937_64 reference(5489u);
  reference.discard(9999);
  EXPECT_EQ(reference(), 9981545732273789042ULL);
  Rng rng(5489u);
  for (int i = 0; i < 9999; ++i) rng.next_u64();
  EXPECT_EQ(rng.next_u64(), 9981545732273789042ULL);
}

TEST(partial_trace, kron_factors) {
  Rng rng(3);
  const Matrix a = random_hermitian(2, rng);
  const Matrix b = random_hermitian(3, rng);
  const Matrix ab = kron(a, b);
  EXPECT_LE((partial_trace_second(ab, 2, 3) - b.trace() * a).norm(), 1e-12);
  EXPECT_LE((partial_trace_first(ab, 2, 3) - a.trace() * b).norm(), 1e-12);
}
