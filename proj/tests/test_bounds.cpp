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

#include "revquant/bounds.hpp"

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace revquant;

namespace {

LabeledEnsemble orthogonal_pair() {
  return LabeledEnsemble(
      Ensemble({{0.3, DensityMatrix::basis_state(2, 0)}, {0.7, DensityMatrix::basis_state(2, 1)}}));
}

LabeledEnsemble identical(int n, const DensityMatrix& rho) {
  std::vector<EnsembleMember> members;
  for (int j = 0; j < n; ++j) members.push_back({1.0 / n, rho});
  return LabeledEnsemble(Ensemble(std::move(members)));
}

LabeledEnsemble random_labeled(int d, int n, Rng& rng) {
  std::vector<EnsembleMember> members;
  const auto p = random_simplex(n, rng);
  for (int j = 0; j < n; ++j) {
    members.push_back({p[static_cast<std::size_t>(j)], random_density_matrix(d, rng.between(1, d), rng)});
  }
  return LabeledEnsemble(Ensemble(std::move(members)));
}

}  // namespace

TEST(pgm_fcl_value, examples) {
  EXPECT_NEAR(pgm_fcl_value(orthogonal_pair()), 1.0, 1e-12);
  EXPECT_NEAR(pgm_fcl_value(LabeledEnsemble(Ensemble::single(DensityMatrix::maximally_mixed(3)))), 1.0, 1e-12);
  EXPECT_NEAR(pgm_fcl_value(identical(2, DensityMatrix::maximally_mixed(2))), 0.5, 1e-12);
}

TEST(pgm_fcl_value, equals_discrimination_success) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = random_labeled(rng.between(2, 4), rng.between(1, 4), rng);
    EXPECT_NEAR(pgm_fcl_value(e), discrimination_success(e, pgm_povm(e)), 1e-9);
  }
}

TEST(normalization_identity_residual, is_small) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = random_labeled(rng.between(2, 5), rng.between(1, 4), rng);
    EXPECT_LT(normalization_identity_residual(e), 1e-9);
  }
}

TEST(error_probability_bound, examples_and_consistency) {
  EXPECT_NEAR(error_probability_bound(orthogonal_pair()), 0.0, 1e-12);
  EXPECT_NEAR(error_probability_bound(identical(2, DensityMatrix::maximally_mixed(2))), 1.0, 1e-12);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = random_labeled(rng.between(2, 4), rng.between(1, 4), rng);
    EXPECT_NEAR(error_probability_bound(e), 2.0 * (1.0 - pgm_fcl_value(e)), 1e-9);
    // Twice the PGM error dominates the PGM error itself.
    EXPECT_GE(error_probability_bound(e) + 1e-12, 1.0 - pgm_fcl_value(e));
  }
}

TEST(bures_lower_bound, examples) {
  EXPECT_NEAR(bures_lower_bound(orthogonal_pair()), 1.0, 1e-12);
  EXPECT_NEAR(bures_lower_bound(identical(2, DensityMatrix::maximally_mixed(2))), 0.0, 1e-9);
  // Uniform triple: 1 - 6 * (1/3) = -1, reported unclipped.
  EXPECT_NEAR(bures_lower_bound(identical(3, DensityMatrix::basis_state(2, 0))), -1.0, 1e-9);
  const LabeledEnsemble zero_plus(
      Ensemble({{0.5, DensityMatrix::basis_state(2, 0)}, {0.5, DensityMatrix::pure(test::plus_ket())}}));
  EXPECT_NEAR(bures_lower_bound(zero_plus), 1.0 - 1.0 / std::sqrt(2.0), 1e-9);
  const double pgm = pgm_fcl_value(zero_plus);
  EXPECT_GE(pgm * pgm, bures_lower_bound(zero_plus));
}

TEST(bures_lower_bound, below_pgm_value) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto e = random_labeled(rng.between(2, 4), rng.between(1, 4), rng);
    const double bound = bures_lower_bound(e);
    const double pgm = pgm_fcl_value(e);
    EXPECT_LE(bound, pgm + 1e-8);
    EXPECT_LE(bound, pgm * pgm + 1e-8);
  }
}

TEST(bures_lower_bound, below_square_of_helstrom_optimum) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = random_labeled(rng.between(2, 4), 2, rng);
    const double opt = test::helstrom_success(e.p(0), e.state(0), e.p(1), e.state(1));
    EXPECT_LE(bures_lower_bound(e), opt * opt + 1e-8);
  }
}

TEST(block_sqrt_inequality_check, all_ones) {
  const auto check = block_sqrt_inequality_check(Matrix::Ones(2, 2), 1);
  EXPECT_NEAR(check.lhs, 0.5, 1e-12);
  EXPECT_NEAR(check.rhs, 1.0, 1e-12);
  EXPECT_TRUE(check.pass);
}

TEST(block_sqrt_inequality_check, block_diagonal_is_zero) {
  Rng rng(6);
  Matrix m = Matrix::Zero(5, 5);
  m.topLeftCorner(2, 2) = test::random_psd(2, 2, rng);
  m.bottomRightCorner(3, 3) = test::random_psd(3, 2, rng);
  const auto check = block_sqrt_inequality_check(m, 2);
  EXPECT_NEAR(check.lhs, 0.0, 1e-12);
  EXPECT_NEAR(check.rhs, 0.0, 1e-12);
  EXPECT_TRUE(check.pass);
}

TEST(block_sqrt_inequality_check, random_psd) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.between(2, 8);
    const Matrix m = test::random_psd(n, rng.between(1, n), rng);
    const auto check = block_sqrt_inequality_check(m, rng.between(1, n - 1));
    EXPECT_TRUE(check.pass) << check.lhs << " > " << check.rhs;
  }
}

TEST(block_sqrt_inequality_check, errors) {
  EXPECT_THROW(block_sqrt_inequality_check(Matrix::Identity(3, 3), 0), DimensionError);
  EXPECT_THROW(block_sqrt_inequality_check(Matrix::Identity(3, 3), 3), DimensionError);
  EXPECT_THROW(block_sqrt_inequality_check(Matrix::Identity(2, 3), 1), DimensionError);
}
