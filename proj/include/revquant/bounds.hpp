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

#pragma once

// Classical-fidelity bounds for discriminating the members of a labelled
// ensemble.

#include <cmath>
#include <sstream>

#include "revquant/fidelities.hpp"
#include "revquant/pgm.hpp"

namespace revquant {

/// G_ij = tr(rho_out^{-1/2} rho_i rho_out^{-1/2} rho_j) for unnormalized rho_j.
inline Eigen::MatrixXd pgm_overlap_matrix(const LabeledEnsemble& e) {
  const Matrix inv_sqrt = psd_pinv_sqrt(e.output_state().matrix());
  const int n = e.n_labels();
  std::vector<Matrix> distorted;
  for (int j = 0; j < n; ++j) distorted.push_back(inv_sqrt * e.unnormalized(j) * inv_sqrt);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = (distorted[static_cast<std::size_t>(i)] * e.unnormalized(j)).trace().real();
  }
  return g;
}

/// Classical fidelity of the PGM: sum_j tr(rho_out^{-1/2} rho_j rho_out^{-1/2} rho_j).
inline double pgm_fcl_value(const LabeledEnsemble& e) { return pgm_overlap_matrix(e).trace(); }

/// |sum_{ij} G_ij - 1|.
inline double normalization_identity_residual(const LabeledEnsemble& e) {
  return std::abs(pgm_overlap_matrix(e).sum() - 1.0);
}

/// 2 sum_{i != j} G_ij, an upper bound on the error probability.
inline double error_probability_bound(const LabeledEnsemble& e) {
  const auto g = pgm_overlap_matrix(e);
  return 2.0 * (g.sum() - g.trace());
}

/// 1 - sum_{i != j} sqrt(p_i p_j) F_BU(rho_hat_i, rho_hat_j). Lower bound on
/// the squared optimal classical fidelity; negative values are returned
/// unclipped.
inline double bures_lower_bound(const LabeledEnsemble& e) {
  double off = 0.0;
  const auto& members = e.ensemble().members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (i == j) continue;
      off += std::sqrt(members[i].p * members[j].p) * bures_fidelity(members[i].rho, members[j].rho);
    }
  }
  return 1.0 - off;
}

struct BlockSqrtCheck {
  double lhs;  // ||y||_2^2, y the lower-left block of M^{1/2}
  double rhs;  // ||b||_1,  b the lower-left block of M
  bool pass;
};

/// Partition M = [[a, b^dagger], [b, c]] with a of size split x split and
/// check ||y||_F^2 <= ||b||_1 + 1e-9 for the matching block y of M^{1/2}.
inline BlockSqrtCheck block_sqrt_inequality_check(const Matrix& m, int split,
                                                   double slack = 1e-9) {
  require_square(m, "block_sqrt_inequality_check");
  const int n = static_cast<int>(m.rows());
  if (split <= 0 || split >= n) {
    std::ostringstream os;
    os << "block_sqrt_inequality_check: split " << split << " outside (0, " << n << ")";
    throw DimensionError(os.str());
  }
  const Matrix root = psd_sqrt(m);
  const Matrix y = root.bottomLeftCorner(n - split, split);
  const Matrix b = m.bottomLeftCorner(n - split, split);
  const double lhs = y.squaredNorm();
  const double rhs = trace_norm(b);
  return {lhs, rhs, lhs <= rhs + slack};
}

}  // namespace revquant
