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

// The near-optimal reversal R_{A,rho} with Kraus operators
// rho^{1/2} A_i^dagger A(rho)^{-1/2}, and perfectly reversible code channels.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "revquant/channels.hpp"

namespace revquant {

struct ReversalOptions {
  /// Extend the map off supp(A(rho)) so it is trace-preserving everywhere.
  bool complete = true;
  double tol = kPsdTolerance;
};

struct ReversalResult {
  /// Maps the output space of A back to its input space.
  KrausChannel channel;
  /// Projector onto supp(A(rho)).
  Matrix support_in;
  /// Projector onto supp(rho).
  Matrix support_out;
  bool completion_used = false;
  /// ||sum_i R_i^dagger R_i - P_supp(A(rho))||_F for the uncompleted operators.
  double support_tp_defect = 0.0;
  /// False when built from an ensemble whose members fail the commuting
  /// predicate; the near-optimality guarantee does not cover that case.
  bool ensemble_commuting = true;
};

inline ReversalResult near_optimal_reversal(const KrausChannel& a, const DensityMatrix& rho,
                                            const ReversalOptions& opts = {}) {
  if (a.d_in() != rho.dim()) {
    std::ostringstream os;
    os << "near_optimal_reversal: state dimension " << rho.dim()
       << " does not match channel input dimension " << a.d_in();
    throw DimensionError(os.str());
  }
  const Matrix out = apply_channel(a, rho.matrix());
  if (out.norm() < 1e-14) {
    throw Error("near_optimal_reversal: A(rho) is numerically zero");
  }
  const Matrix rho_sqrt = psd_sqrt(rho.matrix(), opts.tol);
  const Matrix out_pinv_sqrt = psd_pinv_sqrt(out, opts.tol);
  const Matrix support_in = support_projector(out, opts.tol);
  const Matrix support_out = support_projector(rho.matrix(), opts.tol);

  std::vector<Matrix> ops;
  ops.reserve(a.size());
  for (const auto& ai : a.operators()) ops.push_back(rho_sqrt * ai.adjoint() * out_pinv_sqrt);

  Matrix gram = Matrix::Zero(a.d_out(), a.d_out());
  for (const auto& r : ops) gram += r.adjoint() * r;
  const double defect = (gram - support_in).norm();

  bool completed = false;
  if (opts.complete) {
    const Matrix kernel = complement_basis(support_in);
    if (kernel.cols() > 0) {
      // Every vector of ker A(rho) is sent to the top eigenvector of rho.
      const Vector target = hermitian_eig(rho.matrix()).vectors.col(0);
      for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
        ops.push_back(target * kernel.col(k).adjoint());
      }
      completed = true;
    }
  }
  KrausChannel channel(a.d_out(), a.d_in(), std::move(ops), false);
  if (opts.complete) {
    if (channel.tp_defect() > kTraceTolerance) {
      std::ostringstream os;
      os << "near_optimal_reversal: completed map is not trace-preserving, defect "
         << channel.tp_defect();
      throw Error(os.str());
    }
    channel = KrausChannel(channel.d_in(), channel.d_out(), channel.operators(), true);
  }
  return {channel.normalized(), support_in, support_out, completed, defect, true};
}

/// Reversal adapted to the ensemble average; flags non-commuting ensembles.
inline ReversalResult near_optimal_reversal(const KrausChannel& a, const Ensemble& e,
                                            const ReversalOptions& opts = {}) {
  auto result = near_optimal_reversal(a, e.average(), opts);
  result.ensemble_commuting = e.commuting();
  return result;
}

struct DecompositionIndependenceReport {
  double distance;
  bool pass;
  int pad;
};

/// Builds R_{A,rho} from {A_i} and from a seeded unitary remix of {A_i}
/// padded with `pad` null operators, and compares the two by Choi distance.
inline DecompositionIndependenceReport reversal_is_decomposition_independent(
    const KrausChannel& a, const DensityMatrix& rho, std::uint64_t seed, int pad = 2,
    double tol = 1e-9) {
  const int n = static_cast<int>(a.size()) + pad;
  const Matrix u = haar_unitary(n, seed);
  const auto original = near_optimal_reversal(a, rho);
  const auto remixed = near_optimal_reversal(kraus_remix(a, u, pad), rho);
  const double dist = choi_distance(original.channel, remixed.channel);
  return {dist, dist < tol, pad};
}

struct CodeChannel {
  KrausChannel channel;
  /// Projector onto the code space C = span{|0>, ..., |code_dim - 1>}.
  Matrix code_projector;
  /// W_i with W_i^dagger W_j = delta_ij P_C.
  std::vector<Matrix> partial_isometries;
  /// True when an extra operator was appended to make the map TP off C.
  bool completed_off_code = false;
};

/// Channel with A_i P_C = sqrt(p_i) W_i, where the W_i map C into mutually
/// orthogonal subspaces (slices of a seeded Haar unitary).
inline CodeChannel make_reversible_code_channel(int d, int code_dim, int n_isometries,
                                                const std::vector<double>& probabilities,
                                                std::uint64_t seed) {
  if (code_dim < 1 || n_isometries < 1) throw Error("make_reversible_code_channel: empty code");
  if (code_dim * n_isometries > d) {
    std::ostringstream os;
    os << "make_reversible_code_channel: code_dim * n_isometries = " << code_dim * n_isometries
       << " exceeds d = " << d;
    throw DimensionError(os.str());
  }
  if (static_cast<int>(probabilities.size()) != n_isometries) {
    throw Error("make_reversible_code_channel: need one probability per isometry");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw Error("make_reversible_code_channel: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error("make_reversible_code_channel: probabilities must sum to 1");

  Rng rng(seed);
  const Matrix u = haar_unitary(d, rng);
  const Matrix embed = Matrix::Identity(d, code_dim);
  const Matrix p_code = embed * embed.adjoint();

  std::vector<Matrix> ws;
  std::vector<Matrix> ops;
  for (int i = 0; i < n_isometries; ++i) {
    Matrix w = u.middleCols(i * code_dim, code_dim) * embed.adjoint();
    ops.push_back(std::sqrt(probabilities[static_cast<std::size_t>(i)]) * w);
    ws.push_back(std::move(w));
  }
  bool completed = false;
  if (code_dim < d) {
    ops.push_back(haar_unitary(d, rng) * (Matrix::Identity(d, d) - p_code));
    completed = true;
  }
  return {KrausChannel(d, d, std::move(ops)).normalized(), p_code, std::move(ws), completed};
}

}  // namespace revquant
