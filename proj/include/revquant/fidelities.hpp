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

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "revquant/channels.hpp"

namespace revquant {

namespace detail {

inline void require_endomorphism_on(const KrausChannel& c, int dim, const char* who) {
  if (!c.square()) {
    std::ostringstream os;
    os << who << ": channel must map a space to itself, got " << c.d_in() << " -> " << c.d_out();
    throw DimensionError(os.str());
  }
  if (c.d_in() != dim) {
    std::ostringstream os;
    os << who << ": state dimension " << dim << " does not match channel dimension " << c.d_in();
    throw DimensionError(os.str());
  }
}

}  // namespace detail

/// F_e(rho, A) = sum_i |tr(A_i rho)|^2.
inline double entanglement_fidelity(const DensityMatrix& rho, const KrausChannel& c) {
  detail::require_endomorphism_on(c, rho.dim(), "entanglement_fidelity");
  double f = 0.0;
  for (const auto& a : c.operators()) f += std::norm((a * rho.matrix()).trace());
  return f;
}

/// sum_i p_i F_e(rho_i, A).
inline double avg_entanglement_fidelity(const Ensemble& e, const KrausChannel& c) {
  double f = 0.0;
  for (const auto& m : e.members()) {
    if (m.p == 0.0) continue;
    f += m.p * entanglement_fidelity(m.rho, c);
  }
  return f;
}

/// F_cl(rho, A) = sum_k lambda_k <k|A(|k><k|)|k> over an eigenbasis of rho.
/// Within degenerate eigenspaces the value depends on the basis; pass
/// `basis` (unitary, eigenvectors as columns) to pin it, otherwise the
/// hermitian_eig ordering is used.
inline double classical_fidelity(const DensityMatrix& rho, const KrausChannel& c,
                                 const std::optional<Matrix>& basis = std::nullopt) {
  detail::require_endomorphism_on(c, rho.dim(), "classical_fidelity");
  const Matrix v = basis ? *basis : hermitian_eig(rho.matrix()).vectors;
  if (v.rows() != rho.dim() || v.cols() != rho.dim() || !is_unitary(v, 1e-9)) {
    throw Error("classical_fidelity: basis must be unitary with matching dimension");
  }
  double f = 0.0;
  for (int k = 0; k < rho.dim(); ++k) {
    const Vector ket = v.col(k);
    const double weight = (ket.adjoint() * rho.matrix() * ket)(0, 0).real();
    if (weight <= 0.0) continue;
    const Matrix out = apply_channel(c, Matrix(ket * ket.adjoint()));
    f += weight * (ket.adjoint() * out * ket)(0, 0).real();
  }
  return f;
}

/// tr sqrt(s1^{1/2} s2 s1^{1/2}), evaluated as ||s1^{1/2} s2^{1/2}||_1.
inline double bures_fidelity(const DensityMatrix& s1, const DensityMatrix& s2) {
  if (s1.dim() != s2.dim()) throw DimensionError("bures_fidelity: dimension mismatch");
  return trace_norm(Matrix(psd_sqrt(s1.matrix()) * psd_sqrt(s2.matrix())));
}

// --- purifications and the tripartite oracle -------------------------------

/// Pure state on R (x) Q, amplitude index r * dim_q + q.
struct PurifiedState {
  int dim_r;
  int dim_q;
  Vector amplitudes;

  /// tr_R |psi><psi|.
  Matrix reduced_state() const {
    const Matrix psi = unvec(amplitudes, dim_q, dim_r);  // column r holds the Q amplitudes
    return psi * psi.adjoint();
  }
};

/// sum_k sqrt(lambda_k) |k^R>|v_k^Q> with dim_R = dim_Q.
inline PurifiedState purify(const DensityMatrix& rho) {
  const auto eig = hermitian_eig(rho.matrix());
  const int d = rho.dim();
  Vector amp = Vector::Zero(d * d);
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(0.0, eig.values(k));
    amp.segment(k * d, d) = std::sqrt(lam) * eig.vectors.col(k);
  }
  return {d, d, amp};
}

/// Reference-free purification of a pure state (dim_R = 1).
inline PurifiedState purify_pure(const DensityMatrix& rho) {
  const auto eig = hermitian_eig(rho.matrix());
  if (eig.values.size() > 1 && eig.values(1) > 1e-9) {
    throw Error("purify_pure: state is not pure");
  }
  return {1, rho.dim(), eig.vectors.col(0)};
}

/// Stinespring apply: |psi^{RQ}> -> sum_j (I_R (x) A_j)|psi>|j^E>, amplitude
/// index (r * d_out + q) * n_ops + j.
inline Vector stinespring_apply(const KrausChannel& c, const PurifiedState& psi) {
  if (psi.dim_q != c.d_in()) throw DimensionError("stinespring_apply: dimension mismatch");
  const auto n_ops = static_cast<Eigen::Index>(c.size());
  Vector out = Vector::Zero(psi.dim_r * c.d_out() * n_ops);
  for (int r = 0; r < psi.dim_r; ++r) {
    const Vector q_part = psi.amplitudes.segment(r * psi.dim_q, psi.dim_q);
    for (Eigen::Index j = 0; j < n_ops; ++j) {
      const Vector img = c[static_cast<std::size_t>(j)] * q_part;
      for (int q = 0; q < c.d_out(); ++q) out((r * c.d_out() + q) * n_ops + j) = img(q);
    }
  }
  return out;
}

enum class RqsCorrelation {
  kClassical,  // sum_i p_i |i^S><i^S| (x) |psi_i><psi_i|
  kEntangled,  // |psi_0^{RQS}> = sum_i sqrt(p_i) |i^S>|psi_i>
};

inline constexpr long kRqsAmplitudeCap = 4096;

/// Average entanglement fidelity as the probability that the final S(x)R(x)Q
/// state lies in span{|i^S>|psi_i^{RQ}>}, computed on explicit state vectors
/// with the environment kept. Independent of the Kraus-trace formula.
inline double avg_fidelity_rqs(const std::vector<double>& probabilities,
                               const std::vector<PurifiedState>& purifications,
                               const KrausChannel& c,
                               RqsCorrelation correlation = RqsCorrelation::kClassical) {
  if (probabilities.size() != purifications.size() || purifications.empty()) {
    throw Error("avg_fidelity_rqs: probabilities and purifications differ in length");
  }
  if (!c.square()) throw DimensionError("avg_fidelity_rqs: channel must be square");
  const int n = static_cast<int>(purifications.size());
  const int dim_r = purifications.front().dim_r;
  const int dim_q = purifications.front().dim_q;
  for (const auto& p : purifications) {
    if (p.dim_r != dim_r || p.dim_q != dim_q) {
      throw DimensionError("avg_fidelity_rqs: purifications differ in shape");
    }
  }
  const long n_env = static_cast<long>(c.size());
  const long amplitudes = static_cast<long>(dim_r) * dim_q * n * n_env;
  if (amplitudes > kRqsAmplitudeCap) {
    std::ostringstream os;
    os << "avg_fidelity_rqs: " << amplitudes << " amplitudes exceed the cap of "
       << kRqsAmplitudeCap;
    throw Error(os.str());
  }
  const long block = static_cast<long>(dim_r) * dim_q * n_env;  // one S branch

  // (P_c (x) I_E) acting on a full S(x)R(x)Q(x)E vector: in S-branch s, project
  // the R(x)Q factor onto |psi_s> for each environment index.
  auto projected_norm2 = [&](const Vector& full) {
    double total = 0.0;
    for (int s = 0; s < n; ++s) {
      const auto& ref = purifications[static_cast<std::size_t>(s)].amplitudes;
      for (long e = 0; e < n_env; ++e) {
        Complex overlap = 0.0;
        for (long rq = 0; rq < static_cast<long>(dim_r) * dim_q; ++rq) {
          overlap += std::conj(ref(rq)) * full(s * block + rq * n_env + e);
        }
        total += std::norm(overlap);
      }
    }
    return total;
  };

  auto branch = [&](int i) {
    Vector full = Vector::Zero(n * block);
    full.segment(i * block, block) = stinespring_apply(c, purifications[static_cast<std::size_t>(i)]);
    return full;
  };

  if (correlation == RqsCorrelation::kClassical) {
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = probabilities[static_cast<std::size_t>(i)];
      if (p == 0.0) continue;
      f += p * projected_norm2(branch(i));
    }
    return f;
  }
  Vector full = Vector::Zero(n * block);
  for (int i = 0; i < n; ++i) {
    full += std::sqrt(probabilities[static_cast<std::size_t>(i)]) * branch(i);
  }
  return projected_norm2(full);
}

struct RqsOptions {
  RqsCorrelation correlation = RqsCorrelation::kClassical;
  /// Drop R entirely (dim_R = 1); every member must be pure.
  bool suppress_reference = false;
};

/// Tripartite oracle for the average entanglement fidelity using the canonical
/// eigen-purification of each member.
inline double avg_fidelity_rqs_oracle(const Ensemble& e, const KrausChannel& c,
                                      const RqsOptions& opts = {}) {
  detail::require_endomorphism_on(c, e.dim(), "avg_fidelity_rqs_oracle");
  std::vector<double> probs;
  std::vector<PurifiedState> purifications;
  for (const auto& m : e.members()) {
    probs.push_back(m.p);
    purifications.push_back(opts.suppress_reference ? purify_pure(m.rho) : purify(m.rho));
  }
  return avg_fidelity_rqs(probs, purifications, c, opts.correlation);
}

}  // namespace revquant
