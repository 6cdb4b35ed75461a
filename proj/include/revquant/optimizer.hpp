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

// Numerical search over trace-preserving completely positive reversals R for
// the largest average entanglement fidelity of R o A.
//
// R is parameterized by a Stinespring isometry V (rank * d_R_out x d_R_in)
// whose row blocks are the Kraus operators. Ascent is projected gradient on
// the Stiefel manifold with a QR retraction, so every iterate is exactly CPTP
// up to roundoff. Steps use a backtracking line search that halves from 1 and
// only accepts strict increases.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "revquant/channels.hpp"
#include "revquant/fidelities.hpp"
#include "revquant/reversal.hpp"

namespace revquant {

/// F(V) = sum_l p_l sum_{k,j} |tr(R_k A_j rho_l)|^2 with R_k the row blocks of V.
class ReversalObjective {
 public:
  ReversalObjective(const KrausChannel& a, const Ensemble& e)
      : d_in_r_(a.d_out()), d_out_r_(a.d_in()) {
    if (a.d_in() != e.dim()) throw DimensionError("ReversalObjective: dimension mismatch");
    for (const auto& m : e.members()) {
      if (m.p == 0.0) continue;
      for (const auto& aj : a.operators()) {
        weights_.push_back(m.p);
        // tr(R C) = sum(R .* C^T); store C^T.
        products_t_.push_back((aj * m.rho.matrix()).transpose());
      }
    }
  }

  /// Input dimension of R (the output dimension of A).
  int reversal_input_dim() const { return d_in_r_; }
  /// Output dimension of R (the input dimension of A).
  int reversal_output_dim() const { return d_out_r_; }

  double value(const Matrix& v) const {
    check(v);
    double f = 0.0;
    const Eigen::Index rank = v.rows() / d_out_r_;
    for (Eigen::Index k = 0; k < rank; ++k) {
      const auto r = v.block(k * d_out_r_, 0, d_out_r_, d_in_r_);
      for (std::size_t t = 0; t < products_t_.size(); ++t) {
        f += weights_[t] * std::norm(r.cwiseProduct(products_t_[t]).sum());
      }
    }
    return f;
  }

  /// Euclidean gradient with respect to the real and imaginary parts of V,
  /// packed as a complex matrix: dF = Re tr(grad^dagger dV).
  Matrix gradient(const Matrix& v) const {
    check(v);
    Matrix g = Matrix::Zero(v.rows(), v.cols());
    const Eigen::Index rank = v.rows() / d_out_r_;
    for (Eigen::Index k = 0; k < rank; ++k) {
      const auto r = v.block(k * d_out_r_, 0, d_out_r_, d_in_r_);
      auto gk = g.block(k * d_out_r_, 0, d_out_r_, d_in_r_);
      for (std::size_t t = 0; t < products_t_.size(); ++t) {
        const Complex tr = r.cwiseProduct(products_t_[t]).sum();
        gk += (2.0 * weights_[t] * tr) * products_t_[t].conjugate();
      }
    }
    return g;
  }

 private:
  void check(const Matrix& v) const {
    if (v.cols() != d_in_r_ || v.rows() % d_out_r_ != 0) {
      throw DimensionError("ReversalObjective: isometry has the wrong shape");
    }
  }

  int d_in_r_;
  int d_out_r_;
  std::vector<double> weights_;
  std::vector<Matrix> products_t_;
};

/// Ambient gradient of F at the Stinespring isometry of R.
inline Matrix fidelity_gradient(const KrausChannel& a, const Ensemble& e, const KrausChannel& r) {
  return ReversalObjective(a, e).gradient(stinespring_isometry(r));
}

/// Projection onto the tangent space of the Stiefel manifold at V.
inline Matrix stiefel_tangent(const Matrix& v, const Matrix& g) {
  const Matrix vg = v.adjoint() * g;
  return g - v * (0.5 * (vg + vg.adjoint()));
}

/// Q factor of a thin QR with R's diagonal made positive.
inline Matrix qr_retract(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const Complex rkk = qr.matrixQR()(k, k);
    const double mag = std::abs(rkk);
    if (mag > 0.0) q.col(k) *= rkk / mag;
  }
  return q;
}

struct TracePoint {
  int iteration;
  double value;
};

struct OptimizerOptions {
  int budget = 200;          // iterations per start
  int restarts = 2;          // seeded random starts
  int kraus_rank = 0;        // 0 selects d_R_in * d_R_out
  bool start_from_reversal = true;
  bool start_from_identity = true;
  double gradient_tol = 1e-10;
  int max_halvings = 50;
};

struct StartReport {
  enum class Kind { kReversal, kIdentity, kRandom } kind;
  std::uint64_t seed;
  std::vector<TracePoint> trace;  // accepted iterates, non-decreasing
  double best_value;
  bool converged;
  int iterations;
};

struct OptimizerReport {
  KrausChannel best_channel;
  double best_value;
  /// Accepted iterates of the start that produced best_channel.
  std::vector<TracePoint> objective_trace;
  std::vector<StartReport> starts;
  /// Objective at every CPTP candidate evaluated (iterates and line-search
  /// trials, all starts).
  std::vector<double> evaluated;
  /// Largest ||V^dagger V - I||_F over all evaluated candidates.
  double max_tp_defect;
  bool converged;
  std::uint64_t seed;
  int iterations_used;
};

/// Pads a Kraus list with null operators up to `rank` and stacks it.
inline std::optional<Matrix> isometry_with_rank(const KrausChannel& r, int rank) {
  const KrausChannel minimal = r.size() > static_cast<std::size_t>(rank) ? minimal_kraus(r) : r;
  if (minimal.size() > static_cast<std::size_t>(rank)) return std::nullopt;
  Matrix v = Matrix::Zero(static_cast<Eigen::Index>(rank) * minimal.d_out(), minimal.d_in());
  v.topRows(static_cast<Eigen::Index>(minimal.size()) * minimal.d_out()) = stinespring_isometry(minimal);
  return qr_retract(v);
}

/// Maximizes avg_entanglement_fidelity(E, R o A) over CPTP R. The result is a
/// feasible point, hence a lower bound on the optimum. `on_candidate`, when
/// set, sees every evaluated candidate channel and its objective.
inline OptimizerReport optimize_reversal(
    const KrausChannel& a, const Ensemble& e, std::uint64_t seed, const OptimizerOptions& opts = {},
    const std::function<void(const KrausChannel&, double)>& on_candidate = {}) {
  if (opts.budget < 1) throw Error("optimize_reversal: budget must be at least 1");
  const ReversalObjective objective(a, e);
  const int m = objective.reversal_input_dim();
  const int d = objective.reversal_output_dim();
  const int rank = opts.kraus_rank > 0 ? opts.kraus_rank : m * d;
  if (rank * d < m) throw DimensionError("optimize_reversal: Kraus rank too small for a TP map");

  struct Start {
    StartReport::Kind kind;
    std::uint64_t seed;
    Matrix v;
  };
  std::vector<Start> starts;
  if (opts.start_from_reversal) {
    if (auto v = isometry_with_rank(near_optimal_reversal(a, e).channel, rank)) {
      starts.push_back({StartReport::Kind::kReversal, seed, *v});
    }
  }
  if (opts.start_from_identity) {
    if (auto v = isometry_with_rank(identity_completion(m, d), rank)) {
      starts.push_back({StartReport::Kind::kIdentity, seed, *v});
    }
  }
  for (int k = 0; k < opts.restarts; ++k) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
    Rng rng(s);
    starts.push_back({StartReport::Kind::kRandom, s, haar_isometry(rank * d, m, rng)});
  }
  if (starts.empty()) throw Error("optimize_reversal: no starting point");

  OptimizerReport report{identity_completion(m, d), -1.0, {}, {}, {}, 0.0, false, seed, 0};
  const Matrix eye = Matrix::Identity(m, m);
  auto evaluate = [&](const Matrix& v) {
    const double f = objective.value(v);
    report.evaluated.push_back(f);
    report.max_tp_defect = std::max(report.max_tp_defect, (v.adjoint() * v - eye).norm());
    if (on_candidate) on_candidate(from_stinespring(v, d, false), f);
    return f;
  };

  Matrix best_v;
  for (const auto& start : starts) {
    StartReport sr{start.kind, start.seed, {}, 0.0, false, 0};
    Matrix v = start.v;
    double f = evaluate(v);
    sr.trace.push_back({0, f});
    Matrix prev_v, prev_step;
    for (int it = 1; it <= opts.budget; ++it) {
      const Matrix step = stiefel_tangent(v, objective.gradient(v));
      if (step.norm() < opts.gradient_tol) {
        sr.converged = true;
        break;
      }
      bool accepted = false;
      // Barzilai-Borwein trial step, then halve until the objective increases.
      double alpha = 1.0;
      if (prev_v.size() > 0) {
        const Matrix s = v - prev_v;
        const Matrix y = prev_step - step;
        const double sy = std::abs((s.adjoint() * y).trace().real());
        if (sy > 0.0) alpha = std::clamp(s.squaredNorm() / sy, 1e-3, 1e6);
      }
      prev_v = v;
      prev_step = step;
      for (int h = 0; h < opts.max_halvings; ++h, alpha *= 0.5) {
        const Matrix trial = qr_retract(v + alpha * step);
        const double ft = evaluate(trial);
        if (ft > f) {
          v = trial;
          f = ft;
          accepted = true;
          break;
        }
      }
      sr.iterations = it;
      if (!accepted) {
        sr.converged = true;
        break;
      }
      sr.trace.push_back({it, f});
    }
    sr.best_value = f;
    report.iterations_used += sr.iterations;
    if (f > report.best_value) {
      report.best_value = f;
      report.objective_trace = sr.trace;
      report.converged = sr.converged;
      best_v = v;
    }
    report.starts.push_back(std::move(sr));
  }
  // Re-orthonormalized once more so the TP flag holds at 1e-8.
  report.best_channel = from_stinespring(qr_retract(best_v), d).normalized();
  return report;
}

// --- Choi-space projection -----------------------------------------------------

struct CptpProjection {
  ChoiMatrix choi;
  int sweeps;
  double tp_residual;
  double psd_residual;
  bool converged;
};

/// Alternating projection between the PSD cone (eigenvalue clipping) and the
/// affine set tr_out J = I (J -> J - (tr_out J - I) (x) I / d_out). Stops when
/// both residuals are below 1e-9 or after max_sweeps.
inline CptpProjection cptp_project(const Matrix& j_in, int d_in, int d_out, int max_sweeps = 1000) {
  if (j_in.rows() != d_in * d_out || j_in.cols() != d_in * d_out) {
    throw DimensionError("cptp_project: Choi matrix has the wrong size");
  }
  require_hermitian(j_in, "cptp_project");
  Matrix j = 0.5 * (j_in + j_in.adjoint());
  const Matrix eye_in = Matrix::Identity(d_in, d_in);
  const Matrix eye_out = Matrix::Identity(d_out, d_out);
  CptpProjection out{{d_in, d_out, j}, 0, 0.0, 0.0, false};
  for (int s = 1; s <= max_sweeps; ++s) {
    const auto eig = hermitian_eig(j);
    const RealVector clipped = eig.values.cwiseMax(0.0);
    j = eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    const Matrix excess = partial_trace_second(j, d_in, d_out) - eye_in;
    j -= kron(excess, eye_out) / static_cast<double>(d_out);
    j = 0.5 * (j + j.adjoint());
    out.sweeps = s;
    out.tp_residual = (partial_trace_second(j, d_in, d_out) - eye_in).norm();
    out.psd_residual = std::max(0.0, -hermitian_eig(j).values.minCoeff());
    if (out.tp_residual < 1e-9 && out.psd_residual < 1e-9) {
      out.converged = true;
      break;
    }
  }
  out.choi.J = j;
  return out;
}

}  // namespace revquant
