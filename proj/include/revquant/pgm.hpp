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

// Pretty good measurement, the classicizing channel |j> -> rho_hat_j and its
// reversal.

#include <cmath>
#include <vector>

#include "revquant/channels.hpp"

namespace revquant {

inline constexpr double kSpectralFloor = 1e-12;

/// Ensemble {p_j, rho_hat_j} whose members are labelled by the computational
/// basis |j> of C^n, n = number of members.
class LabeledEnsemble {
 public:
  struct SpectralTerm {
    int label;
    double lambda;
    Vector v;
  };

  explicit LabeledEnsemble(Ensemble e) : e_(std::move(e)) {}

  const Ensemble& ensemble() const { return e_; }
  int n_labels() const { return static_cast<int>(e_.size()); }
  int dim() const { return e_.dim(); }
  double p(int j) const { return e_[static_cast<std::size_t>(j)].p; }
  const Matrix& state(int j) const { return e_[static_cast<std::size_t>(j)].rho.matrix(); }

  /// rho_j = p_j rho_hat_j.
  Matrix unnormalized(int j) const { return p(j) * state(j); }

  std::vector<Matrix> unnormalized_states() const {
    std::vector<Matrix> out;
    for (int j = 0; j < n_labels(); ++j) out.push_back(unnormalized(j));
    return out;
  }

  /// rho_out = sum_j rho_j.
  DensityMatrix output_state() const { return e_.average(); }

  /// sum_j p_j |j><j| on the label space.
  DensityMatrix label_state() const {
    RealVector ps(n_labels());
    for (int j = 0; j < n_labels(); ++j) ps(j) = p(j);
    return DensityMatrix(Matrix(ps.cast<Complex>().asDiagonal()));
  }

  /// Spectral decompositions rho_hat_j = sum_i lambda_ij |v_ij><v_ij|, terms
  /// with lambda_ij below kSpectralFloor omitted.
  std::vector<SpectralTerm> spectral_terms() const {
    std::vector<SpectralTerm> terms;
    for (int j = 0; j < n_labels(); ++j) {
      const auto eig = hermitian_eig(state(j));
      for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) < kSpectralFloor) continue;
        terms.push_back({j, eig.values(i), eig.vectors.col(i)});
      }
    }
    return terms;
  }

 private:
  Ensemble e_;
};

struct Povm {
  std::vector<Matrix> elements;
  /// The operator the elements sum to (support projector of rho_out).
  Matrix target;

  double completeness_defect() const {
    Matrix s = Matrix::Zero(target.rows(), target.cols());
    for (const auto& x : elements) s += x;
    return (s - target).norm();
  }
};

/// X_j = rho_out^{-1/2} rho_j rho_out^{-1/2} for unnormalized states rho_j,
/// rho_out = sum_j rho_j.
inline Povm pgm_elements(const std::vector<Matrix>& unnormalized, double tol = kPsdTolerance) {
  if (unnormalized.empty()) throw Error("pgm_elements: empty ensemble");
  Matrix total = Matrix::Zero(unnormalized.front().rows(), unnormalized.front().cols());
  for (const auto& r : unnormalized) total += r;
  const Matrix inv_sqrt = psd_pinv_sqrt(total, tol);
  Povm povm{{}, support_projector(total, tol)};
  for (const auto& r : unnormalized) {
    Matrix x = inv_sqrt * r * inv_sqrt;
    povm.elements.push_back(0.5 * (x + x.adjoint()));
  }
  return povm;
}

inline Povm pgm_povm(const LabeledEnsemble& e) { return pgm_elements(e.unnormalized_states()); }

/// A ~ { sqrt(lambda_ij) |v_ij><j| }: measures |j> and prepares rho_hat_j.
inline KrausChannel classicizing_channel(const LabeledEnsemble& e) {
  std::vector<Matrix> ops;
  for (const auto& t : e.spectral_terms()) {
    Matrix a = Matrix::Zero(e.dim(), e.n_labels());
    a.col(t.label) = std::sqrt(t.lambda) * t.v;
    ops.push_back(std::move(a));
  }
  return KrausChannel(e.n_labels(), e.dim(), std::move(ops));
}

struct ClassicizingReversal {
  /// Maps C^d back to the label space; trace-preserving on supp(rho_out).
  KrausChannel channel;
  /// labels[k] is the label j of operator k.
  std::vector<int> labels;
};

/// R_ij = sqrt(p_j) sqrt(lambda_ij) |j><v_ij| rho_out^{-1/2}.
inline ClassicizingReversal classicizing_reversal(const LabeledEnsemble& e,
                                                  double tol = kPsdTolerance) {
  const Matrix inv_sqrt = psd_pinv_sqrt(e.output_state().matrix(), tol);
  std::vector<Matrix> ops;
  std::vector<int> labels;
  for (const auto& t : e.spectral_terms()) {
    Matrix r = Matrix::Zero(e.n_labels(), e.dim());
    r.row(t.label) = std::sqrt(e.p(t.label) * t.lambda) * (t.v.adjoint() * inv_sqrt);
    ops.push_back(std::move(r));
    labels.push_back(t.label);
  }
  return {KrausChannel(e.dim(), e.n_labels(), std::move(ops), false), std::move(labels)};
}

/// sum_i R_ij^dagger R_ij for each label j.
inline std::vector<Matrix> grouped_effects(const ClassicizingReversal& r, int n_labels) {
  const int d = r.channel.d_in();
  std::vector<Matrix> out(static_cast<std::size_t>(n_labels), Matrix::Zero(d, d));
  for (std::size_t k = 0; k < r.channel.size(); ++k) {
    out[static_cast<std::size_t>(r.labels[k])] += r.channel[k].adjoint() * r.channel[k];
  }
  return out;
}

/// sum_j p_j tr(X_j rho_hat_j).
inline double discrimination_success(const LabeledEnsemble& e, const Povm& povm) {
  if (static_cast<int>(povm.elements.size()) != e.n_labels()) {
    throw DimensionError("discrimination_success: one POVM element per label is required");
  }
  double s = 0.0;
  for (int j = 0; j < e.n_labels(); ++j) {
    const auto& x = povm.elements[static_cast<std::size_t>(j)];
    if (x.rows() != e.dim()) throw DimensionError("discrimination_success: dimension mismatch");
    s += e.p(j) * (x * e.state(j)).trace().real();
  }
  return s;
}

}  // namespace revquant
