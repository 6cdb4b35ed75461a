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

// Completely positive maps in Kraus and Choi form, density matrices and
// ensembles.
//
// Conventions:
//   * vec() stacks columns: vec(A)[k * d_out + m] = A(m, k) for a d_out x d_in
//     operator. This is Eigen's column-major storage order.
//   * The Choi matrix is J = sum_{kl} |k><l| (x) A(|k><l|), input factor first,
//     so J = sum_i vec(A_i) vec(A_i)^dagger.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "revquant/linalg.hpp"

namespace revquant {

inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kNullOperatorNorm = 1e-12;
inline constexpr double kCommutingTolerance = 1e-8;

/// Positive semi-definite unit-trace Hermitian matrix.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(const Matrix& m) {
    require_hermitian(m, "DensityMatrix");
    Matrix sym = 0.5 * (m + m.adjoint());
    const double tr = sym.trace().real();
    if (std::abs(tr - 1.0) > kTolerance) {
      std::ostringstream os;
      os << "DensityMatrix: trace is " << tr << ", expected 1";
      throw Error(os.str());
    }
    const double lowest = hermitian_eig(sym).values.minCoeff();
    if (lowest < -kTolerance) {
      std::ostringstream os;
      os << "DensityMatrix: not PSD, eigenvalue " << lowest;
      throw NotPsdError(lowest, os.str());
    }
    m_ = std::move(sym);
  }

  static DensityMatrix pure(const Vector& psi) {
    const Vector unit = psi / psi.norm();
    return DensityMatrix(unit * unit.adjoint());
  }

  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
  }

  static DensityMatrix basis_state(int d, int k) {
    Vector e = Vector::Zero(d);
    e(k) = 1.0;
    return pure(e);
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Kraus decomposition {A_i} of a completely positive map C^{d_in} -> C^{d_out}.
class KrausChannel {
 public:
  KrausChannel(int d_in, int d_out, std::vector<Matrix> operators,
               bool trace_preserving = true)
      : d_in_(d_in), d_out_(d_out), ops_(std::move(operators)), tp_(trace_preserving) {
    if (d_in < 1 || d_out < 1) throw DimensionError("KrausChannel: dimensions must be positive");
    if (ops_.empty()) throw Error("KrausChannel: at least one Kraus operator is required");
    for (const auto& a : ops_) {
      if (a.rows() != d_out || a.cols() != d_in) {
        std::ostringstream os;
        os << "KrausChannel: operator is " << a.rows() << "x" << a.cols() << ", expected "
           << d_out << "x" << d_in;
        throw DimensionError(os.str());
      }
      if (!a.allFinite()) throw Error("KrausChannel: non-finite entry");
    }
    if (tp_) {
      const double defect = tp_defect();
      if (defect > kTraceTolerance) {
        std::ostringstream os;
        os << "KrausChannel: flagged trace-preserving but ||sum A^dagger A - I||_F = "
           << defect;
        throw Error(os.str());
      }
    }
  }

  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  std::size_t size() const { return ops_.size(); }
  const std::vector<Matrix>& operators() const { return ops_; }
  const Matrix& operator[](std::size_t i) const { return ops_[i]; }
  bool trace_preserving() const { return tp_; }
  bool square() const { return d_in_ == d_out_; }

  /// sum_i A_i^dagger A_i.
  Matrix completeness() const {
    Matrix s = Matrix::Zero(d_in_, d_in_);
    for (const auto& a : ops_) s += a.adjoint() * a;
    return s;
  }

  double tp_defect() const {
    return (completeness() - Matrix::Identity(d_in_, d_in_)).norm();
  }

  /// Drops operators with Frobenius norm below kNullOperatorNorm, keeping at
  /// least one.
  KrausChannel normalized() const {
    std::vector<Matrix> kept;
    for (const auto& a : ops_) {
      if (a.norm() >= kNullOperatorNorm) kept.push_back(a);
    }
    if (kept.empty()) kept.push_back(Matrix::Zero(d_out_, d_in_));
    return KrausChannel(d_in_, d_out_, std::move(kept), tp_);
  }

 private:
  int d_in_;
  int d_out_;
  std::vector<Matrix> ops_;
  bool tp_;
};

/// Choi matrix with input factor first.
struct ChoiMatrix {
  int d_in;
  int d_out;
  Matrix J;

  /// Partial trace over the output factor; the identity for TP maps.
  Matrix output_traced() const { return partial_trace_second(J, d_in, d_out); }

  double tp_defect() const {
    return (output_traced() - Matrix::Identity(d_in, d_in)).norm();
  }

  /// max(0, -lambda_min(J)).
  double cp_defect() const {
    return std::max(0.0, -hermitian_eig(J).values.minCoeff());
  }

  bool is_cptp(double tol) const { return tp_defect() <= tol && cp_defect() <= tol; }
};

inline Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

inline Matrix unvec(const Vector& v, int rows, int cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// --- construction ----------------------------------------------------------

inline KrausChannel identity_channel(int d) {
  return KrausChannel(d, d, {Matrix::Identity(d, d)});
}

inline KrausChannel unitary_channel(const Matrix& u) {
  if (!is_unitary(u, 1e-9)) throw Error("unitary_channel: operator is not unitary");
  const int d = static_cast<int>(u.rows());
  return KrausChannel(d, d, {u});
}

namespace pauli {
inline Matrix I() { return Matrix::Identity(2, 2); }
inline Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix Y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

/// rho -> (1 - p) rho + p I/2.
inline KrausChannel depolarizing_qubit(double p) {
  if (p < 0.0 || p > 4.0 / 3.0) throw Error("depolarizing_qubit: p outside [0, 4/3]");
  return KrausChannel(2, 2,
                      {std::sqrt(1.0 - 3.0 * p / 4.0) * pauli::I(),
                       std::sqrt(p / 4.0) * pauli::X(), std::sqrt(p / 4.0) * pauli::Y(),
                       std::sqrt(p / 4.0) * pauli::Z()});
}

/// {sqrt(1-q) I, sqrt(q) Z}.
inline KrausChannel dephasing_qubit(double q) {
  if (q < 0.0 || q > 1.0) throw Error("dephasing_qubit: q outside [0, 1]");
  return KrausChannel(2, 2, {std::sqrt(1.0 - q) * pauli::I(), std::sqrt(q) * pauli::Z()});
}

/// {sqrt(1-p) I, sqrt(p) X}.
inline KrausChannel bit_flip_qubit(double p) {
  if (p < 0.0 || p > 1.0) throw Error("bit_flip_qubit: p outside [0, 1]");
  return KrausChannel(2, 2, {std::sqrt(1.0 - p) * pauli::I(), std::sqrt(p) * pauli::X()});
}

/// rho -> tr(rho) I/d_out, with Kraus operators |m><k| / sqrt(d_out).
inline KrausChannel completely_depolarizing(int d_in, int d_out) {
  std::vector<Matrix> ops;
  for (int k = 0; k < d_in; ++k) {
    for (int m = 0; m < d_out; ++m) {
      Matrix a = Matrix::Zero(d_out, d_in);
      a(m, k) = 1.0 / std::sqrt(static_cast<double>(d_out));
      ops.push_back(std::move(a));
    }
  }
  return KrausChannel(d_in, d_out, std::move(ops));
}

/// TP map C^{d_from} -> C^{d_to}: the rectangular identity on the first
/// min(d_from, d_to) basis states, with inputs beyond d_to sent to |0>.
inline KrausChannel identity_completion(int d_from, int d_to) {
  std::vector<Matrix> ops{Matrix::Identity(d_to, d_from)};
  for (int k = d_to; k < d_from; ++k) {
    Matrix a = Matrix::Zero(d_to, d_from);
    a(0, k) = 1.0;
    ops.push_back(std::move(a));
  }
  return KrausChannel(d_from, d_to, std::move(ops));
}

/// Stinespring form: the Kraus operators stacked as row blocks of an
/// (n_ops * d_out) x d_in matrix, an isometry for TP channels.
inline Matrix stinespring_isometry(const KrausChannel& c) {
  Matrix v(static_cast<Eigen::Index>(c.size()) * c.d_out(), c.d_in());
  for (std::size_t i = 0; i < c.size(); ++i) {
    v.block(static_cast<Eigen::Index>(i) * c.d_out(), 0, c.d_out(), c.d_in()) = c[i];
  }
  return v;
}

inline KrausChannel from_stinespring(const Matrix& v, int d_out, bool trace_preserving = true) {
  if (v.rows() % d_out != 0) throw DimensionError("from_stinespring: rows not a multiple of d_out");
  const int d_in = static_cast<int>(v.cols());
  std::vector<Matrix> ops;
  for (Eigen::Index r = 0; r < v.rows(); r += d_out) ops.push_back(v.block(r, 0, d_out, d_in));
  return KrausChannel(d_in, d_out, std::move(ops), trace_preserving);
}

/// Trace-preserving channel from a Haar-random isometry
/// C^{d_in} -> C^{d_out} (x) C^{kraus_rank}.
inline KrausChannel random_channel(int d_in, int d_out, int kraus_rank, std::uint64_t seed) {
  if (kraus_rank < 1) throw Error("random_channel: kraus_rank must be at least 1");
  if (d_out * kraus_rank < d_in) {
    throw DimensionError("random_channel: d_out * kraus_rank must be at least d_in");
  }
  Rng rng(seed);
  return from_stinespring(haar_isometry(d_out * kraus_rank, d_in, rng), d_out);
}

// --- action ----------------------------------------------------------------

/// sum_i A_i m A_i^dagger for an arbitrary d_in x d_in operator m.
inline Matrix apply_channel(const KrausChannel& c, const Matrix& m) {
  if (m.rows() != c.d_in() || m.cols() != c.d_in()) {
    std::ostringstream os;
    os << "apply_channel: operator is " << m.rows() << "x" << m.cols() << ", channel input dim is "
       << c.d_in();
    throw DimensionError(os.str());
  }
  Matrix out = Matrix::Zero(c.d_out(), c.d_out());
  for (const auto& a : c.operators()) out += a * m * a.adjoint();
  return out;
}

inline DensityMatrix apply_channel(const KrausChannel& c, const DensityMatrix& rho) {
  if (!c.trace_preserving()) {
    throw Error("apply_channel: DensityMatrix output requires a trace-preserving channel");
  }
  return DensityMatrix(apply_channel(c, rho.matrix()));
}

inline ChoiMatrix to_choi(const KrausChannel& c) {
  const int n = c.d_in() * c.d_out();
  Matrix j = Matrix::Zero(n, n);
  for (const auto& a : c.operators()) {
    const Vector v = vec(a);
    j.noalias() += v * v.adjoint();
  }
  return {c.d_in(), c.d_out(), std::move(j)};
}

/// tr_in[J (rho^T (x) I)].
inline Matrix apply_channel(const ChoiMatrix& choi, const Matrix& m) {
  if (m.rows() != choi.d_in || m.cols() != choi.d_in) {
    throw DimensionError("apply_channel(ChoiMatrix): input dimension mismatch");
  }
  const Matrix weighted = choi.J * kron(m.transpose(), Matrix::Identity(choi.d_out, choi.d_out));
  return partial_trace_first(weighted, choi.d_in, choi.d_out);
}

/// Kraus operators sqrt(lambda) unvec(v) from the Choi eigendecomposition,
/// omitting eigenvalues at or below the rank cutoff.
inline KrausChannel to_kraus(const ChoiMatrix& choi, bool trace_preserving = true,
                             double tol = kPsdTolerance) {
  const auto eig = hermitian_eig(choi.J);
  const double cut = rank_cutoff(eig.values, tol);
  std::vector<Matrix> ops;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= cut) break;
    ops.push_back(std::sqrt(eig.values(k)) *
                  unvec(eig.vectors.col(k), choi.d_out, choi.d_in));
  }
  if (ops.empty()) ops.push_back(Matrix::Zero(choi.d_out, choi.d_in));
  return KrausChannel(choi.d_in, choi.d_out, std::move(ops), trace_preserving);
}

/// Minimal Kraus decomposition (at most d_in * d_out operators).
inline KrausChannel minimal_kraus(const KrausChannel& c) {
  return to_kraus(to_choi(c), c.trace_preserving());
}

inline double choi_distance(const KrausChannel& a, const KrausChannel& b) {
  if (a.d_in() != b.d_in() || a.d_out() != b.d_out()) {
    throw DimensionError("choi_distance: channel dimensions differ");
  }
  return (to_choi(a).J - to_choi(b).J).norm();
}

/// B_i = sum_j u_ij A_j after appending `pad` null operators to {A_j}.
inline KrausChannel kraus_remix(const KrausChannel& c, const Matrix& u, int pad = 0) {
  if (pad < 0) throw Error("kraus_remix: pad must be non-negative");
  const auto n = static_cast<Eigen::Index>(c.size()) + pad;
  if (u.rows() != n || u.cols() != n) {
    std::ostringstream os;
    os << "kraus_remix: mixing matrix must be " << n << "x" << n;
    throw DimensionError(os.str());
  }
  if (!is_unitary(u, 1e-10)) throw Error("kraus_remix: mixing matrix is not unitary");
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix b = Matrix::Zero(c.d_out(), c.d_in());
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(c.size()); ++j) {
      b += u(i, j) * c[static_cast<std::size_t>(j)];
    }
    ops.push_back(std::move(b));
  }
  return KrausChannel(c.d_in(), c.d_out(), std::move(ops), c.trace_preserving());
}

/// outer o inner, operators {R_i A_j}, null products dropped.
inline KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  if (inner.d_out() != outer.d_in()) {
    std::ostringstream os;
    os << "compose: inner output dim " << inner.d_out() << " != outer input dim "
       << outer.d_in();
    throw DimensionError(os.str());
  }
  std::vector<Matrix> ops;
  ops.reserve(outer.size() * inner.size());
  for (const auto& r : outer.operators()) {
    for (const auto& a : inner.operators()) ops.push_back(r * a);
  }
  return KrausChannel(inner.d_in(), outer.d_out(), std::move(ops),
                      outer.trace_preserving() && inner.trace_preserving())
      .normalized();
}

// --- ensembles ---------------------------------------------------------------

struct EnsembleMember {
  double p;
  DensityMatrix rho;
};

/// {p_i, rho_i} with probabilities summing to one.
class Ensemble {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error("Ensemble: no members");
    double total = 0.0;
    for (const auto& m : members_) {
      if (!(m.p >= 0.0)) throw Error("Ensemble: negative probability");
      if (m.rho.dim() != members_.front().rho.dim()) {
        throw DimensionError("Ensemble: members have different dimensions");
      }
      total += m.p;
    }
    if (std::abs(total - 1.0) > kTolerance) {
      std::ostringstream os;
      os << "Ensemble: probabilities sum to " << total;
      throw Error(os.str());
    }
  }

  static Ensemble single(const DensityMatrix& rho) { return Ensemble({{1.0, rho}}); }

  int dim() const { return members_.front().rho.dim(); }
  std::size_t size() const { return members_.size(); }
  const std::vector<EnsembleMember>& members() const { return members_; }
  const EnsembleMember& operator[](std::size_t i) const { return members_[i]; }

  /// sum_i p_i rho_i.
  DensityMatrix average() const {
    Matrix avg = Matrix::Zero(dim(), dim());
    for (const auto& m : members_) avg += m.p * m.rho.matrix();
    return DensityMatrix(avg);
  }

  double max_commutator() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      for (std::size_t j = i + 1; j < members_.size(); ++j) {
        worst = std::max(worst, commutator_norm(members_[i].rho.matrix(),
                                                members_[j].rho.matrix()));
      }
    }
    return worst;
  }

  bool commuting(double tol = kCommutingTolerance) const { return max_commutator() <= tol; }

 private:
  std::vector<EnsembleMember> members_;
};

/// {lambda_k, |v_k><v_k|} from an orthonormal eigenbasis of rho. Uses the
/// hermitian_eig basis unless an explicit basis (columns) is supplied; the
/// result depends on that choice inside degenerate eigenspaces.
inline Ensemble eigen_ensemble(const DensityMatrix& rho,
                               const std::optional<Matrix>& basis = std::nullopt) {
  const Matrix v = basis ? *basis : hermitian_eig(rho.matrix()).vectors;
  if (v.rows() != rho.dim() || v.cols() != rho.dim() || !is_unitary(v, 1e-9)) {
    throw Error("eigen_ensemble: basis must be a unitary matrix of matching dimension");
  }
  std::vector<EnsembleMember> members;
  double total = 0.0;
  std::vector<double> weights;
  for (int k = 0; k < rho.dim(); ++k) {
    const double w = std::max(0.0, (v.col(k).adjoint() * rho.matrix() * v.col(k))(0, 0).real());
    weights.push_back(w);
    total += w;
  }
  for (int k = 0; k < rho.dim(); ++k) {
    members.push_back({weights[static_cast<std::size_t>(k)] / total, DensityMatrix::pure(v.col(k))});
  }
  return Ensemble(std::move(members));
}

// --- random states -----------------------------------------------------------

/// Random probability vector (normalized exponentials: flat Dirichlet).
inline std::vector<double> random_simplex(int n, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Ginibre-distributed density matrix of the given rank.
inline DensityMatrix random_density_matrix(int d, int rank, Rng& rng) {
  Matrix g(d, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

inline DensityMatrix random_pure_state(int d, Rng& rng) {
  return random_density_matrix(d, 1, rng);
}

/// Ensemble of n density matrices diagonal in one shared Haar-random basis.
/// With rank_deficient, the last basis vector carries zero weight in every
/// member, so the average is singular.
inline Ensemble random_commuting_ensemble(int d, int n, Rng& rng, bool rank_deficient = false) {
  const Matrix u = haar_unitary(d, rng);
  const auto probs = random_simplex(n, rng);
  std::vector<EnsembleMember> members;
  const int support = rank_deficient && d > 1 ? d - 1 : d;
  for (int i = 0; i < n; ++i) {
    auto spectrum = random_simplex(support, rng);
    spectrum.resize(static_cast<std::size_t>(d), 0.0);
    RealVector lam = Eigen::Map<const RealVector>(spectrum.data(), d);
    Matrix rho = u * lam.cast<Complex>().asDiagonal() * u.adjoint();
    members.push_back({probs[static_cast<std::size_t>(i)], DensityMatrix(rho)});
  }
  return Ensemble(std::move(members));
}

}  // namespace revquant
