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

// Dense complex linear algebra used throughout revquant. Everything here is a
// pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "revquant/random.hpp"

namespace revquant {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  NotHermitianError(double asymmetry, const std::string& what)
      : Error(what), asymmetry_(asymmetry) {}
  double asymmetry() const { return asymmetry_; }

 private:
  double asymmetry_;
};

class NotPsdError : public Error {
 public:
  NotPsdError(double eigenvalue, const std::string& what)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Default band inside which negative eigenvalues are treated as roundoff.
inline constexpr double kPsdTolerance = 1e-9;
/// Relative floor for rank decisions: an eigenvalue counts when it exceeds
/// max(tol, kRelativeRankFloor * lambda_max).
inline constexpr double kRelativeRankFloor = 1e-12;

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

inline double hermitian_defect(const Matrix& m) {
  return (m - m.adjoint()).norm();
}

inline bool is_hermitian(const Matrix& m) {
  return m.rows() == m.cols() &&
         hermitian_defect(m) <= 1e-10 * std::max(1.0, m.norm());
}

inline void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << who << ": expected a non-empty square matrix, got " << m.rows() << "x"
       << m.cols();
    throw DimensionError(os.str());
  }
}

inline void require_hermitian(const Matrix& m, const char* who) {
  require_square(m, who);
  const double defect = hermitian_defect(m);
  if (defect > 1e-10 * std::max(1.0, m.norm())) {
    std::ostringstream os;
    os << who << ": matrix is not Hermitian, ||M - M^dagger||_F = " << defect;
    throw NotHermitianError(defect, os.str());
  }
}

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns are the eigenvectors, unitary
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
/// The input is symmetrized as (M + M^dagger)/2 first.
inline EigenDecomposition hermitian_eig(const Matrix& m) {
  require_hermitian(m, "hermitian_eig");
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eig: eigensolver did not converge");
  }
  const Eigen::Index n = sym.rows();
  EigenDecomposition out{RealVector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

inline double rank_cutoff(const RealVector& eigenvalues, double tol) {
  const double top = eigenvalues.size() ? std::max(0.0, eigenvalues.maxCoeff()) : 0.0;
  return std::max(tol, kRelativeRankFloor * top);
}

namespace detail {

inline EigenDecomposition checked_psd_eig(const Matrix& m, double tol,
                                          const char* who) {
  auto eig = hermitian_eig(m);
  const double lowest = eig.values.size() ? eig.values.minCoeff() : 0.0;
  if (lowest < -tol) {
    std::ostringstream os;
    os << who << ": matrix is not PSD, eigenvalue " << lowest
       << " is below -" << tol;
    throw NotPsdError(lowest, os.str());
  }
  return eig;
}

}  // namespace detail

/// Applies f to the eigenvalues above the rank cutoff of a PSD matrix; the
/// remaining (kernel) eigenvalues map to zero.
template <typename F>
Matrix psd_support_function(const Matrix& m, double tol, F f, const char* who) {
  const auto eig = detail::checked_psd_eig(m, tol, who);
  const double cut = rank_cutoff(eig.values, tol);
  RealVector mapped(eig.values.size());
  for (Eigen::Index k = 0; k < mapped.size(); ++k) {
    mapped(k) = eig.values(k) > cut ? f(eig.values(k)) : 0.0;
  }
  return eig.vectors * mapped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

/// M^{1/2} with eigenvalues inside the tolerance band clipped to zero.
inline Matrix psd_sqrt(const Matrix& m, double tol = kPsdTolerance) {
  const auto eig = detail::checked_psd_eig(m, tol, "psd_sqrt");
  RealVector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

/// Generalized inverse square root: lambda^{-1/2} on the support, 0 on the kernel.
inline Matrix psd_pinv_sqrt(const Matrix& m, double tol = kPsdTolerance) {
  return psd_support_function(
      m, tol, [](double x) { return 1.0 / std::sqrt(x); }, "psd_pinv_sqrt");
}

inline Matrix support_projector(const Matrix& m, double tol = kPsdTolerance) {
  return psd_support_function(
      m, tol, [](double) { return 1.0; }, "support_projector");
}

inline int psd_rank(const Matrix& m, double tol = kPsdTolerance) {
  const auto eig = detail::checked_psd_eig(m, tol, "psd_rank");
  const double cut = rank_cutoff(eig.values, tol);
  return static_cast<int>((eig.values.array() > cut).count());
}

/// Sum of singular values.
inline double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

/// Haar-random unitary from a seeded generator: QR of a standard complex
/// Gaussian matrix with R's diagonal phases moved into Q.
inline Matrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw DimensionError("haar_unitary: dimension must be positive");
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    const Complex phase = mag > 0.0 ? r(k, k) / mag : Complex(1.0, 0.0);
    q.col(k) *= phase;
  }
  return q;
}

inline Matrix haar_unitary(int d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(d, rng);
}

/// Columns 0..cols-1 of a Haar unitary: a Haar-random isometry.
inline Matrix haar_isometry(int rows, int cols, Rng& rng) {
  if (cols > rows) throw DimensionError("haar_isometry: cols exceed rows");
  return haar_unitary(rows, rng).leftCols(cols);
}

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
  return u.rows() == u.cols() &&
         (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Partial trace over the second factor of a (d1*d2)-dim operator.
inline Matrix partial_trace_second(const Matrix& m, int d1, int d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d1; ++j) {
      out(i, j) = m.block(i * d2, j * d2, d2, d2).trace();
    }
  }
  return out;
}

/// Partial trace over the first factor of a (d1*d2)-dim operator.
inline Matrix partial_trace_first(const Matrix& m, int d1, int d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (int k = 0; k < d1; ++k) out += m.block(k * d2, k * d2, d2, d2);
  return out;
}

inline double commutator_norm(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).norm();
}

/// Orthonormal basis (as columns) of the kernel of a projector.
inline Matrix complement_basis(const Matrix& projector) {
  const auto eig = hermitian_eig(projector);
  int rank = 0;
  while (rank < eig.values.size() && eig.values(rank) > 0.5) ++rank;
  return eig.vectors.rightCols(eig.values.size() - rank);
}

}  // namespace revquant
