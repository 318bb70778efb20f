/* Copyright 2026 The rfspec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "rfs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


#include "rfs/error.hpp"

namespace rfs::kernels {

void fill(std::span<double> out, const EntryDistribution& dist, const CounterRng& rng) {
  const auto n = static_cast<std::int64_t>(out.size());
  if (dist.kind == EntryKind::Gaussian) {
    const double s = dist.stddev();
    const std::int64_t pairs = n / 2;
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < pairs; ++p) {
      const auto [a, b] = rng.normal_pair(static_cast<std::uint64_t>(p));
      out[2 * p] = s * a;
      out[2 * p + 1] = s * b;
    }
    if (n % 2) out[n - 1] = draw_entry(dist, rng, static_cast<std::uint64_t>(n - 1));
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k)
    out[k] = draw_entry(dist, rng, static_cast<std::uint64_t>(k));
}

Matrix preactivation(const Matrix& W, const Matrix& Y, const Vector& bias) {
  if (W.cols() != Y.rows() || bias.size() != W.rows())
    throw UsageError("preactivation: dimension mismatch");
  Matrix Z(W.rows(), Y.cols());
  Z.noalias() = W * Y;
  const double scale = 1.0 / std::sqrt(static_cast<double>(W.cols()));
  const auto cols = static_cast<std::int64_t>(Z.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) Z.col(j) = scale * Z.col(j) + bias;
  return Z;
}

void activate(Matrix& Z, const RealFn& f) {
  double* data = Z.data();
  const auto n = static_cast<std::int64_t>(Z.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) data[k] = f(data[k]);
}

double max_abs(const Matrix& A) {
  const double* data = A.data();
  const auto n = static_cast<std::int64_t>(A.size());
  double m = 0.0;
  bool finite = true;
#pragma omp parallel for reduction(max : m) reduction(&& : finite) schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    finite = finite && std::isfinite(data[k]);
    m = std::max(m, std::abs(data[k]));
  }
  return finite ? m : std::numeric_limits<double>::infinity();
}

double mean_square(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return A.squaredNorm() / static_cast<double>(A.size());
}

Matrix gram(const Matrix& Y, double m) {
  Matrix M = Matrix::Zero(Y.rows(), Y.rows());
  M.selfadjointView<Eigen::Lower>().rankUpdate(Y, 1.0 / m);
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
  return M;
}

std::vector<double> symmetric_eigenvalues(const Matrix& M) {
  if (M.rows() != M.cols()) throw UsageError("symmetric_eigenvalues: matrix not square");
  if (M.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

namespace reference {

void fill(std::span<double> out, const EntryDistribution& dist, const CounterRng& rng) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = draw_entry(dist, rng, k);
}

Matrix preactivation(const Matrix& W, const Matrix& Y, const Vector& bias) {
  if (W.cols() != Y.rows() || bias.size() != W.rows())
    throw UsageError("preactivation: dimension mismatch");
  const double scale = 1.0 / std::sqrt(static_cast<double>(W.cols()));
  Matrix Z(W.rows(), Y.cols());
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < W.cols(); ++k) acc += W(i, k) * Y(k, j);
      Z(i, j) = scale * acc + bias(i);
    }
  }
  return Z;
}

void activate(Matrix& Z, const RealFn& f) {
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, j) = f(Z(i, j));
}

Matrix gram(const Matrix& Y, double m) {
  Matrix M(Y.rows(), Y.rows());
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < Y.cols(); ++k) acc += Y(i, k) * Y(j, k);
      M(i, j) = M(j, i) = acc / m;
    }
  }
  return M;
}

std::vector<double> jacobi_eigenvalues(Matrix A, double tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw UsageError("jacobi_eigenvalues: matrix not square");
  const double norm = std::max(A.norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * A(p, q) * A(p, q);
    if (std::sqrt(off) <= tol * norm) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = A(i, i);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace reference
}  // namespace rfs::kernels
