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

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rfs/activation.hpp"
#include "rfs/random.hpp"

namespace rfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Data-parallel building blocks of the simulation. The functions in
// `kernels` are the production versions (OpenMP and Eigen); the ones in
// `kernels::reference` are plain serial loops kept as test oracles and
// benchmark baselines. Both produce bit-identical samples.
namespace kernels {

/// Fills `out` with i.i.d. entries; entry k is draw_entry(dist, rng, k).
void fill(std::span<double> out, const EntryDistribution& dist, const CounterRng& rng);

/// W Y / sqrt(inner) + bias 1^T, inner = W.cols().
Matrix preactivation(const Matrix& W, const Matrix& Y, const Vector& bias);

/// In-place entrywise f.
void activate(Matrix& Z, const RealFn& f);

/// Largest |entry|, or +inf if any entry is not finite.
double max_abs(const Matrix& A);

/// Mean of squared entries.
double mean_square(const Matrix& A);

/// Y Y^T / m, both triangles filled.
Matrix gram(const Matrix& Y, double m);

/// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& M);

namespace reference {

void fill(std::span<double> out, const EntryDistribution& dist, const CounterRng& rng);
Matrix preactivation(const Matrix& W, const Matrix& Y, const Vector& bias);
void activate(Matrix& Z, const RealFn& f);
Matrix gram(const Matrix& Y, double m);

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below tol times the matrix norm. O(n^3) per sweep; small n only.
std::vector<double> jacobi_eigenvalues(Matrix M, double tol = 1e-14);

}  // namespace reference
}  // namespace kernels
}  // namespace rfs
