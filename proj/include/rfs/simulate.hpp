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

#include <cstdint>
#include <vector>

#include "rfs/activation.hpp"
#include "rfs/kernels.hpp"
#include "rfs/random.hpp"

namespace rfs {

struct NetworkShape {
  long n0 = 2;
  long n1 = 2;
  long m = 2;
  int layers = 1;
  // Optional per-layer widths n_1..n_L; defaults to n1 for every layer.
  std::vector<long> widths;

  // Width of layer l (1-based); layer 0 is the input dimension n0.
  long width(int layer) const;
  void validate() const;
};

struct EmpiricalSpectrum {
  std::vector<double> eigenvalues;  // ascending
  NetworkShape shape;
  std::uint64_t seed = 0;
  int layer = 1;
};

struct SampledMatrices {
  Matrix W;     // n1 x n0
  Matrix X;     // n0 x m
  Vector bias;  // B_ij = bias_i

  /// The rank-one n1 x m bias matrix.
  Matrix bias_matrix() const;
};

/// Deterministic in `seed`. Bias entries are N(0, sigma_b^2); zero when
/// sigma_b == 0.
SampledMatrices sample_matrices(const NetworkShape& shape, const EntryDistribution& dist_x,
                                const EntryDistribution& dist_w, double sigma_b,
                                std::uint64_t seed);

/// f(W Y_in / sqrt(inner) + B) with inner = W.cols().
Matrix forward_layer(const Matrix& Y_in, const Matrix& W, const Vector& bias,
                     const ActivationSpec& spec);

/// Eigenvalues of Y Y^T / m. Metadata fields are left for the caller.
EmpiricalSpectrum spectrum(const Matrix& Y, long m);

struct SimulationConfig {
  NetworkShape shape;
  ActivationSpec activation;
  EntryDistribution dist_x;
  EntryDistribution dist_w;
  bool batch_norm = false;
};

inline constexpr double kDivergenceBound = 1e150;

/// One network draw. Layer l uses fresh W^(l) and B^(l); with batch_norm
/// every Y^(l) is rescaled to unit mean square before the next layer and
/// before its spectrum is taken. Throws DivergenceError on overflow.
std::vector<EmpiricalSpectrum> multilayer(const SimulationConfig& cfg, std::uint64_t seed);

enum class Execution { Serial, Parallel };

/// Replica r runs multilayer(cfg, derive_seed(master_seed, r)). Results are
/// ordered by (replica, layer) whatever the execution policy.
std::vector<EmpiricalSpectrum> replicate(const SimulationConfig& cfg, int n_replicas,
                                         std::uint64_t master_seed,
                                         Execution exec = Execution::Parallel);

}  // namespace rfs
