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

#include "rfs/simulate.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "rfs/error.hpp"

namespace rfs {
namespace {

// Substream tags.
constexpr std::uint64_t kTagW = 1;
constexpr std::uint64_t kTagX = 2;
constexpr std::uint64_t kTagB = 3;

CounterRng layer_stream(std::uint64_t seed, std::uint64_t tag, int layer) {
  return CounterRng(seed).substream(tag).substream(static_cast<std::uint64_t>(layer));
}

Matrix random_matrix(long rows, long cols, const EntryDistribution& d, const CounterRng& rng) {
  Matrix A(rows, cols);
  kernels::fill({A.data(), static_cast<std::size_t>(A.size())}, d, rng);
  return A;
}

Vector random_bias(long rows, double sigma_b, const CounterRng& rng) {
  Vector b = Vector::Zero(rows);
  if (sigma_b > 0.0)
    kernels::fill({b.data(), static_cast<std::size_t>(b.size())},
                  {EntryKind::Gaussian, sigma_b * sigma_b}, rng);
  return b;
}

}  // namespace

long NetworkShape::width(int layer) const {
  if (layer == 0) return n0;
  if (layer < 0 || layer > layers) throw UsageError("layer index out of range");
  if (!widths.empty()) return widths.at(static_cast<std::size_t>(layer - 1));
  return n1;
}

void NetworkShape::validate() const {
  std::ostringstream os;
  if (n0 < 2 || n1 < 2 || m < 2) os << "dimensions must be >= 2; ";
  if (layers < 1) os << "layers must be >= 1; ";
  if (!widths.empty()) {
    if (widths.size() != static_cast<std::size_t>(layers)) os << "need one width per layer; ";
    for (long w : widths)
      if (w < 2) os << "widths must be >= 2; ";
    if (!widths.empty() && widths.front() != n1) os << "first width must equal n1; ";
  }
  const auto msg = os.str();
  if (!msg.empty()) throw UsageError("invalid network shape: " + msg);
}

Matrix SampledMatrices::bias_matrix() const { return bias * Eigen::RowVectorXd::Ones(X.cols()); }

SampledMatrices sample_matrices(const NetworkShape& shape, const EntryDistribution& dist_x,
                                const EntryDistribution& dist_w, double sigma_b,
                                std::uint64_t seed) {
  shape.validate();
  SampledMatrices s;
  s.W = random_matrix(shape.n1, shape.n0, dist_w, layer_stream(seed, kTagW, 1));
  s.X = random_matrix(shape.n0, shape.m, dist_x, layer_stream(seed, kTagX, 0));
  s.bias = random_bias(shape.n1, sigma_b, layer_stream(seed, kTagB, 1));
  return s;
}

Matrix forward_layer(const Matrix& Y_in, const Matrix& W, const Vector& bias,
                     const ActivationSpec& spec) {
  Matrix Z = kernels::preactivation(W, Y_in, bias);
  kernels::activate(Z, spec.f);
  return Z;
}

EmpiricalSpectrum spectrum(const Matrix& Y, long m) {
  EmpiricalSpectrum s;
  s.eigenvalues = kernels::symmetric_eigenvalues(kernels::gram(Y, static_cast<double>(m)));
  return s;
}

std::vector<EmpiricalSpectrum> multilayer(const SimulationConfig& cfg, std::uint64_t seed) {
  const NetworkShape& shape = cfg.shape;
  shape.validate();
  const double sigma_b = cfg.activation.sigma_b;
  std::vector<EmpiricalSpectrum> out;
  out.reserve(static_cast<std::size_t>(shape.layers));

  Matrix Y = random_matrix(shape.n0, shape.m, cfg.dist_x, layer_stream(seed, kTagX, 0));
  for (int l = 1; l <= shape.layers; ++l) {
    const Matrix W = random_matrix(shape.width(l), shape.width(l - 1), cfg.dist_w,
                                   layer_stream(seed, kTagW, l));
    const Vector b = random_bias(shape.width(l), sigma_b, layer_stream(seed, kTagB, l));
    Y = forward_layer(Y, W, b, cfg.activation);
    const double peak = kernels::max_abs(Y);
    if (!(peak <= kDivergenceBound)) {
      std::ostringstream os;
      os << "activations diverged at layer " << l << " (max |Y| = " << peak << ")";
      throw DivergenceError(os.str(), l);
    }
    if (cfg.batch_norm) {
      const double ms = kernels::mean_square(Y);
      if (ms > 0.0) Y *= 1.0 / std::sqrt(ms);
    }
    EmpiricalSpectrum s = spectrum(Y, shape.m);
    s.shape = shape;
    s.seed = seed;
    s.layer = l;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EmpiricalSpectrum> replicate(const SimulationConfig& cfg, int n_replicas,
                                         std::uint64_t master_seed, Execution exec) {
  if (n_replicas < 1) throw UsageError("replicate needs n_replicas >= 1");
  cfg.shape.validate();
  std::vector<std::vector<EmpiricalSpectrum>> per(static_cast<std::size_t>(n_replicas));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_replicas));
  auto run = [&](int r) {
    const auto i = static_cast<std::size_t>(r);
    try {
      per[i] = multilayer(cfg, derive_seed(master_seed, static_cast<std::uint64_t>(r)));
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < n_replicas; ++r) run(r);
  } else {
    for (int r = 0; r < n_replicas; ++r) run(r);
  }
  // Lowest failing replica wins so errors do not depend on scheduling.
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  std::vector<EmpiricalSpectrum> out;
  for (auto& v : per)
    for (auto& s : v) out.push_back(std::move(s));
  return out;
}

}  // namespace rfs
