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

#include <functional>
#include <span>
#include <vector>

namespace rfs::quad {

/// Nodes and weights of an interpolatory rule. Nodes ascend.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the standard normal weight, i.e.
/// sum_i w_i h(x_i) approximates E h(G) with G ~ N(0, 1). Weights sum to one.
/// Rules are built once per n and cached; the reference stays valid.
const Rule& gauss_hermite(int n);

/// n-point Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int n);

struct Options {
  double rel_tol = 1e-10;
  // Node counts tried in order; consecutive results must agree to rel_tol.
  std::vector<int> levels{100, 200, 400, 800};
  // Half-width of the window used by the piecewise (kinked) path, in
  // standard deviations.
  double truncation = 14.0;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;
// Vector-valued integrand: writes `out.size()` values at x.
using FnN = std::function<void(double, std::span<double>)>;

/// E h(G), G ~ N(0,1). With `kinks` empty the integral uses Gauss-Hermite;
/// otherwise the window [-T, T] is split at the kinks and each piece uses
/// Gauss-Legendre against the Gaussian density. A smooth integrand that
/// Gauss-Hermite cannot settle is retried on unit-width Legendre panels.
/// Throws QuadratureError if no path converges or the window edge still
/// carries weight.
double gaussian_mean(const Fn1& h, std::span<const double> kinks = {},
                     const Options& opt = {});

/// Componentwise E h(G) for a vector-valued integrand with `count` outputs.
std::vector<double> gaussian_mean_multi(const FnN& h, std::size_t count,
                                        std::span<const double> kinks = {},
                                        const Options& opt = {});

/// E h(U1, U2) with (U1, U2) centred Gaussian, Var U_i = var, Cov = cov.
///
/// Smooth integrands (no kinks) are integrated in the eigenbasis of the
/// covariance, (1,1)/sqrt2 and (1,-1)/sqrt2, with a tensor Gauss-Hermite
/// rule. With kinks the integral is nested: U2 | U1 is Gaussian, and both the
/// outer and inner 1-D integrals are split at the kinks. `kinks1` and
/// `kinks2` are in the units of U1 and U2.
double gaussian_mean_2d(const Fn2& h, double var, double cov,
                        std::span<const double> kinks1 = {},
                        std::span<const double> kinks2 = {},
                        const Options& opt = {});

}  // namespace rfs::quad
