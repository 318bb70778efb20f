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

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "rfs/activation.hpp"

namespace rfs {

using cplx = std::complex<double>;

/// Reduced parameters of the quartic self-consistent equation.
struct ModelParams {
  double theta1_eff = 1.0;  // theta1, or theta1 - theta1b with bias
  double theta2 = 0.0;
  double phi = 1.0;  // n0 / m
  double psi = 1.0;  // n0 / n1
  double theta1b = 0.0;
  std::optional<long> n1;  // finite width, only for the outlier location

  /// Limits (phi, psi); theta1_eff = theta1 - theta1b.
  static ModelParams from_limits(const ThetaParams& t, double phi, double psi,
                                 std::optional<long> n1 = std::nullopt);
  /// Finite shape: phi = n0/m, psi = n0/n1, so phi/psi = n1/m exactly.
  static ModelParams from_shape(const ThetaParams& t, long n0, long n1, long m);

  void validate() const;
};

/// Mass of the atom at zero: 1 - psi/phi when n1 > m, and for linear f
/// (theta1_eff = theta2) also 1 - psi from the rank of W.
double zero_atom(const ModelParams& p);

using QuarticCoeffs = std::array<cplx, 5>;  // c[k] multiplies g^k

struct StieltjesSolution {
  cplx z;
  cplx g;
  double residual = 0.0;
  std::vector<cplx> all_roots;
};

/// Coefficients of
///   1 + zg - (t1 - (t2/psi)(1+zg)) g (1 - (phi/psi)(1+zg))
///          - (t2 (t1 - t2)/psi) g^2 (1 - (phi/psi)(1+zg))^2.
QuarticCoeffs quartic_coeffs(const ModelParams& p, cplx z);

cplx evaluate_polynomial(const QuarticCoeffs& c, cplx g);

/// Roots of the polynomial after dropping negligible leading coefficients,
/// from the companion matrix and polished with three Newton steps each.
std::vector<cplx> polynomial_roots(const QuarticCoeffs& c);

/// Physical root at z (Im z > 0): among roots with Im g >= -1e-6, the one
/// closest to `seed`, or to -1/z without a seed. Throws BranchError if no
/// root qualifies.
StieltjesSolution solve_g(const ModelParams& p, cplx z,
                          std::optional<cplx> seed = std::nullopt);

enum class SweepDirection { RightToLeft, LeftToRight };

/// Continues the analytic branch from large Im z down to Im z = eps at one
/// end of the grid, then along Im z = eps across the grid. Returns one
/// solution per grid point at z = lambda + i eps. A grid spanning the origin
/// is swept from both ends toward it; `dir` applies otherwise.
std::vector<StieltjesSolution> trace_branch(const ModelParams& p,
                                            std::span<const double> lambda_grid,
                                            double eps,
                                            SweepDirection dir = SweepDirection::RightToLeft);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectralDensity {
  std::vector<double> grid;
  std::vector<double> density;
  double atom_at_zero = 0.0;
  std::optional<double> outlier;
  std::vector<Interval> support;
  // Grid indices within two points of an interior support endpoint.
  std::vector<std::size_t> edge_bins;
  double eps = 0.0;

  // Trapezoid integral of `density` over `grid`.
  double continuous_mass() const;
  double total_mass() const { return atom_at_zero + continuous_mass(); }
};

inline constexpr double kSupportThreshold = 1e-4;

/// Stieltjes inversion of a traced branch. Throws MassError when the atom
/// plus continuous mass leaves [0.95, 1.05].
SpectralDensity density_from_branch(std::span<const StieltjesSolution> solutions,
                                    const ModelParams& p);

/// n1 * theta1b. Throws NoOutlierError when theta1b == 0.
double predict_outlier(const ModelParams& p);

struct DensityOptions {
  double eps = 1e-6;
  int points = 800;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  // Linear extrapolation eps -> 0 from {10 eps, eps} at edge bins.
  bool richardson = true;
  // Relative padding around the detected support for the automatic grid.
  double margin = 0.2;
};

/// Full theory pipeline on a uniform grid, with extra nodes packed toward any
/// edge where the density diverges. Without explicit bounds the grid is the
/// detected support padded by `margin` on both sides.
SpectralDensity theoretical_density(const ModelParams& p, const DensityOptions& opt = {});

std::vector<double> linspace(double lo, double hi, int points);

}  // namespace rfs
