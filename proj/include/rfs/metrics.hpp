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

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rfs/selfconsistent.hpp"
#include "rfs/simulate.hpp"

namespace rfs {

/// Point masses at sorted positions; weights sum to 1.
struct EmpiricalView {
  std::vector<double> atoms;
  std::vector<double> weights;
  // Top eigenvalue removed by esd_view, if any.
  std::optional<double> excluded_outlier;
};

/// Density on a grid plus point masses, normalized to total mass 1.
struct GriddedView {
  std::vector<double> grid;
  std::vector<double> density;
  // (position, mass); the atom at zero lives here.
  std::vector<std::pair<double, double>> atoms;
  // Mass before renormalization.
  double raw_mass = 1.0;
  std::optional<double> outlier;
};

using DistributionView = std::variant<EmpiricalView, GriddedView>;

inline constexpr double kOutlierFactor = 3.0;

EmpiricalView empirical_view(std::vector<double> atoms);
EmpiricalView empirical_view(std::vector<double> atoms, std::vector<double> weights);

/// Uniform weights on the eigenvalues. With exclude_outlier the top
/// eigenvalue is dropped when it exceeds `factor` times the second largest.
EmpiricalView esd_view(const EmpiricalSpectrum& spec, bool exclude_outlier,
                       double factor = kOutlierFactor);

/// Bulk view of a theoretical density. The outlier is recorded but carries
/// no mass unless `outlier_mass` is given. Throws MassError when the raw
/// mass leaves [0.98, 1.02] or the density is still above 1e-3 of its peak
/// at a grid end.
GriddedView density_view(const SpectralDensity& d, std::optional<double> outlier_mass = std::nullopt);

/// Piecewise-linear CDF with jumps: linear between knots, 0 before the
/// first knot, 1 after the last.
struct PiecewiseCdf {
  std::vector<double> knots;
  std::vector<double> left;   // F(x-)
  std::vector<double> right;  // F(x)

  double operator()(double x) const;
  double left_limit(double x) const;
};

PiecewiseCdf cdf(const DistributionView& v);

/// Exact integral of |F_a - F_b| for piecewise-linear CDFs with jumps.
double cdf_distance(const PiecewiseCdf& a, const PiecewiseCdf& b);

/// Quantile coupling for two empirical views.
double quantile_distance(const EmpiricalView& a, const EmpiricalView& b);

/// W1; quantile coupling when both operands are empirical, CDF integration
/// otherwise.
double wasserstein1(const DistributionView& a, const DistributionView& b);

struct Histogram {
  std::vector<double> centers;
  std::vector<double> heights;
  double bin_width = 0.0;
};

/// Heights are count / (N * width), so they integrate to the fraction of
/// values inside [lo, hi]. The last bin is closed on the right.
Histogram histogram(std::span<const double> values, int n_bins, double lo, double hi);
Histogram histogram(const EmpiricalSpectrum& spec, int n_bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rfs
