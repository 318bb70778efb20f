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

#include "rfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rfs/error.hpp"

namespace rfs {
namespace {

// Integral over [0, h] of |d0 + (d1 - d0) t / h|.
double abs_linear_integral(double d0, double d1, double h) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0))
    return 0.5 * h * (std::abs(d0) + std::abs(d1));
  return 0.5 * h * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
}

PiecewiseCdf empirical_cdf(const EmpiricalView& v) {
  PiecewiseCdf c;
  double acc = 0.0;
  for (std::size_t i = 0; i < v.atoms.size(); ++i) {
    if (!c.knots.empty() && v.atoms[i] == c.knots.back()) {
      acc += v.weights[i];
      c.right.back() = acc;
      continue;
    }
    c.knots.push_back(v.atoms[i]);
    c.left.push_back(acc);
    acc += v.weights[i];
    c.right.push_back(acc);
  }
  if (!c.right.empty()) c.right.back() = 1.0;
  return c;
}

PiecewiseCdf gridded_cdf(const GriddedView& v) {
  const auto& x = v.grid;
  const std::size_t n = x.size();
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    cum[i] = cum[i - 1] + 0.5 * (x[i] - x[i - 1]) * (v.density[i] + v.density[i - 1]);

  auto continuous = [&](double t) {
    if (n == 0 || t <= x.front()) return 0.0;
    if (t >= x.back()) return cum.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return cum[j - 1] + w * (cum[j] - cum[j - 1]);
  };

  std::vector<double> knots = x;
  for (const auto& [pos, mass] : v.atoms) knots.push_back(pos);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  PiecewiseCdf c;
  c.knots = knots;
  for (double t : knots) {
    double below = 0.0, at = 0.0;
    for (const auto& [pos, mass] : v.atoms) {
      if (pos < t) below += mass;
      else if (pos == t) at += mass;
    }
    const double base = continuous(t) + below;
    c.left.push_back(base);
    c.right.push_back(base + at);
  }
  if (!c.right.empty()) c.right.back() = 1.0;
  return c;
}

}  // namespace

EmpiricalView empirical_view(std::vector<double> atoms) {
  if (atoms.empty()) throw UsageError("empirical view needs at least one atom");
  const double w = 1.0 / static_cast<double>(atoms.size());
  std::vector<double> weights(atoms.size(), w);
  return empirical_view(std::move(atoms), std::move(weights));
}

EmpiricalView empirical_view(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw UsageError("empirical view needs matching, non-empty atoms and weights");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw UsageError("empirical weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw UsageError("empirical weights sum to zero");
  EmpiricalView v;
  for (std::size_t i : order) {
    v.atoms.push_back(atoms[i]);
    v.weights.push_back(weights[i] / total);
  }
  return v;
}

EmpiricalView esd_view(const EmpiricalSpectrum& spec, bool exclude_outlier, double factor) {
  std::vector<double> eig = spec.eigenvalues;
  std::sort(eig.begin(), eig.end());
  std::optional<double> dropped;
  const std::size_t n = eig.size();
  if (exclude_outlier && n >= 2 && eig[n - 1] > 0.0 && eig[n - 1] > factor * eig[n - 2]) {
    dropped = eig.back();
    eig.pop_back();
  }
  EmpiricalView v = empirical_view(std::move(eig));
  v.excluded_outlier = dropped;
  return v;
}

GriddedView density_view(const SpectralDensity& d, std::optional<double> outlier_mass) {
  if (d.grid.size() < 2 || d.grid.size() != d.density.size())
    throw UsageError("density view needs a grid of at least two points");
  GriddedView v;
  v.grid = d.grid;
  v.density = d.density;
  for (double& y : v.density) y = std::max(y, 0.0);
  v.outlier = d.outlier;

  double cont = 0.0;
  for (std::size_t i = 1; i < v.grid.size(); ++i)
    cont += 0.5 * (v.grid[i] - v.grid[i - 1]) * (v.density[i] + v.density[i - 1]);
  double atoms = d.atom_at_zero;
  v.raw_mass = cont + d.atom_at_zero;
  if (v.raw_mass < 0.98 || v.raw_mass > 1.02) {
    std::ostringstream os;
    os << "gridded mass " << v.raw_mass << " outside [0.98, 1.02]";
    throw MassError(os.str());
  }
  const double peak = *std::max_element(v.density.begin(), v.density.end());
  if (v.density.front() > 1e-3 * peak || v.density.back() > 1e-3 * peak)
    throw MassError("density grid truncates the support");

  if (d.atom_at_zero > 0.0) v.atoms.emplace_back(0.0, d.atom_at_zero);
  if (outlier_mass && d.outlier) {
    v.atoms.emplace_back(*d.outlier, *outlier_mass);
    atoms += *outlier_mass;
  }
  if (atoms >= 1.0) throw MassError("atoms carry all of the mass");
  const double scale = (1.0 - atoms) / cont;
  for (double& y : v.density) y *= scale;
  return v;
}

double PiecewiseCdf::operator()(double x) const {
  if (knots.empty() || x < knots.front()) return 0.0;
  if (x >= knots.back()) return 1.0;
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - knots.begin());
  const double w = (x - knots[j - 1]) / (knots[j] - knots[j - 1]);
  return right[j - 1] + w * (left[j] - right[j - 1]);
}

double PiecewiseCdf::left_limit(double x) const {
  if (knots.empty() || x <= knots.front()) return 0.0;
  if (x > knots.back()) return 1.0;
  const auto it = std::lower_bound(knots.begin(), knots.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - knots.begin());
  if (knots[j] == x) return left[j];
  const double w = (x - knots[j - 1]) / (knots[j] - knots[j - 1]);
  return right[j - 1] + w * (left[j] - right[j - 1]);
}

PiecewiseCdf cdf(const DistributionView& v) {
  return std::visit(
      [](const auto& view) {
        if constexpr (std::is_same_v<std::decay_t<decltype(view)>, EmpiricalView>)
          return empirical_cdf(view);
        else
          return gridded_cdf(view);
      },
      v);
}

double cdf_distance(const PiecewiseCdf& a, const PiecewiseCdf& b) {
  std::vector<double> knots;
  knots.reserve(a.knots.size() + b.knots.size());
  std::merge(a.knots.begin(), a.knots.end(), b.knots.begin(), b.knots.end(),
             std::back_inserter(knots));
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double x0 = knots[i], x1 = knots[i + 1];
    const double d0 = a(x0) - b(x0);
    const double d1 = a.left_limit(x1) - b.left_limit(x1);
    total += abs_linear_integral(d0, d1, x1 - x0);
  }
  return total;
}

double quantile_distance(const EmpiricalView& a, const EmpiricalView& b) {
  std::size_t i = 0, j = 0;
  double ca = 0.0, cb = 0.0, t = 0.0, total = 0.0;
  while (i < a.atoms.size() && j < b.atoms.size()) {
    const double next_a = ca + a.weights[i];
    const double next_b = cb + b.weights[j];
    const double next = std::min(next_a, next_b);
    total += (next - t) * std::abs(a.atoms[i] - b.atoms[j]);
    t = next;
    if (next_a <= next) {
      ca = next_a;
      ++i;
    }
    if (next_b <= next) {
      cb = next_b;
      ++j;
    }
  }
  return total;
}

double wasserstein1(const DistributionView& a, const DistributionView& b) {
  const auto* ea = std::get_if<EmpiricalView>(&a);
  const auto* eb = std::get_if<EmpiricalView>(&b);
  if (ea && eb) return quantile_distance(*ea, *eb);
  return cdf_distance(cdf(a), cdf(b));
}

Histogram histogram(std::span<const double> values, int n_bins, double lo, double hi) {
  if (n_bins < 1) throw UsageError("histogram needs n_bins >= 1");
  if (!(hi > lo)) throw UsageError("histogram range must satisfy lo < hi");
  if (values.empty()) throw UsageError("histogram of an empty sample");
  Histogram h;
  h.bin_width = (hi - lo) / n_bins;
  std::vector<long> counts(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    long k = static_cast<long>((v - lo) / h.bin_width);
    k = std::clamp<long>(k, 0, n_bins - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  const double norm = 1.0 / (static_cast<double>(values.size()) * h.bin_width);
  for (int k = 0; k < n_bins; ++k) {
    h.centers.push_back(lo + (k + 0.5) * h.bin_width);
    h.heights.push_back(static_cast<double>(counts[static_cast<std::size_t>(k)]) * norm);
  }
  return h;
}

Histogram histogram(const EmpiricalSpectrum& spec, int n_bins,
                    std::optional<std::pair<double, double>> range) {
  if (spec.eigenvalues.empty()) throw UsageError("histogram of an empty spectrum");
  double lo, hi;
  if (range) {
    std::tie(lo, hi) = *range;
  } else {
    const auto [mn, mx] = std::minmax_element(spec.eigenvalues.begin(), spec.eigenvalues.end());
    lo = *mn;
    hi = *mx;
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  return histogram(spec.eigenvalues, n_bins, lo, hi);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("slope fit needs >= 2 matched points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw UsageError("log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw UsageError("log-log fit needs distinct x values");
  return sxy / sxx;
}

}  // namespace rfs
