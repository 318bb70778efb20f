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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rfs/error.hpp"
#include "rfs/metrics.hpp"

using namespace rfs;

namespace {

EmpiricalSpectrum spectrum_of(std::vector<double> ev) {
  EmpiricalSpectrum s;
  std::sort(ev.begin(), ev.end());
  s.eigenvalues = std::move(ev);
  return s;
}

GriddedView uniform_view(double lo, double hi, int points) {
  GriddedView g;
  g.grid = linspace(lo, hi, points);
  g.density.assign(points, 1.0 / (hi - lo));
  return g;
}

}  // namespace

TEST_CASE("point masses") {
  const auto d0 = empirical_view({0.0}), d1 = empirical_view({1.0});
  CHECK(wasserstein1(d0, d1) == doctest::Approx(1.0));
  CHECK(wasserstein1(d0, d0) == 0.0);
  CHECK(cdf_distance(cdf(d0), cdf(d1)) == doctest::Approx(1.0));
  const auto two = empirical_view({0.0, 1.0}, {1.0, 3.0});
  CHECK(two.weights[1] == doctest::Approx(0.75));
  CHECK(wasserstein1(two, d1) == doctest::Approx(0.25));
}

TEST_CASE("uniform against a point mass") {
  const auto u = uniform_view(0.0, 1.0, 101);
  const auto half = empirical_view({0.5});
  CHECK(wasserstein1(u, half) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(wasserstein1(half, u) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(wasserstein1(u, u) == doctest::Approx(0.0).scale(1.0));
  CHECK(wasserstein1(u, uniform_view(0.5, 1.5, 51)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("metric properties on random samples") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n;
  auto draw = [&](int k, double shift) {
    std::vector<double> v(k);
    for (auto& x : v) x = n(gen) * (1.0 + 0.3 * shift) + shift;
    return empirical_view(v);
  };
  for (int t = 0; t < 50; ++t) {
    const auto a = draw(20 + t, 0.1 * t), b = draw(35, -0.05 * t), c = draw(17 + 2 * t, 0.0);
    const double ab = wasserstein1(a, b), ba = wasserstein1(b, a);
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ab <= wasserstein1(a, c) + wasserstein1(c, b) + 1e-12);
    CHECK(std::abs(quantile_distance(a, b) - cdf_distance(cdf(a), cdf(b))) < 1e-10);
  }
}

TEST_CASE("cdf jumps at atoms") {
  GriddedView g = uniform_view(1.0, 2.0, 11);
  for (auto& d : g.density) d *= 0.7;
  g.atoms = {{0.0, 0.3}};
  const auto F = cdf(g);
  CHECK(F.left_limit(0.0) == doctest::Approx(0.0));
  CHECK(F(0.0) == doctest::Approx(0.3));
  CHECK(F(1.5) == doctest::Approx(0.65));
  CHECK(F(3.0) == doctest::Approx(1.0));
  CHECK(F(-1.0) == 0.0);
}

TEST_CASE("histogram") {
  const std::vector<double> v{0.0, 0.1, 0.5, 0.99, 1.0, 2.0};
  const auto h = histogram(v, 2, 0.0, 1.0);
  REQUIRE(h.heights.size() == 2);
  CHECK(h.bin_width == doctest::Approx(0.5));
  CHECK(h.centers[0] == doctest::Approx(0.25));
  CHECK(h.heights[0] == doctest::Approx(2.0 / (6 * 0.5)));
  CHECK(h.heights[1] == doctest::Approx(3.0 / (6 * 0.5)));
  CHECK_THROWS_AS(histogram(v, 0, 0.0, 1.0), UsageError);
  CHECK_THROWS_AS(histogram(v, 3, 1.0, 1.0), UsageError);

  const auto s = histogram(spectrum_of({1.0, 2.0, 3.0, 4.0}), 3);
  double total = 0.0;
  for (double x : s.heights) total += x * s.bin_width;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("outlier exclusion") {
  const auto s = spectrum_of({0.5, 1.0, 1.5, 20.0});
  const auto kept = esd_view(s, false);
  CHECK(kept.atoms.size() == 4);
  CHECK_FALSE(kept.excluded_outlier);
  const auto cut = esd_view(s, true);
  CHECK(cut.atoms.size() == 3);
  REQUIRE(cut.excluded_outlier);
  CHECK(*cut.excluded_outlier == 20.0);
  CHECK(esd_view(spectrum_of({0.5, 1.0, 1.5, 4.0}), true).atoms.size() == 4);
}

TEST_CASE("density views are checked") {
  SpectralDensity d;
  d.grid = linspace(0.0, 1.0, 101);
  d.density.assign(101, 0.0);
  for (std::size_t i = 0; i < 101; ++i) d.density[i] = 6.0 * d.grid[i] * (1.0 - d.grid[i]);
  const auto ok = density_view(d);
  CHECK(ok.raw_mass == doctest::Approx(1.0).epsilon(1e-3));

  auto half = d;
  for (auto& x : half.density) x *= 0.5;
  CHECK_THROWS_AS(density_view(half), MassError);
  half.atom_at_zero = 0.5;
  const auto with_atom = density_view(half);
  REQUIRE(with_atom.atoms.size() == 1);
  CHECK(with_atom.atoms[0].second == doctest::Approx(0.5));

  auto cut = d;
  cut.grid = linspace(0.0, 0.9, 91);
  cut.density.resize(91);
  for (auto& x : cut.density) x /= 0.972;
  CHECK_THROWS_AS(density_view(cut), MassError);

  auto neg = d;
  neg.density[50] = -1e-9;
  CHECK_NOTHROW(density_view(neg));
}

TEST_CASE("Marchenko-Pastur histogram") {
  const long n1 = 1000;
  SimulationConfig cfg;
  cfg.shape = {n1, n1, 2 * n1, 1, {}};
  cfg.activation = make_activation("abslin");
  const auto s = multilayer(cfg, 77)[0];
  const auto p = ModelParams::from_shape(compute_theta(cfg.activation), n1, n1, 2 * n1);
  const auto F = cdf(density_view(theoretical_density(p)));
  const auto h = histogram(s, 40, std::pair{0.0, 3.2});
  double worst = 0.0;
  for (std::size_t i = 0; i < h.heights.size(); ++i) {
    const double a = h.centers[i] - 0.5 * h.bin_width, b = a + h.bin_width;
    worst = std::max(worst, std::abs(h.heights[i] - (F(b) - F(a)) / h.bin_width));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{125, 250, 500, 1000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 / v);
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
}
