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
#include <numbers>

#include "rfs/error.hpp"
#include "rfs/metrics.hpp"
#include "rfs/simulate.hpp"

using namespace rfs;

namespace {

SimulationConfig config(const char* act, long n0, long n1, long m, double sigma_b = 0.0,
                        int layers = 1) {
  SimulationConfig c;
  c.shape = {n0, n1, m, layers, {}};
  c.activation = make_activation(act, 1.0, 1.0, sigma_b);
  return c;
}

double trace_of(const EmpiricalSpectrum& s) {
  double t = 0.0;
  for (double e : s.eigenvalues) t += e;
  return t;
}

}  // namespace

TEST_CASE("one layer reproduces the single-layer model") {
  const auto cfg = config("tanh", 60, 40, 50, 0.3);
  const auto direct = multilayer(cfg, 17);
  const auto mats = sample_matrices(cfg.shape, cfg.dist_x, cfg.dist_w, 0.3, 17);
  const Matrix Y = forward_layer(mats.X, mats.W, mats.bias, cfg.activation);
  const auto s = spectrum(Y, cfg.shape.m);
  REQUIRE(direct.size() == 1);
  CHECK(direct[0].eigenvalues == s.eigenvalues);
  CHECK(mats.bias_matrix().col(7) == mats.bias);
}

TEST_CASE("spectrum basics") {
  SUBCASE("zero matrix") {
    const auto s = spectrum(Matrix::Zero(5, 8), 8);
    for (double e : s.eigenvalues) CHECK(e == 0.0);
  }
  SUBCASE("trace identity, PSD and rank") {
    const auto cfg = config("tanh", 50, 60, 40);
    const auto mats = sample_matrices(cfg.shape, cfg.dist_x, cfg.dist_w, 0.0, 5);
    const Matrix Y = forward_layer(mats.X, mats.W, mats.bias, cfg.activation);
    const auto s = spectrum(Y, 40);
    CHECK(trace_of(s) == doctest::Approx(Y.squaredNorm() / 40.0).epsilon(1e-8));
    CHECK(s.eigenvalues.front() >= -1e-10 * s.eigenvalues.back());
    const auto zeros = std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                                     [](double e) { return e < 1e-8; });
    CHECK(zeros >= 60 - 40);
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
  }
}

TEST_CASE("seeds determine spectra") {
  const auto cfg = config("abslin", 40, 30, 35, 0.5, 3);
  const auto a = multilayer(cfg, 1234);
  const auto b = multilayer(cfg, 1234);
  const auto c = multilayer(cfg, 1235);
  REQUIRE(a.size() == 3);
  for (int l = 0; l < 3; ++l) {
    CHECK(a[l].eigenvalues == b[l].eigenvalues);
    CHECK(a[l].eigenvalues != c[l].eigenvalues);
    CHECK(a[l].layer == l + 1);
  }
}

TEST_CASE("replicas") {
  const auto cfg = config("tanh", 30, 20, 25, 0.0, 2);
  const auto one = replicate(cfg, 1, 99);
  const auto direct = multilayer(cfg, derive_seed(99, 0));
  REQUIRE(one.size() == 2);
  CHECK(one[0].eigenvalues == direct[0].eigenvalues);
  CHECK(one[1].eigenvalues == direct[1].eigenvalues);

  const auto par = replicate(cfg, 6, 7, Execution::Parallel);
  const auto ser = replicate(cfg, 6, 7, Execution::Serial);
  REQUIRE(par.size() == 12);
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].eigenvalues == ser[i].eigenvalues);
    CHECK(par[i].layer == static_cast<int>(i % 2) + 1);
    CHECK(par[i].seed == derive_seed(7, i / 2));
  }
  CHECK_THROWS_AS(replicate(cfg, 0, 1), UsageError);
}

TEST_CASE("batch normalization gives unit mean square") {
  auto cfg = config("abslin", 40, 50, 60, 0.5, 4);
  cfg.batch_norm = true;
  for (const auto& s : multilayer(cfg, 3))
    CHECK(trace_of(s) / 50.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("overflow is reported with its layer") {
  SimulationConfig cfg = config("identity", 20, 20, 20, 0.0, 4);
  cfg.activation = center_activation([](double x) { return 1e100 * x; },
                                     [](double) { return 1e100; }, 1.0, 1.0, 0.0, "huge");
  try {
    multilayer(cfg, 1);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.layer() == 2);
  }
}

TEST_CASE("invalid shapes are usage errors") {
  NetworkShape s{1, 10, 10, 1, {}};
  CHECK_THROWS_AS(s.validate(), UsageError);
  NetworkShape w{10, 10, 10, 2, {10}};
  CHECK_THROWS_AS(w.validate(), UsageError);
  NetworkShape v{10, 10, 10, 2, {10, 7}};
  CHECK_NOTHROW(v.validate());
  CHECK(v.width(2) == 7);
  CHECK(v.width(0) == 10);
}

TEST_CASE("per-layer widths") {
  SimulationConfig cfg = config("tanh", 30, 20, 25, 0.0, 3);
  cfg.shape.widths = {20, 15, 10};
  const auto out = multilayer(cfg, 2);
  CHECK(out[0].eigenvalues.size() == 20);
  CHECK(out[1].eigenvalues.size() == 15);
  CHECK(out[2].eigenvalues.size() == 10);
}

TEST_CASE("gaussian entries pass a Kolmogorov-Smirnov smoke test") {
  const auto cfg = config("identity", 100, 50, 80);
  auto x = sample_matrices(cfg.shape, cfg.dist_x, cfg.dist_w, 0.0, 8).X;
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = 0.5 * std::erfc(-v[i] / std::numbers::sqrt2);
    d = std::max({d, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("theta2 = 0 without bias: depth drift decays with width") {
  // finite-width drift grows with depth but shrinks like 1/n1
  auto drift = [](long n1) {
    const auto s = multilayer(config("abslin", 2 * n1, n1, 2 * n1, 0.0, 5), 21);
    return wasserstein1(esd_view(s[4], false), esd_view(s[0], false));
  };
  const double w200 = drift(200), w800 = drift(800);
  CHECK(w800 < 0.5 * w200);
  CHECK(w800 <= 25.0 / 800);
}

TEST_CASE("entry law universality") {
  const long n1 = 1000;
  auto g = config("tanh", n1, n1, n1);
  auto r = g;
  r.dist_x.kind = r.dist_w.kind = EntryKind::Rademacher;
  const auto sg = multilayer(g, 4);
  const auto sr = multilayer(r, 4);
  CHECK(wasserstein1(esd_view(sg[0], false), esd_view(sr[0], false)) <= 5.0 / std::sqrt(n1));
}
