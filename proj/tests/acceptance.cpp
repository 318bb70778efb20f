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
// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures. Arguments select a subset, e.g. `acceptance 1 3`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rfs/activation.hpp"
#include "rfs/cumulants.hpp"
#include "rfs/metrics.hpp"
#include "rfs/selfconsistent.hpp"
#include "rfs/simulate.hpp"

using namespace rfs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SimulationConfig network(const char* act, double sigma_b, long n0, long n1, long m, int layers = 1) {
  SimulationConfig c;
  c.shape = {n0, n1, m, layers, {}};
  c.activation = make_activation(act, 1.0, 1.0, sigma_b);
  return c;
}

GriddedView theory_view(const SimulationConfig& c) {
  const auto p = ModelParams::from_shape(compute_theta(c.activation), c.shape.n0, c.shape.n1,
                                         c.shape.m);
  return density_view(theoretical_density(p));
}

// Marchenko-Pastur density with ratio c and scale t.
double mp_density(double lam, double c, double t) {
  const double a = t * (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
  const double b = t * (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
  if (lam <= a || lam >= b) return 0.0;
  return std::sqrt((b - lam) * (lam - a)) / (2.0 * std::numbers::pi * t * c * lam);
}

Outcome mp_reduction() {
  Stopwatch sw;
  ModelParams p;
  p.theta1_eff = 1.0;
  p.theta2 = 0.0;
  p.phi = p.psi = 1.0;
  const auto grid = linspace(0.05, 3.95, 400);
  const auto sols = trace_branch(p, grid, 1e-8);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(sols[i].g.imag() / std::numbers::pi - mp_density(grid[i], 1.0, 1.0)));
  const double t = sw.seconds();
  return {worst <= 1e-4 && t < 5.0, fmt("max |density - MP| = %.2e over 400 points, %.2f s", worst, t)};
}

Outcome series_vs_quadrature() {
  Stopwatch sw;
  double worst = 0.0;
  for (const char* act : {"tanh", "abslin"})
    for (double sb : {0.25, 0.5}) {
      const auto spec = make_activation(act, 1.0, 1.0, sb);
      const auto s = theta_series(spec, 30);
      worst = std::max({worst, std::abs(s.theta1b - compute_theta1b(spec)),
                        std::abs(s.theta2 - compute_theta2(spec))});
    }
  const double t = sw.seconds();
  return {worst <= 1e-7 && t < 5.0, fmt("max |series - quadrature| = %.2e, %.2f s", worst, t)};
}

Outcome bulk_fit() {
  const long n1 = 1500, n0 = 7500, m = 7500;
  bool ok = true;
  std::string detail;
  for (double sb : {0.0, 0.25}) {
    Stopwatch sw;
    const auto cfg = network("tanh", sb, n0, n1, m);
    const auto spec = multilayer(cfg, derive_seed(31, static_cast<std::uint64_t>(sb * 100)))[0];
    const double w = wasserstein1(esd_view(spec, sb > 0.0), theory_view(cfg));
    const double t = sw.seconds();
    ok = ok && w <= 0.02 && t < 60.0;
    detail += fmt("sigma_b=%.2f: W1 = %.4f (%.1f s)  ", sb, w, t);
  }
  return {ok, detail};
}

Outcome outlier_location() {
  bool ok = true;
  std::string detail;
  for (long n1 : {500L, 1000L, 2000L}) {
    const auto cfg = network("tanh", 0.25, n1, n1, n1);
    const double target = static_cast<double>(n1) * compute_theta1b(cfg.activation);
    const double tol = 5.0 / std::sqrt(static_cast<double>(n1));
    int hits = 0;
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 10; ++r) {
      const auto s = multilayer(cfg, derive_seed(4000 + n1, r))[0];
      const double dev = std::abs(s.eigenvalues.back() / target - 1.0);
      worst = std::max(worst, dev);
      hits += dev <= tol;
    }
    ok = ok && hits >= 9;
    detail += fmt("n1=%ld: %d/10 (worst %.3f, tol %.3f)  ", n1, hits, worst, tol);
  }
  return {ok, detail};
}

Outcome wasserstein_decay() {
  std::vector<double> xs, ys;
  std::string detail;
  for (long n1 : {125L, 250L, 500L, 1000L, 2000L}) {
    const auto cfg = network("abslin", 0.0, 2 * n1, n1, 2 * n1);
    const auto theory = theory_view(cfg);
    double acc = 0.0;
    for (const auto& s : replicate(cfg, 10, derive_seed(5, n1))) acc += wasserstein1(esd_view(s, false), theory);
    xs.push_back(static_cast<double>(n1));
    ys.push_back(acc / 10.0);
    detail += fmt("%ld:%.2e ", n1, acc / 10.0);
  }
  const double slope = loglog_slope(xs, ys);
  return {slope >= -1.3 && slope <= -0.7, fmt("slope %.3f; mean W1 %s", slope, detail.c_str())};
}

std::vector<double> layer_medians(double sb) {
  const long n1 = 1000;
  const int layers = 5, reps = 5;
  const auto cfg = network("abslin", sb, 2 * n1, n1, 2 * n1, layers);
  const auto theory = theory_view(cfg);
  std::vector<std::vector<double>> w(layers);
  for (const auto& s : replicate(cfg, reps, derive_seed(6, static_cast<std::uint64_t>(sb * 100))))
    w[static_cast<std::size_t>(s.layer - 1)].push_back(wasserstein1(esd_view(s, sb > 0.0), theory));
  std::vector<double> med;
  for (auto& v : w) med.push_back(median(v));
  return med;
}

Outcome isospectrality() {
  const auto bias = layer_medians(0.5);
  const auto free = layer_medians(0.0);
  const double bias_ratio = bias[4] / bias[0];
  double free_ratio = 0.0;
  for (double v : free) free_ratio = std::max(free_ratio, v / free[0]);
  std::string detail = fmt("bias layer5/layer1 = %.1f (need > 10); bias-free max layer/layer1 = %.2f (need <= 2); medians bias",
                           bias_ratio, free_ratio);
  for (double v : bias) detail += fmt(" %.3g", v);
  detail += "; bias-free";
  for (double v : free) detail += fmt(" %.3g", v);
  return {bias_ratio > 10.0 && free_ratio <= 2.0, detail};
}

Outcome cumulant_structure() {
  Stopwatch sw;
  const NetworkShape shape{50, 50, 50, 1, {}};
  const auto spec = make_activation("tanh", 1.0, 1.0, 0.25);
  const auto rep = estimate_entry_cumulants(spec, shape, 2000, 7);
  bool ok = true;
  std::string detail;
  for (const char* label : {"variance", "bias_cross", "n0*cycle4"}) {
    const auto& e = rep.at(label);
    const double z = std::abs(e.estimate - e.target) / e.std_error;
    ok = ok && z <= 3.0;
    detail += fmt("%s %.4f vs %.4f (%.1f sd)  ", label, e.estimate, e.target, z);
  }
  const auto cyc = wx_cycle_cumulant_check(shape, {}, {}, 2, 2000, 8);
  const double z = std::abs(cyc.estimate - cyc.target) / cyc.std_error;
  ok = ok && z <= 3.0;
  detail += fmt("n0*wx_cycle2 %.4f vs %.4f (%.1f sd), %.1f s", 50 * cyc.estimate, 50 * cyc.target, z, sw.seconds());
  return {ok && sw.seconds() < 300.0, detail};
}

Outcome concentration() {
  const std::complex<double> z{1.0, 1.0};
  std::vector<double> xs, ys;
  std::string detail;
  for (long n1 : {250L, 500L, 1000L}) {
    const auto cfg = network("abslin", 0.0, n1, n1, n1);
    std::vector<std::complex<double>> gs;
    for (const auto& s : replicate(cfg, 50, derive_seed(8, n1))) {
      std::complex<double> g = 0.0;
      for (double e : s.eigenvalues) g += 1.0 / (e - z);
      gs.push_back(g / static_cast<double>(n1));
    }
    std::complex<double> mean = 0.0;
    for (auto g : gs) mean += g;
    mean /= static_cast<double>(gs.size());
    double var = 0.0;
    for (auto g : gs) var += std::norm(g - mean);
    var /= static_cast<double>(gs.size() - 1);
    xs.push_back(static_cast<double>(n1));
    ys.push_back(var);
    detail += fmt("%ld:%.2e ", n1, var);
  }
  const double slope = loglog_slope(xs, ys);
  return {std::abs(slope + 2.0) <= 0.5, fmt("slope %.3f; Var g %s", slope, detail.c_str())};
}

Outcome property_suites() {
  std::mt19937_64 gen(909);
  int herglotz = 0, cumulant = 0, metric = 0;

  std::uniform_real_distribution<double> pos(0.2, 5.0), frac(0.0, 1.0), re(-2.0, 12.0);
  std::uniform_real_distribution<double> logim(-3.0, 0.7), logr(2.0, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    ModelParams p;
    p.theta1_eff = 0.6 * pos(gen);
    p.theta2 = p.theta1_eff * frac(gen);
    p.phi = pos(gen);
    p.psi = pos(gen);
    const std::complex<double> zz{re(gen), std::pow(10.0, logim(gen))};
    const auto s = trace_branch(p, std::vector<double>{zz.real()}, zz.imag());
    const double tol = 1e-10 * std::max(1.0, std::pow(std::abs(zz), 4));
    if (!(s[0].g.imag() >= -1e-9) || !(s[0].residual <= tol)) ++herglotz;
    const double R = std::pow(10.0, logr(gen));
    const std::complex<double> w{0.0, R};
    if (!(std::abs(solve_g(p, w).g + 1.0 / w) <= 10.0 / (R * R))) ++herglotz;
  }

  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> order(2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = order(gen);
    Eigen::MatrixXd s(300, k + 1);
    for (long i = 0; i < s.rows(); ++i) {
      double common = nd(gen);
      for (int j = 0; j <= k; ++j) s(i, j) = nd(gen) + common * (0.3 + 0.1 * j) + 0.2 * j;
    }
    const Eigen::MatrixXd base = s.leftCols(k);
    Eigen::MatrixXd alt = base, mix = base;
    alt.col(0) = s.col(k);
    const double a = nd(gen), b = nd(gen);
    mix.col(0) = a * base.col(0) + b * s.col(k);
    const double k0 = joint_cumulant(base);
    const double lin = a * k0 + b * joint_cumulant(alt);
    const double scale = 1.0 + std::abs(a * k0) + std::abs(lin);
    if (std::abs(joint_cumulant(mix) - lin) > 1e-10 * scale) ++cumulant;
    std::vector<int> perm(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) perm[static_cast<std::size_t>(j)] = j;
    std::shuffle(perm.begin(), perm.end(), gen);
    Eigen::MatrixXd permuted(base.rows(), k);
    for (int j = 0; j < k; ++j) permuted.col(j) = base.col(perm[static_cast<std::size_t>(j)]);
    if (std::abs(joint_cumulant(permuted) - k0) > 1e-10 * (1.0 + std::abs(k0))) ++cumulant;
  }

  std::uniform_int_distribution<int> size(1, 60);
  auto draw = [&] {
    std::vector<double> v(static_cast<std::size_t>(size(gen)));
    const double shift = 3.0 * nd(gen), spread = 0.1 + std::abs(nd(gen));
    for (auto& x : v) x = shift + spread * nd(gen);
    return empirical_view(v);
  };
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = draw(), b = draw(), c = draw();
    const double ab = wasserstein1(a, b), ba = wasserstein1(b, a);
    const double ac = wasserstein1(a, c), cb = wasserstein1(c, b);
    if (wasserstein1(a, a) != 0.0) ++metric;
    if (!(ab >= 0.0) || std::abs(ab - ba) > 1e-12 * (1.0 + ab)) ++metric;
    if (ab > ac + cb + 1e-12 * (1.0 + ab)) ++metric;
    if (a.atoms != b.atoms && !(ab > 0.0)) ++metric;
  }
  return {herglotz + cumulant + metric == 0,
          fmt("violations: herglotz/residual/asymptotic %d of 2000, cumulant %d of 400, W1 axioms %d of 2000",
              herglotz, cumulant, metric)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"MP reduction", mp_reduction},
      {"series vs quadrature", series_vs_quadrature},
      {"bulk fit", bulk_fit},
      {"outlier location", outlier_location},
      {"Wasserstein decay", wasserstein_decay},
      {"bias breaks isospectrality", isospectrality},
      {"cumulant structure", cumulant_structure},
      {"concentration scaling", concentration},
      {"property suites", property_suites},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d (%s): %s  %s\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
