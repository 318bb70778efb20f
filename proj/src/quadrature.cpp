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

#include "rfs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "rfs/error.hpp"

namespace rfs::quad {
namespace {

// Golub-Welsch for the initial guess, then Newton on the normalized Hermite
// functions psi_k(x) = p_k(x) exp(-x^2/4) which stay bounded for large x.
// Weights are Christoffel numbers exp(-x^2/2) / sum_k psi_k^2, so tiny
// weights keep full relative accuracy instead of overflowing.
Rule build_gauss_hermite(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  Eigen::VectorXd guess = es.eigenvalues();

  // Orthonormal p_k(x) by recurrence, rescaled on the fly. Returns p_n,
  // p_{n-1} in a common scale and log of sum_{k<n} p_k^2.
  auto hermite = [n](double x, double& p_n, double& p_nm1, double& log_sumsq) {
    double prev = 0.0;
    double cur = 1.0;
    double sumsq = 0.0;
    double log_scale = 0.0;
    for (int k = 0; k < n; ++k) {
      sumsq += cur * cur;
      const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                          std::sqrt(static_cast<double>(k + 1));
      prev = cur;
      cur = next;
      if (std::abs(cur) > 1e150) {
        cur *= 1e-150;
        prev *= 1e-150;
        sumsq *= 1e-300;
        log_scale += 150.0 * std::numbers::ln10;
      }
    }
    p_n = cur;
    p_nm1 = prev;
    log_sumsq = std::log(sumsq) + 2.0 * log_scale;
  };

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = n / 2;
  // Positive half only; the rule is mirrored so odd integrands cancel exactly.
  for (int i = n - half; i < n; ++i) {
    double x = guess(i);
    double p_n = 0.0, p_nm1 = 0.0, log_sumsq = 0.0;
    for (int it = 0; it < 8; ++it) {
      hermite(x, p_n, p_nm1, log_sumsq);
      // p_n' = sqrt(n) p_{n-1}.
      const double dx = p_n / (std::sqrt(static_cast<double>(n)) * p_nm1);
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    hermite(x, p_n, p_nm1, log_sumsq);
    const double w = std::exp(-log_sumsq);
    rule.nodes[i] = x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    double p_n = 0.0, p_nm1 = 0.0, log_sumsq = 0.0;
    hermite(0.0, p_n, p_nm1, log_sumsq);
    rule.nodes[half] = 0.0;
    rule.weights[half] = std::exp(-log_sumsq);
  }
  return rule;
}

Rule build_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int n, Rule (*build)(int)) {
  if (n < 1) throw UsageError("quadrature rule needs at least one node");
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;  // std::map nodes never move
}

// Breakpoints of [-T, T] in standardized units.
std::vector<double> panels(std::span<const double> kinks, double truncation) {
  std::vector<double> cuts{-truncation, truncation};
  for (double k : kinks)
    if (k > -truncation && k < truncation) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Visit (x, weight) pairs of the standard-normal rule at level n.
template <class Visit>
void for_each_node(int n, std::span<const double> kinks, double truncation, Visit&& visit) {
  if (kinks.empty()) {
    const Rule& r = gauss_hermite(n);
    for (int i = 0; i < n; ++i) visit(r.nodes[i], r.weights[i]);
    return;
  }
  const Rule& gl = gauss_legendre(n);
  const auto cuts = panels(kinks, truncation);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
    const double half = 0.5 * (cuts[p + 1] - cuts[p]);
    for (int i = 0; i < n; ++i) {
      const double x = mid + half * gl.nodes[i];
      visit(x, half * gl.weights[i] * normal_pdf(x));
    }
  }
}

struct Estimate {
  double value = 0.0;
  double magnitude = 0.0;
};

template <class Level>
double converge(const Options& opt, Level&& level, const char* what) {
  if (opt.levels.empty()) throw UsageError("quadrature needs at least one level");
  Estimate prev = level(opt.levels.front());
  if (opt.levels.size() == 1) return prev.value;
  double change = 0.0;
  for (std::size_t l = 1; l < opt.levels.size(); ++l) {
    const Estimate cur = level(opt.levels[l]);
    change = std::abs(cur.value - prev.value);
    const double scale = std::max({std::abs(cur.value), cur.magnitude, 1e-300});
    if (!std::isfinite(cur.value)) break;
    if (change <= opt.rel_tol * scale) return cur.value;
    prev = cur;
  }
  std::ostringstream os;
  os << what << ": no convergence up to " << opt.levels.back()
     << " nodes (last change " << change << ", value " << prev.value << ")";
  throw QuadratureError(os.str());
}

}  // namespace

const Rule& gauss_hermite(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, &build_gauss_hermite);
}

const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, &build_gauss_legendre);
}

namespace {

double mean_impl(const Fn1& h, std::span<const double> kinks, const Options& opt) {
  return converge(opt, [&](int n) {
    Estimate e;
    for_each_node(n, kinks, opt.truncation, [&](double x, double w) {
      const double v = h(x);
      e.value += w * v;
      e.magnitude += w * std::abs(v);
    });
    return e;
  }, "gaussian_mean");
}

std::vector<double> multi_impl(const FnN& h, std::size_t count, std::span<const double> kinks,
                               const Options& opt) {
  // Each component converges on its own scale; the node sweep is shared.
  std::vector<double> buf(count);
  std::vector<double> prev;
  double worst = 0.0;
  for (std::size_t l = 0; l < opt.levels.size(); ++l) {
    std::vector<double> cur(count, 0.0), mag(count, 0.0);
    for_each_node(opt.levels[l], kinks, opt.truncation, [&](double x, double w) {
      h(x, buf);
      for (std::size_t c = 0; c < count; ++c) {
        cur[c] += w * buf[c];
        mag[c] += w * std::abs(buf[c]);
      }
    });
    if (!prev.empty()) {
      bool ok = true;
      worst = 0.0;
      for (std::size_t c = 0; c < count; ++c) {
        const double scale = std::max({std::abs(cur[c]), mag[c], 1e-300});
        const double rel = std::abs(cur[c] - prev[c]) / scale;
        worst = std::max(worst, rel);
        if (!(rel <= opt.rel_tol)) ok = false;
      }
      if (ok) return cur;
    }
    prev = std::move(cur);
  }
  if (opt.levels.size() == 1) return prev;
  std::ostringstream os;
  os << "gaussian_mean_multi: no convergence up to " << opt.levels.back()
     << " nodes (worst relative change " << worst << ")";
  throw QuadratureError(os.str());
}

double mean_2d_impl(const Fn2& h, double var, double cov, std::span<const double> kinks1,
                    std::span<const double> kinks2, const Options& opt) {

  if (kinks1.empty() && kinks2.empty()) {
    const double a = std::sqrt(0.5 * (var + cov));
    const double c = std::sqrt(0.5 * (var - cov));
    return converge(opt, [&](int n) {
      const Rule& r = gauss_hermite(n);
      Estimate e;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double v = h(a * r.nodes[i] + c * r.nodes[j], a * r.nodes[i] - c * r.nodes[j]);
          const double w = r.weights[i] * r.weights[j];
          e.value += w * v;
          e.magnitude += w * std::abs(v);
        }
      }
      return e;
    }, "gaussian_mean_2d");
  }

  const double sd = std::sqrt(var);
  const double rho = cov / var;
  const double cond_sd = sd * std::sqrt(1.0 - rho * rho);
  std::vector<double> outer_kinks;
  for (double k : kinks1) outer_kinks.push_back(k / sd);
  std::vector<double> inner_kinks(kinks2.size());
  return converge(opt, [&](int n) {
    Estimate e;
    for_each_node(n, outer_kinks, opt.truncation, [&](double x, double wx) {
      const double u1 = sd * x;
      const double centre = rho * u1;
      for (std::size_t k = 0; k < kinks2.size(); ++k)
        inner_kinks[k] = (kinks2[k] - centre) / cond_sd;
      for_each_node(n, inner_kinks, opt.truncation, [&](double y, double wy) {
        const double v = h(u1, centre + cond_sd * y);
        e.value += wx * wy * v;
        e.magnitude += wx * wy * std::abs(v);
      });
    });
    return e;
  }, "gaussian_mean_2d");
}

// Unit-width panel breaks on [-T, T], in units of `sd`.
std::vector<double> unit_breaks(const Options& opt, double sd) {
  std::vector<double> out;
  for (double k = std::ceil(-opt.truncation) + 1.0; k < opt.truncation; k += 1.0)
    out.push_back(sd * k);
  return out;
}

// Weight of the integrand at the window edge; large values mean the
// truncated panel integral misses mass.
bool tail_negligible(double edge_value, double scale, const Options& opt) {
  return std::abs(edge_value) * normal_pdf(opt.truncation) <= opt.rel_tol * std::max(scale, 1e-300);
}

Options panel_options(const Options& opt) {
  Options o = opt;
  o.levels = {25, 50, 100};
  return o;
}

[[noreturn]] void rethrow_with_fallback_note(const QuadratureError& e) {
  throw QuadratureError(std::string(e.what()) + "; panel fallback did not help");
}

}  // namespace

// Smooth integrands start with Gauss-Hermite. If that does not settle,
// unit-width Gauss-Legendre panels are tried before giving up.
double gaussian_mean(const Fn1& h, std::span<const double> kinks, const Options& opt) {
  if (!kinks.empty()) return mean_impl(h, kinks, opt);
  try {
    return mean_impl(h, {}, opt);
  } catch (const QuadratureError& e) {
    double v = 0.0;
    try {
      v = mean_impl(h, unit_breaks(opt, 1.0), panel_options(opt));
    } catch (const QuadratureError&) {
      rethrow_with_fallback_note(e);
    }
    const double edge = std::max(std::abs(h(-opt.truncation)), std::abs(h(opt.truncation)));
    if (!tail_negligible(edge, std::abs(v), opt)) rethrow_with_fallback_note(e);
    return v;
  }
}

std::vector<double> gaussian_mean_multi(const FnN& h, std::size_t count,
                                        std::span<const double> kinks, const Options& opt) {
  if (!kinks.empty()) return multi_impl(h, count, kinks, opt);
  try {
    return multi_impl(h, count, {}, opt);
  } catch (const QuadratureError& e) {
    std::vector<double> v;
    try {
      v = multi_impl(h, count, unit_breaks(opt, 1.0), panel_options(opt));
    } catch (const QuadratureError&) {
      rethrow_with_fallback_note(e);
    }
    std::vector<double> lo(count), hi(count);
    h(-opt.truncation, lo);
    h(opt.truncation, hi);
    for (std::size_t c = 0; c < count; ++c)
      if (!tail_negligible(std::max(std::abs(lo[c]), std::abs(hi[c])), std::abs(v[c]), opt))
        rethrow_with_fallback_note(e);
    return v;
  }
}

double gaussian_mean_2d(const Fn2& h, double var, double cov, std::span<const double> kinks1,
                        std::span<const double> kinks2, const Options& opt) {
  if (!(var > 0.0) || std::abs(cov) >= var)
    throw UsageError("gaussian_mean_2d: covariance must be positive definite");
  if (!kinks1.empty() || !kinks2.empty()) return mean_2d_impl(h, var, cov, kinks1, kinks2, opt);
  try {
    return mean_2d_impl(h, var, cov, {}, {}, opt);
  } catch (const QuadratureError& e) {
    const double sd = std::sqrt(var);
    const auto breaks = unit_breaks(opt, sd);
    double v = 0.0;
    try {
      v = mean_2d_impl(h, var, cov, breaks, breaks, panel_options(opt));
    } catch (const QuadratureError&) {
      rethrow_with_fallback_note(e);
    }
    const double t = opt.truncation * sd, r = cov / var;
    double edge = 0.0;
    for (double s1 : {-1.0, 1.0})
      for (double s2 : {-1.0, 1.0}) edge = std::max(edge, std::abs(h(s1 * t, s2 * r * t)));
    if (!tail_negligible(edge, std::abs(v), opt)) rethrow_with_fallback_note(e);
    return v;
  }
}

}  // namespace rfs::quad
