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

#include "rfs/selfconsistent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "rfs/error.hpp"

namespace rfs {
namespace {

constexpr double kHerglotzTol = 1e-6;

using Poly = std::vector<cplx>;

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

cplx derivative(const QuarticCoeffs& c, cplx g) {
  cplx d = 4.0 * c[4];
  for (int k = 3; k >= 1; --k) d = d * g + static_cast<double>(k) * c[k];
  return d;
}

// dP/dz at fixed g, for the continuation predictor.
cplx partial_z(const ModelParams& p, cplx z, cplx g) {
  const double a = p.phi / p.psi;
  const double c = p.theta2 * (p.theta1_eff - p.theta2) / p.psi;
  const cplx u = 1.0 + z * g;
  const cplx h = 1.0 - a * u;
  const cplx A = p.theta1_eff - (p.theta2 / p.psi) * u;
  const cplx dh = -a * g;
  const cplx dA = -(p.theta2 / p.psi) * g;
  return g - (dA * g * h + A * g * dh) - c * g * g * 2.0 * h * dh;
}

struct Pick {
  cplx g;
  bool ambiguous = false;
  std::vector<cplx> roots;
};

Pick pick_root(const ModelParams& p, cplx z, cplx target, long index) {
  Pick out;
  out.roots = polynomial_roots(quartic_coeffs(p, z));
  std::vector<cplx> valid;
  for (const cplx& r : out.roots)
    if (r.imag() >= -kHerglotzTol) valid.push_back(r);
  if (valid.empty()) {
    std::ostringstream os;
    os << "no root with Im g >= " << -kHerglotzTol << " at z = " << z;
    throw BranchError(os.str(), index);
  }
  std::sort(valid.begin(), valid.end(), [&](cplx a, cplx b) {
    return std::abs(a - target) < std::abs(b - target);
  });
  out.g = valid[0];
  if (valid.size() >= 2) {
    const double d1 = std::abs(valid[0] - target);
    const double d2 = std::abs(valid[1] - target);
    const bool close_pair = std::abs(valid[0] - valid[1]) < 1e-6;
    out.ambiguous = close_pair || (d2 < 3.0 * d1 && d1 > 1e-13 * (1.0 + std::abs(target)));
  }
  return out;
}

class Tracer {
 public:
  Tracer(const ModelParams& p, long index) : p_(p), index_(index) {}

  // Moves the branch value g0 at z0 to z1, halving the step while the
  // nearest-root match is ambiguous.
  Pick advance(cplx z0, cplx g0, cplx z1) {
    budget_ = 1 << 14;
    return step(z0, g0, z1, 0);
  }

 private:
  Pick step(cplx z0, cplx g0, cplx z1, int depth) {
    const auto c = quartic_coeffs(p_, z0);
    const cplx pg = derivative(c, g0);
    cplx predicted = g0;
    if (std::abs(pg) > 0.0) {
      const cplx slope = -partial_z(p_, z0, g0) / pg;
      if (std::isfinite(slope.real()) && std::isfinite(slope.imag()))
        predicted = g0 + slope * (z1 - z0);
    }
    Pick pk = pick_root(p_, z1, predicted, index_);
    if (!pk.ambiguous) return pk;
    if (depth >= 60 || --budget_ <= 0 ||
        std::abs(z1 - z0) <= 1e-15 * (1.0 + std::abs(z0))) {
      // Unresolvable at this resolution; the nearest root to the prediction
      // is the best available guess.
      return pk;
    }
    const cplx mid = 0.5 * (z0 + z1);
    const Pick half = step(z0, g0, mid, depth + 1);
    return step(mid, half.g, z1, depth + 1);
  }

  const ModelParams& p_;
  long index_;
  int budget_ = 0;
};

StieltjesSolution make_solution(const ModelParams& p, cplx z, Pick pk) {
  StieltjesSolution s;
  s.z = z;
  s.g = pk.g;
  s.residual = std::abs(evaluate_polynomial(quartic_coeffs(p, z), pk.g));
  s.all_roots = std::move(pk.roots);
  return s;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return acc;
}

// Support, edge bins and the mass check from a finished density.
void finalize(SpectralDensity& d, const ModelParams& p) {
  d.support.clear();
  d.edge_bins.clear();
  const std::size_t n = d.grid.size();
  std::size_t i = 0;
  while (i < n) {
    if (d.density[i] <= kSupportThreshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && d.density[j + 1] > kSupportThreshold) ++j;
    d.support.push_back({d.grid[i], d.grid[j]});
    auto flag = [&](std::size_t centre) {
      const std::size_t lo = centre >= 2 ? centre - 2 : 0;
      for (std::size_t k = lo; k <= std::min(centre + 2, n - 1); ++k) d.edge_bins.push_back(k);
    };
    if (i > 0) flag(i);
    if (j + 1 < n) flag(j);
    i = j + 1;
  }
  std::sort(d.edge_bins.begin(), d.edge_bins.end());
  d.edge_bins.erase(std::unique(d.edge_bins.begin(), d.edge_bins.end()), d.edge_bins.end());

  if (p.theta1b > 0.0 && p.n1) d.outlier = predict_outlier(p);
}

void check_mass(const SpectralDensity& d) {
  const std::size_t n = d.grid.size();
  const double mass = d.total_mass();
  if (!(mass >= 0.95 && mass <= 1.05)) {
    std::ostringstream os;
    os << "spectral mass " << mass << " outside [0.95, 1.05] on grid ["
       << (n ? d.grid.front() : 0.0) << ", " << (n ? d.grid.back() : 0.0) << "]";
    throw MassError(os.str());
  }
}

}  // namespace

ModelParams ModelParams::from_limits(const ThetaParams& t, double phi, double psi,
                                     std::optional<long> n1) {
  ModelParams p;
  p.theta1_eff = t.theta1 - t.theta1b;
  p.theta2 = t.theta2;
  p.phi = phi;
  p.psi = psi;
  p.theta1b = t.theta1b;
  p.n1 = n1;
  p.validate();
  return p;
}

double zero_atom(const ModelParams& p) {
  double atom = std::max(0.0, 1.0 - p.psi / p.phi);
  const bool linear = std::abs(p.theta1_eff - p.theta2) <= 1e-10 * std::max(1.0, p.theta2);
  if (linear) atom = std::max(atom, 1.0 - p.psi);
  return atom;
}

ModelParams ModelParams::from_shape(const ThetaParams& t, long n0, long n1, long m) {
  if (n0 < 1 || n1 < 1 || m < 1) throw UsageError("shape dimensions must be positive");
  return from_limits(t, static_cast<double>(n0) / static_cast<double>(m),
                     static_cast<double>(n0) / static_cast<double>(n1), n1);
}

void ModelParams::validate() const {
  std::ostringstream os;
  if (!(phi > 0.0) || !(psi > 0.0)) os << "phi and psi must be positive; ";
  if (!(theta2 >= -1e-12)) os << "theta2 must be nonnegative; ";
  if (!(theta1_eff >= theta2 - 1e-9)) os << "theta1_eff must be >= theta2; ";
  if (!(theta1b >= -1e-12)) os << "theta1b must be nonnegative; ";
  if (n1 && *n1 < 1) os << "n1 must be positive; ";
  const auto msg = os.str();
  if (!msg.empty()) throw UsageError("invalid model parameters: " + msg);
}

QuarticCoeffs quartic_coeffs(const ModelParams& p, cplx z) {
  const double a = p.phi / p.psi;
  const double c = p.theta2 * (p.theta1_eff - p.theta2) / p.psi;
  const Poly u{1.0, z};
  const Poly h{1.0 - a, -a * z};
  const Poly A{p.theta1_eff - p.theta2 / p.psi, -p.theta2 / p.psi * z};
  const Poly g{0.0, 1.0};
  const Poly linear = mul(mul(A, g), h);
  const Poly quad = mul(mul(mul(g, g), h), h);
  QuarticCoeffs out{};
  for (std::size_t k = 0; k < u.size(); ++k) out[k] += u[k];
  for (std::size_t k = 0; k < linear.size(); ++k) out[k] -= linear[k];
  for (std::size_t k = 0; k < quad.size(); ++k) out[k] -= c * quad[k];
  return out;
}

cplx evaluate_polynomial(const QuarticCoeffs& c, cplx g) {
  cplx v = c[4];
  for (int k = 3; k >= 0; --k) v = v * g + c[k];
  return v;
}

std::vector<cplx> polynomial_roots(const QuarticCoeffs& c) {
  double scale = 0.0;
  for (const cplx& x : c) scale = std::max(scale, std::abs(x));
  int degree = 4;
  while (degree > 0 && std::abs(c[degree]) <= 1e-14 * scale) --degree;
  std::vector<cplx> roots;
  if (degree == 0) return roots;
  if (degree == 1) {
    roots.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (int k = 0; k < degree; ++k) companion(0, k) = -c[degree - 1 - k] / c[degree];
    for (int k = 1; k < degree; ++k) companion(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    for (int k = 0; k < degree; ++k) roots.push_back(es.eigenvalues()(k));
  }
  for (cplx& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const cplx v = evaluate_polynomial(c, r);
      const cplx d = derivative(c, r);
      if (std::abs(d) == 0.0) break;
      const cplx next = r - v / d;
      if (!(std::abs(evaluate_polynomial(c, next)) < std::abs(v))) break;
      r = next;
    }
  }
  return roots;
}

StieltjesSolution solve_g(const ModelParams& p, cplx z, std::optional<cplx> seed) {
  if (!(z.imag() > 0.0)) throw UsageError("solve_g requires Im z > 0");
  const cplx target = seed ? *seed : -1.0 / z;
  return make_solution(p, z, pick_root(p, z, target, -1));
}

namespace {

// Traces lambda_grid[begin, end) into out[begin, end).
void trace_segment(const ModelParams& p, std::span<const double> lambda_grid, std::size_t begin,
                   std::size_t end, double eps, bool rtl, std::vector<StieltjesSolution>& out) {
  const std::size_t n = end - begin;
  if (n == 0) return;
  auto at = [&](std::size_t k) { return begin + k; };
  const std::size_t first = at(rtl ? n - 1 : 0);
  const double lam0 = lambda_grid[first];
  const double height = 10.0 * (1.0 + std::abs(lam0));

  Tracer tracer(p, static_cast<long>(first));
  cplx z{lam0, height};
  cplx g = pick_root(p, z, -1.0 / z, static_cast<long>(first)).g;
  double im = height;
  Pick pk;
  pk.g = g;
  while (im > eps) {
    const double next = std::max(eps, 0.5 * im);
    const cplx z1{lam0, next};
    pk = tracer.advance(z, g, z1);
    z = z1;
    g = pk.g;
    im = next;
  }
  if (pk.roots.empty()) pk.roots = polynomial_roots(quartic_coeffs(p, z));
  out[first] = make_solution(p, z, pk);

  for (std::size_t step = 1; step < n; ++step) {
    const std::size_t i = at(rtl ? n - 1 - step : step);
    const cplx z1{lambda_grid[i], eps};
    Tracer t(p, static_cast<long>(i));
    pk = t.advance(z, g, z1);
    z = z1;
    g = pk.g;
    out[i] = make_solution(p, z, pk);
  }
}

std::vector<double> pointwise_density(std::span<const StieltjesSolution> solutions,
                                      double atom_at_zero) {
  const std::size_t n = solutions.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = solutions[i].z.real();
    const double eps = solutions[i].z.imag();
    // The atom at zero appears as a Lorentzian of width eps.
    const double atom = atom_at_zero * eps / (lam * lam + eps * eps);
    const double raw = (solutions[i].g.imag() - atom) / std::numbers::pi;
    // Outside the support Im g(lambda + i eps) ~ eps dRe g/dlambda.
    double slope = 0.0;
    if (n >= 2) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = i + 1 < n ? i + 1 : n - 1;
      slope = (solutions[hi].g.real() - solutions[lo].g.real()) /
              (solutions[hi].z.real() - solutions[lo].z.real());
    }
    const double floor = 10.0 * eps * std::abs(slope) / std::numbers::pi;
    out[i] = raw > floor ? raw : 0.0;
  }
  return out;
}

}  // namespace

std::vector<StieltjesSolution> trace_branch(const ModelParams& p,
                                            std::span<const double> lambda_grid,
                                            double eps, SweepDirection dir) {
  p.validate();
  if (!(eps > 0.0)) throw UsageError("trace_branch requires eps > 0");
  const std::size_t n = lambda_grid.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(lambda_grid[i + 1] > lambda_grid[i]))
      throw UsageError("trace_branch requires a strictly increasing grid");
  std::vector<StieltjesSolution> out(n);
  if (n == 0) return out;

  // The origin can hold an atom or a hard edge; sweep each side toward it.
  const std::size_t split = static_cast<std::size_t>(
      std::upper_bound(lambda_grid.begin(), lambda_grid.end(), 0.0) - lambda_grid.begin());
  if (split > 0 && split < n) {
    trace_segment(p, lambda_grid, 0, split, eps, false, out);
    trace_segment(p, lambda_grid, split, n, eps, true, out);
  } else {
    trace_segment(p, lambda_grid, 0, n, eps, dir == SweepDirection::RightToLeft, out);
  }
  return out;
}

double SpectralDensity::continuous_mass() const { return trapezoid(grid, density); }

namespace {

SpectralDensity build_density(std::span<const StieltjesSolution> solutions,
                              const ModelParams& p) {
  SpectralDensity d;
  const std::size_t n = solutions.size();
  d.grid.resize(n);
  d.density.assign(n, 0.0);
  d.atom_at_zero = zero_atom(p);
  if (n == 0) return d;
  d.eps = solutions.front().z.imag();
  for (std::size_t i = 0; i < n; ++i) d.grid[i] = solutions[i].z.real();

  d.density = pointwise_density(solutions, d.atom_at_zero);
  // Within ~1e3 eps of an atom the Lorentzian swamps Im g; interpolate.
  if (d.atom_at_zero > 0.0) {
    auto swamped = [&](std::size_t i) { return std::abs(d.grid[i]) < 1e3 * d.eps; };
    for (std::size_t i = 0; i < n; ++i) {
      if (!swamped(i)) continue;
      std::size_t l = i, r = i;
      while (l > 0 && swamped(l)) --l;
      while (r + 1 < n && swamped(r)) ++r;
      const double yl = swamped(l) ? 0.0 : d.density[l];
      const double yr = swamped(r) ? 0.0 : d.density[r];
      const double w = (r == l) ? 0.0 : (d.grid[i] - d.grid[l]) / (d.grid[r] - d.grid[l]);
      d.density[i] = (1.0 - w) * yl + w * yr;
    }
  }
  finalize(d, p);
  return d;
}

}  // namespace

SpectralDensity density_from_branch(std::span<const StieltjesSolution> solutions,
                                    const ModelParams& p) {
  SpectralDensity d = build_density(solutions, p);
  check_mass(d);
  return d;
}

double predict_outlier(const ModelParams& p) {
  if (!(p.theta1b > 0.0)) throw NoOutlierError("no outlier without bias (theta1b = 0)");
  if (!p.n1) throw UsageError("outlier location needs the finite width n1");
  return static_cast<double>(*p.n1) * p.theta1b;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw UsageError("linspace needs points >= 2 and hi > lo");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + h * i;
  g.back() = hi;
  return g;
}

namespace {

// Nodes clustered at support edges where the density blows up (hard edges),
// e.g. lambda = 0 when phi = psi.
std::vector<double> hard_edge_nodes(const ModelParams& p, const SpectralDensity& d,
                                    double eps) {
  std::vector<double> extra;
  const auto& x = d.grid;
  const auto& y = d.density;
  const std::size_t n = x.size();
  // `in_i` is the first support node from the outside, `dir` points inward.
  auto refine = [&](std::size_t in_i, int dir) {
    auto node = [&](int k) { return static_cast<std::size_t>(static_cast<long>(in_i) + dir * k); };
    if (std::max(y[node(0)], y[node(1)]) <= y[node(3)]) return;
    // The smoothed density peaks at the branch point; zoom in on it.
    double a = std::min(x[node(-1)], x[node(1)]), b = std::max(x[node(-1)], x[node(1)]);
    double edge = a;
    for (int zoom = 0; zoom < 2; ++zoom) {
      const auto sub = linspace(a, b, 200);
      const auto dens = pointwise_density(trace_branch(p, sub, eps), d.atom_at_zero);
      const auto k = static_cast<std::size_t>(std::max_element(dens.begin(), dens.end()) - dens.begin());
      edge = sub[k];
      a = sub[k == 0 ? 0 : k - 1];
      b = sub[std::min(k + 1, sub.size() - 1)];
    }
    const double h = std::abs(x[node(1)] - x[node(0)]);
    // Im g / pi is smooth on the scale eps around the edge.
    for (int k = -8; k <= 8; ++k) extra.push_back(edge + 0.5 * k * eps);
    for (double off = 2.0 * h; off >= 4.0 * eps; off /= 1.25) {
      extra.push_back(edge + off);
      extra.push_back(edge - off);
    }
  };
  for (const auto& iv : d.support) {
    const auto i = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), iv.lo) - x.begin());
    const auto j = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), iv.hi) - x.begin());
    if (i >= 1 && i + 3 < n) refine(i, 1);
    if (j >= 3 && j + 1 < n) refine(j, -1);
  }
  return extra;
}

}  // namespace

SpectralDensity theoretical_density(const ModelParams& p, const DensityOptions& opt) {
  p.validate();
  double lo = 0.0, hi = 0.0;
  if (opt.grid_min && opt.grid_max) {
    lo = *opt.grid_min;
    hi = *opt.grid_max;
  } else {
    // Coarse pass to locate the support, widening until it is enclosed.
    const double ratio = p.phi / p.psi;
    const double atom = zero_atom(p);
    double upper = 2.0 * (p.theta1_eff + p.theta2) * (1.0 + std::sqrt(ratio)) * (1.0 + std::sqrt(ratio));
    upper = std::max(upper, 1e-6);
    double s_lo = 0.0, s_hi = 0.0;
    for (int attempt = 0;; ++attempt) {
      const auto coarse = linspace(-0.05 * upper, upper, 600);
      auto dens = pointwise_density(trace_branch(p, coarse, opt.eps), atom);
      if (atom > 0.0)
        for (std::size_t k = 0; k < coarse.size(); ++k)
          if (std::abs(coarse[k]) < 1e3 * opt.eps) dens[k] = 0.0;
      const auto in = [](double v) { return v > kSupportThreshold; };
      const auto first = std::find_if(dens.begin(), dens.end(), in);
      if (first != dens.end() && !in(dens.back())) {
        const auto last = std::find_if(dens.rbegin(), dens.rend(), in);
        s_lo = coarse[static_cast<std::size_t>(first - dens.begin())];
        s_hi = coarse[static_cast<std::size_t>(dens.rend() - last) - 1];
        break;
      }
      if (attempt >= 12) throw MassError("could not enclose the spectral support");
      upper *= 2.0;
    }
    const double width = s_hi - s_lo;
    lo = opt.grid_min.value_or(s_lo - opt.margin * width);
    hi = opt.grid_max.value_or(s_hi + opt.margin * width);
  }
  auto grid = linspace(lo, hi, opt.points);
  SpectralDensity d = build_density(trace_branch(p, grid, opt.eps), p);
  if (const auto extra = hard_edge_nodes(p, d, opt.eps); !extra.empty()) {
    for (double e : extra)
      if (e > lo && e < hi) grid.push_back(e);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double u, double v) { return std::abs(u - v) < 1e-14; }),
               grid.end());
    d = build_density(trace_branch(p, grid, opt.eps), p);
  }
  if (opt.richardson && !d.edge_bins.empty()) {
    const auto s1 = trace_branch(p, grid, 10.0 * opt.eps);
    for (std::size_t i : d.edge_bins) {
      // Error is linear in eps away from the branch point.
      const double atom1 = d.atom_at_zero * s1[i].z.imag() /
                           (grid[i] * grid[i] + s1[i].z.imag() * s1[i].z.imag());
      const double coarse = (s1[i].g.imag() - atom1) / std::numbers::pi;
      if (d.density[i] <= 0.0) continue;
      const double extrapolated = d.density[i] + (d.density[i] - coarse) / 9.0;
      d.density[i] = std::max(0.0, extrapolated);
    }
    finalize(d, p);
  }
  check_mass(d);
  return d;
}

}  // namespace rfs
