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

#include "rfs/activation.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "rfs/error.hpp"

namespace rfs {
namespace {

std::vector<double> scaled_kinks(const ActivationSpec& spec, double scale) {
  std::vector<double> out;
  out.reserve(spec.kinks.size());
  for (double k : spec.kinks) out.push_back(k / scale);
  return out;
}

void check_scales(double sigma_w, double sigma_x, double sigma_b) {
  if (!(sigma_w > 0.0) || !(sigma_x > 0.0) || !(sigma_b >= 0.0) ||
      !std::isfinite(sigma_w) || !std::isfinite(sigma_x) || !std::isfinite(sigma_b)) {
    std::ostringstream os;
    os << "invalid scales sigma_w=" << sigma_w << " sigma_x=" << sigma_x
       << " sigma_b=" << sigma_b;
    throw UsageError(os.str());
  }
}

}  // namespace

double ActivationSpec::preactivation_scale() const {
  return std::sqrt(sigma_w * sigma_w * sigma_x * sigma_x + sigma_b * sigma_b);
}

double sigma_tilde(double sigma_w, double sigma_x, double sigma_b) {
  const double s2 = sigma_w * sigma_w * sigma_x * sigma_x;
  const double b2 = sigma_b * sigma_b;
  return std::sqrt(s2 * (s2 + 2.0 * b2) / (s2 + b2));
}

ActivationSpec center_activation(RealFn raw_f, RealFn raw_f_prime, double sigma_w,
                                 double sigma_x, double sigma_b, std::string name,
                                 std::vector<double> kinks) {
  check_scales(sigma_w, sigma_x, sigma_b);
  ActivationSpec spec;
  spec.sigma_w = sigma_w;
  spec.sigma_x = sigma_x;
  spec.sigma_b = sigma_b;
  spec.name = std::move(name);
  spec.kinks = std::move(kinks);
  const double tau = spec.preactivation_scale();
  const auto k = scaled_kinks(spec, tau);
  const double c = quad::gaussian_mean([&](double x) { return raw_f(tau * x); }, k);
  spec.offset = c;
  spec.f = [raw = std::move(raw_f), c](double x) { return raw(x) - c; };
  spec.f_prime = std::move(raw_f_prime);
  return spec;
}

const std::vector<std::string>& activation_names() {
  static const std::vector<std::string> names{"identity", "tanh", "cube", "he2", "abslin"};
  return names;
}

ActivationSpec make_activation(std::string_view name, double sigma_w, double sigma_x,
                               double sigma_b) {
  check_scales(sigma_w, sigma_x, sigma_b);
  const std::string n(name);
  if (name == "identity")
    return center_activation([](double x) { return x; }, [](double) { return 1.0; },
                             sigma_w, sigma_x, sigma_b, n);
  if (name == "tanh")
    return center_activation([](double x) { return std::tanh(x); },
                             [](double x) {
                               const double t = std::tanh(x);
                               return 1.0 - t * t;
                             },
                             sigma_w, sigma_x, sigma_b, n);
  if (name == "cube")
    return center_activation([](double x) { return x * x * x; },
                             [](double x) { return 3.0 * x * x; }, sigma_w, sigma_x,
                             sigma_b, n);
  if (name == "he2")
    return center_activation([](double x) { return x * x - 1.0; },
                             [](double x) { return 2.0 * x; }, sigma_w, sigma_x, sigma_b, n);
  if (name == "abslin") {
    // theta1 = c1^2 tau^2 (1 - 2/pi) for c1|x| centred at scale tau.
    const double tau = std::sqrt(sigma_w * sigma_w * sigma_x * sigma_x + sigma_b * sigma_b);
    const double c1 = 1.0 / (tau * std::sqrt(1.0 - 2.0 / std::numbers::pi));
    return center_activation([c1](double x) { return c1 * std::abs(x); },
                             [c1](double x) { return x > 0.0 ? c1 : (x < 0.0 ? -c1 : 0.0); },
                             sigma_w, sigma_x, sigma_b, n, {0.0});
  }
  std::ostringstream os;
  os << "unknown activation '" << name << "' (known:";
  for (const auto& a : activation_names()) os << ' ' << a;
  os << ')';
  throw UsageError(os.str());
}

double centering_residual(const ActivationSpec& spec) {
  const double tau = spec.preactivation_scale();
  return std::abs(quad::gaussian_mean([&](double x) { return spec.f(tau * x); },
                                      scaled_kinks(spec, tau)));
}

double compute_theta1(const ActivationSpec& spec) {
  const double tau = spec.preactivation_scale();
  return quad::gaussian_mean(
      [&](double x) {
        const double v = spec.f(tau * x);
        return v * v;
      },
      scaled_kinks(spec, tau));
}

double compute_theta1b(const ActivationSpec& spec) {
  if (spec.sigma_b == 0.0) return 0.0;
  const double tau = spec.preactivation_scale();
  const double b2 = spec.sigma_b * spec.sigma_b;
  return quad::gaussian_mean_2d([&](double u1, double u2) { return spec.f(u1) * spec.f(u2); },
                                tau * tau, b2, spec.kinks, spec.kinks);
}

double compute_theta2(const ActivationSpec& spec) {
  const double s = spec.signal_scale();
  if (spec.sigma_b == 0.0) {
    const double mean = quad::gaussian_mean([&](double x) { return spec.f_prime(s * x); },
                                            scaled_kinks(spec, s));
    return s * s * mean * mean;
  }
  const double tau = spec.preactivation_scale();
  const double b2 = spec.sigma_b * spec.sigma_b;
  return s * s *
         quad::gaussian_mean_2d(
             [&](double u1, double u2) { return spec.f_prime(u1) * spec.f_prime(u2); },
             tau * tau, b2, spec.kinks, spec.kinks);
}

ThetaParams compute_theta(const ActivationSpec& spec) {
  ThetaParams t;
  t.theta1 = compute_theta1(spec);
  t.theta1b = compute_theta1b(spec);
  t.theta2 = compute_theta2(spec);
  t.sigma_tilde = sigma_tilde(spec.sigma_w, spec.sigma_x, spec.sigma_b);
  return t;
}

ThetaSeries theta_series(const ActivationSpec& spec, int n_terms) {
  if (n_terms < 1) throw UsageError("theta_series needs n_terms >= 1");
  const double tau = spec.preactivation_scale();
  const double s = spec.signal_scale();
  const double rho = spec.sigma_b * spec.sigma_b / (tau * tau);
  const auto n = static_cast<std::size_t>(n_terms);

  // Components [0, n) hold <p_k, f(tau .)>, [n, 2n) hold <p_k, f'(tau .)>.
  const auto coeffs = quad::gaussian_mean_multi(
      [&](double x, std::span<double> out) {
        const double fv = spec.f(tau * x);
        const double dv = spec.f_prime(tau * x);
        double prev = 0.0, cur = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
          out[k] = cur * fv;
          out[n + k] = cur * dv;
          const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                              std::sqrt(static_cast<double>(k + 1));
          prev = cur;
          cur = next;
        }
      },
      2 * n, scaled_kinks(spec, tau));

  ThetaSeries out;
  double weight = 1.0;  // rho^k, with 0^0 = 1
  for (std::size_t k = 0; k < n; ++k) {
    out.theta1b += weight * coeffs[k] * coeffs[k];
    out.theta2 += weight * coeffs[n + k] * coeffs[n + k];
    weight *= rho;
  }
  out.theta2 *= s * s;
  return out;
}

}  // namespace rfs
