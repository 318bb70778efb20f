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
#include <string>
#include <string_view>
#include <vector>

#include "rfs/quadrature.hpp"

namespace rfs {

using RealFn = std::function<double(double)>;

/// A centred activation together with the entry scales of the model
/// Y = f(WX / sqrt(n0) + B).
struct ActivationSpec {
  RealFn f;
  RealFn f_prime;
  double sigma_w = 1.0;
  double sigma_x = 1.0;
  double sigma_b = 0.0;
  std::string name = "custom";
  // Arguments where f or f' is not smooth. Quadrature splits there.
  std::vector<double> kinks;
  // Constant subtracted from the raw function by centering.
  double offset = 0.0;

  // sigma_w sigma_x, the standard deviation of the bias-free pre-activation.
  double signal_scale() const { return sigma_w * sigma_x; }
  // sqrt(sigma_w^2 sigma_x^2 + sigma_b^2).
  double preactivation_scale() const;
};

struct ThetaParams {
  double theta1 = 0.0;
  double theta1b = 0.0;
  double theta2 = 0.0;
  double sigma_tilde = 0.0;
};

struct ThetaSeries {
  double theta1b = 0.0;
  double theta2 = 0.0;
};

/// Subtracts the Gaussian mean of raw_f at the pre-activation scale.
/// Throws UsageError for non-positive sigma_w/sigma_x or negative sigma_b.
ActivationSpec center_activation(RealFn raw_f, RealFn raw_f_prime, double sigma_w,
                                 double sigma_x, double sigma_b,
                                 std::string name = "custom",
                                 std::vector<double> kinks = {});

/// Built-in catalog: "identity", "tanh", "cube", "he2", "abslin".
/// "abslin" is c1|x| - c2 with c1 chosen so that theta1 = 1.
ActivationSpec make_activation(std::string_view name, double sigma_w = 1.0,
                               double sigma_x = 1.0, double sigma_b = 0.0);

const std::vector<std::string>& activation_names();

double sigma_tilde(double sigma_w, double sigma_x, double sigma_b);

// |E f(tau G)|, should vanish for a centred spec.
double centering_residual(const ActivationSpec& spec);

double compute_theta1(const ActivationSpec& spec);
double compute_theta1b(const ActivationSpec& spec);
double compute_theta2(const ActivationSpec& spec);
ThetaParams compute_theta(const ActivationSpec& spec);

/// Partial sums over k < n_terms of the Mehler expansions
///   theta1b = sum_k rho^k <p_k, f(tau .)>^2,
///   theta2  = sw^2 sx^2 sum_k rho^k <p_k, f'(tau .)>^2,
/// with p_k = He_k / sqrt(k!) orthonormal for the Gaussian weight,
/// tau^2 = sw^2 sx^2 + sb^2 and rho = sb^2 / tau^2.
ThetaSeries theta_series(const ActivationSpec& spec, int n_terms);

}  // namespace rfs
