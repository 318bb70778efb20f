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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfs/selfconsistent.hpp"
#include "rfs/simulate.hpp"

namespace rfs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitQuadrature = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitDivergence = 5;

struct RunConfig {
  std::string activation = "tanh";
  double sigma_w = 1.0;
  double sigma_x = 1.0;
  double sigma_b = 0.0;
  std::optional<long> n0;
  std::vector<long> n1;
  std::optional<long> m;
  std::optional<double> phi;
  std::optional<double> psi;
  int layers = 1;
  bool batch_norm = false;
  std::string dist = "gaussian";
  std::uint64_t seed = 1;
  int replicas = 1;
  long samples = 2000;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  int grid_points = 800;
  double eps = 1e-6;
  std::string out = "rfspec_out";
  bool self = false;
  bool include_outlier = false;

  // True when n0 and m are given explicitly.
  bool has_shape() const { return n0.has_value() || m.has_value(); }
  void validate() const;
  /// Simulation shape for width n1: explicit (n0, m), or derived from the
  /// limits as n0 = round(psi n1), m = round(n0 / phi).
  NetworkShape shape_for(long n1) const;
  /// Theory parameters: empirical ratios from the shape when one is given,
  /// otherwise the limits (phi, psi).
  ModelParams model_params(const ThetaParams& t) const;
};

nlohmann::json to_json(const RunConfig& c);

/// Runs one subcommand; `args` excludes the program name. Returns the
/// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfs::cli
