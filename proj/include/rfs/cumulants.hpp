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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfs/activation.hpp"
#include "rfs/random.hpp"
#include "rfs/simulate.hpp"

namespace rfs {

inline constexpr int kMaxCumulantOrder = 8;

/// A set partition of {0..k-1}, each block a bitmask.
using Partition = std::vector<unsigned>;

/// All set partitions of a k-element set (k <= 8), built once.
const std::vector<Partition>& set_partitions(int k);

/// Plug-in joint cumulant of the k columns of `samples` (T rows):
///   sum over partitions pi of (-1)^{|pi|-1} (|pi|-1)! prod_B E^(prod_{i in B} X_i).
/// Throws UsageError for k > 8 or T < 2.
double joint_cumulant(const Eigen::Ref<const Eigen::MatrixXd>& samples);

struct CumulantEntry {
  std::string label;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  std::string target_source;
  // Extra allowance for targets only known up to a scale (e.g. O(n0^-1/2)).
  double band = 0.0;

  // |estimate - target| <= 3 std_error + band.
  bool pass() const;
};

struct CumulantReport {
  std::vector<CumulantEntry> entries;
  long n0 = 0;
  long n1 = 0;
  long m = 0;
  long n_samples = 0;
  double sigma_w = 1.0;
  double sigma_x = 1.0;
  double sigma_b = 0.0;
  std::string activation;

  const CumulantEntry& at(const std::string& label) const;
  bool all_pass() const;
};

/// Monte Carlo estimates of the entry cumulants of Y = f(WX/sqrt(n0) + B):
/// "mean" kappa(Y12), "variance" kappa(Y12, Y21*), "bias_cross"
/// kappa(Y12, Y31*) and "n0*cycle4" n0 kappa(Y12, Y23*, Y34, Y41*).
/// Each draw contributes min(n1, m)/2 tuples on disjoint rows and columns;
/// standard errors come from 20 batches of draws.
CumulantReport estimate_entry_cumulants(const ActivationSpec& spec, const NetworkShape& shape,
                                        long n_samples, std::uint64_t seed,
                                        const EntryDistribution& dist_x = {},
                                        const EntryDistribution& dist_w = {});

struct CycleCheck {
  int k = 2;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;  // (sw^2 sx^2)^k / n0^(k-1)
};

/// E of the 2k-cycle product of Z = WX/sqrt(n0) over rows r_1..r_k and
/// columns c_1..c_k: Z[r1,c1] Z[r2,c1] Z[r2,c2] ... Z[rk,ck] Z[r1,ck].
CycleCheck wx_cycle_cumulant_check(const NetworkShape& shape, const EntryDistribution& dist_x,
                                   const EntryDistribution& dist_w, int k, long n_samples,
                                   std::uint64_t seed);

}  // namespace rfs
