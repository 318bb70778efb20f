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

#include "rfs/cumulants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "rfs/error.hpp"

namespace rfs {
namespace {

constexpr int kBatches = 20;

// Restricted growth strings a[0..k-1] with a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
std::vector<Partition> build_partitions(int k) {
  std::vector<Partition> out;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> a(static_cast<std::size_t>(k), 0);
  while (true) {
    int blocks = 1 + *std::max_element(a.begin(), a.end());
    Partition p(static_cast<std::size_t>(blocks), 0U);
    for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(a[i])] |= 1U << i;
    out.push_back(std::move(p));
    int i = k - 1;
    for (; i > 0; --i) {
      const int mx = *std::max_element(a.begin(), a.begin() + i);
      if (a[i] <= mx) {
        ++a[i];
        std::fill(a.begin() + i + 1, a.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

struct Summary {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Estimate on all rows plus batch-means standard error. Rows are grouped
// by draw: draw d owns rows [d * rows_per_draw, (d + 1) * rows_per_draw).
template <class Stat>
Summary batched(const Eigen::MatrixXd& data, long draws, long rows_per_draw, Stat&& stat) {
  Summary s;
  s.estimate = stat(data);
  const long nb = std::min<long>(kBatches, draws);
  if (nb < 2) return s;
  std::vector<double> est;
  for (long b = 0; b < nb; ++b) {
    const long d0 = b * draws / nb;
    const long d1 = (b + 1) * draws / nb;
    est.push_back(stat(data.middleRows(d0 * rows_per_draw, (d1 - d0) * rows_per_draw)));
  }
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= static_cast<double>(nb);
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= static_cast<double>(nb - 1);
  s.std_error = std::sqrt(var / static_cast<double>(nb));
  return s;
}

}  // namespace

const std::vector<Partition>& set_partitions(int k) {
  static const auto table = [] {
    std::array<std::vector<Partition>, kMaxCumulantOrder + 1> t;
    for (int i = 0; i <= kMaxCumulantOrder; ++i) t[static_cast<std::size_t>(i)] = build_partitions(i);
    return t;
  }();
  if (k < 0 || k > kMaxCumulantOrder) {
    std::ostringstream os;
    os << "cumulant order " << k << " outside [0, " << kMaxCumulantOrder << "]";
    throw UsageError(os.str());
  }
  return table[static_cast<std::size_t>(k)];
}

double joint_cumulant(const Eigen::Ref<const Eigen::MatrixXd>& samples) {
  const int k = static_cast<int>(samples.cols());
  const Eigen::Index T = samples.rows();
  if (k < 1 || k > kMaxCumulantOrder) {
    std::ostringstream os;
    os << "joint_cumulant supports 1 <= k <= " << kMaxCumulantOrder << ", got " << k;
    throw UsageError(os.str());
  }
  if (T < 2) throw UsageError("joint_cumulant needs at least two samples");

  // Empirical mean of the product over every non-empty subset of columns.
  const unsigned subsets = 1U << k;
  std::vector<double> moment(subsets, 0.0);
  Eigen::VectorXd prod(T);
  for (unsigned mask = 1; mask < subsets; ++mask) {
    prod.setOnes();
    for (int i = 0; i < k; ++i)
      if (mask & (1U << i)) prod.array() *= samples.col(i).array();
    moment[mask] = prod.mean();
  }
  double kappa = 0.0;
  for (const Partition& p : set_partitions(k)) {
    const int b = static_cast<int>(p.size());
    double term = ((b - 1) % 2 ? -1.0 : 1.0) * factorial(b - 1);
    for (unsigned block : p) term *= moment[block];
    kappa += term;
  }
  return kappa;
}

bool CumulantEntry::pass() const {
  return std::abs(estimate - target) <= 3.0 * std_error + band;
}

const CumulantEntry& CumulantReport::at(const std::string& label) const {
  for (const auto& e : entries)
    if (e.label == label) return e;
  throw UsageError("no cumulant entry '" + label + "'");
}

bool CumulantReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass(); });
}

CumulantReport estimate_entry_cumulants(const ActivationSpec& spec, const NetworkShape& shape,
                                        long n_samples, std::uint64_t seed,
                                        const EntryDistribution& dist_x,
                                        const EntryDistribution& dist_w) {
  shape.validate();
  if (n_samples < 2) throw UsageError("estimate_entry_cumulants needs n_samples >= 2");
  const long tuples = std::min(shape.n1, shape.m) / 2;
  if (tuples < 1) throw UsageError("shape too small for disjoint index tuples");

  // Per tuple: Y[r1,c1], Y[r2,c1], Y[r2,c2], Y[r1,c2], the 4-cycle
  // Y_{i1 i2}, Y*_{i2 i3}, Y_{i3 i4}, Y*_{i4 i1} with rows {r1, r2} and
  // columns {c1, c2}.
  Eigen::MatrixXd cycle(n_samples * tuples, 4);
#pragma omp parallel for schedule(dynamic, 4)
  for (long d = 0; d < n_samples; ++d) {
    const auto draw = sample_matrices(shape, dist_x, dist_w, spec.sigma_b,
                                      derive_seed(seed, static_cast<std::uint64_t>(d)));
    const Matrix Y = forward_layer(draw.X, draw.W, draw.bias, spec);
    for (long t = 0; t < tuples; ++t) {
      const long r1 = 2 * t, r2 = 2 * t + 1, c1 = 2 * t, c2 = 2 * t + 1;
      const long row = d * tuples + t;
      cycle(row, 0) = Y(r1, c1);
      cycle(row, 1) = Y(r2, c1);
      cycle(row, 2) = Y(r2, c2);
      cycle(row, 3) = Y(r1, c2);
    }
  }

  // Entries as a single column, same-row pairs as two columns; each draw
  // keeps a contiguous block so batching stays draw-aligned.
  Eigen::MatrixXd single(n_samples * tuples * 4, 1);
  Eigen::MatrixXd row_pairs(n_samples * tuples * 2, 2);
  for (long d = 0; d < n_samples; ++d) {
    for (long t = 0; t < tuples; ++t) {
      const long src = d * tuples + t;
      for (int c = 0; c < 4; ++c) single(d * tuples * 4 + 4 * t + c, 0) = cycle(src, c);
      row_pairs(d * tuples * 2 + 2 * t, 0) = cycle(src, 0);
      row_pairs(d * tuples * 2 + 2 * t, 1) = cycle(src, 3);
      row_pairs(d * tuples * 2 + 2 * t + 1, 0) = cycle(src, 1);
      row_pairs(d * tuples * 2 + 2 * t + 1, 1) = cycle(src, 2);
    }
  }

  const ThetaParams theta = compute_theta(spec);
  const double n0 = static_cast<double>(shape.n0);

  CumulantReport rep;
  rep.n0 = shape.n0;
  rep.n1 = shape.n1;
  rep.m = shape.m;
  rep.n_samples = n_samples;
  rep.sigma_w = spec.sigma_w;
  rep.sigma_x = spec.sigma_x;
  rep.sigma_b = spec.sigma_b;
  rep.activation = spec.name;

  auto add = [&](std::string label, Summary s, double target, std::string source, double band) {
    rep.entries.push_back({std::move(label), s.estimate, s.std_error, target, std::move(source), band});
  };

  add("mean", batched(single, n_samples, tuples * 4, [](const auto& m) { return joint_cumulant(m); }),
      0.0, "O(n0^-1/2)", std::sqrt(theta.theta1 / n0));
  add("variance",
      batched(single, n_samples, tuples * 4,
              [](const auto& m) {
                Eigen::MatrixXd two(m.rows(), 2);
                two << m, m;
                return joint_cumulant(two);
              }),
      theta.theta1, "theta1", 0.0);
  add("bias_cross",
      batched(row_pairs, n_samples, tuples * 2, [](const auto& m) { return joint_cumulant(m); }),
      theta.theta1b, "theta1b", 0.0);
  add("n0*cycle4",
      batched(cycle, n_samples, tuples, [n0](const auto& m) { return n0 * joint_cumulant(m); }),
      theta.theta2 * theta.theta2, "theta2^2", 0.0);
  return rep;
}

CycleCheck wx_cycle_cumulant_check(const NetworkShape& shape, const EntryDistribution& dist_x,
                                   const EntryDistribution& dist_w, int k, long n_samples,
                                   std::uint64_t seed) {
  shape.validate();
  if (k < 2 || k > 3) throw UsageError("wx_cycle_cumulant_check supports k = 2 or 3");
  if (n_samples < 2) throw UsageError("wx_cycle_cumulant_check needs n_samples >= 2");
  const long tuples = std::min(shape.n1, shape.m) / k;
  if (tuples < 1) throw UsageError("shape too small for disjoint index tuples");

  Eigen::MatrixXd products(n_samples * tuples, 1);
#pragma omp parallel for schedule(dynamic, 4)
  for (long d = 0; d < n_samples; ++d) {
    const auto draw = sample_matrices(shape, dist_x, dist_w, 0.0,
                                      derive_seed(seed, static_cast<std::uint64_t>(d)));
    const Matrix Z = kernels::preactivation(draw.W, draw.X, Vector::Zero(shape.n1));
    for (long t = 0; t < tuples; ++t) {
      double prod = 1.0;
      for (int j = 0; j < k; ++j) {
        const long r = k * t + j;
        const long r_next = k * t + (j + 1) % k;
        const long c = k * t + j;
        prod *= Z(r, c) * Z(r_next, c);
      }
      products(d * tuples + t, 0) = prod;
    }
  }
  const Summary s = batched(products, n_samples, tuples, [](const auto& m) { return m.mean(); });
  CycleCheck out;
  out.k = k;
  out.estimate = s.estimate;
  out.std_error = s.std_error;
  const double var = dist_w.variance * dist_x.variance;
  out.target = std::pow(var, k) / std::pow(static_cast<double>(shape.n0), k - 1);
  return out;
}

}  // namespace rfs
