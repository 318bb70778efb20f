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

#include <cmath>
#include <random>

#include "rfs/cumulants.hpp"
#include "rfs/error.hpp"

using namespace rfs;
using Eigen::MatrixXd;

namespace {

MatrixXd random_columns(long T, int k, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  MatrixXd s(T, k);
  for (long i = 0; i < T; ++i)
    for (int j = 0; j < k; ++j) s(i, j) = n(gen) + 0.3 * j + 0.5 * (j > 0 ? s(i, j - 1) : 0.0);
  return s;
}

}  // namespace

TEST_CASE("partition counts are Bell numbers") {
  const long bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (int k = 0; k <= kMaxCumulantOrder; ++k)
    CHECK(static_cast<long>(set_partitions(k).size()) == bell[k]);
  for (const auto& p : set_partitions(4)) {
    unsigned all = 0;
    for (unsigned b : p) {
      CHECK((all & b) == 0u);
      all |= b;
    }
    CHECK(all == 0xFu);
  }
}

TEST_CASE("low orders") {
  const MatrixXd s = random_columns(500, 2, 3);
  CHECK(joint_cumulant(s.col(0)) == doctest::Approx(s.col(0).mean()).epsilon(1e-12));
  const double cov = (s.col(0).array() * s.col(1).array()).mean() - s.col(0).mean() * s.col(1).mean();
  CHECK(joint_cumulant(s) == doctest::Approx(cov).epsilon(1e-12));
}

TEST_CASE("constants have no higher cumulants") {
  MatrixXd s = random_columns(300, 3, 4);
  s.col(1).setConstant(2.5);
  CHECK(std::abs(joint_cumulant(s)) < 1e-12);
  CHECK(std::abs(joint_cumulant(s.leftCols(2))) < 1e-12);
}

TEST_CASE("multilinear and symmetric") {
  const MatrixXd s = random_columns(400, 5, 9);
  MatrixXd a = s.leftCols(4), b = s.leftCols(4), c = s.leftCols(4);
  b.col(0) = s.col(4);
  c.col(0) = 2.0 * s.col(0) - 3.0 * s.col(4);
  const double ka = joint_cumulant(a), kb = joint_cumulant(b);
  CHECK(joint_cumulant(c) == doctest::Approx(2.0 * ka - 3.0 * kb).epsilon(1e-12).scale(1.0));

  MatrixXd p(a.rows(), 4);
  p << a.col(2), a.col(0), a.col(3), a.col(1);
  CHECK(std::abs(joint_cumulant(p) - ka) < 1e-12);
}

TEST_CASE("independent blocks give zero mixed cumulants") {
  // a product of two empirical laws is exactly independent
  const MatrixXd x = random_columns(30, 2, 1), y = random_columns(40, 2, 2);
  MatrixXd s(30 * 40, 4);
  for (long i = 0; i < 30; ++i)
    for (long j = 0; j < 40; ++j) s.row(i * 40 + j) << x(i, 0), y(j, 0), x(i, 1), y(j, 1);
  CHECK(std::abs(joint_cumulant(s)) < 1e-12);
  CHECK(std::abs(joint_cumulant(s.leftCols(3))) < 1e-12);
}

TEST_CASE("fourth cumulant of a uniform law") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd s(200000, 4);
  for (long i = 0; i < s.rows(); ++i) s.row(i).setConstant(u(gen));
  CHECK(joint_cumulant(s) == doctest::Approx(-2.0 / 15.0).epsilon(0.03));
}

TEST_CASE("cumulant usage errors") {
  CHECK_THROWS_AS(joint_cumulant(MatrixXd::Zero(10, 9)), UsageError);
  CHECK_THROWS_AS(joint_cumulant(MatrixXd::Zero(1, 2)), UsageError);
  CHECK_THROWS_AS(joint_cumulant(MatrixXd::Zero(10, 0)), UsageError);
}

TEST_CASE("identity entries") {
  const NetworkShape shape{50, 100, 100, 1, {}};
  const auto rep = estimate_entry_cumulants(make_activation("identity"), shape, 200, 5);
  CHECK(rep.at("variance").estimate == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.at("variance").target == doctest::Approx(1.0));
  CHECK(rep.at("bias_cross").pass());
  CHECK(std::abs(rep.at("bias_cross").target) < 1e-12);
  CHECK(rep.all_pass());
  CHECK_THROWS_AS(rep.at("nope"), UsageError);

  const auto biased =
      estimate_entry_cumulants(make_activation("identity", 1.0, 1.0, 0.5), shape, 200, 6);
  CHECK(biased.at("bias_cross").target == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(biased.at("bias_cross").pass());
  CHECK(biased.at("variance").target == doctest::Approx(1.25).epsilon(1e-9));
}

TEST_CASE("tanh cycle cumulant") {
  const NetworkShape shape{50, 100, 100, 1, {}};
  const auto spec = make_activation("tanh");
  const auto rep = estimate_entry_cumulants(spec, shape, 400, 21);
  for (const auto& e : rep.entries) {
    INFO(e.label << " " << e.estimate << " +- " << e.std_error << " target " << e.target);
    CHECK(e.pass());
    CHECK(e.std_error > 0.0);
  }
  const double t2 = compute_theta2(spec);
  CHECK(rep.at("n0*cycle4").target == doctest::Approx(t2 * t2));
}

TEST_CASE("weight-data cycles scale as 1/n0") {
  const EntryDistribution g{};
  const auto c10 = wx_cycle_cumulant_check({10, 200, 200, 1, {}}, g, g, 2, 1000, 3);
  const auto c20 = wx_cycle_cumulant_check({20, 200, 200, 1, {}}, g, g, 2, 1000, 4);
  CHECK(c10.target == doctest::Approx(0.1));
  CHECK(c20.target == doctest::Approx(0.05));
  CHECK(std::abs(c10.estimate - c10.target) <= 4.0 * c10.std_error);
  CHECK(std::abs(c20.estimate - c20.target) <= 4.0 * c20.std_error);
  CHECK(c20.estimate * 20 == doctest::Approx(1.0).epsilon(0.25));
  CHECK(c20.estimate / c10.estimate == doctest::Approx(0.5).epsilon(0.3));

  const auto c3 = wx_cycle_cumulant_check({10, 200, 200, 1, {}}, g, g, 3, 1000, 5);
  CHECK(c3.target == doctest::Approx(0.01));
  CHECK(std::abs(c3.estimate - c3.target) <= 4.0 * c3.std_error);

  EntryDistribution scaled{EntryKind::Rademacher, 4.0};
  const auto cs = wx_cycle_cumulant_check({10, 200, 200, 1, {}}, scaled, g, 2, 1000, 6);
  CHECK(cs.target == doctest::Approx(1.6));
  CHECK(std::abs(cs.estimate - cs.target) <= 4.0 * cs.std_error);
}
