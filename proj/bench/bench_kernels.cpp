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

// Production kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "rfs/activation.hpp"
#include "rfs/kernels.hpp"

namespace {

using rfs::Matrix;
using rfs::Vector;
namespace k = rfs::kernels;
namespace ref = rfs::kernels::reference;

Matrix gaussian(long rows, long cols, std::uint64_t key) {
  Matrix A(rows, cols);
  k::fill({A.data(), static_cast<std::size_t>(A.size())}, {}, rfs::CounterRng(key));
  return A;
}

template <bool Reference>
void BM_fill(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)) * state.range(0));
  const rfs::CounterRng rng(3);
  for (auto _ : state) {
    if constexpr (Reference) ref::fill(out, {}, rng);
    else k::fill(out, {}, rng);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

template <bool Reference>
void BM_preactivation(benchmark::State& state) {
  const long n = state.range(0);
  const Matrix W = gaussian(n, n, 1), Y = gaussian(n, n, 2);
  const Vector b = Vector::Constant(n, 0.25);
  for (auto _ : state) {
    Matrix Z = Reference ? ref::preactivation(W, Y, b) : k::preactivation(W, Y, b);
    benchmark::DoNotOptimize(Z.data());
  }
}

template <bool Reference>
void BM_activate(benchmark::State& state) {
  const long n = state.range(0);
  const auto act = rfs::make_activation("tanh", 1.0, 1.0, 0.0);
  const Matrix Z0 = gaussian(n, n, 4);
  for (auto _ : state) {
    state.PauseTiming();
    Matrix Z = Z0;
    state.ResumeTiming();
    if constexpr (Reference) ref::activate(Z, act.f);
    else k::activate(Z, act.f);
    benchmark::DoNotOptimize(Z.data());
  }
}

template <bool Reference>
void BM_gram(benchmark::State& state) {
  const long n = state.range(0);
  const Matrix Y = gaussian(n, 2 * n, 5);
  for (auto _ : state) {
    Matrix M = Reference ? ref::gram(Y, 2.0 * n) : k::gram(Y, 2.0 * n);
    benchmark::DoNotOptimize(M.data());
  }
}

template <bool Reference>
void BM_eigenvalues(benchmark::State& state) {
  const long n = state.range(0);
  const Matrix M = k::gram(gaussian(n, 2 * n, 6), 2.0 * n);
  for (auto _ : state) {
    auto e = Reference ? ref::jacobi_eigenvalues(M) : k::symmetric_eigenvalues(M);
    benchmark::DoNotOptimize(e.data());
  }
}

}  // namespace

BENCHMARK(BM_fill<true>)->Name("fill/reference")->Arg(256)->Arg(1024);
BENCHMARK(BM_fill<false>)->Name("fill/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_preactivation<true>)->Name("preactivation/reference")->Arg(128)->Arg(256);
BENCHMARK(BM_preactivation<false>)->Name("preactivation/parallel")->Arg(128)->Arg(256);
BENCHMARK(BM_activate<true>)->Name("activate/reference")->Arg(512)->Arg(1024);
BENCHMARK(BM_activate<false>)->Name("activate/parallel")->Arg(512)->Arg(1024);
BENCHMARK(BM_gram<true>)->Name("gram/reference")->Arg(128)->Arg(256);
BENCHMARK(BM_gram<false>)->Name("gram/parallel")->Arg(128)->Arg(256);
BENCHMARK(BM_eigenvalues<true>)->Name("eigenvalues/jacobi")->Arg(64)->Arg(128);
BENCHMARK(BM_eigenvalues<false>)->Name("eigenvalues/eigen")->Arg(64)->Arg(128);

BENCHMARK_MAIN();
