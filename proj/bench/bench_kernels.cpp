// Copyright 2026 The cavqnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <random>

#include <benchmark/benchmark.h>

#include "cavqnd/linalg.hpp"
#include "cavqnd/model.hpp"
#include "cavqnd/qnd.hpp"
#include "cavqnd/reduce.hpp"

namespace {

using namespace cavqnd;

Rates desk_rates() {
  RateInputs in;
  in.g = 0.01;
  in.G_inner = 0.05;
  in.G_outer = solve_cancellation(0.05);
  return derive_rates(in);
}

// The FullInner sector block at mech_dim d: a banded sparse operator of
// size d^2, the workhorse of the sector oracle.
linalg::SparseMatrix sector_block(int mech_dim) {
  return build_sector(Variant::FullInner, desk_rates(), 2, 1,
                      sector_layout(Variant::FullInner, mech_dim))
      .sparse();
}

linalg::Vector random_vector(Eigen::Index n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  linalg::Vector v(n);
  for (auto& x : v) x = {N(rng), N(rng)};
  return v;
}

template <linalg::Execution Exec>
void BM_Spmv(benchmark::State& state) {
  const auto a = sector_block(static_cast<int>(state.range(0)));
  const auto x = random_vector(a.cols());
  linalg::Vector y(a.rows());
  for (auto _ : state) {
    if constexpr (Exec == linalg::Execution::Serial) {
      linalg::spmv_serial(a, x.data(), y.data());
    } else {
      linalg::spmv_parallel(a, x.data(), y.data());
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nonZeros());
}
BENCHMARK(BM_Spmv<linalg::Execution::Serial>)->Arg(60)->Arg(120)->Arg(240);
BENCHMARK(BM_Spmv<linalg::Execution::Parallel>)->Arg(60)->Arg(120)->Arg(240);

template <linalg::Execution Exec>
void BM_SectorGrid(benchmark::State& state) {
  const Rates r = desk_rates();
  SectorOptions opt;
  opt.check_truncation = false;
  const int mech_dim = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto grid = sector_grid(Variant::FullInner, r, 3, mech_dim, Exec, opt);
    benchmark::DoNotOptimize(grid.data());
  }
}
BENCHMARK(BM_SectorGrid<linalg::Execution::Serial>)
    ->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SectorGrid<linalg::Execution::Parallel>)
    ->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

template <linalg::Execution Exec>
void BM_ProtocolSweep(benchmark::State& state) {
  const Rates r = desk_rates();
  ProtocolConfig c;
  c.backend = Backend::Fock;
  c.hamiltonian = Variant::EffectiveSimplified;
  c.T = recommended_interaction_time(0.0, r.gamma, 5);
  c.n_true = 3;
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  for (auto _ : state) {
    auto recs = sweep(c, r, SweepAxis::SigmaScale, grid, Exec);
    benchmark::DoNotOptimize(recs.data());
  }
}
BENCHMARK(BM_ProtocolSweep<linalg::Execution::Serial>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProtocolSweep<linalg::Execution::Parallel>)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
