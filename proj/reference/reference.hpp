// Copyright 2026 The imufs Authors. All Rights Reserved.
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

#pragma once

// Batch (non-incremental) oracles for the streaming solver. Linked into the
// tests and the bench subcommand only.
//
// Everything here is written against raw loops over Matrix entries so that
// it shares no arithmetic helper with the solver it checks.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "imufs/dataset.hpp"
#include "imufs/solver.hpp"

namespace imufs::reference {

// What each folded chunk contributed, captured after process_chunk returns.
struct BatchTrace {
  struct Chunk {
    std::vector<Matrix> X;                    // imputed data per view
    std::vector<std::vector<double>> weight;  // reconstruction diagonal per view
    std::vector<Matrix> U;                    // converged U per view
    std::vector<Matrix> V;                    // V at fold time per view
  };
  std::vector<Chunk> chunks;
  std::vector<double> elapsed_ms;

  void record(const ChunkWorkspace& ws, const SolverState& state_after);
};

struct Accumulators {
  Matrix R;
  Matrix Q;
  double loss = 0.0;
};

// Direct per-view sums over every stored chunk.
std::vector<Accumulators> batch_accumulators(const BatchTrace& trace);

struct RecomputeResult {
  SolverState state;
  double elapsed_ms = 0.0;
};

// Naive baseline: whenever a chunk arrives, start over from a fresh solver
// and solve the concatenation of every chunk so far as a single chunk.
RecomputeResult recompute_from_scratch(const std::vector<MultiViewChunk>& chunks,
                                       const std::vector<ViewSpec>& views,
                                       const Hyperparams& hp, std::uint64_t seed);

// |sum_v a_v^lambda L_v at the closed-form alpha - min over a 10^4-step grid
// on the 2-simplex|.
double grid_check_alpha(const std::vector<double>& losses, double lambda);

struct SpeedupRow {
  std::string workload;
  double insert_ratio = 0.0;
  std::string method;  // "incremental" | "recompute"
  std::size_t chunks = 0;
  double elapsed_ms = 0.0;
  double incs = 0.0;
};

struct BenchConfig {
  std::vector<double> insert_ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  // Total chunks in the stream. 1 streams everything as one chunk; otherwise
  // the first chunk is the initial half of the data and the remaining
  // chunks - 1 split the inserted instances evenly.
  std::size_t chunks = 6;
  double initial_fraction = 0.5;
  double incomplete_ratio = 0.5;
  std::uint64_t seed = 1;
  std::string workload = "workload";
};

// Times incremental processing against recompute_from_scratch on the same
// stream for each insertion ratio. Two rows per ratio.
std::vector<SpeedupRow> run_speedup_benchmark(const MultiViewDataset& ds,
                                              const Hyperparams& hp, const BenchConfig& cfg);

std::string speedup_csv(const std::vector<SpeedupRow>& rows);

}  // namespace imufs::reference
