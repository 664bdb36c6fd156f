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

// End-to-end protocol: mask -> chunkify -> stream-solve -> select ->
// evaluate -> report. Shared by the CLI and the integration tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imufs/dataset.hpp"
#include "imufs/solver.hpp"

namespace imufs {

inline constexpr int kReportSchema = 1;

struct RunConfig {
  std::filesystem::path manifest;
  Hyperparams hp;
  double incomplete_ratio = 0.5;
  std::size_t n_chunks = 5;
  std::vector<double> feature_ratios{0.4};
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path out_dir = "out";
  // Directory holding one checkpoint per seed. An existing checkpoint is
  // resumed; a fresh one is written after every chunk.
  std::optional<std::filesystem::path> checkpoint_dir;
  // Stop once this many chunks have been folded (simulates an interruption).
  std::optional<std::size_t> stop_after;
  // Planted-feature sidecar; adds recovery precision to the reports.
  std::optional<std::filesystem::path> planted;
  std::size_t eval_restarts = 10;
  std::size_t threads = 1;

  void validate() const;  // throws std::invalid_argument
};

struct Evaluation {
  double feature_ratio = 0.0;
  std::vector<std::vector<std::size_t>> selected;  // per view
  std::optional<double> nmi, ari, f_measure;
  std::optional<double> recovery_precision;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::size_t chunks_processed = 0;
  bool complete = false;
  std::vector<std::size_t> iterations;              // per chunk
  std::vector<std::vector<double>> alpha_trajectory;  // per chunk
  std::vector<std::vector<double>> traces;          // per chunk processed in this call
  std::vector<std::size_t> trace_chunks;            // chunk index of each trace
  std::vector<Evaluation> evaluations;
  SolverState state;
};

struct ClusterScores {
  double nmi = 0.0, ari = 0.0, f_measure = 0.0;
};

// k-means on the selected rows of every view, stacked, scored against labels.
ClusterScores evaluate_features(const std::vector<Matrix>& view_data,
                                const std::vector<std::vector<std::size_t>>& selected,
                                const std::vector<int>& labels, std::size_t k,
                                std::uint64_t seed, std::size_t restarts);

// Runs the protocol for one seed on an already loaded dataset.
SeedResult run_seed(const MultiViewDataset& ds, const RunConfig& cfg, std::uint64_t seed);

// Runs all seeds (in parallel up to cfg.threads) and writes
//   report_seed_<s>.json, report_average.json, trace_seed<s>_chunk<t>.csv
// into cfg.out_dir. Returns the per-seed results in seed order.
std::vector<SeedResult> run_protocol(const RunConfig& cfg);

std::string seed_report_json(const SeedResult& r, const RunConfig& cfg);
std::string average_report_json(const std::vector<SeedResult>& results, const RunConfig& cfg);

// Parses "a..b" (inclusive) or a comma list "1,4,9".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace imufs
