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

// imufs: command-line frontend.
//
//   imufs synth --n 300 --dims 20,20 --k 3 --noise 10 --seed 1 --out data/
//   imufs run   --manifest data/manifest.json --seeds 1..5 --out results/
//   imufs bench --manifest data/manifest.json --out speedup.csv

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "imufs/kernels.hpp"
#include "imufs/pipeline.hpp"
#include "imufs/synth.hpp"
#include "reference.hpp"

namespace {

using imufs::Hyperparams;

void AddHyperparamFlags(CLI::App* cmd, Hyperparams& hp) {
  cmd->add_option("--k-clusters", hp.n_clusters, "Latent dimension K")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--lambda", hp.lambda, "View-weight smoothness (> 1)");
  cmd->add_option("--beta", hp.beta, "Consensus weight, one value or one per view")->delimiter(',');
  cmd->add_option("--theta", hp.theta, "Graph weight, one value or one per view")->delimiter(',');
  cmd->add_option("--eta", hp.eta, "l2,1 weight, one value or one per view")->delimiter(',');
  cmd->add_option("--xi", hp.xi, "Orthogonality penalty, one value or one per view")->delimiter(',');
  cmd->add_option("--graph-k", hp.graph.k, "Neighbours in the similarity graph");
  cmd->add_option("--max-iters", hp.max_iters, "Inner iteration cap per chunk");
  cmd->add_option("--rel-tol", hp.rel_tol, "Relative objective change to stop at");
}

std::size_t ThreadsFromEnv() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IMUFS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental unsupervised feature selection for incomplete multi-view streams"};
  app.require_subcommand(1);

  // run
  imufs::RunConfig run;
  std::string seeds = "1";
  std::string variant = "i2mufs";
  std::string checkpoint, planted;
  std::size_t stop_after = 0;
  auto* run_cmd = app.add_subcommand("run", "Stream-solve a dataset, select features, evaluate");
  run_cmd->add_option("--manifest", run.manifest, "Dataset manifest (JSON)")->required();
  run_cmd->add_option("--ratio-incomplete", run.incomplete_ratio, "Fraction of instances to make view-incomplete");
  run_cmd->add_option("--chunks", run.n_chunks, "Number of stream chunks");
  run_cmd->add_option("--ratio-features", run.feature_ratios, "Fraction of features to select (repeatable)")
      ->take_all();
  run_cmd->add_option("--seeds", seeds, "Seeds: a..b or a,b,c");
  run_cmd->add_option("--variant", variant, "i2mufs | c-i2mufs")
      ->check(CLI::IsMember({"i2mufs", "c-i2mufs"}));
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--checkpoint", checkpoint, "Checkpoint directory (resumes when present)");
  run_cmd->add_option("--stop-after", stop_after, "Stop after this many chunks");
  run_cmd->add_option("--planted", planted, "planted.json sidecar for recovery precision");
  run_cmd->add_option("--eval-restarts", run.eval_restarts, "k-means restarts for evaluation");
  AddHyperparamFlags(run_cmd, run.hp);

  // bench
  imufs::Hyperparams bench_hp;
  imufs::reference::BenchConfig bench;
  std::string bench_manifest, bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Incremental vs recompute-from-scratch timing");
  bench_cmd->add_option("--manifest", bench_manifest, "Dataset manifest (JSON)")->required();
  bench_cmd->add_option("--ratios", bench.insert_ratios, "Insertion ratios")->delimiter(',');
  bench_cmd->add_option("--chunks", bench.chunks, "Total stream chunks (initial block + insertions)");
  bench_cmd->add_option("--ratio-incomplete", bench.incomplete_ratio, "Incomplete-instance fraction");
  bench_cmd->add_option("--seed", bench.seed, "Seed");
  bench_cmd->add_option("--workload", bench.workload, "Workload label for the CSV");
  bench_cmd->add_option("--out", bench_out, "CSV path (default: stdout)");
  AddHyperparamFlags(bench_cmd, bench_hp);

  // synth
  imufs::SynthSpec synth;
  std::string synth_out = "synthetic";
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted-feature synthetic dataset");
  synth_cmd->add_option("--n", synth.n, "Instances");
  synth_cmd->add_option("--dims", synth.informative, "Informative features per view")->delimiter(',');
  synth_cmd->add_option("--k", synth.n_clusters, "Clusters");
  synth_cmd->add_option("--noise", synth.noise, "Noise features per view")->delimiter(',');
  synth_cmd->add_option("--seed", synth.seed, "Seed");
  synth_cmd->add_option("--out", synth_out, "Output directory");

  std::string simd;
  app.add_option("--simd", simd, "Kernel variant: auto | scalar | avx2");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!simd.empty() && simd != "auto") imufs::kernels::set_active(imufs::kernels::parse_isa(simd));

    if (*run_cmd) {
      run.seeds = imufs::parse_seed_list(seeds);
      run.hp.variant = variant == "c-i2mufs" ? imufs::Variant::kCI2MUFS : imufs::Variant::kI2MUFS;
      if (!checkpoint.empty()) run.checkpoint_dir = checkpoint;
      if (!planted.empty()) run.planted = planted;
      if (stop_after > 0) run.stop_after = stop_after;
      run.threads = ThreadsFromEnv();
      if (run.hp.lambda > 1.0 && run.hp.lambda < 2.0) {
        std::cerr << "warning: lambda in (1, 2) is below the usual range\n";
      }
      const auto results = imufs::run_protocol(run);
      for (const auto& r : results) {
        std::cerr << "seed " << r.seed << ": " << r.chunks_processed << " chunks";
        for (const auto& e : r.evaluations) {
          if (e.nmi) std::cerr << "  ratio " << e.feature_ratio << " NMI " << *e.nmi;
        }
        std::cerr << '\n';
      }
      return 0;
    }
    if (*bench_cmd) {
      const auto ds = imufs::load_dataset(bench_manifest);
      const auto rows = imufs::reference::run_speedup_benchmark(ds, bench_hp, bench);
      const auto csv = imufs::reference::speedup_csv(rows);
      if (bench_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(bench_out);
        out << csv;
        if (!out) throw std::runtime_error("cannot write " + bench_out);
      }
      return 0;
    }
    if (*synth_cmd) {
      const auto manifest = imufs::write_synthetic(imufs::generate_synthetic(synth), synth_out);
      std::cout << manifest.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
