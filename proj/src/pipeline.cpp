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

#include "imufs/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "imufs/checkpoint.hpp"
#include "imufs/impute.hpp"
#include "imufs/kmeans.hpp"
#include "imufs/metrics.hpp"
#include "imufs/rng.hpp"
#include "imufs/synth.hpp"
#include "json.hpp"

namespace imufs {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kMaskTag = 1, kChunkTag = 2, kEvalTag = 4;

json HyperparamsJson(const Hyperparams& hp) {
  return {{"k_clusters", hp.n_clusters}, {"lambda", hp.lambda},  {"beta", hp.beta},
          {"theta", hp.theta},           {"eta", hp.eta},        {"xi", hp.xi},
          {"eps", hp.eps},               {"max_iters", hp.max_iters},
          {"rel_tol", hp.rel_tol},       {"graph_k", hp.graph.k}};
}

json ConfigJson(const RunConfig& cfg) {
  return {{"manifest", cfg.manifest.string()},
          {"incomplete_ratio", cfg.incomplete_ratio},
          {"chunks", cfg.n_chunks},
          {"feature_ratios", cfg.feature_ratios},
          {"hyperparams", HyperparamsJson(cfg.hp)}};
}

json Optional(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

fs::path CheckpointPath(const fs::path& dir, std::uint64_t seed) {
  return dir / ("seed_" + std::to_string(seed) + ".ckpt.json");
}
fs::path HistoryPath(const fs::path& dir, std::uint64_t seed) {
  return dir / ("seed_" + std::to_string(seed) + ".history.json");
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Filled view data for the whole stream, re-derived from a fresh imputer so
// it matches what the solver saw even across checkpoint resumes.
std::vector<Matrix> ImputedStream(const std::vector<MultiViewChunk>& chunks,
                                  const std::vector<ViewSpec>& views, const Hyperparams& hp,
                                  std::vector<int>* labels) {
  ImputeState st = ImputeState::for_views(views);
  std::vector<MultiViewChunk> filled;
  for (const auto& c : chunks) {
    auto r = impute_chunk(st, c, hp.cold_start, hp.eps);
    st = std::move(r.state);
    filled.push_back(std::move(r.filled));
  }
  MultiViewChunk all = concat_chunks(filled);
  if (labels && all.labels) *labels = *all.labels;
  return std::move(all.data);
}

}  // namespace

void RunConfig::validate() const {
  if (!(incomplete_ratio >= 0.0 && incomplete_ratio < 1.0)) {
    throw std::invalid_argument("--ratio-incomplete must lie in [0, 1)");
  }
  if (n_chunks < 1) throw std::invalid_argument("--chunks must be positive");
  if (feature_ratios.empty()) throw std::invalid_argument("need at least one feature ratio");
  for (double r : feature_ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("--ratio-features must lie in (0, 1]");
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds is empty");
  if (threads < 1) throw std::invalid_argument("thread count must be positive");
  if (stop_after && *stop_after < 1) throw std::invalid_argument("--stop-after must be positive");
}

ClusterScores evaluate_features(const std::vector<Matrix>& view_data,
                                const std::vector<std::vector<std::size_t>>& selected,
                                const std::vector<int>& labels, std::size_t k,
                                std::uint64_t seed, std::size_t restarts) {
  std::size_t rows = 0;
  for (const auto& s : selected) rows += s.size();
  const std::size_t n = view_data.front().cols();
  Matrix stacked(rows, n);
  std::size_t r = 0;
  for (std::size_t v = 0; v < selected.size(); ++v) {
    for (std::size_t f : selected[v]) {
      std::copy(view_data[v].row(f).begin(), view_data[v].row(f).end(), stacked.row(r).begin());
      ++r;
    }
  }
  const auto km = kmeans(stacked, k, seed, restarts);
  const Partition truth(labels);
  return {nmi(km.partition, truth), ari(km.partition, truth), f_measure(km.partition, truth)};
}

SeedResult run_seed(const MultiViewDataset& ds, const RunConfig& cfg, std::uint64_t seed) {
  const MultiViewDataset masked = mask_incomplete(ds, cfg.incomplete_ratio,
                                                  derive_seed(seed, kMaskTag));
  const auto chunks = chunkify(masked, cfg.n_chunks, derive_seed(seed, kChunkTag));

  SeedResult res;
  res.seed = seed;
  SolverState state;
  bool resumed = false;
  if (cfg.checkpoint_dir) {
    fs::create_directories(*cfg.checkpoint_dir);
    const auto ckpt = CheckpointPath(*cfg.checkpoint_dir, seed);
    if (fs::exists(ckpt)) {
      state = load_checkpoint(ckpt);
      if (state.views != ds.views || state.V.front().cols() != cfg.hp.n_clusters ||
          state.seed != seed || state.chunks_seen > chunks.size()) {
        throw std::runtime_error("checkpoint " + ckpt.string() + " does not match this run");
      }
      std::ifstream in(HistoryPath(*cfg.checkpoint_dir, seed));
      if (!in) throw std::runtime_error("checkpoint history missing for seed " + std::to_string(seed));
      const json h = json::parse(in);
      res.iterations = h.at("iterations").get<std::vector<std::size_t>>();
      res.alpha_trajectory = h.at("alpha_trajectory").get<std::vector<std::vector<double>>>();
      resumed = true;
    }
  }
  if (!resumed) state = init_solver(ds.views, cfg.hp, seed);

  while (state.chunks_seen < chunks.size()) {
    if (cfg.stop_after && state.chunks_seen >= *cfg.stop_after) break;
    const auto out = process_chunk(state, chunks[state.chunks_seen], cfg.hp);
    res.iterations.push_back(out.report.iterations);
    res.alpha_trajectory.push_back(out.report.alpha);
    res.traces.push_back(out.report.objective_trace);
    res.trace_chunks.push_back(out.report.chunk_index);
    if (cfg.checkpoint_dir) {
      save_checkpoint(state, CheckpointPath(*cfg.checkpoint_dir, seed));
      WriteText(HistoryPath(*cfg.checkpoint_dir, seed),
                json{{"iterations", res.iterations}, {"alpha_trajectory", res.alpha_trajectory}}
                    .dump());
    }
  }
  res.chunks_processed = state.chunks_seen;
  res.complete = state.chunks_seen == chunks.size();

  if (res.complete) {
    std::vector<int> labels;
    const auto data = ImputedStream(chunks, ds.views, cfg.hp, &labels);
    const auto ranking = rank_features(state);
    std::optional<std::vector<std::vector<std::size_t>>> planted;
    if (cfg.planted) planted = read_planted(*cfg.planted);
    std::size_t k = cfg.hp.n_clusters;
    if (ds.labels) k = std::set<int>(ds.labels->begin(), ds.labels->end()).size();
    for (double ratio : cfg.feature_ratios) {
      Evaluation e;
      e.feature_ratio = ratio;
      e.selected = select_features(ranking, ratio);
      if (ds.labels && k <= data.front().cols()) {
        const auto s = evaluate_features(data, e.selected, labels, k,
                                         derive_seed(seed, kEvalTag), cfg.eval_restarts);
        e.nmi = s.nmi;
        e.ari = s.ari;
        e.f_measure = s.f_measure;
      }
      if (planted) e.recovery_precision = recovery_precision(e.selected, *planted);
      res.evaluations.push_back(std::move(e));
    }
  }
  res.state = std::move(state);
  return res;
}

std::string seed_report_json(const SeedResult& r, const RunConfig& cfg) {
  json results = json::array();
  for (const auto& e : r.evaluations) {
    results.push_back({{"feature_ratio", e.feature_ratio},
                       {"nmi", Optional(e.nmi)},
                       {"ari", Optional(e.ari)},
                       {"f_measure", Optional(e.f_measure)},
                       {"recovery_precision", Optional(e.recovery_precision)},
                       {"selected_indices", e.selected}});
  }
  const json j = {{"schema", kReportSchema},
                  {"variant", variant_name(cfg.hp.variant)},
                  {"seed", r.seed},
                  {"complete", r.complete},
                  {"chunks_processed", r.chunks_processed},
                  {"config", ConfigJson(cfg)},
                  {"iterations", r.iterations},
                  {"alpha_trajectory", r.alpha_trajectory},
                  {"results", results}};
  return j.dump(2) + "\n";
}

std::string average_report_json(const std::vector<SeedResult>& results, const RunConfig& cfg) {
  json seeds = json::array();
  for (const auto& r : results) seeds.push_back(r.seed);
  json per_ratio = json::array();
  for (std::size_t i = 0; i < cfg.feature_ratios.size(); ++i) {
    json entry = {{"feature_ratio", cfg.feature_ratios[i]}};
    for (const char* key : {"nmi", "ari", "f_measure", "recovery_precision"}) {
      std::vector<double> values;
      for (const auto& r : results) {
        const auto& e = r.evaluations.at(i);
        const std::string k(key);
        const auto& opt = k == "nmi" ? e.nmi : k == "ari" ? e.ari
                          : k == "f_measure" ? e.f_measure : e.recovery_precision;
        if (opt) values.push_back(*opt);
      }
      if (values.size() == results.size() && !values.empty()) {
        double sum = 0.0;
        for (double x : values) sum += x;
        entry[key] = sum / static_cast<double>(values.size());
        entry["per_seed"][key] = values;
      } else {
        entry[key] = nullptr;
      }
    }
    per_ratio.push_back(std::move(entry));
  }
  double iters = 0.0;
  std::size_t count = 0;
  for (const auto& r : results) {
    for (auto it : r.iterations) {
      iters += static_cast<double>(it);
      ++count;
    }
  }
  const json j = {{"schema", kReportSchema},
                  {"variant", variant_name(cfg.hp.variant)},
                  {"seeds", seeds},
                  {"config", ConfigJson(cfg)},
                  {"mean_iterations", count ? iters / static_cast<double>(count) : 0.0},
                  {"results", per_ratio}};
  return j.dump(2) + "\n";
}

std::vector<SeedResult> run_protocol(const RunConfig& cfg) {
  cfg.validate();
  const MultiViewDataset ds = load_dataset(cfg.manifest);
  cfg.hp.validate(ds.n_views());

  std::vector<SeedResult> results(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        results[i] = run_seed(ds, cfg, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.threads, cfg.seeds.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  fs::create_directories(cfg.out_dir);
  bool all_complete = true;
  for (const auto& r : results) {
    WriteText(cfg.out_dir / ("report_seed_" + std::to_string(r.seed) + ".json"),
              seed_report_json(r, cfg));
    for (std::size_t c = 0; c < r.traces.size(); ++c) {
      std::string csv = "iteration,objective\n";
      char buf[32];
      for (std::size_t it = 0; it < r.traces[c].size(); ++it) {
        const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), r.traces[c][it]);
        csv += std::to_string(it + 1) + "," + std::string(buf, p) + "\n";
      }
      WriteText(cfg.out_dir / ("trace_seed" + std::to_string(r.seed) + "_chunk" +
                               std::to_string(r.trace_chunks[c]) + ".csv"),
                csv);
    }
    all_complete = all_complete && r.complete;
  }
  if (all_complete) {
    WriteText(cfg.out_dir / "report_average.json", average_report_json(results, cfg));
  }
  return results;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  auto parse = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw std::invalid_argument("bad seed list: " + text);
    }
    return v;
  };
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto a = parse(std::string_view(text).substr(0, dots));
    const auto b = parse(std::string_view(text).substr(dots + 2));
    if (b < a) throw std::invalid_argument("bad seed range: " + text);
    for (auto s = a; s <= b; ++s) out.push_back(s);
    return out;
  }
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(parse(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

}  // namespace imufs
