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

#include "reference.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "imufs/rng.hpp"

namespace imufs::reference {
namespace {

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string Num(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

void BatchTrace::record(const ChunkWorkspace& ws, const SolverState& state_after) {
  chunks.push_back({ws.X, ws.recon_weight, ws.U, state_after.V});
}

std::vector<Accumulators> batch_accumulators(const BatchTrace& trace) {
  if (trace.chunks.empty()) throw std::invalid_argument("batch_accumulators: empty trace");
  const std::size_t nv = trace.chunks.front().U.size();
  std::vector<Accumulators> out;
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t k = trace.chunks.front().U[v].cols();
    const std::size_t d = trace.chunks.front().X[v].rows();
    Accumulators acc{Matrix(k, k), Matrix(d, k), 0.0};
    for (const auto& c : trace.chunks) {
      const Matrix& x = c.X[v];
      const Matrix& u = c.U[v];
      const Matrix& vv = c.V[v];
      const auto& w = c.weight[v];
      const std::size_t n = u.rows();
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += u(j, a) * w[j] * u(j, b);
          acc.R(a, b) += s;
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t b = 0; b < k; ++b) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += x(i, j) * w[j] * u(j, b);
          acc.Q(i, b) += s;
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          double fit = 0.0;
          for (std::size_t b = 0; b < k; ++b) fit += vv(i, b) * u(j, b);
          const double r = x(i, j) - fit;
          col += r * r;
        }
        acc.loss += w[j] * col;
      }
    }
    out.push_back(std::move(acc));
  }
  return out;
}

RecomputeResult recompute_from_scratch(const std::vector<MultiViewChunk>& chunks,
                                       const std::vector<ViewSpec>& views,
                                       const Hyperparams& hp, std::uint64_t seed) {
  if (chunks.empty()) throw std::invalid_argument("recompute_from_scratch: no chunks");
  const auto start = Clock::now();
  RecomputeResult res;
  std::vector<MultiViewChunk> prefix;
  for (const auto& c : chunks) {
    prefix.push_back(c);
    MultiViewChunk all = concat_chunks(prefix);
    all.chunk_index = 1;
    res.state = init_solver(views, hp, seed);
    process_chunk(res.state, all, hp);
  }
  res.elapsed_ms = MillisSince(start);
  return res;
}

double grid_check_alpha(const std::vector<double>& losses, double lambda) {
  if (losses.size() != 2) throw std::invalid_argument("grid_check_alpha: need two views");
  auto f = [&](double a) {
    return std::pow(a, lambda) * losses[0] + std::pow(1.0 - a, lambda) * losses[1];
  };
  constexpr int kSteps = 10000;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSteps; ++i) best = std::min(best, f(static_cast<double>(i) / kSteps));
  const auto alpha = update_alpha(losses, lambda);
  return std::abs(f(alpha[0]) - best);
}

std::vector<SpeedupRow> run_speedup_benchmark(const MultiViewDataset& ds,
                                              const Hyperparams& hp, const BenchConfig& cfg) {
  if (cfg.chunks < 1) throw std::invalid_argument("bench: chunks must be positive");
  const MultiViewDataset masked =
      cfg.incomplete_ratio > 0.0
          ? mask_incomplete(ds, cfg.incomplete_ratio, derive_seed(cfg.seed, 1))
          : ds;
  const std::size_t n = ds.n_instances();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, 0x62656e63ULL));
  rng.shuffle(std::span(order));
  const auto initial = static_cast<std::size_t>(std::floor(cfg.initial_fraction * n));

  std::vector<SpeedupRow> rows;
  for (double ratio : cfg.insert_ratios) {
    const auto inserted = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    if (initial + inserted > n || initial == 0) {
      throw std::invalid_argument("bench: insertion ratio exceeds the dataset");
    }
    std::vector<MultiViewChunk> stream;
    if (cfg.chunks == 1) {
      stream.push_back(extract_chunk(
          masked, std::vector<std::size_t>(order.begin(), order.begin() + initial + inserted), 1));
    } else {
      const std::size_t parts = cfg.chunks - 1;
      if (inserted < parts) throw std::invalid_argument("bench: too few inserted instances");
      stream.push_back(extract_chunk(
          masked, std::vector<std::size_t>(order.begin(), order.begin() + initial), 1));
      std::size_t pos = initial;
      for (std::size_t c = 0; c < parts; ++c) {
        const std::size_t len = inserted / parts + (c < inserted % parts ? 1 : 0);
        stream.push_back(extract_chunk(
            masked, std::vector<std::size_t>(order.begin() + pos, order.begin() + pos + len),
            c + 2));
        pos += len;
      }
    }

    const auto start = Clock::now();
    SolverState state = init_solver(ds.views, hp, cfg.seed);
    for (const auto& c : stream) process_chunk(state, c, hp);
    const double incremental_ms = MillisSince(start);
    const double naive_ms = recompute_from_scratch(stream, ds.views, hp, cfg.seed).elapsed_ms;
    const double incs = naive_ms / incremental_ms;
    rows.push_back({cfg.workload, ratio, "incremental", stream.size(), incremental_ms, incs});
    rows.push_back({cfg.workload, ratio, "recompute", stream.size(), naive_ms, incs});
  }
  return rows;
}

std::string speedup_csv(const std::vector<SpeedupRow>& rows) {
  std::string out = "workload,insert_ratio,method,chunks,elapsed_ms,IncS\n";
  for (const auto& r : rows) {
    out += r.workload + "," + Num(r.insert_ratio) + "," + r.method + "," +
           std::to_string(r.chunks) + "," + Num(r.elapsed_ms) + "," + Num(r.incs) + "\n";
  }
  return out;
}

}  // namespace imufs::reference
