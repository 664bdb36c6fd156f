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

#include "imufs/impute.hpp"

#include <algorithm>
#include <string>

namespace imufs {

ImputeState ImputeState::for_views(const std::vector<ViewSpec>& views) {
  ImputeState s;
  for (const auto& v : views) s.running_sum.emplace_back(v.dim, 0.0);
  s.observed_count.assign(views.size(), 0);
  return s;
}

std::vector<double> WeightMatrix::squared() const {
  std::vector<double> out(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out[i] = diag[i] * diag[i];
  return out;
}

ImputeResult impute_chunk(const ImputeState& state, const MultiViewChunk& chunk,
                          ColdStart policy, double eps) {
  const std::size_t nv = chunk.n_views();
  if (nv != state.n_views()) {
    throw std::invalid_argument("impute_chunk: view count mismatch");
  }
  ImputeResult res{chunk, state, std::vector<WeightMatrix>(nv)};
  const std::size_t n = chunk.n_instances();
  for (std::size_t v = 0; v < nv; ++v) {
    if (chunk.data[v].rows() != state.running_sum[v].size()) {
      throw std::invalid_argument("impute_chunk: view dimension mismatch");
    }
    res.weights[v].diag.assign(n, 1.0);
  }

  std::vector<double> column;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t seen = ++res.state.total_seen;
    for (std::size_t v = 0; v < nv; ++v) {
      Matrix& x = res.filled.data[v];
      auto& sum = res.state.running_sum[v];
      auto& count = res.state.observed_count[v];
      if (chunk.mask[v][j]) {
        for (std::size_t r = 0; r < x.rows(); ++r) sum[r] += x(r, j);
        ++count;
        continue;
      }
      if (count == 0) {
        if (policy == ColdStart::kError) {
          throw ColdStartError("cold-start view " + std::to_string(v) +
                               ": no observed instance to impute from");
        }
        for (std::size_t r = 0; r < x.rows(); ++r) x(r, j) = 0.0;
        res.weights[v].diag[j] = eps;
        continue;
      }
      const auto denom = static_cast<double>(count);
      for (std::size_t r = 0; r < x.rows(); ++r) x(r, j) = sum[r] / denom;
      res.weights[v].diag[j] = static_cast<double>(count) / static_cast<double>(seen);
    }
  }
  return res;
}

ImputeState reset(const ImputeState& state) {
  ImputeState s = state;
  for (auto& sum : s.running_sum) std::fill(sum.begin(), sum.end(), 0.0);
  std::fill(s.observed_count.begin(), s.observed_count.end(), 0);
  s.total_seen = 0;
  return s;
}

}  // namespace imufs
