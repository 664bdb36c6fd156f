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

// Streaming mean imputation and per-instance confidence weights.
//
// A missing view-instance is filled with the running mean of every instance
// observed in that view so far (across all chunks), and gets weight
// observed_count / total_seen. Observed instances get weight 1.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "imufs/dataset.hpp"

namespace imufs {

class ColdStartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ImputeState {
  std::vector<std::vector<double>> running_sum;  // per view, length d_v
  std::vector<std::size_t> observed_count;       // per view
  std::size_t total_seen = 0;

  static ImputeState for_views(const std::vector<ViewSpec>& views);
  std::size_t n_views() const { return observed_count.size(); }

  friend bool operator==(const ImputeState&, const ImputeState&) = default;
};

// Diagonal of W for one view of one chunk; entries in (0, 1].
struct WeightMatrix {
  std::vector<double> diag;

  // Diagonal of W W^T.
  std::vector<double> squared() const;
};

enum class ColdStart {
  kError,         // throw ColdStartError
  kEpsilonFloor,  // fill with zeros, weight eps
};

struct ImputeResult {
  MultiViewChunk filled;  // mask preserved; placeholder columns overwritten
  ImputeState state;
  std::vector<WeightMatrix> weights;  // per view
};

ImputeResult impute_chunk(const ImputeState& state, const MultiViewChunk& chunk,
                          ColdStart policy = ColdStart::kError, double eps = 1e-9);

ImputeState reset(const ImputeState& state);

}  // namespace imufs
