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

#include <cstddef>
#include <cstdint>

#include "imufs/matrix.hpp"
#include "imufs/metrics.hpp"

namespace imufs {

struct KMeansResult {
  Partition partition;
  Matrix centroids;  // K x d
  double sse = 0.0;
  std::size_t iterations = 0;  // of the winning restart
};

// Lloyd's algorithm with k-means++ seeding on the columns of data (d x n).
// Runs `restarts` independent seedings and keeps the lowest SSE, earliest
// restart on ties. Deterministic for a given seed.
KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                    std::size_t restarts = 1, std::size_t max_iters = 300);

}  // namespace imufs
