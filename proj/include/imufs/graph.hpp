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

// k-nearest-neighbour Gaussian similarity graphs and their Laplacians.

#include <cstddef>
#include <vector>

#include "imufs/matrix.hpp"

namespace imufs {

enum class Bandwidth {
  kMedian,  // sigma = median distance over kept edges
  kFixed,   // sigma = GraphOptions::sigma
};

struct GraphOptions {
  std::size_t k = 5;
  Bandwidth bandwidth = Bandwidth::kMedian;
  double sigma = 1.0;
};

struct SimilarityGraph {
  Matrix similarity;            // S: symmetric, zero diagonal, entries in [0, 1]
  std::vector<double> degree;   // row sums of S
  Matrix laplacian;             // D - S

  // Edgeless graph on n vertices (L = 0).
  static SimilarityGraph empty(std::size_t n);
};

// points: d x N, one instance per column. Edge (i, j) is kept when j is among
// the k nearest neighbours of i or vice versa; distance ties are broken by
// the lower index. Kept edges get exp(-||x_i - x_j||^2 / (2 sigma^2)), or 1
// when every kept edge has zero length.
SimilarityGraph build_graph(const Matrix& points, const GraphOptions& opts);

}  // namespace imufs
