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

#include "imufs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "imufs/kernels.hpp"

namespace imufs {

SimilarityGraph SimilarityGraph::empty(std::size_t n) {
  return {Matrix(n, n), std::vector<double>(n, 0.0), Matrix(n, n)};
}

SimilarityGraph build_graph(const Matrix& points, const GraphOptions& opts) {
  const std::size_t n = points.cols();
  if (n < 2) throw std::invalid_argument("build_graph: need at least two instances");
  if (opts.k < 1 || opts.k > n - 1) {
    throw std::invalid_argument("build_graph: k must lie in [1, N-1]");
  }
  if (opts.bandwidth == Bandwidth::kFixed && !(opts.sigma > 0.0)) {
    throw std::invalid_argument("build_graph: fixed sigma must be positive");
  }

  const Matrix rows = transpose(points);
  Matrix dist2(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = kernels::squared_distance(rows.row(i), rows.row(j));
      dist2(i, j) = d;
      dist2(j, i) = d;
    }
  }

  std::vector<std::uint8_t> keep(n * n, 0);
  std::vector<std::size_t> order(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t p = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order[p++] = j;
    }
    std::partial_sort(order.begin(), order.begin() + opts.k, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return dist2(i, a) < dist2(i, b) ||
                               (dist2(i, a) == dist2(i, b) && a < b);
                      });
    for (std::size_t q = 0; q < opts.k; ++q) {
      keep[i * n + order[q]] = 1;
      keep[order[q] * n + i] = 1;
    }
  }

  double sigma = opts.sigma;
  if (opts.bandwidth == Bandwidth::kMedian) {
    std::vector<double> lengths;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (keep[i * n + j]) lengths.push_back(std::sqrt(dist2(i, j)));
      }
    }
    std::sort(lengths.begin(), lengths.end());
    const std::size_t m = lengths.size();
    sigma = (m % 2 == 1) ? lengths[m / 2] : 0.5 * (lengths[m / 2 - 1] + lengths[m / 2]);
  }

  SimilarityGraph g{Matrix(n, n), std::vector<double>(n, 0.0), Matrix(n, n)};
  const double inv_two_sigma2 = sigma > 0.0 ? 1.0 / (2.0 * sigma * sigma) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!keep[i * n + j]) continue;
      const double s = sigma > 0.0 ? std::exp(-dist2(i, j) * inv_two_sigma2) : 1.0;
      g.similarity(i, j) = s;
      g.similarity(j, i) = s;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = g.similarity.row(i);
    g.degree[i] = std::accumulate(row.begin(), row.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) g.laplacian(i, j) = -g.similarity(i, j);
    g.laplacian(i, i) = g.degree[i];
  }
  return g;
}

}  // namespace imufs
