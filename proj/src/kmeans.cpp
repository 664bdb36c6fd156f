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

#include "imufs/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "imufs/kernels.hpp"
#include "imufs/rng.hpp"

namespace imufs {
namespace {

struct Run {
  std::vector<int> assign;
  Matrix centroids;
  double sse;
  std::size_t iterations;
};

Matrix SeedPlusPlus(const Matrix& pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.rows();
  Matrix c(k, pts.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = static_cast<std::size_t>(rng.below(n));
  for (std::size_t m = 0;; ++m) {
    std::copy(pts.row(pick).begin(), pts.row(pick).end(), c.row(m).begin());
    if (m + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], kernels::squared_distance(pts.row(i), c.row(m)));
      total += d2[i];
    }
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rng.below(n));
      continue;
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
  }
  return c;
}

Run Lloyd(const Matrix& pts, Matrix centroids, std::size_t max_iters) {
  const std::size_t n = pts.rows(), k = centroids.rows();
  std::vector<int> assign(n, -1);
  std::vector<double> dist(n, 0.0);
  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = kernels::squared_distance(pts.row(i), centroids.row(c));
        if (dd < bd) {
          bd = dd;
          best = static_cast<int>(c);
        }
      }
      dist[i] = bd;
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    std::vector<std::size_t> counts(k, 0);
    centroids.fill(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      kernels::axpy(1.0, pts.row(i), centroids.row(assign[i]));
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        kernels::scale(1.0 / static_cast<double>(counts[c]), centroids.row(c));
        continue;
      }
      // Empty cluster: steal the point farthest from its centroid.
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (dist[i] > dist[far]) far = i;
      }
      std::copy(pts.row(far).begin(), pts.row(far).end(), centroids.row(c).begin());
      dist[far] = 0.0;
    }
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double dd = kernels::squared_distance(pts.row(i), centroids.row(c));
      if (dd < bd) {
        bd = dd;
        best = static_cast<int>(c);
      }
    }
    assign[i] = best;
    sse += bd;
  }
  return {std::move(assign), std::move(centroids), sse, it};
}

}  // namespace

KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                    std::size_t restarts, std::size_t max_iters) {
  const std::size_t n = data.cols();
  if (k < 1) throw std::invalid_argument("kmeans: K must be positive");
  if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");
  if (restarts < 1) restarts = 1;
  const Matrix pts = transpose(data);
  Run best{{}, {}, std::numeric_limits<double>::infinity(), 0};
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, 0x6b6d0000ULL + r));
    Run run = Lloyd(pts, SeedPlusPlus(pts, k, rng), max_iters);
    if (run.sse < best.sse) best = std::move(run);
  }
  return {Partition(std::move(best.assign)), std::move(best.centroids), best.sse,
          best.iterations};
}

}  // namespace imufs
