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

// Shared fixtures for the test binaries.

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "imufs/dataset.hpp"
#include "imufs/matrix.hpp"
#include "imufs/rng.hpp"
#include "imufs/solver.hpp"

namespace imufs::testing {

inline Matrix RandomMatrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = 0.0,
                           double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& x : m.values()) x = lo + (hi - lo) * rng.uniform();
  return m;
}

// A chunk with `k` loose clusters in every view. `missing` of the instances
// lose one view (never the last one they have).
inline MultiViewChunk ClusteredChunk(const std::vector<std::size_t>& dims, std::size_t n,
                                     std::size_t k, double missing, std::uint64_t seed,
                                     std::size_t chunk_index = 1) {
  Rng rng(seed);
  MultiViewChunk c;
  c.chunk_index = chunk_index;
  std::vector<int> labels(n);
  for (std::size_t j = 0; j < n; ++j) labels[j] = static_cast<int>(j % k);
  for (std::size_t v = 0; v < dims.size(); ++v) {
    Matrix centers = RandomMatrix(dims[v], k, rng, 0.0, 3.0);
    Matrix x(dims[v], n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t r = 0; r < dims[v]; ++r) {
        const double val = centers(r, labels[j]) + 0.3 * rng.normal();
        x(r, j) = val < 0 ? 0.0 : val;
      }
    }
    c.data.push_back(std::move(x));
    c.mask.emplace_back(n, 1);
  }
  if (dims.size() > 1) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.uniform() < missing) {
        const std::size_t v = rng.below(dims.size());
        c.mask[v][j] = 0;
        for (std::size_t r = 0; r < dims[v]; ++r) c.data[v](r, j) = 0.0;
      }
    }
  }
  c.labels = labels;
  for (std::size_t j = 0; j < n; ++j) c.instance_ids.push_back(j);
  return c;
}

inline std::vector<ViewSpec> Views(const std::vector<std::size_t>& dims) {
  std::vector<ViewSpec> out;
  for (std::size_t v = 0; v < dims.size(); ++v) out.push_back({v, dims[v], "v" + std::to_string(v)});
  return out;
}

// Fresh directory under the system temp dir, unique per call.
inline std::filesystem::path TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("imufs_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace imufs::testing
