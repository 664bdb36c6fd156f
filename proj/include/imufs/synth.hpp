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

// Planted-subspace multi-view data for recovery experiments.
//
// Each view gets `informative` feature rows that carry K Gaussian clusters
// (shared labels across views) plus `noise` rows of uniform noise. Rows are
// shuffled per view; the informative positions are returned as ground truth.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "imufs/dataset.hpp"

namespace imufs {

struct SynthSpec {
  std::size_t n = 300;
  std::vector<std::size_t> informative{20, 20};  // per view
  std::size_t n_clusters = 3;
  std::vector<std::size_t> noise{10, 10};  // per view; one entry broadcasts
  std::uint64_t seed = 1;
  double center_scale = 2.0;  // cluster centers ~ U[0, center_scale]
  double spread = 0.25;       // within-cluster standard deviation
  double noise_scale = 1.0;   // noise rows ~ U[0, noise_scale]
};

struct SynthDataset {
  MultiViewDataset data;
  std::vector<std::vector<std::size_t>> planted;  // per view, sorted
};

SynthDataset generate_synthetic(const SynthSpec& spec);

// Writes the dataset via write_dataset plus <dir>/planted.json.
std::filesystem::path write_synthetic(const SynthDataset& ds, const std::filesystem::path& dir);
std::vector<std::vector<std::size_t>> read_planted(const std::filesystem::path& path);

// |selected ∩ planted| / |selected|, pooled over views.
double recovery_precision(const std::vector<std::vector<std::size_t>>& selected,
                          const std::vector<std::vector<std::size_t>>& planted);

}  // namespace imufs
