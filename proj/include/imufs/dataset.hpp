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

// Multi-view datasets: loading, incompleteness masking and chunked replay.
//
// View data is stored feature-major (d_v rows x N columns, one column per
// instance). An instance missing from a view keeps a zero placeholder column
// and mask = 0 so every view matrix stays rectangular.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "imufs/matrix.hpp"

namespace imufs {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 1 = instance present in the view.
using Mask = std::vector<std::uint8_t>;

struct ViewSpec {
  std::size_t view_id = 0;
  std::size_t dim = 0;
  std::string name;

  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

struct MultiViewDataset {
  std::vector<ViewSpec> views;
  std::vector<Matrix> data;  // per view, dim x N
  std::vector<Mask> mask;    // per view, length N
  std::optional<std::vector<int>> labels;

  std::size_t n_views() const { return views.size(); }
  std::size_t n_instances() const { return data.empty() ? 0 : data.front().cols(); }

  // Throws DatasetError when any structural invariant is violated.
  void validate() const;
};

struct MultiViewChunk {
  std::size_t chunk_index = 1;  // 1-based
  std::vector<Matrix> data;
  std::vector<Mask> mask;
  std::optional<std::vector<int>> labels;
  // Position of each column in the source dataset.
  std::vector<std::size_t> instance_ids;

  std::size_t n_views() const { return data.size(); }
  std::size_t n_instances() const { return data.empty() ? 0 : data.front().cols(); }
};

MultiViewDataset load_dataset(const std::filesystem::path& manifest_path);

// Writes <dir>/<stem>.json plus one CSV per view, the mask and labels.
// Values are printed in shortest round-trip form so reloading is exact.
std::filesystem::path write_dataset(const MultiViewDataset& ds,
                                    const std::filesystem::path& dir,
                                    const std::string& stem = "manifest");

// Marks floor(ratio * N) instances as view-incomplete. Each selected
// instance loses a uniformly drawn nonempty strict subset of the views it is
// present in, so it always stays in at least one view.
MultiViewDataset mask_incomplete(const MultiViewDataset& ds, double ratio,
                                 std::uint64_t seed);

// Seeded permutation split into n_chunks contiguous chunks whose sizes
// differ by at most one.
std::vector<MultiViewChunk> chunkify(const MultiViewDataset& ds,
                                     std::size_t n_chunks, std::uint64_t seed);

// Builds one chunk from the listed instances, in order.
MultiViewChunk extract_chunk(const MultiViewDataset& ds, const std::vector<std::size_t>& ids,
                             std::size_t chunk_index);

// Column-concatenates chunks into one chunk (index taken from the first).
MultiViewChunk concat_chunks(const std::vector<MultiViewChunk>& chunks);

// CSV helpers shared with the CLI.
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace imufs
