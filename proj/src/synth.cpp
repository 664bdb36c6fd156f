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

#include "imufs/synth.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "imufs/rng.hpp"
#include "json.hpp"

namespace imufs {

SynthDataset generate_synthetic(const SynthSpec& spec) {
  const std::size_t nv = spec.informative.size();
  if (nv == 0) throw std::invalid_argument("synth: need at least one view");
  if (spec.noise.size() != 1 && spec.noise.size() != nv) {
    throw std::invalid_argument("synth: noise needs 1 or n_views entries");
  }
  if (spec.n_clusters < 1 || spec.n < spec.n_clusters) {
    throw std::invalid_argument("synth: need 1 <= K <= n");
  }
  Rng rng(derive_seed(spec.seed, 0x73796e74ULL));

  std::vector<int> labels(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) labels[j] = static_cast<int>(j % spec.n_clusters);
  rng.shuffle(std::span(labels));

  SynthDataset out;
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t inf = spec.informative[v];
    const std::size_t noise = spec.noise.size() == 1 ? spec.noise[0] : spec.noise[v];
    const std::size_t dim = inf + noise;
    if (dim == 0) throw std::invalid_argument("synth: view with no features");

    std::vector<std::size_t> rows(dim);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    rng.shuffle(std::span(rows));

    Matrix centers(spec.n_clusters, inf);
    for (double& c : centers.values()) c = spec.center_scale * rng.uniform();

    Matrix x(dim, spec.n);
    for (std::size_t f = 0; f < dim; ++f) {
      const std::size_t r = rows[f];
      for (std::size_t j = 0; j < spec.n; ++j) {
        if (f < inf) {
          x(r, j) = std::max(0.0, centers(labels[j], f) + spec.spread * rng.normal());
        } else {
          x(r, j) = spec.noise_scale * rng.uniform();
        }
      }
    }
    std::vector<std::size_t> planted(rows.begin(), rows.begin() + inf);
    std::sort(planted.begin(), planted.end());
    out.planted.push_back(std::move(planted));
    out.data.views.push_back({v, dim, "view" + std::to_string(v)});
    out.data.data.push_back(std::move(x));
    out.data.mask.emplace_back(spec.n, 1);
  }
  out.data.labels = std::move(labels);
  out.data.validate();
  return out;
}

std::filesystem::path write_synthetic(const SynthDataset& ds, const std::filesystem::path& dir) {
  const auto manifest = write_dataset(ds.data, dir);
  nlohmann::json j;
  j["views"] = nlohmann::json::array();
  for (const auto& p : ds.planted) j["views"].push_back({{"informative", p}});
  std::ofstream out(dir / "planted.json");
  out << j.dump(2) << '\n';
  if (!out) throw DatasetError("cannot write planted.json");
  return manifest;
}

std::vector<std::vector<std::size_t>> read_planted(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  const auto j = nlohmann::json::parse(in);
  std::vector<std::vector<std::size_t>> out;
  for (const auto& v : j.at("views")) {
    auto idx = v.at("informative").get<std::vector<std::size_t>>();
    std::sort(idx.begin(), idx.end());
    out.push_back(std::move(idx));
  }
  return out;
}

double recovery_precision(const std::vector<std::vector<std::size_t>>& selected,
                          const std::vector<std::vector<std::size_t>>& planted) {
  if (selected.size() != planted.size()) {
    throw std::invalid_argument("recovery_precision: view count mismatch");
  }
  std::size_t hits = 0, total = 0;
  for (std::size_t v = 0; v < selected.size(); ++v) {
    for (std::size_t f : selected[v]) {
      hits += std::binary_search(planted[v].begin(), planted[v].end(), f) ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace imufs
