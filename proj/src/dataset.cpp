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

#include "imufs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "imufs/rng.hpp"
#include "json.hpp"

namespace imufs {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(std::string_view tok, const fs::path& path, std::size_t line) {
  tok = Trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DatasetError(path.string() + ":" + std::to_string(line) +
                       ": cannot parse number '" + std::string(tok) + "'");
  }
  return v;
}

std::string FormatDouble(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

std::vector<int> ReadLabels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open labels file " + path.string());
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = Trim(line);
    if (tok.empty()) continue;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
      throw DatasetError(path.string() + ":" + std::to_string(lineno) +
                         ": labels must be non-negative integers");
    }
    labels.push_back(v);
  }
  return labels;
}

}  // namespace

Matrix read_csv_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = Trim(line);
    if (rest.empty()) continue;
    std::size_t n = 0;
    for (;;) {
      const auto comma = rest.find(',');
      values.push_back(ParseDouble(rest.substr(0, comma), path, lineno));
      ++n;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = n;
    } else if (n != cols) {
      throw DatasetError(path.string() + ":" + std::to_string(lineno) +
                         ": ragged row (" + std::to_string(n) + " vs " +
                         std::to_string(cols) + " columns)");
    }
    ++rows;
  }
  return Matrix(rows, cols, std::move(values));
}

void write_csv_matrix(const fs::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write " + path.string());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << FormatDouble(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw DatasetError("write failed: " + path.string());
}

void MultiViewDataset::validate() const {
  if (views.empty()) throw DatasetError("dataset has no views");
  if (data.size() != views.size() || mask.size() != views.size()) {
    throw DatasetError("per-view arrays disagree with the view list");
  }
  const std::size_t n = n_instances();
  if (n == 0) throw DatasetError("dataset has no instances");
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].view_id != v) throw DatasetError("view ids must be 0..n_v-1 in order");
    if (views[v].dim == 0) throw DatasetError("view dimension must be >= 1");
    if (data[v].rows() != views[v].dim) {
      throw DatasetError("view " + std::to_string(v) + ": dimension mismatch (" +
                         std::to_string(data[v].rows()) + " rows, manifest says " +
                         std::to_string(views[v].dim) + ")");
    }
    if (data[v].cols() != n) throw DatasetError("instance count mismatch");
    if (mask[v].size() != n) throw DatasetError("mask length mismatch");
    for (double x : data[v].values()) {
      if (!std::isfinite(x)) throw DatasetError("non-finite entry in view " + views[v].name);
      if (x < 0.0) throw DatasetError("negative entry in view " + views[v].name);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool present = false;
    for (const auto& m : mask) present = present || m[j] != 0;
    if (!present) {
      throw DatasetError("instance " + std::to_string(j) + " is absent from all views");
    }
  }
  if (labels && labels->size() != n) throw DatasetError("label count mismatch");
}

MultiViewDataset load_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DatasetError("cannot open manifest " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DatasetError("malformed manifest: " + std::string(e.what()));
  }
  const fs::path base = manifest_path.parent_path();

  MultiViewDataset ds;
  try {
    const auto& views = manifest.at("views");
    for (std::size_t v = 0; v < views.size(); ++v) {
      const auto& vj = views[v];
      ViewSpec spec{v, vj.at("dim").get<std::size_t>(),
                    vj.value("name", "view" + std::to_string(v))};
      Matrix m = read_csv_matrix(Resolve(base, vj.at("csv_path").get<std::string>()));
      if (m.rows() != spec.dim) {
        throw DatasetError("view " + spec.name + ": dimension mismatch (" +
                           std::to_string(m.rows()) + " rows, manifest says " +
                           std::to_string(spec.dim) + ")");
      }
      if (!ds.data.empty() && m.cols() != ds.data.front().cols()) {
        throw DatasetError("instance count mismatch between views");
      }
      ds.views.push_back(std::move(spec));
      ds.data.push_back(std::move(m));
    }
    if (ds.views.empty()) throw DatasetError("manifest lists no views");
    const std::size_t n = ds.data.front().cols();
    if (manifest.contains("n_instances") &&
        manifest["n_instances"].get<std::size_t>() != n) {
      throw DatasetError("instance count mismatch with n_instances");
    }
    if (manifest.contains("mask_csv") && !manifest["mask_csv"].is_null()) {
      const Matrix m = read_csv_matrix(Resolve(base, manifest["mask_csv"].get<std::string>()));
      if (m.rows() != ds.views.size() || m.cols() != n) {
        throw DatasetError("mask shape must be n_views x n_instances");
      }
      for (std::size_t v = 0; v < m.rows(); ++v) {
        Mask row(n);
        for (std::size_t j = 0; j < n; ++j) {
          if (m(v, j) != 0.0 && m(v, j) != 1.0) throw DatasetError("mask entries must be 0/1");
          row[j] = m(v, j) != 0.0;
          if (!row[j]) {
            for (std::size_t r = 0; r < ds.data[v].rows(); ++r) ds.data[v](r, j) = 0.0;
          }
        }
        ds.mask.push_back(std::move(row));
      }
    } else {
      ds.mask.assign(ds.views.size(), Mask(n, 1));
    }
    if (manifest.contains("labels_csv") && !manifest["labels_csv"].is_null()) {
      ds.labels = ReadLabels(Resolve(base, manifest["labels_csv"].get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw DatasetError("malformed manifest: " + std::string(e.what()));
  }
  ds.validate();
  return ds;
}

fs::path write_dataset(const MultiViewDataset& ds, const fs::path& dir,
                       const std::string& stem) {
  ds.validate();
  fs::create_directories(dir);
  json manifest;
  manifest["n_instances"] = ds.n_instances();
  manifest["views"] = json::array();
  for (std::size_t v = 0; v < ds.n_views(); ++v) {
    const std::string file = stem + "_view" + std::to_string(v) + ".csv";
    write_csv_matrix(dir / file, ds.data[v]);
    manifest["views"].push_back(
        {{"name", ds.views[v].name}, {"dim", ds.views[v].dim}, {"csv_path", file}});
  }
  Matrix mask(ds.n_views(), ds.n_instances());
  for (std::size_t v = 0; v < ds.n_views(); ++v) {
    for (std::size_t j = 0; j < ds.n_instances(); ++j) mask(v, j) = ds.mask[v][j];
  }
  write_csv_matrix(dir / (stem + "_mask.csv"), mask);
  manifest["mask_csv"] = stem + "_mask.csv";
  if (ds.labels) {
    std::ofstream out(dir / (stem + "_labels.csv"));
    for (int l : *ds.labels) out << l << '\n';
    manifest["labels_csv"] = stem + "_labels.csv";
  }
  const fs::path path = dir / (stem + ".json");
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw DatasetError("write failed: " + path.string());
  return path;
}

MultiViewDataset mask_incomplete(const MultiViewDataset& ds, double ratio,
                                 std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("incomplete ratio must lie in [0, 1)");
  }
  if (ds.n_views() == 1 && ratio > 0.0) {
    throw std::invalid_argument("cannot mask a single-view dataset");
  }
  MultiViewDataset out = ds;
  const std::size_t n = ds.n_instances();
  const auto target = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  if (target == 0) return out;

  // Only instances present in >= 2 views can lose a view.
  std::vector<std::size_t> eligible;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t present = 0;
    for (const auto& m : ds.mask) present += m[j];
    if (present >= 2) eligible.push_back(j);
  }
  if (eligible.size() < target) {
    throw std::invalid_argument("not enough multi-view instances to mask the requested ratio");
  }
  Rng rng(derive_seed(seed, 0x6d61736bULL));
  rng.shuffle(std::span(eligible));
  for (std::size_t s = 0; s < target; ++s) {
    const std::size_t j = eligible[s];
    std::vector<std::size_t> present;
    for (std::size_t v = 0; v < ds.n_views(); ++v) {
      if (ds.mask[v][j]) present.push_back(v);
    }
    // Uniform over the 2^p - 2 nonempty strict subsets, encoded as bitmasks.
    const std::uint64_t subsets = (std::uint64_t{1} << present.size()) - 2;
    const std::uint64_t pick = 1 + rng.below(subsets);
    for (std::size_t b = 0; b < present.size(); ++b) {
      if ((pick >> b) & 1U) {
        const std::size_t v = present[b];
        out.mask[v][j] = 0;
        for (std::size_t r = 0; r < out.data[v].rows(); ++r) out.data[v](r, j) = 0.0;
      }
    }
  }
  return out;
}

std::vector<MultiViewChunk> chunkify(const MultiViewDataset& ds, std::size_t n_chunks,
                                     std::uint64_t seed) {
  const std::size_t n = ds.n_instances();
  if (n_chunks < 1 || n_chunks > n) {
    throw std::invalid_argument("chunk count must lie in [1, N]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x6368756eULL));
  rng.shuffle(std::span(order));

  std::vector<MultiViewChunk> chunks;
  chunks.reserve(n_chunks);
  const std::size_t base = n / n_chunks, extra = n % n_chunks;
  std::size_t pos = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t len = base + (c < extra ? 1 : 0);
    std::vector<std::size_t> ids(order.begin() + pos, order.begin() + pos + len);
    MultiViewChunk chunk = extract_chunk(ds, ids, c + 1);
    chunks.push_back(std::move(chunk));
    pos += len;
  }
  return chunks;
}

MultiViewChunk extract_chunk(const MultiViewDataset& ds, const std::vector<std::size_t>& ids,
                             std::size_t chunk_index) {
  MultiViewChunk chunk;
  chunk.chunk_index = chunk_index;
  chunk.instance_ids = ids;
  const std::size_t len = ids.size();
  for (std::size_t v = 0; v < ds.n_views(); ++v) {
    chunk.data.push_back(select_columns(ds.data[v], ids));
    Mask m(len);
    for (std::size_t j = 0; j < len; ++j) m[j] = ds.mask[v].at(ids[j]);
    chunk.mask.push_back(std::move(m));
  }
  if (ds.labels) {
    std::vector<int> l(len);
    for (std::size_t j = 0; j < len; ++j) l[j] = (*ds.labels)[ids[j]];
    chunk.labels = std::move(l);
  }
  return chunk;
}

MultiViewChunk concat_chunks(const std::vector<MultiViewChunk>& chunks) {
  if (chunks.empty()) throw std::invalid_argument("concat_chunks: no chunks");
  MultiViewChunk out;
  out.chunk_index = chunks.front().chunk_index;
  const std::size_t nv = chunks.front().n_views();
  std::size_t total = 0;
  bool labelled = true;
  for (const auto& c : chunks) {
    if (c.n_views() != nv) throw std::invalid_argument("concat_chunks: view count mismatch");
    total += c.n_instances();
    labelled = labelled && c.labels.has_value();
  }
  for (std::size_t v = 0; v < nv; ++v) {
    Matrix m(chunks.front().data[v].rows(), total);
    Mask mask;
    std::size_t col = 0;
    for (const auto& c : chunks) {
      for (std::size_t j = 0; j < c.n_instances(); ++j, ++col) {
        for (std::size_t r = 0; r < m.rows(); ++r) m(r, col) = c.data[v](r, j);
      }
      mask.insert(mask.end(), c.mask[v].begin(), c.mask[v].end());
    }
    out.data.push_back(std::move(m));
    out.mask.push_back(std::move(mask));
  }
  if (labelled) out.labels.emplace();
  for (const auto& c : chunks) {
    out.instance_ids.insert(out.instance_ids.end(), c.instance_ids.begin(),
                            c.instance_ids.end());
    if (labelled) out.labels->insert(out.labels->end(), c.labels->begin(), c.labels->end());
  }
  return out;
}

}  // namespace imufs
