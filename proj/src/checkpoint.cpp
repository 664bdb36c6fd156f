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

#include "imufs/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace imufs {
using nlohmann::json;

namespace {

constexpr const char* kFormat = "imufs-checkpoint";

json MatrixToJson(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.storage()}};
}

Matrix MatrixFromJson(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

json MatricesToJson(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(MatrixToJson(m));
  return out;
}

std::vector<Matrix> MatricesFromJson(const json& j) {
  std::vector<Matrix> out;
  for (const auto& e : j) out.push_back(MatrixFromJson(e));
  return out;
}

}  // namespace

std::string serialize_state(const SolverState& s) {
  json views = json::array();
  for (const auto& v : s.views) {
    views.push_back({{"view_id", v.view_id}, {"dim", v.dim}, {"name", v.name}});
  }
  json j = {
      {"format", kFormat},
      {"version", kCheckpointVersion},
      {"seed", s.seed},
      {"chunks_seen", s.chunks_seen},
      {"views", views},
      {"alpha", s.alpha},
      {"loss_acc", s.loss_acc},
      {"data_energy", s.data_energy},
      {"V", MatricesToJson(s.V)},
      {"R", MatricesToJson(s.R)},
      {"Q", MatricesToJson(s.Q)},
      {"impute",
       {{"running_sum", s.impute.running_sum},
        {"observed_count", s.impute.observed_count},
        {"total_seen", s.impute.total_seen}}},
  };
  return j.dump();
}

SolverState deserialize_state(const std::string& blob) {
  SolverState s;
  try {
    const json j = json::parse(blob);
    if (j.at("format") != kFormat) throw std::runtime_error("not an imufs checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw std::runtime_error("unsupported checkpoint version " + j.at("version").dump());
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    s.chunks_seen = j.at("chunks_seen").get<std::size_t>();
    for (const auto& v : j.at("views")) {
      s.views.push_back({v.at("view_id").get<std::size_t>(), v.at("dim").get<std::size_t>(),
                         v.at("name").get<std::string>()});
    }
    s.alpha = j.at("alpha").get<std::vector<double>>();
    s.loss_acc = j.at("loss_acc").get<std::vector<double>>();
    s.data_energy = j.at("data_energy").get<std::vector<double>>();
    s.V = MatricesFromJson(j.at("V"));
    s.R = MatricesFromJson(j.at("R"));
    s.Q = MatricesFromJson(j.at("Q"));
    const auto& imp = j.at("impute");
    s.impute.running_sum = imp.at("running_sum").get<std::vector<std::vector<double>>>();
    s.impute.observed_count = imp.at("observed_count").get<std::vector<std::size_t>>();
    s.impute.total_seen = imp.at("total_seen").get<std::size_t>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
  const std::size_t nv = s.views.size();
  if (s.V.size() != nv || s.R.size() != nv || s.Q.size() != nv || s.alpha.size() != nv ||
      s.loss_acc.size() != nv || s.data_energy.size() != nv || s.impute.n_views() != nv ||
      s.impute.running_sum.size() != nv) {
    throw std::runtime_error("malformed checkpoint: per-view arrays disagree");
  }
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t k = s.V[v].cols();
    if (s.V[v].rows() != s.views[v].dim || s.Q[v].rows() != s.views[v].dim ||
        s.Q[v].cols() != k || s.R[v].rows() != k || s.R[v].cols() != k ||
        s.impute.running_sum[v].size() != s.views[v].dim) {
      throw std::runtime_error("malformed checkpoint: shape mismatch in view " +
                               std::to_string(v));
    }
  }
  return s;
}

void save_checkpoint(const SolverState& state, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out << serialize_state(state);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SolverState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_state(ss.str());
}

}  // namespace imufs
