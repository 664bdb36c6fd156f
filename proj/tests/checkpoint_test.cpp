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


#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "imufs/checkpoint.hpp"
#include "imufs/solver.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace imufs {
namespace {

using testing::ClusteredChunk;
using testing::Views;

SolverState Streamed(std::size_t chunks, std::uint64_t seed) {
  Hyperparams hp;
  SolverState s = init_solver(Views({6, 5}), hp, seed);
  for (std::size_t t = 1; t <= chunks; ++t)
    process_chunk(s, ClusteredChunk({6, 5}, 15, 3, 0.4, seed + t, t), hp);
  return s;
}

TEST(Checkpoint, SerializationRoundTripsExactly) {
  SolverState s = Streamed(2, 3);
  s.V[0](0, 0) = 0.1 + 0.2;
  s.V[1](1, 2) = 4.9406564584124654e-324;  // smallest subnormal
  EXPECT_EQ(deserialize_state(serialize_state(s)), s);
}

TEST(Checkpoint, FileRoundTripAndAtomicWrite) {
  const auto dir = testing::TempDir("ckpt");
  const SolverState s = Streamed(1, 4);
  save_checkpoint(s, dir / "state.json");
  EXPECT_FALSE(std::filesystem::exists(dir / "state.json.tmp"));
  EXPECT_EQ(load_checkpoint(dir / "state.json"), s);
}

TEST(Checkpoint, ResumeContinuesBitForBit) {
  Hyperparams hp;
  const auto views = Views({6, 5});
  std::vector<MultiViewChunk> chunks;
  for (std::size_t t = 1; t <= 5; ++t) chunks.push_back(ClusteredChunk({6, 5}, 15, 3, 0.4, 50 + t, t));

  SolverState straight = init_solver(views, hp, 8);
  std::vector<std::vector<double>> traces;
  for (const auto& c : chunks) traces.push_back(process_chunk(straight, c, hp).report.objective_trace);

  SolverState first = init_solver(views, hp, 8);
  for (std::size_t t = 0; t < 3; ++t) process_chunk(first, chunks[t], hp);
  const auto dir = testing::TempDir("resume");
  save_checkpoint(first, dir / "s.json");
  SolverState resumed = load_checkpoint(dir / "s.json");
  for (std::size_t t = 3; t < 5; ++t) {
    EXPECT_EQ(process_chunk(resumed, chunks[t], hp).report.objective_trace, traces[t]);
  }
  EXPECT_EQ(resumed, straight);
}

TEST(Checkpoint, RejectsCorruptBlobs) {
  EXPECT_THROW(deserialize_state("not json"), std::runtime_error);
  EXPECT_THROW(deserialize_state(R"({"format":"other","version":1})"), std::runtime_error);
  auto j = nlohmann::json::parse(serialize_state(Streamed(1, 5)));
  j["version"] = 99;
  EXPECT_THROW(deserialize_state(j.dump()), std::runtime_error);
  j = nlohmann::json::parse(serialize_state(Streamed(1, 5)));
  j["views"][0]["dim"] = 1000;
  EXPECT_THROW(deserialize_state(j.dump()), std::runtime_error);
  EXPECT_THROW(load_checkpoint("/nonexistent/imufs.json"), std::runtime_error);
}

}  // namespace
}  // namespace imufs
