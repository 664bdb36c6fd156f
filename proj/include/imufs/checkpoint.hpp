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

// SolverState serialization. The blob is JSON with a versioned header,
// per-view shapes and row-major payloads. Doubles are written in shortest
// round-trip form, so a reloaded state continues a stream bit-for-bit.

#include <filesystem>
#include <string>

#include "imufs/solver.hpp"

namespace imufs {

inline constexpr int kCheckpointVersion = 1;

std::string serialize_state(const SolverState& state);
SolverState deserialize_state(const std::string& blob);  // throws std::runtime_error

void save_checkpoint(const SolverState& state, const std::filesystem::path& path);
SolverState load_checkpoint(const std::filesystem::path& path);

}  // namespace imufs
