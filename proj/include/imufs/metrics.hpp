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

// Clustering-quality indices comparing a predicted partition against a
// reference partition.

#include <cstddef>
#include <vector>

namespace imufs {

// Hard assignment of n items to cluster ids in [0, c).
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> assignments);

  std::size_t size() const { return assignments_.size(); }
  // c = 1 + largest id. Ids below c need not all be used.
  std::size_t n_clusters() const { return n_clusters_; }
  const std::vector<int>& assignments() const { return assignments_; }
  int operator[](std::size_t i) const { return assignments_[i]; }

 private:
  std::vector<int> assignments_;
  std::size_t n_clusters_ = 0;
};

// Normalized mutual information with the geometric-mean normalizer.
// Returns 0 when either partition has zero entropy (a single cluster).
double nmi(const Partition& c, const Partition& t);

// Adjusted Rand index. When the normalizer vanishes (both partitions all
// singletons, or both one cluster, or n = 1) the result is 1 if the two
// partitions agree up to relabeling and 0 otherwise.
double ari(const Partition& c, const Partition& t);

// Mean over the clusters of c of the F1 between the cluster and the
// reference class holding most of its items. Ties go to the smaller class,
// then the lower class id. Not symmetric in its arguments.
double f_measure(const Partition& c, const Partition& t);

// n_ij counts; rows are ids of c, columns ids of t.
std::vector<std::vector<std::size_t>> contingency(const Partition& c, const Partition& t);

}  // namespace imufs
