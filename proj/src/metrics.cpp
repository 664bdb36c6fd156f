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

#include "imufs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imufs {

Partition::Partition(std::vector<int> assignments) : assignments_(std::move(assignments)) {
  if (assignments_.empty()) throw std::invalid_argument("Partition: empty");
  int top = 0;
  for (int a : assignments_) {
    if (a < 0) throw std::invalid_argument("Partition: negative cluster id");
    top = std::max(top, a);
  }
  n_clusters_ = static_cast<std::size_t>(top) + 1;
}

namespace {

void CheckSizes(const Partition& c, const Partition& t) {
  if (c.size() != t.size()) throw std::invalid_argument("partitions differ in length");
}

std::vector<double> RowSums(const std::vector<std::vector<std::size_t>>& n) {
  std::vector<double> out(n.size(), 0.0);
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (auto x : n[i]) out[i] += static_cast<double>(x);
  }
  return out;
}

std::vector<double> ColSums(const std::vector<std::vector<std::size_t>>& n, std::size_t k) {
  std::vector<double> out(k, 0.0);
  for (const auto& row : n) {
    for (std::size_t j = 0; j < k; ++j) out[j] += static_cast<double>(row[j]);
  }
  return out;
}

double Choose2(double x) { return 0.5 * x * (x - 1.0); }

// Same partition up to a bijective relabeling.
bool Equivalent(const std::vector<std::vector<std::size_t>>& n) {
  const std::size_t k = n.empty() ? 0 : n.front().size();
  std::vector<int> col_hits(k, 0);
  for (const auto& row : n) {
    int hits = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (row[j]) {
        ++hits;
        ++col_hits[j];
      }
    }
    if (hits > 1) return false;
  }
  return std::all_of(col_hits.begin(), col_hits.end(), [](int h) { return h <= 1; });
}

}  // namespace

std::vector<std::vector<std::size_t>> contingency(const Partition& c, const Partition& t) {
  CheckSizes(c, t);
  std::vector<std::vector<std::size_t>> n(c.n_clusters(),
                                          std::vector<std::size_t>(t.n_clusters(), 0));
  for (std::size_t s = 0; s < c.size(); ++s) ++n[c[s]][t[s]];
  return n;
}

double nmi(const Partition& c, const Partition& t) {
  const auto n = contingency(c, t);
  const double total = static_cast<double>(c.size());
  const auto ni = RowSums(n);
  const auto mj = ColSums(n, t.n_clusters());
  double hc = 0.0, ht = 0.0, mi = 0.0;
  for (double x : ni) {
    if (x > 0) hc += x * std::log(x / total);
  }
  for (double x : mj) {
    if (x > 0) ht += x * std::log(x / total);
  }
  const double denom = std::sqrt(hc * ht);
  if (!(denom > 0.0)) return 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t j = 0; j < mj.size(); ++j) {
      const auto nij = static_cast<double>(n[i][j]);
      if (nij > 0) mi += nij * std::log(total * nij / (ni[i] * mj[j]));
    }
  }
  return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(const Partition& c, const Partition& t) {
  const auto n = contingency(c, t);
  const auto ni = RowSums(n);
  const auto mj = ColSums(n, t.n_clusters());
  double index = 0.0, a = 0.0, b = 0.0;
  for (const auto& row : n) {
    for (auto x : row) index += Choose2(static_cast<double>(x));
  }
  for (double x : ni) a += Choose2(x);
  for (double x : mj) b += Choose2(x);
  const double pairs = Choose2(static_cast<double>(c.size()));
  if (pairs == 0.0) return Equivalent(n) ? 1.0 : 0.0;
  const double expected = a * b / pairs;
  const double denom = 0.5 * (a + b) - expected;
  if (denom == 0.0) return Equivalent(n) ? 1.0 : 0.0;
  return (index - expected) / denom;
}

double f_measure(const Partition& c, const Partition& t) {
  const auto n = contingency(c, t);
  const auto ni = RowSums(n);
  const auto mj = ColSums(n, t.n_clusters());
  double sum = 0.0;
  std::size_t clusters = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (ni[i] == 0) continue;
    std::size_t best = 0;
    for (std::size_t j = 1; j < mj.size(); ++j) {
      if (n[i][j] > n[i][best] || (n[i][j] == n[i][best] && mj[j] < mj[best])) best = j;
    }
    const auto hit = static_cast<double>(n[i][best]);
    const double p = hit / ni[i];
    const double r = hit / mj[best];
    sum += 2.0 * p * r / (p + r);
    ++clusters;
  }
  return sum / static_cast<double>(clusters);
}

}  // namespace imufs
