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


#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "imufs/solver.hpp"
#include "reference.hpp"
#include "solver_oracles.hpp"
#include "test_util.hpp"

namespace imufs {
namespace {

using testing::ClusteredChunk;
using testing::MaxRelDiff;
using testing::RandomMatrix;
using testing::Views;

// Workspace built by hand: no graph, unit weights unless given.
ChunkWorkspace HandWorkspace(std::vector<Matrix> x, std::vector<Matrix> u,
                             std::vector<std::vector<double>> w = {}) {
  ChunkWorkspace ws;
  const std::size_t n = u.front().rows();
  ws.X = std::move(x);
  ws.U = std::move(u);
  for (std::size_t v = 0; v < ws.U.size(); ++v) {
    const auto wv = w.empty() ? std::vector<double>(n, 1.0) : w[v];
    ws.mask.emplace_back(n, 1);
    ws.weights.push_back({wv});
    ws.recon_weight.push_back(ws.weights.back().squared());
    ws.consensus_weight.push_back(ws.weights.back().squared());
    ws.graphs.push_back(SimilarityGraph::empty(n));
    ws.laplacian_pos.emplace_back(n, n);
    ws.laplacian_neg.emplace_back(n, n);
  }
  ws.Ustar = ws.U.front();
  return ws;
}

Hyperparams Small() {
  Hyperparams hp;
  hp.n_clusters = 3;
  return hp;
}

void ExpectNonNegative(const Matrix& m) {
  for (double x : m.values()) {
    ASSERT_TRUE(std::isfinite(x));
    ASSERT_GE(x, 0.0);
  }
}

TEST(Init, UniformAlphaPositiveVDeterministic) {
  const auto views = Views({4, 5, 6});
  const auto s = init_solver(views, Small(), 17);
  for (double a : s.alpha) EXPECT_DOUBLE_EQ(a, 1.0 / 3.0);
  for (const auto& v : s.V) {
    EXPECT_EQ(v.cols(), 3u);
    for (double x : v.values()) {
      EXPECT_GT(x, 0.0);
      EXPECT_LE(x, 1e-2);
    }
  }
  for (std::size_t v = 0; v < 3; ++v) {
    EXPECT_EQ(s.R[v], Matrix(3, 3));
    EXPECT_EQ(s.Q[v], Matrix(views[v].dim, 3));
    EXPECT_EQ(s.loss_acc[v], 0.0);
  }
  EXPECT_EQ(s, init_solver(views, Small(), 17));
  EXPECT_NE(s.V[0], init_solver(views, Small(), 18).V[0]);
}

TEST(Init, RejectsBadHyperparams) {
  auto hp = Small();
  hp.n_clusters = 1;
  EXPECT_THROW(init_solver(Views({3}), hp, 1), std::invalid_argument);
  hp = Small();
  hp.lambda = 1.0;
  EXPECT_THROW(init_solver(Views({3}), hp, 1), std::invalid_argument);
  hp = Small();
  hp.xi = {0.0};
  EXPECT_THROW(init_solver(Views({3}), hp, 1), std::invalid_argument);
  hp = Small();
  hp.beta = {-1.0};
  EXPECT_THROW(init_solver(Views({3}), hp, 1), std::invalid_argument);
  hp = Small();
  hp.lambda = 1.5;
  EXPECT_FALSE(hp.validate(1));
  hp.lambda = 2.0;
  EXPECT_TRUE(hp.validate(1));
}

TEST(UpdateV, MatchesEntrywiseOracle) {
  auto hp = Small();
  hp.eta = {0.3};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SolverState s = init_solver(Views({6, 4}), hp, seed);
    auto ws = prepare_chunk(s, ClusteredChunk({6, 4}, 12, 3, 0.3, seed), hp);
    // Non-trivial history and weights.
    Rng rng(seed);
    s.R[0] = RandomMatrix(3, 3, rng);
    s.Q[0] = RandomMatrix(6, 3, rng);
    s.alpha = {0.7, 0.3};
    const Matrix expect = testing::OracleUpdateV(s, ws, 0, hp);
    update_V(s, ws, 0, hp);
    EXPECT_LE(MaxRelDiff(s.V[0], expect), 1e-12);
  }
}

TEST(UpdateV, FixedPointIsKept) {
  // X = V U^T with W = I, no history and eta = 0: 2aQ = 2aVR exactly.
  auto hp = Small();
  hp.eta = {0.0};
  Rng rng(3);
  SolverState s = init_solver(Views({5}), hp, 1);
  s.V[0] = RandomMatrix(5, 3, rng, 0.5, 1.5);
  const Matrix u = RandomMatrix(8, 3, rng, 0.1, 1.0);
  const auto ws = HandWorkspace({multiply_nt(s.V[0], u)}, {u});
  const Matrix before = s.V[0];
  update_V(s, ws, 0, hp);
  EXPECT_LE(MaxRelDiff(s.V[0], before), 1e-13);
}

TEST(UpdateV, ZeroIsAbsorbing) {
  auto hp = Small();
  Rng rng(4);
  SolverState s = init_solver(Views({4}), hp, 2);
  Matrix x = RandomMatrix(4, 10, rng);
  for (std::size_t j = 0; j < 10; ++j) x(2, j) = 0.0;  // Q row 2 is zero
  const auto ws = HandWorkspace({x}, {RandomMatrix(10, 3, rng)});
  update_V(s, ws, 0, hp);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(s.V[0](2, c), 0.0);
  for (int it = 0; it < 5; ++it) update_V(s, ws, 0, hp);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(s.V[0](2, c), 0.0);
}

// For fixed U and alpha the V subproblem never goes up, history included.
TEST(UpdateV, SubproblemDescends) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    auto hp = Small();
    hp.eta = {seed % 2 ? 0.0 : 0.5};
    SolverState s = init_solver(Views({7}), hp, seed);
    const Matrix vstar = RandomMatrix(7, 3, rng);
    const Matrix u = RandomMatrix(15, 3, rng);
    const auto ws = HandWorkspace({multiply_nt(vstar, u)}, {u});
    if (seed % 3 == 0) {
      // A folded chunk in the history.
      const auto past = HandWorkspace({RandomMatrix(7, 9, rng)}, {RandomMatrix(9, 3, rng)});
      fold_chunk(s, past);
    }
    const double a = std::pow(s.alpha[0], hp.lambda);
    auto f = [&] {
      return a * (chunk_reconstruction_loss(s, ws, 0) + folded_reconstruction_loss(s, 0)) +
             hp.eta_at(0) * testing::OracleL21(s.V[0]);
    };
    double prev = f();
    for (int it = 0; it < 200; ++it) {
      update_V(s, ws, 0, hp);
      ExpectNonNegative(s.V[0]);
      const double cur = f();
      ASSERT_LE(cur, prev + 1e-9 * std::abs(prev)) << "seed " << seed << " it " << it;
      prev = cur;
    }
  }
}

TEST(UpdateU, MatchesEntrywiseOracle) {
  auto hp = Small();
  hp.theta = {0.7};
  hp.beta = {0.4};
  hp.xi = {5.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SolverState s = init_solver(Views({6, 4}), hp, seed);
    auto ws = prepare_chunk(s, ClusteredChunk({6, 4}, 12, 3, 0.3, seed), hp);
    Rng rng(seed + 100);
    s.V[1] = RandomMatrix(4, 3, rng);
    s.alpha = {0.6, 0.4};
    ws.Ustar = RandomMatrix(12, 3, rng);
    const Matrix expect = testing::OracleUpdateU(s, ws, 1, hp);
    update_U(s, ws, 1, hp);
    EXPECT_LE(MaxRelDiff(ws.U[1], expect), 1e-12);
  }
}

TEST(UpdateU, ZeroThetaDropsTheGraph) {
  auto hp = Small();
  hp.theta = {0.0};
  SolverState s = init_solver(Views({5}), hp, 3);
  auto ws = prepare_chunk(s, ClusteredChunk({5}, 10, 3, 0.0, 3), hp);
  auto blank = ws;
  blank.laplacian_pos[0].fill(0.0);
  blank.laplacian_neg[0].fill(0.0);
  blank.graphs[0] = SimilarityGraph::empty(10);
  update_U(s, ws, 0, hp);
  update_U(s, blank, 0, hp);
  EXPECT_EQ(ws.U[0], blank.U[0]);
}

TEST(UpdateU, FixedPointIsKept) {
  // Orthonormal one-hot U, X = V U^T, U* = U: G = P entrywise.
  auto hp = Small();
  hp.theta = {0.0};
  hp.xi = {10.0};
  Rng rng(5);
  SolverState s = init_solver(Views({4}), hp, 5);
  s.V[0] = RandomMatrix(4, 3, rng, 0.5, 1.0);
  Matrix u(6, 3);
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < 6; ++j) u(j, j % 3) = h;
  auto ws = HandWorkspace({multiply_nt(s.V[0], u)}, {u});
  update_U(s, ws, 0, hp);
  EXPECT_LE(MaxRelDiff(ws.U[0], u), 1e-13);
}

// One U step on random 6x3 instances does not raise the U subproblem.
TEST(UpdateU, StepDoesNotIncreaseSubproblem) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto hp = Small();
    hp.theta = {rng.uniform()};
    hp.beta = {rng.uniform()};
    hp.xi = {std::pow(10.0, rng.uniform() * 3)};
    SolverState s = init_solver(Views({5}), hp, seed);
    s.V[0] = RandomMatrix(5, 3, rng);
    auto ws = prepare_chunk(s, ClusteredChunk({5}, 6, 3, 0.0, seed), hp);
    ws.Ustar = RandomMatrix(6, 3, rng);
    auto f = [&] {
      return testing::OracleObjective(s, ws, hp) - hp.eta_at(0) * testing::OracleL21(s.V[0]) +
             testing::OracleOrth(ws.U[0], hp.xi_at(0));
    };
    const double before = f();
    update_U(s, ws, 0, hp);
    ExpectNonNegative(ws.U[0]);
    EXPECT_LE(f(), before * (1 + 1e-9)) << "seed " << seed;
  }
}

TEST(Ustar, SingleViewIsIdentity) {
  Rng rng(6);
  auto ws = HandWorkspace({Matrix(2, 5)}, {RandomMatrix(5, 3, rng)}, {{1, 0.5, 0.2, 1, 0.9}});
  EXPECT_LE(max_abs_diff(update_Ustar(ws, Small()), ws.U[0]), 1e-15);
}

TEST(Ustar, EqualWeightsAverage) {
  Rng rng(7);
  const Matrix u1 = RandomMatrix(5, 3, rng), u2 = RandomMatrix(5, 3, rng);
  auto ws = HandWorkspace({Matrix(2, 5), Matrix(2, 5)}, {u1, u2});
  const Matrix us = update_Ustar(ws, Small());
  for (std::size_t i = 0; i < us.size(); ++i)
    EXPECT_NEAR(us.values()[i], 0.5 * (u1.values()[i] + u2.values()[i]), 1e-15);
}

TEST(Ustar, WeightedRow) {
  Rng rng(8);
  const Matrix u1 = RandomMatrix(1, 3, rng), u2 = RandomMatrix(1, 3, rng);
  auto ws = HandWorkspace({Matrix(2, 1), Matrix(2, 1)}, {u1, u2}, {{1.0}, {0.5}});
  const Matrix us = update_Ustar(ws, Small());
  for (std::size_t c = 0; c < 3; ++c)
    EXPECT_NEAR(us(0, c), (1.0 * u1(0, c) + 0.25 * u2(0, c)) / 1.25, 1e-15);
}

TEST(Ustar, DegenerateConsensusThrows) {
  Rng rng(9);
  auto hp = Small();
  hp.beta = {0.0};
  auto ws = HandWorkspace({Matrix(2, 3)}, {RandomMatrix(3, 3, rng)});
  EXPECT_THROW(update_Ustar(ws, hp), std::domain_error);
}

// Moving any entry of U* by 1e-4 never lowers the consensus term.
TEST(Ustar, PerturbationNeverHelps) {
  Rng rng(10);
  auto hp = Small();
  hp.beta = {0.3, 1.7, 0.9};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Matrix> us;
    std::vector<std::vector<double>> w;
    for (int v = 0; v < 3; ++v) {
      us.push_back(RandomMatrix(7, 3, rng));
      std::vector<double> wv(7);
      for (double& x : wv) x = 0.05 + 0.95 * rng.uniform();
      w.push_back(wv);
    }
    auto ws = HandWorkspace({Matrix(1, 7), Matrix(1, 7), Matrix(1, 7)}, us, w);
    ws.Ustar = update_Ustar(ws, hp);
    auto cons = [&](const Matrix& star) {
      double s = 0;
      for (std::size_t v = 0; v < 3; ++v)
        for (std::size_t j = 0; j < 7; ++j)
          for (std::size_t c = 0; c < 3; ++c)
            s += hp.beta_at(v) * ws.consensus_weight[v][j] * std::pow(ws.U[v](j, c) - star(j, c), 2);
      return s;
    };
    const double best = cons(ws.Ustar);
    for (std::size_t i = 0; i < ws.Ustar.size(); ++i) {
      for (double delta : {1e-4, -1e-4}) {
        Matrix p = ws.Ustar;
        p.values()[i] += delta;
        EXPECT_GE(cons(p), best);
      }
    }
  }
}

TEST(Alpha, ClosedFormExamples) {
  const auto eq = update_alpha(std::vector<double>{2.5, 2.5, 2.5}, 3.0);
  for (double a : eq) EXPECT_NEAR(a, 1.0 / 3.0, 1e-15);
  const auto two = update_alpha(std::vector<double>{1.0, 4.0}, 2.0);
  EXPECT_NEAR(two[0], 0.8, 1e-15);
  EXPECT_NEAR(two[1], 0.2, 1e-15);
  const auto flat = update_alpha(std::vector<double>{1.0, 4.0}, 11.0);
  EXPECT_LT(std::abs(flat[0] - 0.5), 0.04);
  EXPECT_LT(std::abs(flat[1] - 0.5), 0.04);
  EXPECT_THROW(update_alpha(std::vector<double>{1.0}, 1.0), std::invalid_argument);
  // Zero losses are floored instead of dividing by zero.
  const auto z = update_alpha(std::vector<double>{0.0, 1.0}, 2.0);
  EXPECT_GT(z[0], 0.99);
}

TEST(Alpha, SimplexAndGridOptimality) {
  Rng rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t nv = 1 + rng.below(6);
    std::vector<double> losses(nv);
    for (double& l : losses) l = std::pow(10.0, 6 * rng.uniform() - 3);
    const double lambda = 1.01 + 15 * rng.uniform();
    const auto a = update_alpha(losses, lambda);
    EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 1.0, 1e-12);
    for (double x : a) EXPECT_GE(x, 0.0);
  }
  for (double lambda : {2.0, 3.0, 11.0}) {
    for (auto losses : {std::vector<double>{1, 1}, {1, 4}, {1, 100}, {0.3, 7}}) {
      EXPECT_LE(reference::grid_check_alpha(losses, lambda), 1e-3);
    }
  }
  EXPECT_EQ(reference::grid_check_alpha({1, 1}, 2.0), 0.0);
}

TEST(Objective, ExactFactorizationIsZero) {
  auto hp = Small();
  hp.theta = {0.0};
  hp.eta = {0.0};
  Rng rng(12);
  SolverState s = init_solver(Views({4}), hp, 1);
  s.V[0] = RandomMatrix(4, 3, rng);
  const Matrix u = RandomMatrix(6, 3, rng);
  const auto ws = HandWorkspace({multiply_nt(s.V[0], u)}, {u});
  EXPECT_NEAR(objective(s, ws, hp), 0.0, 1e-24);
}

TEST(Objective, ZeroFactorsLeaveTheDataTerm) {
  auto hp = Small();
  hp.eta = {0.5};
  Rng rng(13);
  SolverState s = init_solver(Views({4}), hp, 1);
  s.V[0].fill(0.0);
  const Matrix x = RandomMatrix(4, 6, rng);
  std::vector<double> w{1, 0.5, 1, 0.25, 1, 1};
  auto ws = HandWorkspace({x}, {Matrix(6, 3)}, {w});
  ws.Ustar = Matrix(6, 3);
  double data = 0;
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 4; ++i) data += w[j] * w[j] * x(i, j) * x(i, j);
  EXPECT_NEAR(objective(s, ws, hp), std::pow(s.alpha[0], hp.lambda) * data, 1e-12);
}

TEST(Objective, MatchesTermByTermOracle) {
  auto hp = Small();
  hp.beta = {0.2, 0.5};
  hp.theta = {0.3, 0.1};
  hp.eta = {0.4, 0.05};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SolverState s = init_solver(Views({5, 3}), hp, seed);
    auto ws = prepare_chunk(s, ClusteredChunk({5, 3}, 9, 3, 0.4, seed), hp);
    Rng rng(seed);
    s.V[0] = RandomMatrix(5, 3, rng);
    s.V[1] = RandomMatrix(3, 3, rng);
    s.alpha = {0.35, 0.65};
    const double want = testing::OracleObjective(s, ws, hp);
    EXPECT_NEAR(objective(s, ws, hp), want, 1e-12 * std::max(1.0, want));
    double orth = 0;
    for (std::size_t v = 0; v < 2; ++v) orth += testing::OracleOrth(ws.U[v], hp.xi_at(v));
    EXPECT_NEAR(penalized_objective(s, ws, hp), want + orth, 1e-11 * (want + orth));
  }
}

// Replays chunk by chunk and checks the accumulators against direct sums.
TEST(ProcessChunk, AccumulatorsMatchBatchOracle) {
  auto hp = Small();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SolverState s = init_solver(Views({8, 6}), hp, seed);
    reference::BatchTrace trace;
    for (std::size_t t = 1; t <= 5; ++t) {
      const auto res = process_chunk(s, ClusteredChunk({8, 6}, 20, 3, 0.4, seed * 10 + t, t), hp);
      trace.record(res.workspace, s);
      const auto acc = reference::batch_accumulators(trace);
      for (std::size_t v = 0; v < 2; ++v) {
        EXPECT_LE(max_abs_diff(acc[v].R, s.R[v]), 1e-10);
        EXPECT_LE(max_abs_diff(acc[v].Q, s.Q[v]), 1e-10);
        EXPECT_NEAR(acc[v].loss, s.loss_acc[v], 1e-10);
        // R stays symmetric and everything stays non-negative.
        EXPECT_LE(max_abs_diff(s.R[v], transpose(s.R[v])), 1e-10);
        ExpectNonNegative(s.R[v]);
        ExpectNonNegative(s.Q[v]);
      }
    }
    EXPECT_EQ(s.chunks_seen, 5u);
    EXPECT_EQ(trace.chunks.size(), s.chunks_seen);
  }
}

TEST(BatchOracle, BaseCases) {
  auto hp = Small();
  SolverState s = init_solver(Views({4}), hp, 1);
  const auto res = process_chunk(s, ClusteredChunk({4}, 10, 3, 0.0, 1), hp);
  reference::BatchTrace one;
  one.record(res.workspace, s);
  const auto acc = reference::batch_accumulators(one);
  EXPECT_LE(max_abs_diff(acc[0].R, s.R[0]), 1e-12);
  EXPECT_LE(max_abs_diff(acc[0].Q, s.Q[0]), 1e-12);

  reference::BatchTrace zeros;
  for (int t = 0; t < 2; ++t)
    zeros.chunks.push_back({{Matrix(4, 5)}, {std::vector<double>(5, 1.0)}, {Matrix(5, 3)},
                            {Matrix(4, 3)}});
  const auto z = reference::batch_accumulators(zeros);
  EXPECT_EQ(z[0].R, Matrix(3, 3));
  EXPECT_EQ(z[0].Q, Matrix(4, 3));
  EXPECT_EQ(z[0].loss, 0.0);
}

TEST(ProcessChunk, SingleViewAlphaStaysOne) {
  auto hp = Small();
  SolverState s = init_solver(Views({6}), hp, 4);
  const auto res = process_chunk(s, ClusteredChunk({6}, 25, 3, 0.0, 4), hp);
  EXPECT_EQ(s.alpha, std::vector<double>{1.0});
  EXPECT_EQ(res.report.alpha, std::vector<double>{1.0});
}

TEST(ProcessChunk, TraceDescendsAndStaysFeasible) {
  auto hp = Small();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SolverState s = init_solver(Views({10, 12}), hp, seed);
    for (std::size_t t = 1; t <= 3; ++t) {
      const auto res = process_chunk(s, ClusteredChunk({10, 12}, 30, 3, 0.5, seed * 7 + t, t), hp);
      const auto& tr = res.report.objective_trace;
      ASSERT_EQ(tr.size(), res.report.iterations);
      for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        EXPECT_LE(tr[i + 1], tr[i] * (1 + 1e-7)) << "seed " << seed << " chunk " << t;
      }
      EXPECT_NEAR(std::accumulate(s.alpha.begin(), s.alpha.end(), 0.0), 1.0, 1e-12);
      for (const auto& v : s.V) ExpectNonNegative(v);
      for (const auto& u : res.workspace.U) ExpectNonNegative(u);
      ExpectNonNegative(res.workspace.Ustar);
    }
  }
}

TEST(ProcessChunk, OrthogonalityTightensWithXi) {
  std::vector<double> gaps;
  for (double xi : {1.0, 10.0, 100.0}) {
    auto hp = Small();
    hp.xi = {xi};
    SolverState s = init_solver(Views({10, 12}), hp, 3);
    const auto res = process_chunk(s, ClusteredChunk({10, 12}, 30, 3, 0.3, 3), hp);
    double g = 0;
    for (const auto& u : res.workspace.U) g += std::sqrt(testing::OracleOrth(u, 1.0));
    gaps.push_back(g);
  }
  EXPECT_GT(gaps[0], gaps[1]);
  EXPECT_GT(gaps[1], gaps[2]);
}

TEST(ProcessChunk, RejectsMismatchedChunks) {
  auto hp = Small();
  SolverState s = init_solver(Views({4, 4}), hp, 1);
  EXPECT_THROW(process_chunk(s, ClusteredChunk({4}, 10, 3, 0.0, 1), hp), std::invalid_argument);
  EXPECT_THROW(process_chunk(s, ClusteredChunk({4, 5}, 10, 3, 0.0, 1), hp), std::invalid_argument);
  auto other = hp;
  other.n_clusters = 4;
  EXPECT_THROW(process_chunk(s, ClusteredChunk({4, 4}, 10, 3, 0.0, 1), other),
               std::invalid_argument);
}

TEST(ProcessChunk, TinyChunksAreHandled) {
  auto hp = Small();
  SolverState s = init_solver(Views({3, 3}), hp, 1);
  EXPECT_NO_THROW(process_chunk(s, ClusteredChunk({3, 3}, 1, 3, 0.0, 1, 1), hp));
  EXPECT_NO_THROW(process_chunk(s, ClusteredChunk({3, 3}, 2, 3, 0.0, 2, 2), hp));
  EXPECT_EQ(s.chunks_seen, 2u);
}

TEST(ProcessChunk, ColdStartFallsBackToEpsilon) {
  auto hp = Small();
  SolverState s = init_solver(Views({3, 3}), hp, 1);
  auto c = ClusteredChunk({3, 3}, 6, 3, 0.0, 1);
  c.mask[1][0] = 0;  // view 1 has seen nothing yet when instance 0 arrives
  const auto res = process_chunk(s, c, hp);
  EXPECT_EQ(res.workspace.weights[1].diag[0], hp.eps);
  hp.cold_start = ColdStart::kError;
  SolverState strict = init_solver(Views({3, 3}), hp, 1);
  EXPECT_THROW(process_chunk(strict, c, hp), ColdStartError);
}

TEST(VariantC, FullyObservedTermsCoincide) {
  auto hp = Small();
  auto hpc = hp;
  hpc.variant = Variant::kCI2MUFS;
  SolverState s = init_solver(Views({5, 4}), hp, 2);
  SolverState sc = s;
  const auto chunk = ClusteredChunk({5, 4}, 12, 3, 0.0, 2);
  const auto ws = prepare_chunk(s, chunk, hp);
  const auto wsc = prepare_chunk(sc, chunk, hpc);
  for (std::size_t v = 0; v < 2; ++v) {
    EXPECT_EQ(ws.recon_weight[v], wsc.recon_weight[v]);
    const double a = std::pow(s.alpha[v], hp.lambda);
    EXPECT_NEAR(objective_terms(s, ws, v, hp).reconstruction / a,
                objective_terms(sc, wsc, v, hpc).reconstruction, 1e-12);
  }
}

TEST(VariantC, MissingColumnContributesNothing) {
  auto hp = Small();
  hp.variant = Variant::kCI2MUFS;
  SolverState s = init_solver(Views({5, 4}), hp, 3);
  SolverState s2 = s;
  auto chunk = ClusteredChunk({5, 4}, 12, 3, 0.0, 3);
  chunk.mask[0][7] = 0;
  auto ws = prepare_chunk(s, chunk, hp);
  auto ws2 = prepare_chunk(s2, chunk, hp);
  EXPECT_EQ(ws.recon_weight[0][7], 0.0);
  for (std::size_t i = 0; i < 5; ++i) ws2.X[0](i, 7) += 1e3;
  EXPECT_NEAR(chunk_reconstruction_loss(s, ws, 0), chunk_reconstruction_loss(s2, ws2, 0), 1e-9);
}

TEST(VariantC, AlphaStaysUniform) {
  auto hp = Small();
  SolverState s = init_solver(Views({6, 6}), hp, 5);
  for (std::size_t t = 1; t <= 2; ++t) {
    const auto res = process_chunk_variant_c(s, ClusteredChunk({6, 6}, 20, 3, 0.5, t, t), hp);
    EXPECT_EQ(res.report.alpha, (std::vector<double>{0.5, 0.5}));
  }
}

TEST(Ranking, HandNorms) {
  SolverState s;
  s.V = {Matrix(3, 2, {3, 4, 0, 0, 1, 0})};
  const auto r = rank_features(s);
  ASSERT_EQ(r[0].size(), 3u);
  EXPECT_EQ(r[0][0], (FeatureScore{0, 5.0}));
  EXPECT_EQ(r[0][1], (FeatureScore{2, 1.0}));
  EXPECT_EQ(r[0][2], (FeatureScore{1, 0.0}));
}

TEST(Ranking, ScaleInvariantAndMatchesOracleSort) {
  Rng rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    SolverState s;
    s.V = {RandomMatrix(1 + rng.below(30), 3, rng)};
    // A few exact ties.
    if (s.V[0].rows() > 3) {
      for (std::size_t c = 0; c < 3; ++c) s.V[0](3, c) = s.V[0](1, c);
    }
    const auto r = rank_features(s);
    std::vector<std::pair<double, std::size_t>> oracle;
    for (std::size_t i = 0; i < s.V[0].rows(); ++i) {
      double n = 0;
      for (std::size_t c = 0; c < 3; ++c) n += s.V[0](i, c) * s.V[0](i, c);
      oracle.push_back({-std::sqrt(n), i});
    }
    std::sort(oracle.begin(), oracle.end());
    for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_EQ(r[0][i].index, oracle[i].second);
    SolverState scaled = s;
    for (double& x : scaled.V[0].values()) x *= 3.5;
    const auto r2 = rank_features(scaled);
    for (std::size_t i = 0; i < r[0].size(); ++i) EXPECT_EQ(r[0][i].index, r2[0][i].index);
  }
}

TEST(Selection, CeilingArithmetic) {
  auto ranking = [](std::size_t d) {
    std::vector<FeatureScore> r;
    for (std::size_t i = 0; i < d; ++i) r.push_back({d - 1 - i, static_cast<double>(i)});
    return std::vector<std::vector<FeatureScore>>{r};
  };
  auto all = select_features(ranking(6), 1.0)[0];
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(select_features(ranking(10), 0.3)[0].size(), 3u);
  EXPECT_EQ(select_features(ranking(7), 0.5)[0].size(), 4u);
  EXPECT_EQ(select_features(ranking(7), 0.5)[0], (std::vector<std::size_t>{6, 5, 4, 3}));
  EXPECT_THROW(select_features(ranking(4), 0.0), std::invalid_argument);
  EXPECT_THROW(select_features(ranking(4), 1.5), std::invalid_argument);
}

TEST(Recompute, OneChunkEqualsSingleCall) {
  auto hp = Small();
  const auto views = Views({5, 5});
  const auto chunk = ClusteredChunk({5, 5}, 20, 3, 0.3, 9);
  SolverState s = init_solver(views, hp, 9);
  process_chunk(s, chunk, hp);
  const auto naive = reference::recompute_from_scratch({chunk}, views, hp, 9);
  EXPECT_EQ(naive.state, s);
}

}  // namespace
}  // namespace imufs
