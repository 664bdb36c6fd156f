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

// Incremental multi-view feature selection for incomplete streams.
//
// Each view v keeps a non-negative latent feature matrix V (d_v x K) shared
// across chunks. For every arriving chunk the solver imputes missing
// view-instances, builds per-view kNN graphs, and alternates
//
//   V      <- multiplicative step on  a_v * sum_t ||(X_t - V U_t^T) W_t||^2
//                                      + eta ||V||_{2,1}
//   U      <- multiplicative step on the chunk's reconstruction, consensus,
//             graph and soft-orthogonality terms
//   U*     <- closed-form weighted average of the views' U
//   alpha  <- closed-form simplex weights, alpha_v ~ L_v^(1 / (1 - lambda))
//
// where a_v = alpha_v^lambda. Past chunks enter only through the running
// sums R = sum U^T W~ U and Q = sum X W~ U, folded in once a chunk has
// converged; their raw data is never revisited.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "imufs/dataset.hpp"
#include "imufs/graph.hpp"
#include "imufs/impute.hpp"
#include "imufs/matrix.hpp"

namespace imufs {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant {
  kI2MUFS,
  // Reconstruction term uses the binary observed/missing diagonal instead of
  // the confidence weights and drops the alpha^lambda factor.
  kCI2MUFS,
};

const char* variant_name(Variant v);  // "I2MUFS" | "C_I2MUFS"

struct Hyperparams {
  std::size_t n_clusters = 3;  // K
  double lambda = 3.0;         // view-weight smoothness, > 1
  // Per-view trade-offs. A single entry applies to every view.
  std::vector<double> beta{1e-1};   // consensus
  std::vector<double> theta{1e-1};  // graph
  std::vector<double> eta{1e-1};    // l2,1 sparsity
  std::vector<double> xi{1e3};      // orthogonality penalty
  double eps = 1e-9;
  std::size_t max_iters = 200;
  double rel_tol = 1e-5;
  GraphOptions graph{};
  Variant variant = Variant::kI2MUFS;
  ColdStart cold_start = ColdStart::kEpsilonFloor;
  std::size_t init_restarts = 3;  // k-means restarts for the U warm start

  double beta_at(std::size_t v) const { return Pick(beta, v); }
  double theta_at(std::size_t v) const { return Pick(theta, v); }
  double eta_at(std::size_t v) const { return Pick(eta, v); }
  double xi_at(std::size_t v) const { return Pick(xi, v); }

  // Throws std::invalid_argument. Returns false (valid, but outside the
  // usual range) when 1 < lambda < 2.
  bool validate(std::size_t n_views) const;

 private:
  static double Pick(const std::vector<double>& p, std::size_t v) {
    return p.size() == 1 ? p.front() : p.at(v);
  }
};

struct SolverState {
  std::vector<ViewSpec> views;
  std::vector<Matrix> V;   // d_v x K
  std::vector<Matrix> R;   // K x K, sum over folded chunks of U^T W~ U
  std::vector<Matrix> Q;   // d_v x K, sum of X W~ U
  // Reconstruction loss of each folded chunk, measured with V as it was when
  // the chunk was folded.
  std::vector<double> loss_acc;
  // sum of tr(X W~ X^T); with R and Q this gives the exact reconstruction
  // loss of all folded chunks for any V.
  std::vector<double> data_energy;
  std::vector<double> alpha;
  ImputeState impute;
  std::size_t chunks_seen = 0;
  std::uint64_t seed = 0;

  std::size_t n_views() const { return views.size(); }

  friend bool operator==(const SolverState&, const SolverState&) = default;
};

struct ChunkWorkspace {
  std::vector<Matrix> X;  // imputed view data, d_v x N_t
  std::vector<Mask> mask;
  std::vector<WeightMatrix> weights;
  // Diagonal used by the reconstruction term: W~ = W^2, or the binary
  // observed indicator for the C variant.
  std::vector<std::vector<double>> recon_weight;
  std::vector<std::vector<double>> consensus_weight;  // W^2
  std::vector<SimilarityGraph> graphs;
  std::vector<Matrix> laplacian_pos;  // max(L, 0)
  std::vector<Matrix> laplacian_neg;  // max(-L, 0)
  std::vector<Matrix> U;              // N_t x K
  Matrix Ustar;                       // N_t x K
  std::vector<double> objective_trace;

  std::size_t n_views() const { return X.size(); }
  std::size_t n_instances() const { return X.empty() ? 0 : X.front().cols(); }
};

struct ChunkReport {
  std::size_t chunk_index = 0;
  std::vector<double> objective_trace;  // one entry per inner iteration
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> alpha;
};

struct ChunkResult {
  ChunkReport report;
  ChunkWorkspace workspace;  // converged chunk, before it is discarded
};

// Per-view objective pieces for the current chunk.
struct ObjectiveTerms {
  double reconstruction = 0.0;  // a_v ||(X - V U^T) W||^2
  double consensus = 0.0;       // beta ||W (U - U*)||^2
  double graph = 0.0;           // theta tr(U^T L U)
  double sparsity = 0.0;        // eta ||V||_{2,1}
  double orthogonality = 0.0;   // xi ||U^T U - I||^2
  double history = 0.0;         // a_v * loss of folded chunks under current V

  // Value of the model objective restricted to this chunk.
  double chunk_total() const { return reconstruction + consensus + graph + sparsity; }
  // What the alternating updates descend: the chunk objective plus the
  // orthogonality penalty and the folded chunks' reconstruction.
  double penalized_total() const { return chunk_total() + orthogonality + history; }
};

SolverState init_solver(const std::vector<ViewSpec>& views, const Hyperparams& hp,
                        std::uint64_t seed);

// Imputes the chunk (advancing state.impute), builds weights and graphs and
// warm-starts U with k-means. U* is the closed form for that U.
ChunkWorkspace prepare_chunk(SolverState& state, const MultiViewChunk& chunk,
                             const Hyperparams& hp);

// a_v: alpha_v^lambda, or 1 for the C variant.
double view_factor(const SolverState& state, std::size_t view, const Hyperparams& hp);

void update_V(SolverState& state, const ChunkWorkspace& ws, std::size_t view,
              const Hyperparams& hp);
void update_U(const SolverState& state, ChunkWorkspace& ws, std::size_t view,
              const Hyperparams& hp);
Matrix update_Ustar(const ChunkWorkspace& ws, const Hyperparams& hp);
// Closed-form simplex weights for fixed per-view losses (floored at eps).
std::vector<double> update_alpha(std::span<const double> losses, double lambda,
                                 double eps = 1e-9);

// ||(X - V U^T) W||^2 with the reconstruction diagonal of `ws`.
double chunk_reconstruction_loss(const SolverState& state, const ChunkWorkspace& ws,
                                 std::size_t view);
// Reconstruction loss of every folded chunk evaluated at the current V.
double folded_reconstruction_loss(const SolverState& state, std::size_t view);

ObjectiveTerms objective_terms(const SolverState& state, const ChunkWorkspace& ws,
                               std::size_t view, const Hyperparams& hp);
// Sum over views of ObjectiveTerms::chunk_total().
double objective(const SolverState& state, const ChunkWorkspace& ws, const Hyperparams& hp);
// Sum over views of ObjectiveTerms::penalized_total().
double penalized_objective(const SolverState& state, const ChunkWorkspace& ws,
                           const Hyperparams& hp);

// Adds the converged chunk to R, Q, loss_acc and data_energy.
void fold_chunk(SolverState& state, const ChunkWorkspace& ws);

ChunkResult process_chunk(SolverState& state, const MultiViewChunk& chunk,
                          const Hyperparams& hp);
ChunkResult process_chunk_variant_c(SolverState& state, const MultiViewChunk& chunk,
                                    Hyperparams hp);

struct FeatureScore {
  std::size_t index = 0;
  double score = 0.0;

  friend bool operator==(const FeatureScore&, const FeatureScore&) = default;
};

// Per view: features by descending row norm of V, ties by ascending index.
std::vector<std::vector<FeatureScore>> rank_features(const SolverState& state);
// Per view: the top ceil(ratio * d_v) feature indices, in rank order.
std::vector<std::vector<std::size_t>> select_features(
    const std::vector<std::vector<FeatureScore>>& ranking, double ratio);

}  // namespace imufs
