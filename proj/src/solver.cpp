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

#include "imufs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imufs/kernels.hpp"
#include "imufs/kmeans.hpp"
#include "imufs/rng.hpp"

namespace imufs {

const char* variant_name(Variant v) {
  return v == Variant::kI2MUFS ? "I2MUFS" : "C_I2MUFS";
}

bool Hyperparams::validate(std::size_t n_views) const {
  if (n_clusters < 2) throw std::invalid_argument("K must be at least 2");
  if (!(lambda > 1.0)) throw std::invalid_argument("lambda must exceed 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (graph.k < 1) throw std::invalid_argument("graph k must be positive");
  auto check = [n_views](const std::vector<double>& p, const char* name, bool strict) {
    if (p.size() != 1 && p.size() != n_views) {
      throw std::invalid_argument(std::string(name) + ": need 1 or n_views values");
    }
    for (double x : p) {
      if (!std::isfinite(x) || x < 0.0 || (strict && x == 0.0)) {
        throw std::invalid_argument(std::string(name) + (strict ? " must be > 0" : " must be >= 0"));
      }
    }
  };
  check(beta, "beta", false);
  check(theta, "theta", false);
  check(eta, "eta", false);
  check(xi, "xi", true);
  return lambda >= 2.0;
}

SolverState init_solver(const std::vector<ViewSpec>& views, const Hyperparams& hp,
                        std::uint64_t seed) {
  if (views.empty()) throw std::invalid_argument("init_solver: no views");
  hp.validate(views.size());
  const std::size_t k = hp.n_clusters;
  SolverState s;
  s.views = views;
  s.seed = seed;
  Rng rng(derive_seed(seed, 0x56696e6974ULL));
  for (const auto& view : views) {
    if (view.dim == 0) throw std::invalid_argument("init_solver: view of dimension 0");
    Matrix v(view.dim, k);
    for (double& x : v.values()) x = 1e-2 * rng.uniform_open_closed();
    s.V.push_back(std::move(v));
    s.R.emplace_back(k, k);
    s.Q.emplace_back(view.dim, k);
  }
  s.loss_acc.assign(views.size(), 0.0);
  s.data_energy.assign(views.size(), 0.0);
  s.alpha.assign(views.size(), 1.0 / static_cast<double>(views.size()));
  s.impute = ImputeState::for_views(views);
  return s;
}

namespace {

void CheckFinite(const Matrix& m, const char* what) {
  for (double x : m.values()) {
    if (!std::isfinite(x)) throw NumericalError(std::string(what) + " diverged");
  }
}

// diag(w) * m
Matrix ScaleRows(const Matrix& m, const std::vector<double>& w) {
  Matrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) kernels::scale(w[r], out.row(r));
  return out;
}

// One-hot k-means assignment plus additive smoothing, unit-norm columns.
Matrix WarmStartU(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t restarts) {
  const std::size_t n = x.cols();
  Matrix u(n, k, 0.2);
  if (n >= k) {
    const auto km = kmeans(x, k, seed, restarts);
    for (std::size_t j = 0; j < n; ++j) u(j, km.partition[j]) += 1.0;
  } else {
    Rng rng(seed);
    for (double& e : u.values()) e += rng.uniform();
  }
  for (std::size_t c = 0; c < k; ++c) {
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) norm += u(j, c) * u(j, c);
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < n; ++j) u(j, c) /= norm;
  }
  return u;
}

}  // namespace

ChunkWorkspace prepare_chunk(SolverState& state, const MultiViewChunk& chunk,
                             const Hyperparams& hp) {
  const std::size_t nv = state.n_views();
  if (chunk.n_views() != nv) throw std::invalid_argument("chunk view count mismatch");
  if (chunk.n_instances() == 0) throw std::invalid_argument("empty chunk");
  for (std::size_t v = 0; v < nv; ++v) {
    if (chunk.data[v].rows() != state.views[v].dim) {
      throw std::invalid_argument("chunk view dimension mismatch");
    }
  }
  ImputeResult imp = impute_chunk(state.impute, chunk, hp.cold_start, hp.eps);
  state.impute = std::move(imp.state);

  ChunkWorkspace ws;
  ws.X = std::move(imp.filled.data);
  ws.mask = chunk.mask;
  ws.weights = std::move(imp.weights);
  const std::size_t n = chunk.n_instances();
  const std::size_t t = state.chunks_seen + 1;
  for (std::size_t v = 0; v < nv; ++v) {
    ws.consensus_weight.push_back(ws.weights[v].squared());
    if (hp.variant == Variant::kCI2MUFS) {
      std::vector<double> a(n);
      for (std::size_t j = 0; j < n; ++j) a[j] = ws.mask[v][j] ? 1.0 : 0.0;
      ws.recon_weight.push_back(std::move(a));
    } else {
      ws.recon_weight.push_back(ws.consensus_weight.back());
    }

    if (n >= 2) {
      GraphOptions g = hp.graph;
      g.k = std::min(g.k, n - 1);
      ws.graphs.push_back(build_graph(ws.X[v], g));
    } else {
      ws.graphs.push_back(SimilarityGraph::empty(n));
    }
    const Matrix& lap = ws.graphs.back().laplacian;
    Matrix pos(n, n), neg(n, n);
    for (std::size_t i = 0; i < lap.size(); ++i) {
      const double z = lap.values()[i];
      pos.values()[i] = 0.5 * (std::abs(z) + z);
      neg.values()[i] = 0.5 * (std::abs(z) - z);
    }
    ws.laplacian_pos.push_back(std::move(pos));
    ws.laplacian_neg.push_back(std::move(neg));

    ws.U.push_back(WarmStartU(ws.X[v], hp.n_clusters,
                              derive_seed(state.seed, (t << 16) + v), hp.init_restarts));
  }
  ws.Ustar = update_Ustar(ws, hp);
  return ws;
}

double view_factor(const SolverState& state, std::size_t view, const Hyperparams& hp) {
  if (hp.variant == Variant::kCI2MUFS) return 1.0;
  return std::pow(state.alpha[view], hp.lambda);
}

void update_V(SolverState& state, const ChunkWorkspace& ws, std::size_t view,
              const Hyperparams& hp) {
  Matrix& v = state.V[view];
  const Matrix& u = ws.U[view];
  const double a2 = 2.0 * view_factor(state, view, hp);
  const double eta = hp.eta_at(view);

  // Accumulators staged with the current chunk's iterate; the permanent
  // R and Q only change in fold_chunk.
  const Matrix wu = ScaleRows(u, ws.recon_weight[view]);
  Matrix r = multiply_tn(u, wu);
  Matrix q = multiply(ws.X[view], wu);
  kernels::axpy(1.0, state.R[view].values(), r.values());
  kernels::axpy(1.0, state.Q[view].values(), q.values());

  Matrix den = multiply(v, r);
  kernels::scale(a2, den.values());
  if (eta > 0.0) {
    const auto norms = row_norms(v);
    for (std::size_t i = 0; i < v.rows(); ++i) {
      kernels::axpy(eta / (norms[i] + hp.eps), v.row(i), den.row(i));
    }
  }
  kernels::scale(a2, q.values());
  kernels::sqrt_ratio_update(v.values(), q.values(), den.values(), hp.eps);
  CheckFinite(v, "V");
}

void update_U(const SolverState& state, ChunkWorkspace& ws, std::size_t view,
              const Hyperparams& hp) {
  Matrix& u = ws.U[view];
  const Matrix& v = state.V[view];
  const double a = view_factor(state, view, hp);
  const double beta = hp.beta_at(view);
  const double theta = hp.theta_at(view);
  const double xi2 = 2.0 * hp.xi_at(view);
  const auto& wr = ws.recon_weight[view];
  const auto& wc = ws.consensus_weight[view];
  const std::size_t n = u.rows();

  const Matrix xtv = multiply_tn(ws.X[view], v);
  const Matrix uvtv = multiply(u, multiply_tn(v, v));
  const Matrix uutu = multiply(u, multiply_tn(u, u));

  Matrix g(n, u.cols()), p(n, u.cols());
  for (std::size_t j = 0; j < n; ++j) {
    auto gj = g.row(j);
    auto pj = p.row(j);
    kernels::axpy(a * wr[j], xtv.row(j), gj);
    kernels::axpy(beta * wc[j], ws.Ustar.row(j), gj);
    kernels::axpy(xi2, u.row(j), gj);
    kernels::axpy(a * wr[j], uvtv.row(j), pj);
    kernels::axpy(beta * wc[j], u.row(j), pj);
    kernels::axpy(xi2, uutu.row(j), pj);
  }
  if (theta > 0.0 && n >= 2) {
    const Matrix neg_u = multiply(ws.laplacian_neg[view], u);
    const Matrix pos_u = multiply(ws.laplacian_pos[view], u);
    kernels::axpy(theta, neg_u.values(), g.values());
    kernels::axpy(theta, pos_u.values(), p.values());
  }
  kernels::sqrt_ratio_update(u.values(), g.values(), p.values(), hp.eps);
  CheckFinite(u, "U");
}

Matrix update_Ustar(const ChunkWorkspace& ws, const Hyperparams& hp) {
  const std::size_t n = ws.n_instances();
  const std::size_t k = ws.U.empty() ? 0 : ws.U.front().cols();
  Matrix out(n, k);
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (std::size_t v = 0; v < ws.n_views(); ++v) {
      const double c = hp.beta_at(v) * ws.consensus_weight[v][j];
      if (c == 0.0) continue;
      total += c;
      kernels::axpy(c, ws.U[v].row(j), out.row(j));
    }
    if (!(total > 0.0)) {
      throw std::domain_error("degenerate consensus: zero weight for instance " +
                              std::to_string(j));
    }
    kernels::scale(1.0 / total, out.row(j));
  }
  return out;
}

std::vector<double> update_alpha(std::span<const double> losses, double lambda, double eps) {
  if (!(lambda > 1.0)) throw std::invalid_argument("update_alpha: lambda must exceed 1");
  if (losses.empty()) throw std::invalid_argument("update_alpha: no views");
  // alpha_v ~ L_v^(1/(1-lambda)), normalised in log space.
  std::vector<double> e(losses.size());
  const double p = 1.0 / (1.0 - lambda);
  for (std::size_t v = 0; v < losses.size(); ++v) {
    e[v] = p * std::log(std::max(losses[v], eps));
  }
  const double top = *std::max_element(e.begin(), e.end());
  double sum = 0.0;
  for (double& x : e) {
    x = std::exp(x - top);
    sum += x;
  }
  for (double& x : e) x /= sum;
  return e;
}

double chunk_reconstruction_loss(const SolverState& state, const ChunkWorkspace& ws,
                                 std::size_t view) {
  const Matrix fit = multiply_nt(state.V[view], ws.U[view]);  // d x N
  const Matrix& x = ws.X[view];
  const auto& w = ws.recon_weight[view];
  std::vector<double> col(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double d = x(r, j) - fit(r, j);
      col[j] += d * d;
    }
  }
  double loss = 0.0;
  for (std::size_t j = 0; j < col.size(); ++j) loss += w[j] * col[j];
  return loss;
}

double folded_reconstruction_loss(const SolverState& state, std::size_t view) {
  if (state.chunks_seen == 0) return 0.0;
  const Matrix& v = state.V[view];
  // sum_t ||(X_t - V U_t^T) W_t||^2 = E - 2<V, Q> + <V R, V>
  const double loss = state.data_energy[view] - 2.0 * inner(v, state.Q[view]) +
                      inner(multiply(v, state.R[view]), v);
  return std::max(loss, 0.0);
}

ObjectiveTerms objective_terms(const SolverState& state, const ChunkWorkspace& ws,
                               std::size_t view, const Hyperparams& hp) {
  ObjectiveTerms t;
  const double a = view_factor(state, view, hp);
  const Matrix& u = ws.U[view];
  t.reconstruction = a * chunk_reconstruction_loss(state, ws, view);

  const auto& wc = ws.consensus_weight[view];
  double cons = 0.0;
  for (std::size_t j = 0; j < u.rows(); ++j) {
    cons += wc[j] * kernels::squared_distance(u.row(j), ws.Ustar.row(j));
  }
  t.consensus = hp.beta_at(view) * cons;

  if (u.rows() >= 2) {
    t.graph = hp.theta_at(view) * inner(u, multiply(ws.graphs[view].laplacian, u));
  }
  double l21 = 0.0;
  for (double nrm : row_norms(state.V[view])) l21 += nrm;
  t.sparsity = hp.eta_at(view) * l21;

  Matrix gram = multiply_tn(u, u);
  for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;
  t.orthogonality = hp.xi_at(view) * frobenius_sq(gram);

  t.history = a * folded_reconstruction_loss(state, view);
  return t;
}

double objective(const SolverState& state, const ChunkWorkspace& ws, const Hyperparams& hp) {
  double f = 0.0;
  for (std::size_t v = 0; v < state.n_views(); ++v) {
    f += objective_terms(state, ws, v, hp).chunk_total();
  }
  if (!std::isfinite(f)) throw NumericalError("objective is not finite");
  return f;
}

double penalized_objective(const SolverState& state, const ChunkWorkspace& ws,
                           const Hyperparams& hp) {
  double f = 0.0;
  for (std::size_t v = 0; v < state.n_views(); ++v) {
    f += objective_terms(state, ws, v, hp).penalized_total();
  }
  if (!std::isfinite(f)) throw NumericalError("objective is not finite");
  return f;
}

void fold_chunk(SolverState& state, const ChunkWorkspace& ws) {
  for (std::size_t v = 0; v < state.n_views(); ++v) {
    const auto& w = ws.recon_weight[v];
    const Matrix& x = ws.X[v];
    const Matrix wu = ScaleRows(ws.U[v], w);
    const Matrix r = multiply_tn(ws.U[v], wu);
    const Matrix q = multiply(x, wu);
    kernels::axpy(1.0, r.values(), state.R[v].values());
    kernels::axpy(1.0, q.values(), state.Q[v].values());
    state.loss_acc[v] += chunk_reconstruction_loss(state, ws, v);
    double energy = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) col += x(i, j) * x(i, j);
      energy += w[j] * col;
    }
    state.data_energy[v] += energy;
  }
  ++state.chunks_seen;
}

ChunkResult process_chunk(SolverState& state, const MultiViewChunk& chunk,
                          const Hyperparams& hp) {
  hp.validate(state.n_views());
  for (const auto& v : state.V) {
    if (v.cols() != hp.n_clusters) throw std::invalid_argument("K differs from solver state");
  }
  ChunkResult res;
  ChunkWorkspace& ws = res.workspace;
  ws = prepare_chunk(state, chunk, hp);
  const std::size_t nv = state.n_views();
  bool consensus = false;
  for (std::size_t v = 0; v < nv; ++v) consensus = consensus || hp.beta_at(v) > 0.0;

  std::vector<double> losses(nv);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= hp.max_iters; ++it) {
    for (std::size_t v = 0; v < nv; ++v) {
      update_V(state, ws, v, hp);
      update_U(state, ws, v, hp);
    }
    if (consensus) ws.Ustar = update_Ustar(ws, hp);
    if (hp.variant == Variant::kI2MUFS) {
      for (std::size_t v = 0; v < nv; ++v) {
        losses[v] = folded_reconstruction_loss(state, v) + chunk_reconstruction_loss(state, ws, v);
      }
      state.alpha = update_alpha(losses, hp.lambda, hp.eps);
    }
    const double f = penalized_objective(state, ws, hp);
    ws.objective_trace.push_back(f);
    res.report.iterations = it;
    if (it > 1 && std::abs(prev - f) <= hp.rel_tol * std::max(std::abs(prev), hp.eps)) {
      res.report.converged = true;
      break;
    }
    prev = f;
  }
  fold_chunk(state, ws);
  res.report.chunk_index = chunk.chunk_index;
  res.report.objective_trace = ws.objective_trace;
  res.report.alpha = state.alpha;
  return res;
}

ChunkResult process_chunk_variant_c(SolverState& state, const MultiViewChunk& chunk,
                                    Hyperparams hp) {
  hp.variant = Variant::kCI2MUFS;
  return process_chunk(state, chunk, hp);
}

std::vector<std::vector<FeatureScore>> rank_features(const SolverState& state) {
  std::vector<std::vector<FeatureScore>> out;
  for (const auto& v : state.V) {
    const auto norms = row_norms(v);
    std::vector<FeatureScore> r(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) r[i] = {i, norms[i]};
    std::stable_sort(r.begin(), r.end(), [](const FeatureScore& a, const FeatureScore& b) {
      return a.score > b.score;
    });
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<std::size_t>> select_features(
    const std::vector<std::vector<FeatureScore>>& ranking, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("feature ratio must lie in (0, 1]");
  }
  std::vector<std::vector<std::size_t>> out;
  for (const auto& r : ranking) {
    // Guard against ratio * d landing a hair above an integer.
    const double want = ratio * static_cast<double>(r.size());
    auto count = static_cast<std::size_t>(std::ceil(want - 1e-9));
    count = std::clamp<std::size_t>(count, 1, r.size());
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < count; ++i) idx.push_back(r[i].index);
    out.push_back(std::move(idx));
  }
  return out;
}

}  // namespace imufs
