// Copyright 2026 The apcd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file problems.hpp
 * @brief Smooth convex objectives with per-coordinate gradient oracles.
 *
 * All generators return problems rescaled so that L_kk = 1 for every k and,
 * when a minimizer is known, translated so that f* = 0. value() then reports
 * the optimality gap f(x) - f* directly.
 *
 * Gradient oracles come in two flavours: grad_coord(x, k) over a full vector
 * and grad_on_support(k, y) over the values of y restricted to support(k).
 * The second lets engines reconstruct only the coordinates a partial
 * derivative actually reads.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apcd/error.hpp"
#include "apcd/rng.hpp"

namespace apcd {

using Index = std::uint32_t;

struct LipschitzInfo {
  double l_max = 0.0;      ///< max_{j,k} L_jk
  double l_res = 0.0;      ///< max_j sup ||grad f(x + r e_j) - grad f(x)|| / |r|
  double l_res_bar = 0.0;  ///< max_k (sum_j L_kj^2)^{1/2}
  std::size_t sparsity = 0;  ///< max number of variables any partial derivative reads
};

/// What the engines need from an objective.
template <class P>
concept CoordinateProblem = requires(const P& p, std::span<const double> x, std::size_t k) {
  { p.dimension() } -> std::convertible_to<std::size_t>;
  { p.value(x) } -> std::convertible_to<double>;
  { p.grad_coord(x, k) } -> std::convertible_to<double>;
  { p.support(k) } -> std::convertible_to<std::span<const Index>>;
  { p.grad_on_support(k, x) } -> std::convertible_to<double>;
  { p.mu() } -> std::convertible_to<double>;
  { p.lipschitz() } -> std::convertible_to<LipschitzInfo>;
  { p.minimizer() } -> std::convertible_to<const std::optional<std::vector<double>>&>;
};

namespace detail {

inline void require_index(std::size_t k, std::size_t n) {
  if (k >= n) {
    throw OutOfRange("coordinate " + std::to_string(k) + " out of range for dimension " +
                     std::to_string(n));
  }
}

inline void require_size(std::span<const double> x, std::size_t n) {
  if (x.size() != n) {
    throw InvalidProblem("vector of size " + std::to_string(x.size()) + " given to a problem of dimension " +
                         std::to_string(n));
  }
}

inline LipschitzInfo lipschitz_from_dense(const Eigen::MatrixXd& l) {
  LipschitzInfo info;
  info.l_max = l.cwiseAbs().maxCoeff();
  info.l_res_bar = l.rowwise().norm().maxCoeff();
  info.l_res = l.colwise().norm().maxCoeff();
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    info.sparsity = std::max<std::size_t>(info.sparsity, static_cast<std::size_t>((l.row(k).array() != 0.0).count()));
  }
  return info;
}

inline double smallest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace detail

/**
 * f(x) = 1/2 x^T H x - c^T x + const with H symmetric positive semidefinite
 * in compressed-row form. For such quadratics L_jk = |H_jk| and
 * L_res = L̄_res.
 */
class QuadraticProblem {
 public:
  struct Entry {
    Index row;
    Index col;
    double value;
  };

  QuadraticProblem() = default;

  /// Builds from (row, col, value) triplets of the full symmetric H.
  /// Duplicates are summed. `minimizer`, when given, must satisfy H x* = c.
  QuadraticProblem(std::size_t n, std::vector<Entry> entries, std::vector<double> linear, double mu,
                   std::optional<std::vector<double>> minimizer = std::nullopt)
      : n_(n), linear_(std::move(linear)), mu_(mu), minimizer_(std::move(minimizer)) {
    if (linear_.size() != n_) throw InvalidProblem("linear term has wrong size");
    if (minimizer_ && minimizer_->size() != n_) throw InvalidProblem("minimizer has wrong size");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_ptr_.assign(n_ + 1, 0);
    for (const Entry& e : entries) {
      if (e.row >= n_ || e.col >= n_) throw InvalidProblem("matrix entry outside dimension");
      if (!cols_.empty() && row_of_last_ == e.row && cols_.back() == e.col) {
        vals_.back() += e.value;
        continue;
      }
      cols_.push_back(e.col);
      vals_.push_back(e.value);
      row_of_last_ = e.row;
      ++row_ptr_[e.row + 1];
    }
    std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
    diag_.assign(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t p = row_ptr_[k]; p < row_ptr_[k + 1]; ++p) {
        if (cols_[p] == k) diag_[k] = vals_[p];
      }
    }
    lipschitz_ = compute_lipschitz();
  }

  std::size_t dimension() const { return n_; }
  double mu() const { return mu_; }
  const LipschitzInfo& lipschitz() const { return lipschitz_; }
  const std::optional<std::vector<double>>& minimizer() const { return minimizer_; }
  std::span<const double> linear() const { return linear_; }
  double diagonal(std::size_t k) const { return diag_[k]; }
  std::size_t nonzeros() const { return vals_.size(); }

  std::span<const Index> support(std::size_t k) const {
    detail::require_index(k, n_);
    return {cols_.data() + row_ptr_[k], row_ptr_[k + 1] - row_ptr_[k]};
  }

  std::span<const double> row_values(std::size_t k) const {
    return {vals_.data() + row_ptr_[k], row_ptr_[k + 1] - row_ptr_[k]};
  }

  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(vals_.size());
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t p = row_ptr_[k]; p < row_ptr_[k + 1]; ++p) {
        out.push_back({static_cast<Index>(k), cols_[p], vals_[p]});
      }
    }
    return out;
  }

  /// f(x) - f* = 1/2 (x - x*)^T H (x - x*) when x* is known, otherwise
  /// 1/2 x^T H x - c^T x.
  double value(std::span<const double> x) const {
    detail::require_size(x, n_);
    double acc = 0.0;
    if (minimizer_) {
      const std::vector<double>& xs = *minimizer_;
      for (std::size_t k = 0; k < n_; ++k) {
        double row = 0.0;
        for (std::size_t p = row_ptr_[k]; p < row_ptr_[k + 1]; ++p) row += vals_[p] * (x[cols_[p]] - xs[cols_[p]]);
        acc += (x[k] - xs[k]) * row;
      }
      return 0.5 * acc;
    }
    for (std::size_t k = 0; k < n_; ++k) {
      double row = 0.0;
      for (std::size_t p = row_ptr_[k]; p < row_ptr_[k + 1]; ++p) row += vals_[p] * x[cols_[p]];
      acc += x[k] * (0.5 * row - linear_[k]);
    }
    return acc;
  }

  /// (H x)_k - c_k, reading only the support of row k.
  double grad_coord(std::span<const double> x, std::size_t k) const {
    detail::require_index(k, n_);
    double g = -linear_[k];
    for (std::size_t p = row_ptr_[k]; p < row_ptr_[k + 1]; ++p) g += vals_[p] * x[cols_[p]];
    return g;
  }

  /// Same as grad_coord with y given as values aligned with support(k).
  double grad_on_support(std::size_t k, std::span<const double> y) const {
    const std::size_t base = row_ptr_[k];
    double g = -linear_[k];
    for (std::size_t p = 0; p < y.size(); ++p) g += vals_[base + p] * y[p];
    return g;
  }

  /// Dense copy of H (desk-scale diagnostics only).
  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (const Entry& e : entries()) h(e.row, e.col) = e.value;
    return h;
  }

 private:
  LipschitzInfo compute_lipschitz() const {
    LipschitzInfo info;
    std::vector<double> col_sq(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      double row_sq = 0.0;
      for (std::size_t p = row_ptr_[k]; p < row_ptr_[k + 1]; ++p) {
        const double a = std::abs(vals_[p]);
        info.l_max = std::max(info.l_max, a);
        row_sq += a * a;
        col_sq[cols_[p]] += a * a;
      }
      info.l_res_bar = std::max(info.l_res_bar, std::sqrt(row_sq));
      info.sparsity = std::max<std::size_t>(info.sparsity, row_ptr_[k + 1] - row_ptr_[k]);
    }
    for (double s : col_sq) info.l_res = std::max(info.l_res, std::sqrt(s));
    return info;
  }

  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> vals_;
  std::vector<double> diag_;
  std::vector<double> linear_;
  double mu_ = 0.0;
  std::optional<std::vector<double>> minimizer_;
  LipschitzInfo lipschitz_{};
  Index row_of_last_ = 0;
};

/**
 * Regularized logistic loss
 *   f(x) = (1/m) sum_i log(1 + exp(-b_i a_i^T x)) + 1/2 sum_j r_j x_j^2.
 *
 * The Lipschitz constants are the standard upper bounds
 * L_jk <= (1/4m) sum_i |a_ij a_ik| + r_j [j = k]; they are not tight.
 * Every partial derivative reads all of x (dense design).
 */
class LogisticProblem {
 public:
  LogisticProblem(Eigen::MatrixXd design, std::vector<double> labels, std::vector<double> ridge)
      : a_(std::move(design)), labels_(std::move(labels)), ridge_(std::move(ridge)) {
    if (static_cast<std::size_t>(a_.rows()) != labels_.size()) throw InvalidProblem("labels/design size mismatch");
    if (static_cast<std::size_t>(a_.cols()) != ridge_.size()) throw InvalidProblem("ridge/design size mismatch");
    for (double b : labels_) {
      if (b != 1.0 && b != -1.0) throw InvalidProblem("labels must be +1 or -1");
    }
    support_.resize(static_cast<std::size_t>(a_.cols()));
    std::iota(support_.begin(), support_.end(), Index{0});
    const Eigen::MatrixXd l = pair_bounds();
    lipschitz_ = detail::lipschitz_from_dense(l);
    mu_ = ridge_.empty() ? 0.0 : std::max(0.0, *std::min_element(ridge_.begin(), ridge_.end()));
  }

  std::size_t dimension() const { return static_cast<std::size_t>(a_.cols()); }
  std::size_t samples() const { return static_cast<std::size_t>(a_.rows()); }
  double mu() const { return mu_; }
  const LipschitzInfo& lipschitz() const { return lipschitz_; }
  const std::optional<std::vector<double>>& minimizer() const { return minimizer_; }
  const Eigen::MatrixXd& design() const { return a_; }
  std::span<const double> labels() const { return labels_; }
  std::span<const double> ridge() const { return ridge_; }

  std::span<const Index> support(std::size_t k) const {
    detail::require_index(k, dimension());
    return support_;
  }

  double value(std::span<const double> x) const {
    detail::require_size(x, dimension());
    const Eigen::VectorXd margins = a_ * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) loss += softplus(-labels_[static_cast<std::size_t>(i)] * margins(i));
    loss /= static_cast<double>(samples());
    for (std::size_t j = 0; j < ridge_.size(); ++j) loss += 0.5 * ridge_[j] * x[j] * x[j];
    return loss;
  }

  double grad_coord(std::span<const double> x, std::size_t k) const {
    detail::require_index(k, dimension());
    return grad_on_support(k, x);
  }

  double grad_on_support(std::size_t k, std::span<const double> y) const {
    const auto col = static_cast<Eigen::Index>(k);
    double g = 0.0;
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const double aik = a_(i, col);
      if (aik == 0.0) continue;
      double margin = 0.0;
      for (Eigen::Index j = 0; j < a_.cols(); ++j) margin += a_(i, j) * y[static_cast<std::size_t>(j)];
      const double b = labels_[static_cast<std::size_t>(i)];
      g -= b * aik * sigmoid(-b * margin);
    }
    return g / static_cast<double>(samples()) + ridge_[k] * y[k];
  }

  /// Per-pair bounds L_jk (dense n x n).
  Eigen::MatrixXd pair_bounds() const {
    const Eigen::MatrixXd abs_a = a_.cwiseAbs();
    Eigen::MatrixXd l = abs_a.transpose() * abs_a / (4.0 * static_cast<double>(samples()));
    for (std::size_t j = 0; j < ridge_.size(); ++j) l(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += ridge_[j];
    return l;
  }

 private:
  static double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
  static double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }

  Eigen::MatrixXd a_;
  std::vector<double> labels_;
  std::vector<double> ridge_;
  std::vector<Index> support_;
  LipschitzInfo lipschitz_{};
  double mu_ = 0.0;
  std::optional<std::vector<double>> minimizer_;
};

/// Partial derivative with bounds checking, through the problem's own oracle.
template <CoordinateProblem P>
double grad_coord(const P& p, std::span<const double> x, std::size_t k) {
  detail::require_size(x, p.dimension());
  return p.grad_coord(x, k);
}

inline LipschitzInfo lipschitz_params(const QuadraticProblem& p) { return p.lipschitz(); }
inline LipschitzInfo lipschitz_params(const LogisticProblem& p) { return p.lipschitz(); }

/**
 * Change of variables x'_j = sqrt(L_jj) x_j, giving L'_jj = 1. The strong
 * convexity parameter is metric-invariant: mu measured in ||.||_L before
 * equals mu measured in ||.||_2 after, so `mu` carries over unchanged.
 */
inline QuadraticProblem rescale_to_unit_diagonal(const QuadraticProblem& p) {
  const std::size_t n = p.dimension();
  std::vector<double> scale(n);  // 1/sqrt(L_jj)
  for (std::size_t j = 0; j < n; ++j) {
    const double d = p.diagonal(j);
    if (!(d > 0.0)) throw InvalidProblem("zero diagonal at coordinate " + std::to_string(j));
    scale[j] = 1.0 / std::sqrt(d);
  }
  std::vector<QuadraticProblem::Entry> entries = p.entries();
  for (auto& e : entries) {
    e.value = e.row == e.col ? 1.0 : e.value * scale[e.row] * scale[e.col];
  }
  std::vector<double> linear(p.linear().begin(), p.linear().end());
  for (std::size_t j = 0; j < n; ++j) linear[j] *= scale[j];
  std::optional<std::vector<double>> xs;
  if (p.minimizer()) {
    xs = *p.minimizer();
    for (std::size_t j = 0; j < n; ++j) (*xs)[j] /= scale[j];
  }
  return QuadraticProblem(n, std::move(entries), std::move(linear), p.mu(), std::move(xs));
}

/// Problems up to this size get an exact dense eigenvalue for mu.
inline constexpr std::size_t kDenseEigenLimit = 1500;

/**
 * f(x) = 1/2 (x - x*)^T M (x - x*) with M = I + alpha E, E a random symmetric
 * zero-diagonal matrix with at most s - 1 off-diagonal entries per row.
 *
 * alpha is chosen so that lambda_min(M) = mu_target exactly (dense
 * eigenvalue, n <= kDenseEigenLimit) or so that Gershgorin discs certify
 * lambda_min(M) >= mu_target (larger n; mu() then reports mu_target).
 * s = 1 gives the identity.
 */
inline QuadraticProblem make_sparse_quadratic(std::size_t n, std::size_t s, std::uint64_t seed, double mu_target) {
  if (n == 0) throw InvalidProblem("dimension must be positive");
  if (s < 1 || s > n) throw InvalidProblem("sparsity s must lie in [1, n]");
  if (!(mu_target > 0.0 && mu_target <= 1.0)) throw InvalidProblem("mu_target must lie in (0, 1]");

  Sampler rng(seed);
  const std::size_t max_off = s - 1;
  std::vector<std::vector<Index>> adj(n);
  std::vector<QuadraticProblem::Entry> off;
  constexpr int kMaxRetries = 8;
  for (int attempt = 0; attempt < kMaxRetries && max_off > 0 && n > 1; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t tries = 0; adj[i].size() < max_off && tries < 4 * max_off; ++tries) {
        const auto j = static_cast<Index>(rng.below(n));
        if (j == i || adj[j].size() >= max_off) continue;
        if (std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end()) continue;
        const double v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.0);
        adj[i].push_back(j);
        adj[j].push_back(static_cast<Index>(i));
        off.push_back({static_cast<Index>(i), j, v});
      }
    }
    if (!off.empty()) break;
  }
  if (max_off > 0 && n > 1 && off.empty()) {
    throw Infeasible("could not place any off-diagonal entry for s = " + std::to_string(s));
  }

  double alpha = 0.0;
  double mu = 1.0;
  if (!off.empty()) {
    if (n <= kDenseEigenLimit) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (const auto& t : off) {
        e(t.row, t.col) = t.value;
        e(t.col, t.row) = t.value;
      }
      const double lam = detail::smallest_eigenvalue(e);  // < 0 since trace(E) = 0
      alpha = (1.0 - mu_target) / -lam * (1.0 - 1e-12);
      mu = detail::smallest_eigenvalue(Eigen::MatrixXd::Identity(e.rows(), e.cols()) + alpha * e);
    } else {
      std::vector<double> row_abs(n, 0.0);
      for (const auto& t : off) {
        row_abs[t.row] += std::abs(t.value);
        row_abs[t.col] += std::abs(t.value);
      }
      alpha = (1.0 - mu_target) / *std::max_element(row_abs.begin(), row_abs.end());
      mu = mu_target;
    }
  }

  std::vector<QuadraticProblem::Entry> entries;
  entries.reserve(n + 2 * off.size());
  for (std::size_t i = 0; i < n; ++i) entries.push_back({static_cast<Index>(i), static_cast<Index>(i), 1.0});
  for (const auto& t : off) {
    entries.push_back({t.row, t.col, alpha * t.value});
    entries.push_back({t.col, t.row, alpha * t.value});
  }
  std::vector<double> xs(n);
  for (double& v : xs) v = rng.normal();
  // c = M x* so that the gradient M x - c vanishes at x*.
  QuadraticProblem shape(n, entries, std::vector<double>(n, 0.0), mu);
  std::vector<double> linear(n);
  for (std::size_t k = 0; k < n; ++k) linear[k] = shape.grad_coord(xs, k);
  return QuadraticProblem(n, std::move(entries), std::move(linear), mu, std::move(xs));
}

/// Separable f(x) = 1/2 ||x - x*||^2 with a seeded random x*.
inline QuadraticProblem make_identity_quadratic(std::size_t n, std::uint64_t seed) {
  return make_sparse_quadratic(n, 1, seed, 1.0);
}

struct LeastSquaresOptions {
  double ridge = 0.0;
  /// Accept rank-deficient A with ridge = 0 (merely convex objective); the
  /// recorded minimizer is then the minimum-norm one in rescaled coordinates.
  bool allow_singular = false;
};

/**
 * f(x) = 1/2 ||A x - b||^2 + ridge/2 ||x||^2 - f*, rescaled to unit diagonal.
 * mu is the smallest eigenvalue of the rescaled A^T A + ridge I; the
 * minimizer is solved directly at construction.
 */
inline QuadraticProblem make_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           LeastSquaresOptions opts = {}) {
  if (opts.ridge < 0.0) throw InvalidProblem("ridge must be non-negative");
  if (a.rows() != b.size()) throw InvalidProblem("A and b have mismatched rows");
  const auto n = a.cols();
  Eigen::MatrixXd h = a.transpose() * a;
  h.diagonal().array() += opts.ridge;
  Eigen::VectorXd c = a.transpose() * b;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(h(j, j) > 0.0)) throw InvalidProblem("column " + std::to_string(j) + " of A is zero");
  }
  const Eigen::VectorXd scale = h.diagonal().cwiseSqrt().cwiseInverse();
  h = scale.asDiagonal() * h * scale.asDiagonal();
  h.diagonal().setOnes();
  c = scale.asDiagonal() * c;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues()(0);
  const double lam_max = es.eigenvalues()(n - 1);
  const bool singular = lam_min <= 1e-10 * lam_max;
  Eigen::VectorXd xs;
  if (singular) {
    if (!opts.allow_singular) {
      throw SingularMatrix("least-squares system is singular (rank-deficient A with ridge = 0)");
    }
    xs = h.completeOrthogonalDecomposition().solve(c);
  } else {
    xs = h.ldlt().solve(c);
  }

  std::vector<QuadraticProblem::Entry> entries;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (h(i, j) != 0.0) entries.push_back({static_cast<Index>(i), static_cast<Index>(j), h(i, j)});
    }
  }
  return QuadraticProblem(static_cast<std::size_t>(n), std::move(entries), std::vector<double>(c.begin(), c.end()),
                          singular ? 0.0 : lam_min, std::vector<double>(xs.begin(), xs.end()));
}

/// Random Gaussian least-squares instance (m x n design, consistent b when
/// m < n so that f* = 0 is attained).
inline QuadraticProblem make_random_least_squares(std::size_t m, std::size_t n, std::uint64_t seed,
                                                  LeastSquaresOptions opts = {}) {
  Sampler rng(seed);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.normal();
  return make_least_squares(a, b, opts);
}

/**
 * Logistic regression on a seeded synthetic dataset, columns scaled so the
 * Lipschitz bound on each diagonal is 1.
 */
inline LogisticProblem make_logistic(std::size_t m, std::size_t n, std::uint64_t seed, double ridge = 0.0) {
  if (ridge < 0.0) throw InvalidProblem("ridge must be non-negative");
  Sampler rng(seed);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  }
  std::vector<double> w(n);
  for (double& v : w) v = rng.normal();
  std::vector<double> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    double margin = 0.0;
    for (std::size_t j = 0; j < n; ++j) margin += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * w[j];
    labels[i] = (margin + 0.5 * rng.normal()) >= 0.0 ? 1.0 : -1.0;
  }
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double diag = a.col(static_cast<Eigen::Index>(j)).squaredNorm() / (4.0 * static_cast<double>(m)) + ridge;
    const double s = 1.0 / std::sqrt(diag);
    a.col(static_cast<Eigen::Index>(j)) *= s;
    r[j] = ridge * s * s;
  }
  return LogisticProblem(std::move(a), std::move(labels), std::move(r));
}

}  // namespace apcd
