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

#include "apcd/problems.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "apcd/problem_io.hpp"

namespace apcd {
namespace {

std::vector<double> random_point(std::size_t n, Sampler& rng, double scale = 1.0) {
  std::vector<double> x(n);
  for (double& v : x) v = scale * rng.normal();
  return x;
}

template <class P>
void expect_fd_agrees(const P& p, std::uint64_t seed, int probes = 100) {
  Sampler rng(seed);
  const std::size_t n = p.dimension();
  for (int i = 0; i < probes; ++i) {
    std::vector<double> x = random_point(n, rng);
    const std::size_t k = rng.below(n);
    const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
    const double xk = x[k];
    x[k] = xk + h;
    const double fp = p.value(x);
    x[k] = xk - h;
    const double fm = p.value(x);
    x[k] = xk;
    const double fd = (fp - fm) / (2.0 * h);
    const double g = grad_coord(p, x, k);
    EXPECT_LE(std::abs(fd - g), 1e-5 * std::max(1.0, std::abs(g))) << "probe " << i << " k=" << k;
  }
}

TEST(Quadratic, ConstructionSumsDuplicates) {
  const QuadraticProblem p(2, {{0, 0, 1.0}, {0, 0, 1.0}, {1, 1, 3.0}, {0, 1, 0.5}, {1, 0, 0.5}}, {1.0, 0.0}, 1.0);
  EXPECT_EQ(p.diagonal(0), 2.0);
  EXPECT_EQ(p.nonzeros(), 4u);
  EXPECT_EQ(p.support(0).size(), 2u);
  EXPECT_THROW(QuadraticProblem(2, {{2, 0, 1.0}}, {0.0, 0.0}, 1.0), InvalidProblem);
  EXPECT_THROW(QuadraticProblem(2, {}, {0.0}, 1.0), InvalidProblem);
  EXPECT_THROW(p.support(2), OutOfRange);
  const std::vector<double> bad(3, 0.0);
  EXPECT_THROW(grad_coord(p, bad, 0), InvalidProblem);
}

TEST(Quadratic, GradientMatchesDense) {
  const QuadraticProblem p = make_sparse_quadratic(60, 5, 3, 0.2);
  const Eigen::MatrixXd h = p.dense();
  Sampler rng(8);
  const std::vector<double> x = random_point(60, rng);
  const Eigen::VectorXd hx = h * Eigen::Map<const Eigen::VectorXd>(x.data(), 60);
  for (std::size_t k = 0; k < 60; ++k) EXPECT_NEAR(p.grad_coord(x, k), hx(static_cast<Eigen::Index>(k)) - p.linear()[k], 1e-12);
  for (std::size_t k = 0; k < 60; ++k) EXPECT_NEAR(p.grad_coord(*p.minimizer(), k), 0.0, 1e-12);
  EXPECT_NEAR(p.value(*p.minimizer()), 0.0, 1e-15);
}

TEST(FiniteDifferences, SparseQuadratic) { expect_fd_agrees(make_sparse_quadratic(200, 8, 11, 0.1), 1); }
TEST(FiniteDifferences, LeastSquares) {
  expect_fd_agrees(make_random_least_squares(80, 40, 5, {0.1, false}), 2);
}
TEST(FiniteDifferences, Logistic) { expect_fd_agrees(make_logistic(120, 30, 9, 0.01), 3); }

TEST(FiniteDifferences, QuadraticWithoutMinimizer) {
  const QuadraticProblem p(3, {{0, 0, 2.0}, {1, 1, 1.0}, {2, 2, 4.0}, {0, 2, -1.0}, {2, 0, -1.0}}, {1.0, -2.0, 0.5}, 0.5);
  expect_fd_agrees(p, 4);
}

TEST(Lipschitz, OrderingOnSparseQuadratics) {
  for (std::size_t s : {1u, 2u, 4u, 16u}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const QuadraticProblem p = make_sparse_quadratic(300, s, seed, 0.3);
      const LipschitzInfo l = lipschitz_params(p);
      EXPECT_LE(l.l_max, l.l_res * (1.0 + 1e-15));
      EXPECT_LE(l.l_res, l.l_res_bar * (1.0 + 1e-15));
      EXPECT_LE(l.l_res_bar, std::sqrt(static_cast<double>(s)) * l.l_max * (1.0 + 1e-15));
      EXPECT_LE(l.sparsity, s);
      // Symmetric H: column norms equal row norms.
      EXPECT_DOUBLE_EQ(l.l_res, l.l_res_bar);
      const Eigen::MatrixXd h = p.dense();
      EXPECT_DOUBLE_EQ(l.l_res_bar, h.rowwise().norm().maxCoeff());
      EXPECT_DOUBLE_EQ(l.l_max, h.cwiseAbs().maxCoeff());
      EXPECT_EQ(l.l_max, 1.0);  // unit diagonal dominates
    }
  }
}

TEST(Lipschitz, ResidualProbeBoundedByLRes) {
  const QuadraticProblem p = make_sparse_quadratic(100, 6, 21, 0.2);
  const LipschitzInfo l = p.lipschitz();
  Sampler rng(22);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x = random_point(100, rng);
    const std::size_t j = rng.below(100);
    const double r = rng.uniform(-2.0, 2.0);
    std::vector<double> xr = x;
    xr[j] += r;
    double sq = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
      const double d = p.grad_coord(xr, k) - p.grad_coord(x, k);
      sq += d * d;
    }
    EXPECT_LE(std::sqrt(sq), l.l_res * std::abs(r) * (1.0 + 1e-12));
  }
}

TEST(Lipschitz, LogisticBoundsDominatePairs) {
  const LogisticProblem p = make_logistic(60, 12, 4, 0.05);
  const LipschitzInfo l = p.lipschitz();
  EXPECT_LE(l.l_max, l.l_res * (1.0 + 1e-15));
  EXPECT_NEAR(p.pair_bounds().diagonal().maxCoeff(), 1.0, 1e-12);
  EXPECT_EQ(l.sparsity, 12u);
  EXPECT_EQ(p.support(3).size(), 12u);
  EXPECT_FALSE(p.minimizer().has_value());
  // Second differences of the gradient stay within the pair bound.
  Sampler rng(5);
  const Eigen::MatrixXd lb = p.pair_bounds();
  for (int i = 0; i < 30; ++i) {
    std::vector<double> x = random_point(12, rng);
    const std::size_t j = rng.below(12), k = rng.below(12);
    const double r = 0.3;
    std::vector<double> xr = x;
    xr[j] += r;
    EXPECT_LE(std::abs(p.grad_coord(xr, k) - p.grad_coord(x, k)),
              lb(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * r * (1.0 + 1e-9));
  }
}

TEST(SparseQuadratic, StrongConvexityCertificate) {
  for (double mu : {0.01, 0.2, 1.0}) {
    const QuadraticProblem p = make_sparse_quadratic(150, 6, 7, mu);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.dense(), Eigen::EigenvaluesOnly);
    EXPECT_NEAR(es.eigenvalues()(0), p.mu(), 1e-10);
    EXPECT_GE(p.mu(), mu * (1.0 - 1e-9));
    EXPECT_LE(p.mu(), mu + 1e-9);
    for (std::size_t k = 0; k < 150; ++k) EXPECT_EQ(p.diagonal(k), 1.0);
  }
}

TEST(SparseQuadratic, LargeUsesGershgorin) {
  const QuadraticProblem p = make_sparse_quadratic(2000, 4, 3, 0.4);
  EXPECT_EQ(p.mu(), 0.4);
  for (std::size_t k = 0; k < 2000; ++k) {
    double off = 0.0;
    const auto cols = p.support(k);
    const auto vals = p.row_values(k);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] != k) off += std::abs(vals[i]);
    }
    EXPECT_LE(off, 0.6 + 1e-12);
  }
}

TEST(SparseQuadratic, DeterministicAndValidated) {
  const auto a = make_sparse_quadratic(50, 4, 9, 0.5);
  const auto b = make_sparse_quadratic(50, 4, 9, 0.5);
  EXPECT_EQ(*a.minimizer(), *b.minimizer());
  EXPECT_EQ(a.dense(), b.dense());
  EXPECT_THROW(make_sparse_quadratic(10, 0, 1, 0.5), InvalidProblem);
  EXPECT_THROW(make_sparse_quadratic(10, 11, 1, 0.5), InvalidProblem);
  EXPECT_THROW(make_sparse_quadratic(10, 2, 1, 0.0), InvalidProblem);
  const auto id = make_identity_quadratic(10, 1);
  EXPECT_EQ(id.nonzeros(), 10u);
  EXPECT_EQ(id.mu(), 1.0);
}

TEST(LeastSquares, IdentityDesign) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
  const QuadraticProblem p = make_least_squares(a, b);
  EXPECT_DOUBLE_EQ(p.mu(), 1.0);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ((*p.minimizer())[j], static_cast<double>(j + 1));
  EXPECT_EQ(p.lipschitz().l_max, 1.0);
}

TEST(LeastSquares, MatchesNormalEquations) {
  Sampler rng(31);
  Eigen::MatrixXd a(50, 20);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  Eigen::VectorXd b(50);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.normal();
  const double ridge = 0.1;
  const QuadraticProblem p = make_least_squares(a, b, {ridge, false});
  Eigen::MatrixXd h = a.transpose() * a;
  h.diagonal().array() += ridge;
  const Eigen::VectorXd x = h.llt().solve(a.transpose() * b);
  const Eigen::VectorXd d = h.diagonal().cwiseSqrt();
  for (Eigen::Index j = 0; j < 20; ++j) EXPECT_NEAR((*p.minimizer())[static_cast<std::size_t>(j)], x(j) * d(j), 1e-9);
  // f - f* in the original variables equals the reported gap.
  const Eigen::VectorXd probe = Eigen::VectorXd::Constant(20, 0.3);
  auto f = [&](const Eigen::VectorXd& v) { return 0.5 * (a * v - b).squaredNorm() + 0.5 * ridge * v.squaredNorm(); };
  std::vector<double> scaled(20);
  for (Eigen::Index j = 0; j < 20; ++j) scaled[static_cast<std::size_t>(j)] = probe(j) * d(j);
  EXPECT_NEAR(p.value(scaled), f(probe) - f(x), 1e-9 * std::max(1.0, f(probe)));
  const Eigen::MatrixXd hs = d.cwiseInverse().asDiagonal() * h * d.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(p.mu(), es.eigenvalues()(0), 1e-12);
}

TEST(LeastSquares, SingularHandling) {
  EXPECT_THROW(make_random_least_squares(10, 20, 1), SingularMatrix);
  const QuadraticProblem p = make_random_least_squares(10, 20, 1, {0.0, true});
  EXPECT_EQ(p.mu(), 0.0);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_NEAR(p.grad_coord(*p.minimizer(), k), 0.0, 1e-9);
  EXPECT_THROW(make_random_least_squares(10, 20, 1, {-1.0, false}), InvalidProblem);
  Eigen::MatrixXd zero_col = Eigen::MatrixXd::Identity(3, 3);
  zero_col(1, 1) = 0.0;
  EXPECT_THROW(make_least_squares(zero_col, Eigen::VectorXd::Ones(3)), InvalidProblem);
}

TEST(Rescale, DiagonalExample) {
  const QuadraticProblem p(2, {{0, 0, 4.0}, {1, 1, 1.0}}, {4.0, 2.0}, 1.0, std::vector<double>{1.0, 2.0});
  const QuadraticProblem r = rescale_to_unit_diagonal(p);
  EXPECT_EQ(r.diagonal(0), 1.0);
  EXPECT_EQ(r.diagonal(1), 1.0);
  EXPECT_DOUBLE_EQ((*r.minimizer())[0], 2.0);
  EXPECT_DOUBLE_EQ((*r.minimizer())[1], 2.0);
  EXPECT_DOUBLE_EQ(r.linear()[0], 2.0);
  EXPECT_EQ(r.lipschitz().l_max, 1.0);
  // Gaps agree under x' = sqrt(d) x.
  EXPECT_DOUBLE_EQ(r.value(std::vector<double>{0.0, 0.0}), p.value(std::vector<double>{0.0, 0.0}));
}

TEST(Rescale, MuIsMetricInvariant) {
  Sampler rng(77);
  Eigen::MatrixXd g(20, 20);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  Eigen::MatrixXd h = g.transpose() * g + 0.5 * Eigen::MatrixXd::Identity(20, 20);
  for (Eigen::Index j = 0; j < 20; ++j) {
    const double s = rng.uniform(0.5, 3.0);
    h.row(j) *= s;
    h.col(j) *= s;
  }
  // mu in the ||.||_L metric: generalized eigenproblem H v = lambda diag(H) v.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(h, Eigen::MatrixXd(h.diagonal().asDiagonal()),
                                                                 Eigen::EigenvaluesOnly);
  const double mu_l = ges.eigenvalues()(0);
  std::vector<QuadraticProblem::Entry> e;
  for (Index i = 0; i < 20; ++i) {
    for (Index j = 0; j < 20; ++j) e.push_back({i, j, h(i, j)});
  }
  const QuadraticProblem p(20, e, std::vector<double>(20, 0.0), mu_l, std::vector<double>(20, 0.0));
  const QuadraticProblem r = rescale_to_unit_diagonal(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.dense(), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(es.eigenvalues()(0), mu_l, 1e-10);
  EXPECT_EQ(r.mu(), mu_l);
}

TEST(Rescale, ZeroDiagonalThrows) {
  const QuadraticProblem p(2, {{0, 0, 1.0}, {0, 1, 0.5}, {1, 0, 0.5}}, {0.0, 0.0}, 0.0);
  EXPECT_THROW(rescale_to_unit_diagonal(p), InvalidProblem);
}

TEST(ProblemFile, RoundTrip) {
  const QuadraticProblem p = make_sparse_quadratic(40, 5, 13, 0.25);
  std::stringstream ss;
  write_quadratic(ss, p);
  const QuadraticProblem q = read_quadratic(ss);
  EXPECT_EQ(q.dimension(), p.dimension());
  EXPECT_EQ(q.mu(), p.mu());
  EXPECT_EQ(*q.minimizer(), *p.minimizer());
  EXPECT_EQ(q.dense(), p.dense());
  EXPECT_TRUE(std::equal(q.linear().begin(), q.linear().end(), p.linear().begin()));
}

TEST(ProblemFile, WithoutMinimizer) {
  const QuadraticProblem p(2, {{0, 0, 1.0}, {1, 1, 2.0}}, {0.5, 1.0}, 1.0);
  std::stringstream ss;
  write_quadratic(ss, p);
  const QuadraticProblem q = read_quadratic(ss);
  EXPECT_FALSE(q.minimizer().has_value());
  EXPECT_EQ(q.dense(), p.dense());
}

TEST(ProblemFile, Errors) {
  std::istringstream no_header("n 2\n");
  EXPECT_THROW(read_quadratic(no_header), ParseError);
  std::istringstream bad_number("%%APCD quadratic\nn 1\nmu x\n");
  EXPECT_THROW(read_quadratic(bad_number), ParseError);
  std::istringstream short_linear("%%APCD quadratic\nn 2\nmu 1\nlinear 1\nnnz 0\n");
  EXPECT_THROW(read_quadratic(short_linear), ParseError);
  EXPECT_THROW(load_quadratic("/nonexistent/problem.txt"), ParseError);
  EXPECT_THROW(parse_double("1.5e"), ParseError);
  EXPECT_EQ(parse_double(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

}  // namespace
}  // namespace apcd
