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

#include "apcd/basis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "apcd/harness.hpp"

namespace apcd {
namespace {

void expect_mat_near(const Mat2& a, const Mat2& b, double tol) {
  EXPECT_LE(max_abs_diff(a, b), tol) << "[[" << a.a11 << ", " << a.a12 << "], [" << a.a21 << ", " << a.a22
                                     << "]] vs [[" << b.a11 << ", " << b.a12 << "], [" << b.a21 << ", " << b.a22 << "]]";
}

Schedule sc(std::size_t n, double mu) { return Schedule::relaxed(Regime::sc_linear(n, mu)); }
Schedule cvx(std::size_t n) { return Schedule::relaxed(Regime::convex(n)); }

TEST(Mat2, PowerAndInverse) {
  const Mat2 m{2.0, 1.0, 1.0, 1.0};
  expect_mat_near(power(m, 0), Mat2::identity(), 0.0);
  expect_mat_near(power(m, 5), m * m * m * m * m, 0.0);
  expect_mat_near(m * inverse(m), Mat2::identity(), 1e-15);
  EXPECT_THROW(inverse(Mat2{1.0, 2.0, 2.0, 4.0}), SingularMatrix);
}

TEST(AMatrix, StronglyConvexForm) {
  const Schedule s = sc(100, 0.01);
  const double phi = s.params(0).phi;
  const Mat2 a = a_matrix(0, s);
  EXPECT_NEAR(a.a11, (1.0 + phi * phi) / (1.0 + phi), 1e-15);
  EXPECT_NEAR(a.a12, 1.0 - (1.0 + phi * phi) / (1.0 + phi), 1e-15);
  EXPECT_NEAR(a.a21, phi, 1e-15);
  EXPECT_NEAR(a.a22, 1.0 - phi, 1e-15);
  EXPECT_NEAR(a.a11 + a.a12, 1.0, 1e-15);
  EXPECT_NEAR(a.a21 + a.a22, 1.0, 1e-15);
}

TEST(AMatrix, ConvexExample) {
  const Mat2 a = a_matrix(0, cvx(10));
  EXPECT_DOUBLE_EQ(a.a11, 21.0 / 23.0);
  EXPECT_DOUBLE_EQ(a.a12, 2.0 / 23.0);
  EXPECT_EQ(a.a21, 0.0);
  EXPECT_EQ(a.a22, 1.0);
}

TEST(AMatrix, VanishingPhiGivesIdentity) {
  expect_mat_near(a_matrix(0, sc(19, 1e-30)), Mat2::identity(), 1e-15);
}

TEST(DVector, StronglyConvexSimplifies) {
  for (double mu : {1.0, 0.01}) {
    const Schedule s = sc(100, mu);
    const double phi = s.params(0).phi;
    const Vec2 d = d_vector(3, s);
    EXPECT_NEAR(d.d1, 101.0 * phi / (1.0 + phi), 1e-15);
    EXPECT_EQ(d.d2, 1.0);
  }
}

TEST(DVector, ConvexExample) {
  // psi_1 = 21/23, phi_0 = 1/11: d1 = 10 * 21/23 * 1/11 + 2/23 = 232/253.
  const Vec2 d = d_vector(0, cvx(10));
  EXPECT_DOUBLE_EQ(d.d1, 232.0 / 253.0);
  EXPECT_DOUBLE_EQ(d.d1, 0.9169960474308301);
  EXPECT_EQ(d.d2, 1.0);
}

TEST(DVector, WithinNPhiBand) {
  for (std::size_t n : {19u, 100u}) {
    for (const Schedule& s : {sc(n, 1.0), sc(n, 0.02), Schedule::relaxed(Regime::sc_sublinear(n, 0.1)), cvx(n)}) {
      for (std::int64_t t : {0, 1, 50, 5000}) {
        const double nd = static_cast<double>(n);
        const double phi = s.params(t).phi;
        const double d1 = d_vector(t, s).d1;
        EXPECT_GE(d1, nd * phi * (1.0 - 1e-12));
        EXPECT_LE(d1, (nd + 1.0) * phi * (1.0 + 1e-12));
      }
    }
  }
}

TEST(BMatrix, IdentityAtZero) {
  for (const Schedule& s : {sc(100, 0.01), cvx(10)}) expect_mat_near(b_matrix(0, s), Mat2::identity(), 0.0);
}

TEST(BMatrix, StronglyConvexFiveSteps) {
  const Schedule s = sc(100, 0.01);
  const Mat2 expected{0.9980680019434424, 0.0019319980565576822, 0.0019334951556411238, 0.9980665048443591};
  expect_mat_near(b_matrix(5, s), expected, 1e-15);
  const Mat2 a = a_matrix(0, s);
  expect_mat_near(b_matrix(5, s), a * a * a * a * a, 1e-15);
}

TEST(BMatrix, ConvexThreeSteps) {
  const Mat2 b = b_matrix(3, cvx(10));
  EXPECT_NEAR(b.a11, 0.77, 1e-15);
  EXPECT_NEAR(b.a12, 0.23, 1e-15);
  EXPECT_EQ(b.a21, 0.0);
  EXPECT_EQ(b.a22, 1.0);
}

TEST(BMatrix, ProductRecurrence) {
  for (const Schedule& s : {sc(19, 1.0), sc(200, 0.01), Schedule::relaxed(Regime::sc_sublinear(50, 0.3)), cvx(19)}) {
    for (std::int64_t t = 0; t <= 10000; t += 13) {
      expect_mat_near(b_matrix(t + 1, s), a_matrix(t, s) * b_matrix(t, s), kAlgebraTol);
    }
  }
}

TEST(BMatrix, SquaringCrossCheck) {
  for (const Schedule& s : {sc(19, 1.0), sc(1000, 0.01)}) {
    for (std::int64_t t : {1, 2, 17, 1000, 65537, 100000}) {
      expect_mat_near(b_matrix(t, s), b_matrix_by_squaring(t, s), 1e-11);
    }
  }
  EXPECT_THROW(b_matrix(-1, sc(19, 1.0)), OutOfRange);
}

TEST(BInverse, Basics) {
  const Schedule c = cvx(10);
  expect_mat_near(b_inverse(0, c), Mat2::identity(), 0.0);
  const double p = b_matrix(40, c).a11;
  expect_mat_near(b_inverse(40, c), Mat2{1.0 / p, 1.0 - 1.0 / p, 0.0, 1.0}, 1e-12);
}

TEST(BInverse, ProductIsIdentity) {
  // Absolute 1e-10 while the inverse stays moderate; relative to its size
  // beyond that, where entries grow like 1/det.
  for (const Schedule& s : {sc(19, 1.0), sc(100, 0.01), cvx(19), cvx(200)}) {
    for (std::int64_t t : {0, 1, 10, 100, 1000, 10000, 100000, 1000000}) {
      const Mat2 b = b_matrix(t, s);
      if (b.det() < kMinBasisDet) {
        EXPECT_THROW(b_inverse(t, s), SingularMatrix);
        continue;
      }
      const Mat2 inv = b_inverse(t, s);
      const double scale = std::max({1.0, std::abs(inv.a11), std::abs(inv.a12), std::abs(inv.a21), std::abs(inv.a22)});
      const double tol = b.det() >= 1e-4 ? kInverseTol : kInverseTol * scale;
      expect_mat_near(b * inv, Mat2::identity(), tol);
    }
  }
}

TEST(BInverse, ThrowsWhenSingular) {
  EXPECT_THROW(b_inverse(1000000, sc(19, 1.0)), SingularMatrix);
}

TEST(Transfer, ComposesAndInverts) {
  for (const Schedule& s : {sc(50, 0.2), cvx(50)}) {
    for (auto [a, b, c] : {std::tuple{0, 10, 30}, std::tuple{100, 40, 500}, std::tuple{7, 7, 9}}) {
      expect_mat_near(transfer(b, c, s) * transfer(a, b, s), transfer(a, c, s), 1e-12);
    }
    expect_mat_near(transfer(20, 60, s) * transfer(60, 20, s), Mat2::identity(), 1e-12);
  }
}

TEST(WindowedTransfer, Cases) {
  for (const Schedule& s : {sc(50, 0.2), cvx(50)}) {
    expect_mat_near(windowed_b_transfer(8, 7, s), Mat2::identity(), 0.0);
    expect_mat_near(windowed_b_transfer(9, 7, s), a_matrix(8, s), 0.0);
    const Mat2 prod = a_matrix(7, s) * a_matrix(6, s) * a_matrix(5, s);  // A^7 A^6 A^5
    expect_mat_near(windowed_b_transfer(5, 7, s), inverse(prod), 1e-13);
    expect_mat_near(windowed_b_transfer(30, 20, s), transfer(21, 30, s), 1e-13);
  }
}

TEST(Goodness, DiagonalWindowAlwaysGood) {
  for (const Schedule& s : {sc(19, 1.0), cvx(19), Schedule::relaxed(Regime::sc_sublinear(19, 1.0))}) {
    for (std::int64_t t : {1, 2, 100, 5000}) EXPECT_TRUE(check_goodness(t, t - 1, s));
  }
}

TEST(Goodness, HoldsWithinLemmaWindow) {
  const std::vector<std::size_t> ns{19, 50, 200};
  for (const auto& row : goodness_checks(ns, 1500)) EXPECT_TRUE(row.pass) << row.name << " failures " << row.value;
}

TEST(Goodness, QLimit) {
  EXPECT_DOUBLE_EQ(goodness_q_limit(19), 11.0 / 12.0);
  EXPECT_DOUBLE_EQ(goodness_q_limit(200), 10.0);
  EXPECT_DOUBLE_EQ(goodness_q_limit(50), 2.5);
}

TEST(Goodness, FailsFarOutsideWindow) {
  // A very stale transfer blows the first component past (3/2) n phi_t.
  EXPECT_FALSE(check_goodness(0, 5000, sc(19, 1.0)));
}

TEST(RebaseHorizon, BracketsTheLimit) {
  for (const Schedule& s : {sc(19, 1.0), sc(100, 0.01), cvx(19), cvx(300)}) {
    for (std::int64_t o : {0, 17, 12345}) {
      const std::int64_t h = rebase_horizon(o, s, 1e4);
      ASSERT_GE(h, 1);
      EXPECT_LE(1.0 / transfer(o, o + h, s).det(), 1e4 * (1.0 + 1e-9));
      EXPECT_GT(1.0 / transfer(o, o + h + 1, s).det(), 1e4 * (1.0 - 1e-9));
    }
  }
  EXPECT_EQ(rebase_horizon(0, sc(19, 1.0), std::numeric_limits<double>::infinity()),
            std::numeric_limits<std::int64_t>::max());
  EXPECT_THROW(rebase_horizon(0, sc(19, 1.0), 0.5), InvalidRegime);
}

}  // namespace
}  // namespace apcd
