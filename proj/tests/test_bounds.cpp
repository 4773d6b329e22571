#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "horolab/bounds.hpp"
#include "horolab/error.hpp"

using namespace horolab;

namespace {

CurveSpec line_curve(ProductShape shape) {
  std::vector<std::vector<Polynomial>> f;
  for (int i = 0; i < shape.k(); ++i) {
    std::vector<Polynomial> coords;
    for (int c = 0; c < shape.dim(i) - 1; ++c) coords.emplace_back(std::vector<double>{0.1 * c, 1.0 + c, 0.3 * (i + 1)});
    f.push_back(coords);
  }
  return CurveSpec(shape, f);
}

}  // namespace

TEST(PolySup, Basics) {
  EXPECT_DOUBLE_EQ(poly_sup_abs({3.0}, 0, 1), 3.0);
  EXPECT_NEAR(poly_sup_abs({0, 1, -1}, 0, 1), 0.25, 1e-14);
  // Chebyshev T_4 on [-1,1] has sup 1
  EXPECT_NEAR(poly_sup_abs({1, 0, -8, 0, 8}, -1, 1), 1.0, 1e-14);
  EXPECT_THROW(poly_sup_abs({1}, 1, 1), ArgumentError);
}

TEST(MT, AgreesWithSampling) {
  ProductShape shape({2, 3}, {1.0, 1.0});
  auto rep = make_rep(shape, {1, 2});
  auto curve = line_curve(shape);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    TensorVector v(rep);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(rng);
    for (double t : {0.0, 2.0, 6.0}) {
      const double exact = m_t(v, curve, 0.4, t, 3);
      const double sampled = m_t_sampled(v, curve, 0.4, t, 3, 2001);
      EXPECT_GE(exact, sampled * (1 - 1e-12));
      EXPECT_LE(exact, sampled * 1.01);
    }
  }
}

TEST(MT, Examples) {
  ProductShape shape({2}, {1.0});
  auto rep = make_rep(shape, {2});
  auto curve = line_curve(shape);
  for (double t : {4.0, 8.0}) {
    EXPECT_GE(m_t(highest_vector(rep), curve, 0.3, t, 3), std::exp(2 * t) * (1 - 1e-12));
  }
  CurveSpec zero(shape, {{Polynomial()}});
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  TensorVector v(rep);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(rng);
  EXPECT_NEAR(m_t(v, zero, 0.3, 0.0, 3), v.norm(), 1e-15);
  EXPECT_NEAR(m_t(v * -2.5, curve, 0.3, 3.0, 3), 2.5 * m_t(v, curve, 0.3, 3.0, 3), 1e-9 * m_t(v, curve, 0.3, 3.0, 3));
  EXPECT_THROW(m_t(TensorVector(rep), curve, 0.3, 1.0, 3), DomainError);
}

TEST(D2, PositiveAndDeterministic) {
  ProductShape shape({2}, {1.0});
  auto rep = make_rep(shape, {1});
  CurveSpec c(shape, {{Polynomial({0, 1})}});
  std::vector<double> ladder{2, 4, 6, 8, 10, 12};
  auto r1 = estimate_D2(rep, c, 0.5, ladder, 40, 11);
  EXPECT_GT(r1.d2, 0.0);
  EXPECT_GT(r1.d3, 0.0);
  auto r2 = estimate_D2(rep, c, 0.5, ladder, 40, 11);
  EXPECT_EQ(r1.to_json(), r2.to_json());
  EXPECT_EQ(r1.to_csv(), r2.to_csv());
  EXPECT_EQ(r1.per_t.size(), ladder.size());

  ProductShape two({2, 2}, {1.0, 1.0});
  CurveSpec flat2(two, {{Polynomial({0, 1})}, {Polynomial({0.3})}});
  EXPECT_THROW(estimate_D2(make_rep(two, {1, 1}), flat2, 0.5, ladder, 4, 1), PreconditionError);
}

TEST(D2, NonCollapsingDefaultShapes) {
  std::vector<double> ladder{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  for (auto [dims, powers] : std::vector<std::pair<std::vector<int>, std::vector<int>>>{
           {{2}, {2}}, {{3}, {2}}, {{2, 3}, {1, 1}}, {{2, 2}, {2, 1}}}) {
    ProductShape shape(dims, std::vector<double>(dims.size(), 1.0));
    auto r = estimate_D2(make_rep(shape, powers), line_curve(shape), 0.5, ladder, 20, 5);
    EXPECT_GT(r.d2, 0.0);
    double late = 1e300;
    std::vector<double> early;
    for (const auto& row : r.per_t) {
      if (row.t >= 8) late = std::min(late, row.min);
      if (row.t <= 6) early.push_back(row.median);
    }
    std::sort(early.begin(), early.end());
    EXPECT_GE(late, 0.5 * early[early.size() / 2]);
  }
}

TEST(Simplex, SmallProblems) {
  // max w0 + w1 s.t. w0 + 2 w1 = 4, w >= 0 -> w = (4, 0), value 4
  Matrix A(1, 2);
  A << 1, 2;
  Vector c(1);
  c << 4;
  Vector g(2);
  g << 1, 1;
  auto r = simplex_equality(A, c, g);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.value, 4.0, 1e-12);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  // infeasible: w0 = -1
  Matrix B(1, 1);
  B << 1;
  Vector cb(1);
  cb << -1;
  Vector gb(1);
  gb << 1;
  EXPECT_FALSE(simplex_equality(B, cb, gb).feasible);
}

TEST(CdJ, OracleValues) {
  EXPECT_NEAR(c_dJ(0, 0, 1), 1.0, 1e-12);
  EXPECT_NEAR(c_dJ(1, 0, 1), 0.5, 1e-12);
  EXPECT_NEAR(c_dJ(2, 1, 2), 1.0 / 24.0, 1e-9);
  const double c4 = c_dJ(4, 0, 1);
  EXPECT_LE(c4, 1.0 / 256.0 + 1e-12);
  EXPECT_NEAR(c4, 1.0 / 256.0, 1e-8);
  EXPECT_GT(c_dJ(1, 0, 1), c_dJ(2, 0, 1));
  EXPECT_GT(c_dJ(2, 0, 1), c_dJ(3, 0, 1));
  EXPECT_THROW(c_dJ(1, 1, 1), DomainError);
}

TEST(CdJ, RandomPolynomials) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto [d, lo, hi] : std::vector<std::tuple<int, double, double>>{{1, 0, 1}, {2, 1, 2}}) {
    const double c = c_dJ(d, lo, hi);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> a(d + 1);
      double mx = 0;
      for (double& x : a) {
        x = u(rng);
        mx = std::max(mx, std::abs(x));
      }
      EXPECT_GE(poly_sup_abs(a, lo, hi), c * mx - 1e-9);
    }
  }
}
