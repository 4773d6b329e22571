#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "horolab/curve.hpp"
#include "horolab/error.hpp"

using namespace horolab;

namespace {

CurveSpec two_factor(std::vector<double> rates, std::vector<double> c1, std::vector<double> c2) {
  return CurveSpec(ProductShape({2, 2}, std::move(rates)), {{Polynomial(std::move(c1))}, {Polynomial(std::move(c2))}});
}

CurveSpec random_curve(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ProductShape shape({2, 3}, {1.0, 0.7});
  std::vector<std::vector<Polynomial>> f(2);
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < shape.dim(i) - 1; ++c) {
      std::vector<double> co(6);
      for (double& x : co) x = g(rng);
      f[i].emplace_back(co);
    }
  }
  return CurveSpec(shape, f);
}

}  // namespace

TEST(Polynomial, Derivatives) {
  Polynomial p({0, 0, 1});
  EXPECT_DOUBLE_EQ(p.derivative(1, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(p.derivative(2, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(p.derivative(3, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(Polynomial({1, 2, 3, 4})(2.0), 1 + 4 + 12 + 32);
  EXPECT_EQ(Polynomial({1, 0, 0}).degree(), 0);
}

TEST(CurveSpec, Validation) {
  ProductShape shape({3}, {1.0});
  EXPECT_THROW(CurveSpec(shape, {{Polynomial({0, 1})}}), ArgumentError);
  std::vector<double> deg9(10, 1.0);
  EXPECT_THROW(CurveSpec(ProductShape({2}, {1.0}), {{Polynomial(deg9)}}), ArgumentError);
  CurveSpec flat(ProductShape({2}, {1.0}), {{Polynomial({0.5})}});
  EXPECT_TRUE(flat.regularity().degenerate);
  CurveSpec crit(ProductShape({2}, {1.0}), {{Polynomial({0, -1, 1})}});  // phi' = 2s - 1 vanishes at 1/2
  EXPECT_LT(crit.regularity().min_speed[0], 1e-3);
  CurveSpec line(ProductShape({2}, {1.0}), {{Polynomial({0, 1})}});
  EXPECT_FALSE(line.regularity().degenerate);
  EXPECT_DOUBLE_EQ(line.regularity().min_speed[0], 1.0);
}

TEST(Taylor, Coefficients) {
  CurveSpec c(ProductShape({2}, {1.0}), {{Polynomial({0, 0, 1})}});
  auto td = taylor_R(c, 0.5, 3);
  ASSERT_EQ(td.coeffs.size(), 2u);
  EXPECT_DOUBLE_EQ(td.coeffs[0][0][0], 1.0);
  EXPECT_DOUBLE_EQ(td.coeffs[1][0][0], 1.0);
  EXPECT_DOUBLE_EQ(td.kappa()[0][0], 1.0);
  EXPECT_DOUBLE_EQ(td.R(0.1)[0][0], 0.1 + 0.01);
  EXPECT_NEAR(td.y(0.1)[0][0], 1.1, 1e-15);

  // Remainder order: |phi(s+h) - phi(s) - R(h)| = O(h^l).
  CurveSpec e(ProductShape({2}, {1.0}), {{Polynomial({0.1, 1, -0.5, 0.3, 0.2, -0.4, 0.25})}});
  for (int l : {2, 3, 4}) {
    auto t = taylor_R(e, 0.3, l);
    std::vector<double> xs, ys;
    for (double h : {1e-1, 1e-2, 1e-3}) {
      double rem = std::abs(e(0.3 + h)[0][0] - e(0.3)[0][0] - t.R(h)[0][0]);
      xs.push_back(std::log(h));
      ys.push_back(rem);
    }
    EXPECT_GE(fit_log_slope(xs, ys), l - 0.1) << "l=" << l;
  }
}

TEST(Conjugation, Residual) {
  auto c = two_factor({1.0, 1.0}, {0, 1, 0.5}, {0, 2, -1});
  EXPECT_EQ(conjugation_residual(c, 0.3, 0.0, 1.0, 3), 0.0);
  std::mt19937_64 rng(3);
  auto rc = random_curve(rng);
  EXPECT_LE(conjugation_residual(rc, 0.4, 3.0, 0.7, 4), 1e-9);
  EXPECT_THROW(conjugation_residual(rc, 0.4, 3.0, 0.0, 4), DomainError);
  EXPECT_THROW(conjugation_residual(rc, 0.4, 13.0, 0.5, 4), PrecisionError);
}

TEST(Translate, Basics) {
  auto c = two_factor({1.0, 1.0}, {0, 1, 0.5}, {0, 2, -1});
  TranslateParams p{0.0, 0.3, 3, 0.0};
  EXPECT_LT(distance(translate_element(c, p), elem_u(c.shape(), c(0.3))), 1e-15);
  EXPECT_LT(distance(direct_translate_element(c, 0.2, 0.0, 0.5), elem_u(c.shape(), c(0.7))), 1e-15);
  TranslateParams bad{1.0, 0.3, 2, 0.5};
  EXPECT_THROW(translate_element(c, bad), ArgumentError);
  EXPECT_THROW(direct_translate_element(c, 0.9, 0.0, 0.5), ArgumentError);
  // Degree < l: Taylor expansion exact.
  TranslateParams q{6.0, 0.4, 3, 0.8};
  auto a = translate_element(c, q);
  auto b = direct_translate_element(c, 0.4, 6.0, 0.8);
  EXPECT_LT(distance(a, b) / a.max_entry(), 1e-13);
  // Truncation at l and l' > deg+1 agree exactly.
  TranslateParams q2 = q;
  q2.l = 6;
  EXPECT_LT(distance(a, translate_element(c, q2)), 1e-15 * a.max_entry());
  EXPECT_LT(a.membership_residual(), 1e-9);
}

TEST(Translate, EntryGrowth) {
  auto c = two_factor({1.0, 0.5}, {0, 1, 0.5}, {0, 2, -1});
  std::vector<double> ts, norms;
  for (double t = 2; t <= 12; t += 1) {
    ts.push_back(t);
    norms.push_back(translate_element(c, {t, 0.3, 5, 0.5}).max_entry());
  }
  EXPECT_NEAR(fit_log_slope(ts, norms), 1.0, 0.05);
}

TEST(Translate, TaylorVsDirectSlope) {
  auto c = two_factor({1.0, 1.0}, {0, 1, 0, 0, 0, 1}, {0, 1, 0, 0, 0, -0.5});
  std::vector<double> ts, diffs;
  for (double t = 4; t <= 12; t += 0.5) {
    ts.push_back(t);
    diffs.push_back(distance(translate_element(c, {t, 0.3, 5, 1.0}), direct_translate_element(c, 0.3, t, 1.0)));
  }
  double expected = 0.5 * 5 - 1.0;
  EXPECT_NEAR(-fit_log_slope(ts, diffs), expected, 0.2 * expected);
}

TEST(WDirection, TieRule) {
  auto eq = two_factor({1.0, 1.0}, {0, 1}, {0, 2});
  EXPECT_EQ(w_k1_direction(eq, 0.5).k1, 2);
  auto drop = two_factor({2.0, 1.0}, {0, 1}, {0, 2});
  auto w = w_k1_direction(drop, 0.5);
  EXPECT_EQ(w.k1, 1);
  EXPECT_DOUBLE_EQ(w.w[0][0], 1.0);
  EXPECT_DOUBLE_EQ(w.w[1][0], 0.0);
  auto flat = two_factor({1.0, 1.0}, {0, 1}, {0, 0, 1});
  EXPECT_THROW(w_k1_direction(flat, 0.0), DomainError);
}

TEST(UnipotentInvariance, ZeroShiftAndRates) {
  auto c = two_factor({1.0, 0.8}, {0, 1, 0.7}, {0, 1.5, -0.6});
  EXPECT_EQ(unipotent_invariance_residual(c, 0.4, 0.4, 5.0, 0.0, 3).residual, 0.0);
  EXPECT_DOUBLE_EQ(unipotent_invariance_residual(c, 0.4, 0.4, 5.0, 1.0, 3).alpha, 0.2);
  CurveSpec one(ProductShape({2}, {1.0}), {{Polynomial({0, 1, 1})}});
  EXPECT_DOUBLE_EQ(unipotent_invariance_residual(one, 0.4, 0.4, 5.0, 1.0, 3).alpha, 0.5);

  // The closed form (max over the eta grid) dominates the matrix computation at each grid eta.
  for (double t : {1.0, 3.0, 5.0}) {
    const double closed = unipotent_invariance_residual(c, 0.4, 0.45, t, 0.8, 3, 6).residual;
    double worst = 0.0;
    for (double eta : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      worst = std::max(worst, unipotent_invariance_residual_matrix(c, 0.4, 0.45, t, 0.8, 3, eta));
    }
    EXPECT_NEAR(worst, closed, 1e-9 * std::exp(2 * t));
  }
}

TEST(UnipotentInvariance, DecaySlopes) {
  auto unequal = two_factor({1.0, 0.8}, {0, 1, 0.7}, {0, 1.5, -0.6});
  auto equal = two_factor({1.0, 1.0}, {0, 1, 0.7}, {0, 1.5, -0.6});
  for (const auto* c : {&unequal, &equal}) {
    std::vector<double> ts, res;
    double alpha = 0.0;
    for (double t = 4; t <= 12; t += 0.5) {
      auto u = unipotent_invariance_residual(*c, 0.4, 0.4, t, 1.0, 3);
      ts.push_back(t);
      res.push_back(u.residual);
      alpha = u.alpha;
    }
    EXPECT_NEAR(-fit_log_slope(ts, res), alpha, 0.2 * alpha);
  }
}
