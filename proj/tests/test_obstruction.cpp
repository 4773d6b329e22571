#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "horolab/error.hpp"
#include "horolab/obstruction.hpp"

using namespace horolab;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_unit(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(m);
  for (int i = 0; i < m; ++i) v[i] = g(rng);
  return v / v.norm();
}

GroupElement random_mobius(int n, std::mt19937_64& rng) {
  QuadraticSpace q(n);
  std::normal_distribution<double> g;
  Vector x(n - 1), y(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    x[i] = g(rng);
    y[i] = 0.5 * g(rng);
  }
  return elem_u(q, x) * elem_u_minus(q, y) * exp_H(q, 0.5 * g(rng));
}

Vector random_null(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n + 1);
  for (int i = 1; i < n; ++i) v[i] = g(rng);
  double vn = g(rng);
  if (std::abs(vn) < 0.2) vn = vn < 0 ? -0.2 : 0.2;
  v[n] = vn;
  v[0] = v.segment(1, n - 1).squaredNorm() / (2 * vn);
  return v;
}

}  // namespace

TEST(MobiusSpec, Validation) {
  ProductShape shape({2, 3, 2}, {1.0, 1.0, 0.5});
  std::vector<GroupElement> ids{GroupElement::identity(QuadraticSpace(2)), GroupElement::identity(QuadraticSpace(3)),
                                GroupElement::identity(QuadraticSpace(2))};
  EXPECT_NO_THROW(MobiusEmbeddingSpec(shape, {{0, 1}, {2}}, {2, 1}, ids));
  EXPECT_THROW(MobiusEmbeddingSpec(shape, {{0, 2}, {1}}, {2, 1}, ids), ArgumentError);   // mixed rates
  EXPECT_THROW(MobiusEmbeddingSpec(shape, {{0, 1}}, {2}, ids), ArgumentError);           // not covering
  EXPECT_THROW(MobiusEmbeddingSpec(shape, {{0, 1}, {1, 2}}, {2, 1}, ids), ArgumentError);  // overlap
  EXPECT_THROW(MobiusEmbeddingSpec(shape, {{0, 1}, {2}}, {3, 1}, ids), ArgumentError);   // m > min n
}

TEST(Embed, DiagonalAndSingletons) {
  ProductShape shape({2, 2}, {1.0, 1.0});
  auto diag = MobiusEmbeddingSpec::diagonal(shape);
  Vector p = vec({0.6, 0.8});
  auto pts = embed_point(diag, {p});
  EXPECT_LT((pts[0].coords() - p).norm(), 1e-15);
  EXPECT_LT((pts[1].coords() - p).norm(), 1e-15);

  QuadraticSpace q(2);
  MobiusEmbeddingSpec contracted(shape, {{0, 1}}, {2}, {elem_a(q, 2.0, 1.0), elem_a(q, 2.0, 1.0)});
  auto c = embed_point(contracted, {p});
  EXPECT_NEAR(c[0].coords().norm(), 1.0, 1e-12);

  ProductShape three({3, 2}, {1.0, 1.0});
  std::mt19937_64 rng(1);
  MobiusEmbeddingSpec singles(three, {{0}, {1}}, {1, 1}, {random_mobius(3, rng), random_mobius(2, rng)});
  auto a = embed_point(singles, {vec({1}), vec({1})});
  auto b = embed_point(singles, {vec({-1}), vec({-1})});
  for (int j = 0; j < 2; ++j) EXPECT_LT((a[j].coords() - b[j].coords()).norm(), 1e-15);
}

TEST(Distance, RoundTripAndMetric) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    ProductShape shape({3, 3, 2}, {1.0, 1.0, 0.6});
    const int m = 1 + static_cast<int>(rng() % 3);
    MobiusEmbeddingSpec spec(shape, {{0, 1}, {2}}, {m, 1 + static_cast<int>(rng() % 2)},
                             {random_mobius(3, rng), random_mobius(3, rng), random_mobius(2, rng)});
    auto pts = embed_point(spec, {random_unit(m, rng), random_unit(spec.m()[1], rng)});
    EXPECT_TRUE(is_on(pts, spec, 1e-8));
  }
  ProductShape shape({2, 2}, {1.0, 1.0});
  auto diag = MobiusEmbeddingSpec::diagonal(shape);
  const double a = 0.3, b = a + 2 * std::asin(0.15);  // chord length 0.3
  std::vector<BoundaryPoint> pq{BoundaryPoint(vec({std::cos(a), std::sin(a)})), BoundaryPoint(vec({std::cos(b), std::sin(b)}))};
  EXPECT_GE(distance_to_obstruction(pq, diag), 0.3 / std::sqrt(2.0));

  ProductShape s3({3, 3}, {1.0, 1.0});
  MobiusEmbeddingSpec sub(s3, {{0, 1}}, {2}, {GroupElement::identity(QuadraticSpace(3)), GroupElement::identity(QuadraticSpace(3))});
  Vector core = vec({0.6, 0.8});
  Vector pert = include_sphere(core, 3);
  pert[0] += 1e-3;
  pert /= pert.norm();
  std::vector<BoundaryPoint> near{BoundaryPoint(pert), BoundaryPoint(include_sphere(core, 3))};
  EXPECT_NEAR(distance_to_obstruction(near, sub), 1e-3, 1e-5);
}

TEST(CurveMeasure, DiagonalAndGeneric) {
  ProductShape shape({2, 2}, {1.0, 1.0});
  auto diag = MobiusEmbeddingSpec::diagonal(shape);
  CurveSpec same(shape, {{Polynomial({0, 1, 0.5})}, {Polynomial({0, 1, 0.5})}});
  EXPECT_DOUBLE_EQ(curve_obstruction_measure(same, diag, 1e-9, 257), 1.0);
  CurveSpec generic(shape, {{Polynomial({0.1, 1, 0.5})}, {Polynomial({-0.3, 2, -0.4})}});
  EXPECT_DOUBLE_EQ(curve_obstruction_measure(generic, diag, 1e-6, 257), 0.0);
  // phi_2 crosses phi_1 once at s = 0.5
  CurveSpec crossing(shape, {{Polynomial({0, 1})}, {Polynomial({-0.5, 2})}});
  EXPECT_LE(curve_obstruction_measure(crossing, diag, 1e-6, 1001), 2.0 / 1001);
}

TEST(Nonclosed, Constants) {
  ProductShape s2({2}, {1.0});
  UnstableDirectionSpec a(s2, {1}, {vec({2, 2, 1})});
  auto x = nonclosed_constant(a, 0);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR((*x)[0], -2.0, 1e-15);
  EXPECT_NEAR(leading_coefficient(vec({2, 2, 1}), *x), 0.0, 1e-15);
  UnstableDirectionSpec e0(s2, {1}, {vec({1, 0, 0})});
  EXPECT_FALSE(nonclosed_constant(e0, 0).has_value());
  ProductShape s3({3}, {1.0});
  UnstableDirectionSpec b(s3, {1}, {vec({1, 1, 1, 1})});
  auto y = nonclosed_constant(b, 0);
  ASSERT_TRUE(y.has_value());
  EXPECT_LT((*y - vec({-1, -1})).norm(), 1e-15);
  EXPECT_THROW(UnstableDirectionSpec(s2, {1}, {vec({1, 1, 1})}), ConsistencyError);
}

TEST(GrowthProbe, ThreePointClassification) {
  std::mt19937_64 rng(3);
  std::vector<double> ladder;
  for (int t = 0; t <= 12; ++t) ladder.push_back(t);
  for (int trial = 0; trial < 100; ++trial) {
    ProductShape shape({2, 3}, {1.0, trial % 2 ? 1.0 : 0.7});
    std::vector<int> powers{1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2)};
    UnstableDirectionSpec spec(shape, powers, {random_null(2, rng), random_null(3, rng)});
    for (int i = 0; i < 2; ++i) {
      auto c = nonclosed_constant(spec, i);
      ASSERT_TRUE(c.has_value());
      BlockVector base{random_unit(1, rng), random_unit(2, rng)};
      for (int coord = 0; coord < shape.dim(i) - 1; ++coord) {
        for (double delta : {0.0, -0.25, 0.25}) {
          BlockVector x = base;
          x[i] = *c;
          x[i][coord] += delta;
          auto probe = unstable_growth_probe(spec, x, ladder);
          EXPECT_LE(probe.max_disagreement, 1e-8);
          EXPECT_EQ(probe.factor_growth[i], delta == 0.0 ? Growth::Bounded : Growth::Exponential)
              << "trial " << trial << " factor " << i << " delta " << delta;
        }
      }
    }
  }
}

TEST(GrowthProbe, OverallClassification) {
  std::vector<double> ladder;
  for (int t = 0; t <= 12; ++t) ladder.push_back(t);
  ProductShape shape({2, 2}, {1.0, 1.0});
  UnstableDirectionSpec spec(shape, {1, 2}, {vec({2, 2, 1}), vec({0.5, 1, 1})});
  auto generic = unstable_growth_probe(spec, {vec({0.3}), vec({0.7})}, ladder);
  EXPECT_EQ(generic.growth, Growth::Exponential);
  EXPECT_NEAR(generic.rate, 3.0, 0.05);
  auto killed = unstable_growth_probe(spec, {*nonclosed_constant(spec, 0), *nonclosed_constant(spec, 1)}, ladder);
  EXPECT_EQ(killed.growth, Growth::Bounded);
  UnstableDirectionSpec none(shape, {0, 0}, {vec({2, 2, 1}), vec({0.5, 1, 1})});
  EXPECT_EQ(unstable_growth_probe(none, {vec({0.3}), vec({0.7})}, ladder).growth, Growth::Bounded);
}

TEST(Diagnostics, MobiusPerFactor) {
  const ProductShape shape({3, 3}, {1.0, 1.0});
  const CurveSpec diag(shape, {{Polynomial({0, 1}), Polynomial({0.2, 0, 1})}, {Polynomial({0, 1}), Polynomial({0.2, 0, 1})}});
  const auto d = diagnose_obstruction(diag, MobiusEmbeddingSpec::diagonal(shape), 1e-9, 101);
  EXPECT_EQ(d.measure, 1.0);
  ASSERT_EQ(d.factors.size(), 2u);
  EXPECT_EQ(d.factors[0].block, 0);
  EXPECT_EQ(d.factors[1].on_fraction, 1.0);

  // With x_1 = 0 each factor stays on the included circle (last two sphere coordinates),
  // but the factors disagree.
  const CurveSpec flat(shape, {{Polynomial(), Polynomial({0, 1})}, {Polynomial(), Polynomial({0.5, 1})}});
  const MobiusEmbeddingSpec sub(shape, {{0, 1}}, {2},
                                {GroupElement::identity(shape.space(0)), GroupElement::identity(shape.space(1))});
  const auto f = diagnose_obstruction(flat, sub, 1e-9, 101);
  EXPECT_EQ(f.measure, 0.0);
  EXPECT_EQ(f.factors[0].on_fraction, 1.0);
  EXPECT_EQ(f.factors[1].on_fraction, 1.0);
  EXPECT_GT(f.min_distance, 0.1);
  EXPECT_EQ(curve_obstruction_measure(flat, sub, 1e-9, 101), f.measure);
}

TEST(Diagnostics, UnstableConstants) {
  const ProductShape shape({2, 2}, {1.0, 1.0});
  // v = (2, 2, 1) gives the constant x = -2; (1, 0, 0) gives none.
  Vector v1(3), v2(3);
  v1 << 2, 2, 1;
  v2 << 1, 0, 0;
  const UnstableDirectionSpec spec(shape, {1, 1}, {v1, v2});
  const CurveSpec through(shape, {{Polynomial({-2.5, 1})}, {Polynomial({0, 1})}});
  const auto d = diagnose_obstruction(through, spec, 1e-9, 101);
  EXPECT_TRUE(d.factors[0].constrained);
  EXPECT_FALSE(d.factors[1].constrained);
  EXPECT_NEAR(d.factors[0].constant[0], -2.0, 1e-15);
  EXPECT_NEAR(d.factors[0].argmin_s, 0.5, 1e-12);
  EXPECT_NEAR(d.measure, 1.0 / 101, 1e-15);

  const CurveSpec constant(shape, {{Polynomial({-2.0})}, {Polynomial({0, 1})}});
  EXPECT_EQ(diagnose_obstruction(constant, spec, 1e-9, 11).measure, 1.0);
}
