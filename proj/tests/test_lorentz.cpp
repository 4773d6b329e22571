#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "horolab/error.hpp"
#include "horolab/lorentz.hpp"

using namespace horolab;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * g(rng);
  return v;
}

}  // namespace

TEST(QEval, Values) {
  EXPECT_DOUBLE_EQ(q_eval(QuadraticSpace(2), vec({1, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(q_eval(QuadraticSpace(2), vec({1, 1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(q_eval(QuadraticSpace(3), vec({1, 2, 2, 1})), -6.0);
  Vector v = vec({0.3, -1.2, 2.5, 0.7});
  QuadraticSpace q(3);
  EXPECT_NEAR(q_eval(q, v), v.dot(q.gram() * v), 1e-14);
  EXPECT_THROW(q_eval(q, vec({1, 2})), ArgumentError);
}

TEST(ElemU, MatrixAndHomomorphism) {
  QuadraticSpace q2(2);
  EXPECT_EQ(elem_u(q2, vec({0})).matrix(), Matrix::Identity(3, 3));
  Matrix expected(3, 3);
  expected << 1, 1, 0.5, 0, 1, 1, 0, 0, 1;
  EXPECT_LT(max_norm(elem_u(q2, vec({1})).matrix() - expected), 1e-15);
  QuadraticSpace q3(3);
  auto prod = elem_u(q3, vec({1, 2})) * elem_u(q3, vec({3, -1}));
  EXPECT_LT(max_norm(prod.matrix() - elem_u(q3, vec({4, 1})).matrix()), 1e-10);
  EXPECT_THROW(elem_u(q3, vec({1})), ArgumentError);
}

TEST(ElemUMinus, ConjugationAndFirstRow) {
  QuadraticSpace q2(2);
  EXPECT_EQ(elem_u_minus(q2, vec({0})).matrix(), Matrix::Identity(3, 3));
  auto lhs = elem_a(q2, 1, 1) * elem_u_minus(q2, vec({2})) * elem_a(q2, -1, 1);
  EXPECT_LT(max_norm(lhs.matrix() - elem_u_minus(q2, vec({2 * std::exp(-1.0)})).matrix()), 1e-12);
  std::mt19937_64 rng(1);
  QuadraticSpace q4(4);
  auto um = elem_u_minus(q4, random_vec(3, rng));
  EXPECT_DOUBLE_EQ(um.matrix()(0, 0), 1.0);
  for (int j = 1; j < 5; ++j) EXPECT_EQ(um.matrix()(0, j), 0.0);
}

TEST(ElemA, Conjugation) {
  QuadraticSpace q2(2);
  EXPECT_EQ(elem_a(q2, 0, 1).matrix(), Matrix::Identity(3, 3));
  auto c = elem_a(q2, 2, 1) * elem_u(q2, vec({1})) * elem_a(q2, -2, 1);
  EXPECT_LT(max_norm(c.matrix() - elem_u(q2, vec({std::exp(2.0)})).matrix()) / std::exp(4.0), 1e-9);
  Vector v = vec({1, 1, 1});
  EXPECT_NEAR(q_eval(q2, Vector(elem_a(q2, 1, 1).matrix() * v)), 1.0, 1e-12);
  auto s = elem_a(q2, 0.4, 0.7) * elem_a(q2, 1.1, 0.7);
  EXPECT_LT(max_norm(s.matrix() - elem_a(q2, 1.5, 0.7).matrix()), 1e-12);
}

TEST(GeneratorH, ExpAndBracket) {
  QuadraticSpace q2(2);
  Matrix h = generator_H(q2);
  EXPECT_EQ(h.diagonal(), vec({1, 0, -1}));
  EXPECT_LT(max_norm(exp_H(q2, std::log(2.0)).matrix() - Matrix(vec({2, 1, 0.5}).asDiagonal())), 1e-15);
  EXPECT_LT(max_norm(exp_H(q2, 0.3 * 1.7).matrix() - elem_a(q2, 0.3, 1.7).matrix()), 1e-15);
  QuadraticSpace q3(3);
  Matrix nx = elem_u(q3, vec({1, 2})).matrix() - Matrix::Identity(4, 4);
  // degree-1 part of u(x) is the nilpotent generator plus |x|^2/2 corner; take the Lie algebra element directly
  Matrix X = Matrix::Zero(4, 4);
  X(0, 1) = 1; X(0, 2) = 2; X(1, 3) = 1; X(2, 3) = 2;
  Matrix hh = generator_H(q3);
  EXPECT_LT(max_norm(hh * X - X * hh - X), 1e-15);
  (void)nx;
}

TEST(XInverse, Values) {
  EXPECT_LT((x_inverse(vec({1, 0})) - vec({1, 0})).norm(), 1e-15);
  EXPECT_LT((x_inverse(vec({2, 0})) - vec({0.5, 0})).norm(), 1e-15);
  EXPECT_LT((x_inverse(vec({3, 4})) - vec({0.12, 0.16})).norm(), 1e-15);
  Vector x = vec({-0.3, 1.7, 2.2});
  EXPECT_LT((x_inverse(x_inverse(x)) - x).norm(), 1e-14);
  EXPECT_THROW(x_inverse(vec({0, 0})), DomainError);
}

TEST(Weyl, ConjugatesFlow) {
  QuadraticSpace q2(2);
  auto w = weyl_from_decomposition(q2, vec({1}));
  auto c = w * elem_a(q2, 1, 1) * w.inverse();
  EXPECT_LT(max_norm(c.matrix() - elem_a(q2, -1, 1).matrix()), 1e-9);
  auto w2 = w * w;
  auto a = elem_a(q2, 0.8, 1);
  EXPECT_LT(max_norm((w2 * a).matrix() - (a * w2).matrix()), 1e-9);
  EXPECT_EQ(bruhat_cell(w), BruhatCell::Small);
  EXPECT_NEAR(null_covector(w)[0], 0.0, 1e-12);
  QuadraticSpace q5(5);
  std::mt19937_64 rng(3);
  auto w5 = weyl_from_decomposition(q5, random_vec(4, rng), 0.6);
  for (double t : {-2.0, 1.0, 5.0}) {
    auto r = w5 * elem_a(q5, t, 0.6) * w5.inverse() * elem_a(q5, t, 0.6);
    EXPECT_LT(max_norm(r.matrix() - Matrix::Identity(6, 6)), 1e-8);
  }
  EXPECT_LT(w5.membership_residual(), 1e-12);
  EXPECT_THROW(weyl_from_decomposition(q2, vec({0})), DomainError);
}

TEST(BoundaryPoint, Chart) {
  QuadraticSpace q2(2);
  auto p0 = boundary_point(GroupElement::identity(q2));
  EXPECT_LT((p0.coords() - vec({0, 1})).norm(), 1e-15);
  auto p1 = boundary_point(elem_u(q2, vec({1})));
  EXPECT_LT((p1.coords() - vec({2 * std::sqrt(2.0) / 3, 1.0 / 3})).norm(), 1e-15);
  EXPECT_NEAR(p1.coords().norm(), 1.0, 1e-15);
  std::mt19937_64 rng(5);
  QuadraticSpace q4(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = elem_u_minus(q4, random_vec(3, rng)) * elem_a(q4, 0.5, 1) * elem_u(q4, random_vec(3, rng));
    auto p = elem_u_minus(q4, random_vec(3, rng)) * exp_H(q4, std::normal_distribution<double>()(rng));
    EXPECT_LT((boundary_point(p * g).coords() - boundary_point(g).coords()).norm(), 1e-9);
    EXPECT_EQ(bruhat_cell(p * g), bruhat_cell(g));
  }
}

TEST(BoundaryPoint, InverseStereographic) {
  QuadraticSpace q3(3);
  EXPECT_LT((inverse_stereographic(vec({0, 0})).coords() - vec({0, 0, 1})).norm(), 1e-15);
  EXPECT_LT((inverse_stereographic(vec({1})).coords() - vec({2 * std::sqrt(2.0) / 3, 1.0 / 3})).norm(), 1e-15);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = random_vec(2, rng, 3.0);
    auto p = inverse_stereographic(x);
    EXPECT_NEAR(p.coords().norm(), 1.0, 1e-12);
    EXPECT_LT((p.coords() - boundary_point(elem_u(q3, x)).coords()).norm(), 1e-12);
    auto back = null_covector(p);
    EXPECT_NEAR(q_eval(q3, back), 0.0, 1e-12);
  }
}

TEST(BoundaryPoint, RightActionIsAction) {
  QuadraticSpace q3(3);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto h = elem_u(q3, random_vec(2, rng));
    auto g1 = elem_u_minus(q3, random_vec(2, rng)) * elem_a(q3, 0.3, 1);
    auto g2 = elem_u(q3, random_vec(2, rng)) * elem_u_minus(q3, random_vec(2, rng));
    auto lhs = boundary_act(boundary_act(boundary_point(h), g1), g2);
    auto rhs = boundary_point(h * g1 * g2);
    EXPECT_LT((lhs.coords() - rhs.coords()).norm(), 1e-9);
  }
}

TEST(Bruhat, Cells) {
  QuadraticSpace q3(3);
  std::mt19937_64 rng(11);
  EXPECT_EQ(bruhat_cell(elem_u(q3, random_vec(2, rng, 10))), BruhatCell::Big);
  auto g = elem_u_minus(q3, random_vec(2, rng)) * exp_H(q3, 0.7) * elem_u(q3, random_vec(2, rng));
  EXPECT_EQ(bruhat_cell(g), BruhatCell::Big);
}

TEST(PMinus, Factorize) {
  QuadraticSpace q2(2);
  auto f = p_minus_factorize(elem_u(q2, vec({0.4})));
  EXPECT_LT(f.y.norm(), 1e-15);
  EXPECT_NEAR(f.tau, 0.0, 1e-15);
  EXPECT_NEAR(f.x[0], 0.4, 1e-15);
  auto f2 = p_minus_factorize(elem_u_minus(q2, vec({2})) * elem_a(q2, 1, 1));
  EXPECT_NEAR(f2.tau, 1.0, 1e-14);
  EXPECT_NEAR(f2.y[0], 2.0, 1e-14);
  EXPECT_LT(f2.x.norm(), 1e-14);

  QuadraticSpace q4(4);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    // a random element: product of random generators including a Weyl-type rotation
    auto g = elem_u(q4, random_vec(3, rng)) * elem_u_minus(q4, random_vec(3, rng)) * elem_a(q4, 0.9, 1) *
             elem_u(q4, random_vec(3, rng));
    if (bruhat_cell(g) != BruhatCell::Big) continue;
    auto fac = p_minus_factorize(g);
    auto back = p_minus_compose(q4, fac);
    EXPECT_LT(max_norm(back.matrix() - g.matrix()) / std::max(1.0, max_norm(g.matrix())), 1e-8);
    Matrix r = fac.rotation;
    EXPECT_LT(max_norm(r.transpose() * r - Matrix::Identity(3, 3)), 1e-8);
  }
  EXPECT_THROW(p_minus_factorize(weyl_from_decomposition(q2, vec({1}))), DomainError);
}

TEST(Membership, RandomProducts) {
  QuadraticSpace q3(3);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = GroupElement::identity(q3);
    for (int j = 0; j < 20; ++j) {
      switch (pick(rng)) {
        case 0: g = g * elem_u(q3, random_vec(2, rng)); break;
        case 1: g = g * elem_u_minus(q3, random_vec(2, rng)); break;
        default: g = g * elem_a(q3, std::normal_distribution<double>()(rng), 1); break;
      }
    }
    EXPECT_LT(g.membership_residual(), 1e-8);
  }
  Matrix bad = Matrix::Identity(4, 4);
  bad(0, 0) = 2;
  EXPECT_THROW(GroupElement(q3, bad), ConsistencyError);
}

TEST(Product, ShapeAndElements) {
  EXPECT_THROW(ProductShape({2, 2}, {0.5, 1.0}), ArgumentError);
  EXPECT_THROW(ProductShape({1}, {1.0}), ArgumentError);
  ProductShape shape({2, 3}, {1.0, 0.8});
  EXPECT_DOUBLE_EQ(shape.m(), 0.4);
  EXPECT_EQ(shape.min_taylor_order(), 3);
  EXPECT_EQ(ProductShape({2, 2}, {1.0, 1.0}).min_taylor_order(), 3);
  BlockVector x{vec({0.3}), vec({1, -2})};
  auto g = elem_a(shape, 1.5) * elem_u(shape, x) * elem_a(shape, -1.5);
  BlockVector xs{x[0] * std::exp(1.5), x[1] * std::exp(1.2)};
  EXPECT_LT(distance(g, elem_u(shape, xs)), 1e-12);
  auto cells = bruhat_cell(g);
  EXPECT_EQ(cells.size(), 2u);
  EXPECT_LT(distance(g * g.inverse(), ProductElement::identity(shape)), 1e-12);
}
