#pragma once

// SO(n,1) in the light-cone model Q_n(x) = 2 x_0 x_n - (x_1^2 + ... + x_{n-1}^2),
// its horospherical coordinates, and k-fold products with a diagonal flow.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace horolab {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// One vector per factor of a product shape; factor i has length n_i - 1.
using BlockVector = std::vector<Vector>;

/// Max-abs entry of a matrix (0 for empty).
double max_norm(const Matrix& m);

class QuadraticSpace {
 public:
  explicit QuadraticSpace(int n);

  int n() const noexcept { return n_; }
  int dim() const noexcept { return n_ + 1; }

  /// Gram matrix J of the bilinear form: J[0][n] = J[n][0] = 1, J[i][i] = -1.
  Matrix gram() const;

  bool operator==(const QuadraticSpace& other) const noexcept { return n_ == other.n_; }

 private:
  int n_;
};

/// An element of SO(Q_n) stored as a dense (n+1)x(n+1) matrix.
///
/// Construction from a raw matrix validates membership:
/// |g^T J g - J|_inf <= tol * max(1, |g|_max^2) and det g = 1 within the same
/// relative tolerance. Products and the named constructors below are trusted
/// and skip the check.
class GroupElement {
 public:
  static constexpr double kMembershipTolerance = 1e-9;

  GroupElement(QuadraticSpace space, Matrix mat, double tol = kMembershipTolerance);

  static GroupElement identity(QuadraticSpace space);
  static GroupElement trusted(QuadraticSpace space, Matrix mat);

  const QuadraticSpace& space() const noexcept { return space_; }
  int n() const noexcept { return space_.n(); }
  const Matrix& matrix() const noexcept { return mat_; }

  GroupElement operator*(const GroupElement& rhs) const;
  /// g^{-1} = J g^T J.
  GroupElement inverse() const;

  /// |g^T J g - J|_inf / max(1, |g|_max^2).
  double membership_residual() const;
  bool is_member(double tol = kMembershipTolerance) const;

 private:
  GroupElement(QuadraticSpace space, Matrix mat, std::nullptr_t);

  QuadraticSpace space_;
  Matrix mat_;
};

/// Unit vector in R^n representing a point of the boundary sphere P^-\G = S^{n-1}.
class BoundaryPoint {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  explicit BoundaryPoint(Vector coords);

  const Vector& coords() const noexcept { return coords_; }
  int size() const noexcept { return static_cast<int>(coords_.size()); }

 private:
  Vector coords_;
};

double q_eval(const QuadraticSpace& space, std::span<const double> v);
double q_eval(const QuadraticSpace& space, const Vector& v);

GroupElement elem_u(const QuadraticSpace& space, const Vector& x);
GroupElement elem_u_minus(const QuadraticSpace& space, const Vector& y);
GroupElement elem_a(const QuadraticSpace& space, double t, double zeta);

/// diag(1, 0_{n-1}, -1).
Matrix generator_H(const QuadraticSpace& space);
/// exp(tau * H) = diag(e^tau, I, e^-tau), closed form.
GroupElement exp_H(const QuadraticSpace& space, double tau);

/// x / |x|_2^2. Throws DomainError on the zero vector.
Vector x_inverse(const Vector& x);

/// w = exp(log 2 H) u(X) u^-(-2 X^{-1}) u(X). The result conjugates a(t) to a(-t);
/// this is checked against elem_a with the given rate and a ConsistencyError is
/// raised if the residual exceeds 1e-8.
GroupElement weyl_from_decomposition(const QuadraticSpace& space, const Vector& X, double zeta = 1.0);

/// Null row covector nu = e_0^T g.
Vector null_covector(const GroupElement& g);

/// Sphere chart s(nu) = (sqrt(2) b, a - c) / (a + c) of a null covector nu = (a, b, c),
/// taken with the sign that makes a + c > 0.
BoundaryPoint sphere_point(const Vector& nu);
/// Inverse chart: the null covector ((1+p_n)/2, q/sqrt(2), (1-p_n)/2) with a + c = 1.
Vector null_covector(const BoundaryPoint& p);

/// I(g): the image of g in P^-\G.
BoundaryPoint boundary_point(const GroupElement& g);
/// I(u(x)) in closed form: (sqrt(2) x, 1 - |x|^2/2) / (1 + |x|^2/2).
BoundaryPoint inverse_stereographic(const Vector& x);
/// Right Moebius action of G on its boundary: I(h) . g = I(h g).
BoundaryPoint boundary_act(const BoundaryPoint& p, const GroupElement& g);

enum class BruhatCell { Big, Small };

/// Big iff |nu_0| > tol * |nu|_inf, i.e. g in P^- N.
BruhatCell bruhat_cell(const GroupElement& g, double tol = 1e-12);

struct PMinusFactors {
  Vector y;
  double tau = 0.0;
  Matrix rotation;  // (n-1)x(n-1) block of m, which fixes e_0 and e_n
  Vector x;
};

/// g = u^-(y) a(tau) m u(x) on the big cell (a with the given rate).
PMinusFactors p_minus_factorize(const GroupElement& g, double zeta = 1.0);
/// Rebuild u^-(y) a(tau) m u(x).
GroupElement p_minus_compose(const QuadraticSpace& space, const PMinusFactors& f, double zeta = 1.0);

// ---------------------------------------------------------------------------
// Products G = G_1 x ... x G_k

class ProductShape {
 public:
  /// rates must be positive and non-increasing; m = zeta_k / 2.
  ProductShape(std::vector<int> dims, std::vector<double> rates);

  int k() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const std::vector<double>& rates() const noexcept { return rates_; }
  int dim(int i) const { return dims_.at(i); }
  double rate(int i) const { return rates_.at(i); }
  double m() const noexcept { return m_; }
  QuadraticSpace space(int i) const { return QuadraticSpace(dims_.at(i)); }

  /// Total horospherical dimension sum(n_i - 1).
  int horo_dim() const;
  /// Smallest integer l with l > 2 zeta_1 / zeta_k.
  int min_taylor_order() const;

  bool operator==(const ProductShape& o) const { return dims_ == o.dims_ && rates_ == o.rates_; }

 private:
  std::vector<int> dims_;
  std::vector<double> rates_;
  double m_;
};

class ProductElement {
 public:
  ProductElement(ProductShape shape, std::vector<GroupElement> factors);

  static ProductElement identity(const ProductShape& shape);

  const ProductShape& shape() const noexcept { return shape_; }
  const std::vector<GroupElement>& factors() const noexcept { return factors_; }
  const GroupElement& factor(int i) const { return factors_.at(i); }

  ProductElement operator*(const ProductElement& rhs) const;
  ProductElement inverse() const;

  double membership_residual() const;
  /// Max over factors of the max-abs entry.
  double max_entry() const;

 private:
  ProductShape shape_;
  std::vector<GroupElement> factors_;
};

void check_blocks(const ProductShape& shape, const BlockVector& x);
BlockVector zero_blocks(const ProductShape& shape);

ProductElement elem_u(const ProductShape& shape, const BlockVector& x);
ProductElement elem_u_minus(const ProductShape& shape, const BlockVector& y);
/// a(t) = (a_1(t), ..., a_k(t)) with the shape's rates.
ProductElement elem_a(const ProductShape& shape, double t);
/// exp(tau H_C), H_C = (H_1, ..., H_k).
ProductElement exp_HC(const ProductShape& shape, double tau);

std::vector<BruhatCell> bruhat_cell(const ProductElement& g, double tol = 1e-12);
std::vector<BoundaryPoint> boundary_point(const ProductElement& g);

/// Max-abs difference between two products of the same shape.
double distance(const ProductElement& a, const ProductElement& b);

}  // namespace horolab
