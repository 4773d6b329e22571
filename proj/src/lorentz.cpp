#include "horolab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "horolab/error.hpp"

namespace horolab {

namespace {

void require_length(const Vector& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw ArgumentError(std::string(what) + ": expected length " + std::to_string(expected) +
                        ", got " + std::to_string(v.size()));
  }
}

}  // namespace

double max_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

QuadraticSpace::QuadraticSpace(int n) : n_(n) {
  if (n < 2) throw ArgumentError("QuadraticSpace: n must be >= 2, got " + std::to_string(n));
}

Matrix QuadraticSpace::gram() const {
  Matrix j = Matrix::Zero(dim(), dim());
  j(0, n_) = 1.0;
  j(n_, 0) = 1.0;
  for (int i = 1; i < n_; ++i) j(i, i) = -1.0;
  return j;
}

// ---------------------------------------------------------------------------

GroupElement::GroupElement(QuadraticSpace space, Matrix mat, std::nullptr_t)
    : space_(space), mat_(std::move(mat)) {}

GroupElement::GroupElement(QuadraticSpace space, Matrix mat, double tol)
    : space_(space), mat_(std::move(mat)) {
  if (mat_.rows() != space_.dim() || mat_.cols() != space_.dim()) {
    throw ArgumentError("GroupElement: matrix must be " + std::to_string(space_.dim()) + "x" +
                        std::to_string(space_.dim()));
  }
  const double res = membership_residual();
  if (!(res <= tol)) {
    throw ConsistencyError("GroupElement: matrix does not preserve Q_n (residual " +
                           std::to_string(res) + ")");
  }
  const double scale = std::max(1.0, max_norm(mat_));
  const double det = mat_.determinant();
  if (!(std::abs(det - 1.0) <= tol * std::pow(scale, space_.dim()))) {
    throw ConsistencyError("GroupElement: determinant " + std::to_string(det) + " is not 1");
  }
}

GroupElement GroupElement::identity(QuadraticSpace space) {
  return GroupElement(space, Matrix::Identity(space.dim(), space.dim()), nullptr);
}

GroupElement GroupElement::trusted(QuadraticSpace space, Matrix mat) {
  if (mat.rows() != space.dim() || mat.cols() != space.dim()) {
    throw ArgumentError("GroupElement: matrix has wrong size");
  }
  return GroupElement(space, std::move(mat), nullptr);
}

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  if (!(space_ == rhs.space_)) throw ArgumentError("GroupElement: product of different dimensions");
  return GroupElement(space_, mat_ * rhs.mat_, nullptr);
}

GroupElement GroupElement::inverse() const {
  const Matrix j = space_.gram();
  return GroupElement(space_, j * mat_.transpose() * j, nullptr);
}

double GroupElement::membership_residual() const {
  const Matrix j = space_.gram();
  const double scale = std::max(1.0, max_norm(mat_));
  return max_norm(mat_.transpose() * j * mat_ - j) / (scale * scale);
}

bool GroupElement::is_member(double tol) const { return membership_residual() <= tol; }

// ---------------------------------------------------------------------------

BoundaryPoint::BoundaryPoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 1) throw ArgumentError("BoundaryPoint: empty coordinates");
  const double norm = coords_.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    if (std::abs(norm - 1.0) <= 1e-9) {
      coords_ /= norm;
    } else {
      throw ConsistencyError("BoundaryPoint: not a unit vector (norm " + std::to_string(norm) + ")");
    }
  }
}

// ---------------------------------------------------------------------------

double q_eval(const QuadraticSpace& space, std::span<const double> v) {
  const int n = space.n();
  if (static_cast<int>(v.size()) != n + 1) {
    throw ArgumentError("q_eval: expected length " + std::to_string(n + 1) + ", got " +
                        std::to_string(v.size()));
  }
  double q = 2.0 * v[0] * v[n];
  for (int i = 1; i < n; ++i) q -= v[i] * v[i];
  return q;
}

double q_eval(const QuadraticSpace& space, const Vector& v) {
  return q_eval(space, std::span<const double>(v.data(), static_cast<size_t>(v.size())));
}

GroupElement elem_u(const QuadraticSpace& space, const Vector& x) {
  const int n = space.n();
  require_length(x, n - 1, "elem_u");
  Matrix m = Matrix::Identity(n + 1, n + 1);
  for (int j = 0; j < n - 1; ++j) {
    m(0, j + 1) = x[j];
    m(j + 1, n) = x[j];
  }
  m(0, n) = 0.5 * x.squaredNorm();
  return GroupElement::trusted(space, std::move(m));
}

GroupElement elem_u_minus(const QuadraticSpace& space, const Vector& y) {
  const int n = space.n();
  require_length(y, n - 1, "elem_u_minus");
  Matrix m = Matrix::Identity(n + 1, n + 1);
  for (int j = 0; j < n - 1; ++j) {
    m(j + 1, 0) = y[j];
    m(n, j + 1) = y[j];
  }
  m(n, 0) = 0.5 * y.squaredNorm();
  return GroupElement::trusted(space, std::move(m));
}

GroupElement elem_a(const QuadraticSpace& space, double t, double zeta) {
  if (!(zeta > 0.0)) throw ArgumentError("elem_a: rate must be positive");
  return exp_H(space, zeta * t);
}

Matrix generator_H(const QuadraticSpace& space) {
  Matrix h = Matrix::Zero(space.dim(), space.dim());
  h(0, 0) = 1.0;
  h(space.n(), space.n()) = -1.0;
  return h;
}

GroupElement exp_H(const QuadraticSpace& space, double tau) {
  Matrix m = Matrix::Identity(space.dim(), space.dim());
  m(0, 0) = std::exp(tau);
  m(space.n(), space.n()) = std::exp(-tau);
  return GroupElement::trusted(space, std::move(m));
}

Vector x_inverse(const Vector& x) {
  const double n2 = x.squaredNorm();
  if (!(n2 > 0.0)) throw DomainError("x_inverse: zero vector");
  return x / n2;
}

GroupElement weyl_from_decomposition(const QuadraticSpace& space, const Vector& X, double zeta) {
  require_length(X, space.n() - 1, "weyl_from_decomposition");
  if (!(X.squaredNorm() > 0.0)) throw DomainError("weyl_from_decomposition: X must be nonzero");
  const GroupElement ux = elem_u(space, X);
  GroupElement w = exp_H(space, std::log(2.0)) * ux * elem_u_minus(space, -2.0 * x_inverse(X)) * ux;

  // w a(1) w^{-1} a(1) should be the identity.
  const GroupElement a1 = elem_a(space, 1.0, zeta);
  const Matrix check = (w * a1 * w.inverse() * a1).matrix();
  const double res = max_norm(check - Matrix::Identity(space.dim(), space.dim()));
  if (!(res <= 1e-8 * std::max(1.0, max_norm(w.matrix()) * max_norm(w.matrix())))) {
    throw ConsistencyError("weyl_from_decomposition: conjugation residual " + std::to_string(res));
  }
  return w;
}

Vector null_covector(const GroupElement& g) { return g.matrix().row(0).transpose(); }

BoundaryPoint sphere_point(const Vector& nu_in) {
  const int n = static_cast<int>(nu_in.size()) - 1;
  if (n < 2) throw ArgumentError("sphere_point: covector too short");
  Vector nu = nu_in;
  const double scale = nu.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw DomainError("sphere_point: zero covector");
  nu /= scale;
  double a = nu[0];
  double c = nu[n];
  Vector b = nu.segment(1, n - 1);
  if (a + c < 0.0) {
    a = -a;
    c = -c;
    b = -b;
  }
  const double nullity = 2.0 * a * c - b.squaredNorm();
  if (!(std::abs(nullity) <= 1e-8)) {
    throw ConsistencyError("sphere_point: covector is not null (Q = " + std::to_string(nullity) + ")");
  }
  const double denom = a + c;
  if (!(denom > 0.0)) throw ConsistencyError("sphere_point: a + c vanished for a null covector");
  Vector s(n);
  s.head(n - 1) = std::sqrt(2.0) * b / denom;
  s[n - 1] = (a - c) / denom;
  return BoundaryPoint(s / s.norm());
}

Vector null_covector(const BoundaryPoint& p) {
  const int n = p.size();
  Vector nu(n + 1);
  const double pn = p.coords()[n - 1];
  nu[0] = 0.5 * (1.0 + pn);
  nu.segment(1, n - 1) = p.coords().head(n - 1) / std::sqrt(2.0);
  nu[n] = 0.5 * (1.0 - pn);
  return nu;
}

BoundaryPoint boundary_point(const GroupElement& g) { return sphere_point(null_covector(g)); }

BoundaryPoint inverse_stereographic(const Vector& x) {
  const int n = static_cast<int>(x.size()) + 1;
  const double half = 0.5 * x.squaredNorm();
  Vector s(n);
  s.head(n - 1) = std::sqrt(2.0) * x / (1.0 + half);
  s[n - 1] = (1.0 - half) / (1.0 + half);
  return BoundaryPoint(s);
}

BoundaryPoint boundary_act(const BoundaryPoint& p, const GroupElement& g) {
  if (p.size() != g.n()) throw ArgumentError("boundary_act: point and group dimension differ");
  const Vector nu = (null_covector(p).transpose() * g.matrix()).transpose();
  return sphere_point(nu);
}

BruhatCell bruhat_cell(const GroupElement& g, double tol) {
  const Vector nu = null_covector(g);
  const double scale = nu.cwiseAbs().maxCoeff();
  return std::abs(nu[0]) > tol * scale ? BruhatCell::Big : BruhatCell::Small;
}

PMinusFactors p_minus_factorize(const GroupElement& g, double zeta) {
  if (bruhat_cell(g) != BruhatCell::Big) {
    throw DomainError("p_minus_factorize: element lies in the small Bruhat cell");
  }
  const QuadraticSpace& space = g.space();
  const int n = space.n();
  const Vector nu = null_covector(g);
  if (!(nu[0] > 0.0)) {
    throw DomainError("p_minus_factorize: element is outside the identity component (nu_0 < 0)");
  }
  PMinusFactors f;
  f.x = nu.segment(1, n - 1) / nu[0];
  const Matrix p = (g * elem_u(space, -f.x)).matrix();
  f.tau = std::log(p(0, 0)) / zeta;
  f.y = p.block(1, 0, n - 1, 1) / p(0, 0);
  f.rotation = p.block(1, 1, n - 1, n - 1);
  return f;
}

GroupElement p_minus_compose(const QuadraticSpace& space, const PMinusFactors& f, double zeta) {
  const int n = space.n();
  Matrix m = Matrix::Identity(n + 1, n + 1);
  m.block(1, 1, n - 1, n - 1) = f.rotation;
  return elem_u_minus(space, f.y) * elem_a(space, f.tau, zeta) * GroupElement::trusted(space, m) *
         elem_u(space, f.x);
}

// ---------------------------------------------------------------------------

ProductShape::ProductShape(std::vector<int> dims, std::vector<double> rates)
    : dims_(std::move(dims)), rates_(std::move(rates)) {
  if (dims_.empty()) throw ArgumentError("ProductShape: k must be >= 1");
  if (dims_.size() != rates_.size()) throw ArgumentError("ProductShape: dims and rates differ in length");
  for (int d : dims_) {
    if (d < 2) throw ArgumentError("ProductShape: every n_i must be >= 2");
  }
  for (size_t i = 0; i < rates_.size(); ++i) {
    if (!(rates_[i] > 0.0) || !std::isfinite(rates_[i])) {
      throw ArgumentError("ProductShape: rates must be positive");
    }
    if (i > 0 && rates_[i] > rates_[i - 1]) {
      throw ArgumentError("ProductShape: rates must be non-increasing");
    }
  }
  m_ = rates_.back() / 2.0;
}

int ProductShape::horo_dim() const {
  int total = 0;
  for (int d : dims_) total += d - 1;
  return total;
}

int ProductShape::min_taylor_order() const {
  const double bound = 2.0 * rates_.front() / rates_.back();
  return static_cast<int>(std::floor(bound + 1e-12)) + 1;
}

ProductElement::ProductElement(ProductShape shape, std::vector<GroupElement> factors)
    : shape_(std::move(shape)), factors_(std::move(factors)) {
  if (static_cast<int>(factors_.size()) != shape_.k()) {
    throw ArgumentError("ProductElement: expected " + std::to_string(shape_.k()) + " factors");
  }
  for (int i = 0; i < shape_.k(); ++i) {
    if (factors_[i].n() != shape_.dim(i)) throw ArgumentError("ProductElement: factor dimension mismatch");
  }
}

ProductElement ProductElement::identity(const ProductShape& shape) {
  std::vector<GroupElement> f;
  for (int i = 0; i < shape.k(); ++i) f.push_back(GroupElement::identity(shape.space(i)));
  return ProductElement(shape, std::move(f));
}

ProductElement ProductElement::operator*(const ProductElement& rhs) const {
  if (!(shape_.dims() == rhs.shape_.dims())) throw ArgumentError("ProductElement: shape mismatch");
  std::vector<GroupElement> f;
  for (int i = 0; i < shape_.k(); ++i) f.push_back(factors_[i] * rhs.factors_[i]);
  return ProductElement(shape_, std::move(f));
}

ProductElement ProductElement::inverse() const {
  std::vector<GroupElement> f;
  for (const auto& g : factors_) f.push_back(g.inverse());
  return ProductElement(shape_, std::move(f));
}

double ProductElement::membership_residual() const {
  double r = 0.0;
  for (const auto& g : factors_) r = std::max(r, g.membership_residual());
  return r;
}

double ProductElement::max_entry() const {
  double r = 0.0;
  for (const auto& g : factors_) r = std::max(r, max_norm(g.matrix()));
  return r;
}

void check_blocks(const ProductShape& shape, const BlockVector& x) {
  if (static_cast<int>(x.size()) != shape.k()) {
    throw ArgumentError("block vector has " + std::to_string(x.size()) + " blocks, expected " +
                        std::to_string(shape.k()));
  }
  for (int i = 0; i < shape.k(); ++i) {
    if (x[i].size() != shape.dim(i) - 1) {
      throw ArgumentError("block " + std::to_string(i) + " has wrong length");
    }
  }
}

BlockVector zero_blocks(const ProductShape& shape) {
  BlockVector x;
  for (int i = 0; i < shape.k(); ++i) x.push_back(Vector::Zero(shape.dim(i) - 1));
  return x;
}

ProductElement elem_u(const ProductShape& shape, const BlockVector& x) {
  check_blocks(shape, x);
  std::vector<GroupElement> f;
  for (int i = 0; i < shape.k(); ++i) f.push_back(elem_u(shape.space(i), x[i]));
  return ProductElement(shape, std::move(f));
}

ProductElement elem_u_minus(const ProductShape& shape, const BlockVector& y) {
  check_blocks(shape, y);
  std::vector<GroupElement> f;
  for (int i = 0; i < shape.k(); ++i) f.push_back(elem_u_minus(shape.space(i), y[i]));
  return ProductElement(shape, std::move(f));
}

ProductElement elem_a(const ProductShape& shape, double t) {
  std::vector<GroupElement> f;
  for (int i = 0; i < shape.k(); ++i) f.push_back(elem_a(shape.space(i), t, shape.rate(i)));
  return ProductElement(shape, std::move(f));
}

ProductElement exp_HC(const ProductShape& shape, double tau) {
  std::vector<GroupElement> f;
  for (int i = 0; i < shape.k(); ++i) f.push_back(exp_H(shape.space(i), tau));
  return ProductElement(shape, std::move(f));
}

std::vector<BruhatCell> bruhat_cell(const ProductElement& g, double tol) {
  std::vector<BruhatCell> cells;
  for (const auto& f : g.factors()) cells.push_back(bruhat_cell(f, tol));
  return cells;
}

std::vector<BoundaryPoint> boundary_point(const ProductElement& g) {
  std::vector<BoundaryPoint> pts;
  for (const auto& f : g.factors()) pts.push_back(boundary_point(f));
  return pts;
}

double distance(const ProductElement& a, const ProductElement& b) {
  if (!(a.shape().dims() == b.shape().dims())) throw ArgumentError("distance: shape mismatch");
  double d = 0.0;
  for (int i = 0; i < a.shape().k(); ++i) {
    d = std::max(d, max_norm(a.factor(i).matrix() - b.factor(i).matrix()));
  }
  return d;
}

}  // namespace horolab
