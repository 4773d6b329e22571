#pragma once

// Polynomial curves phi = (phi_1, ..., phi_k) : [0,1] -> N and their translates
// a(t) u(phi(s + eta e^{-mt})) on shrinking pieces.

#include <vector>

#include "horolab/lorentz.hpp"

namespace horolab {

/// Real polynomial with coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  const std::vector<double>& coeffs() const noexcept { return c_; }
  /// Degree, -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

  double operator()(double s) const;
  /// j-th derivative evaluated at s.
  double derivative(int j, double s) const;
  Polynomial derivative(int j) const;

 private:
  std::vector<double> c_;  // trailing zeros stripped
};

struct RegularityCertificate {
  std::vector<double> min_speed;  // per factor, min over the grid of |phi_i'(s)|_2
  std::vector<double> argmin;     // where it was attained
  bool degenerate = false;        // some min_speed <= 1e-12
};

class CurveSpec {
 public:
  static constexpr int kDefaultMaxDegree = 8;
  static constexpr int kRegularityGrid = 1024;

  /// factors[i][c] is the polynomial of coordinate c of phi_i (n_i - 1 coordinates).
  CurveSpec(ProductShape shape, std::vector<std::vector<Polynomial>> factors, int max_degree = kDefaultMaxDegree);

  const ProductShape& shape() const noexcept { return shape_; }
  const std::vector<std::vector<Polynomial>>& factors() const noexcept { return factors_; }
  int degree() const noexcept { return degree_; }
  const RegularityCertificate& regularity() const noexcept { return regularity_; }

  BlockVector operator()(double s) const;
  BlockVector derivative(int j, double s) const;

 private:
  ProductShape shape_;
  std::vector<std::vector<Polynomial>> factors_;
  int degree_ = 0;
  RegularityCertificate regularity_;
};

/// Largest t accepted in double precision.
constexpr double kDoubleTimeCap = 12.0;

/// Throws PrecisionError when t exceeds kDoubleTimeCap.
void check_time_cap(double t);

struct TranslateParams {
  double t = 0.0;
  double s = 0.0;
  int l = 0;
  double eta = 0.0;

  /// t >= 0, s and eta in [0,1], l > 2 zeta_1 / zeta_k.
  void validate(const ProductShape& shape) const;
};

/// Truncated Taylor polynomial R(h) = sum_{j=1}^{l-1} phi^{(j)}(s)/j! h^j.
struct TaylorData {
  double s = 0.0;
  int l = 0;
  std::vector<BlockVector> coeffs;  // coeffs[j-1] = phi^{(j)}(s)/j!

  const BlockVector& kappa() const { return coeffs.front(); }
  BlockVector R(double h) const;
  /// (R(h) - kappa h) / h. Throws DomainError at h = 0.
  BlockVector epsilon(double h) const;
  /// kappa + epsilon(h) = R(h) / h.
  BlockVector y(double h) const;
};

TaylorData taylor_R(const CurveSpec& curve, double s, int l);

/// |u(R(h)) - exp((-mt + log eta) H_C) u(y) exp((mt - log eta) H_C)|_max with h = eta e^{-mt}.
double conjugation_residual(const CurveSpec& curve, double s, double t, double eta, int l);

/// a(t) u(R(eta e^{-mt})) u(phi(s)).
ProductElement translate_element(const CurveSpec& curve, const TranslateParams& p);
/// a(t) u(phi(s + eta e^{-mt})).
ProductElement direct_translate_element(const CurveSpec& curve, double s, double t, double eta);

struct WDirection {
  int k1 = 0;          // 1-based, as in the tie rule
  BlockVector w;       // first k1 blocks phi_i'(s0), rest zero
};

/// Smallest i in 1..k-1 with zeta_i > zeta_{i+1}, or k if all rates agree.
int tie_index(const ProductShape& shape);

WDirection w_k1_direction(const CurveSpec& curve, double s0);

struct UnipotentResidual {
  double residual = 0.0;   // max over the eta grid
  double alpha = 0.0;      // predicted decay rate min(m, zeta_1 - zeta_{k1+1})
  double eta_at_max = 0.0;
  bool eta_tilde_admissible = true;  // every shifted eta stayed inside [0,1]
};

/// |g_1 g_2^{-1} - 1|_max for g_1 = u(r w_{k1}) a(t) u(R(h)) and g_2 = u(delta) a(t) u(R(h~)),
/// where h~ = (eta + r e^{(m - zeta_1)t}) e^{-mt} and delta_i = r (phi_i'(s0) - phi_i'(s)) for
/// i <= k1 (zero beyond). Evaluated in closed form on the abelian group N, maximized over
/// `eta_grid` equally spaced eta in [0,1].
UnipotentResidual unipotent_invariance_residual(const CurveSpec& curve, double s0, double s, double t, double r,
                                                int l, int eta_grid = 65);

/// Same quantity for a single eta, computed from the full matrices (for cross-checks at moderate t).
double unipotent_invariance_residual_matrix(const CurveSpec& curve, double s0, double s, double t, double r, int l,
                                            double eta);

/// Least-squares slope of log(y) against x.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace horolab
