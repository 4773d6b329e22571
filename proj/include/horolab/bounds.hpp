#pragma once

// Sampled lower bounds for sup_eta |a(t) u(R(eta e^{-mt})) v| and the polynomial
// coefficient constant C_{d,J}.

#include <cstdint>
#include <string>
#include <vector>

#include "horolab/curve.hpp"
#include "horolab/weights.hpp"

namespace horolab {

/// Polynomial coefficients of the tensor a(t) u(R(eta e^{-mt})) v in eta:
/// result[flat][d] is the coefficient of eta^d.
std::vector<std::vector<double>> translate_polynomials(const TensorVector& v, const TaylorData& taylor,
                                                       const ProductShape& shape, double t);

/// sup over eta in [lo, hi] of |p(eta)|: Chebyshev grid of 4 deg + 1 points plus endpoints,
/// golden-section refinement around every grid local maximum.
double poly_sup_abs(const std::vector<double>& coeffs, double lo, double hi);

/// M_t = sup_{eta in [0,1]} |a(t) u(R_s(eta e^{-mt})) v| (sup-norm), Taylor order l.
double m_t(const TensorVector& v, const CurveSpec& curve, double s, double t, int l);

/// Same supremum taken over an equally spaced eta grid with explicit matrix products.
double m_t_sampled(const TensorVector& v, const CurveSpec& curve, double s, double t, int l, int grid);

struct RatioStats {
  double t = 0.0;
  double min = 0.0;
  double median = 0.0;
};

struct CdJEntry {
  int d = 0;
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
};

struct BoundReport {
  std::vector<int> dims;
  std::vector<double> rates;
  std::vector<int> powers;
  std::string curve_id;
  double s = 0.0;
  int l = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<RatioStats> per_t;
  double d2 = 0.0;  // min over samples and ladder of M_t / |v|
  double d3 = 0.0;  // min over a sample of integer vectors of M_t
  double threshold_time = 0.0;  // smallest ladder time after which the per-t min never decreases
  std::vector<CdJEntry> cdj;

  std::string to_json() const;
  /// Columns t,min_ratio,median_ratio.
  std::string to_csv() const;
};

/// Samples unit vectors (Gaussian direction, sup-normalized), evaluates M_t / |v| on the ladder.
/// Throws PreconditionError if some phi_i'(s) vanishes.
BoundReport estimate_D2(const TensorRepPtr& rep, const CurveSpec& curve, double s, const std::vector<double>& t_list,
                        std::size_t n_samples, std::uint64_t seed, int l = 0, const std::string& curve_id = "curve");

/// min over faces of the coefficient cube of sup_J |f|, as a grid linear program on
/// `resolution` Chebyshev-Lobatto points of J, refined once with the local maxima of the optimum.
double c_dJ(int d, double lo, double hi, int resolution = 2001);

/// Result of the linear program max g^T w s.t. A w = c, w >= 0, together with the
/// multipliers x solving the dual min c^T x s.t. A^T x >= g.
struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double value = 0.0;
  std::vector<double> w;
  std::vector<double> x;
};

/// Dense two-phase simplex with Bland's rule. A is rows x cols (row-major), c >= 0 not required.
LpResult simplex_equality(const Matrix& A, const Vector& c, const Vector& g);

}  // namespace horolab
