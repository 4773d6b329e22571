#include "horolab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "horolab/error.hpp"

namespace horolab {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  for (double c : c_) {
    if (!std::isfinite(c)) throw ArgumentError("Polynomial: non-finite coefficient");
  }
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative(int j) const {
  if (j < 0) throw ArgumentError("Polynomial::derivative: negative order");
  if (j > degree()) return Polynomial();
  std::vector<double> d(c_.size() - static_cast<std::size_t>(j));
  for (std::size_t i = 0; i < d.size(); ++i) {
    double f = c_[i + j];
    for (int q = 1; q <= j; ++q) f *= static_cast<double>(i + q);
    d[i] = f;
  }
  return Polynomial(std::move(d));
}

double Polynomial::derivative(int j, double s) const { return derivative(j)(s); }

// ---------------------------------------------------------------------------

CurveSpec::CurveSpec(ProductShape shape, std::vector<std::vector<Polynomial>> factors, int max_degree)
    : shape_(std::move(shape)), factors_(std::move(factors)) {
  if (static_cast<int>(factors_.size()) != shape_.k()) {
    throw ArgumentError("CurveSpec: expected " + std::to_string(shape_.k()) + " factors");
  }
  for (int i = 0; i < shape_.k(); ++i) {
    if (static_cast<int>(factors_[i].size()) != shape_.dim(i) - 1) {
      throw ArgumentError("CurveSpec: factor " + std::to_string(i) + " needs " + std::to_string(shape_.dim(i) - 1) +
                          " coordinates");
    }
    for (const auto& p : factors_[i]) {
      if (p.degree() > max_degree) {
        throw ArgumentError("CurveSpec: degree " + std::to_string(p.degree()) + " exceeds " +
                            std::to_string(max_degree));
      }
      degree_ = std::max(degree_, p.degree());
    }
  }

  regularity_.min_speed.assign(shape_.k(), std::numeric_limits<double>::infinity());
  regularity_.argmin.assign(shape_.k(), 0.0);
  for (int g = 0; g < kRegularityGrid; ++g) {
    const double s = static_cast<double>(g) / (kRegularityGrid - 1);
    const BlockVector d = derivative(1, s);
    for (int i = 0; i < shape_.k(); ++i) {
      const double sp = d[i].norm();
      if (sp < regularity_.min_speed[i]) {
        regularity_.min_speed[i] = sp;
        regularity_.argmin[i] = s;
      }
    }
  }
  for (double v : regularity_.min_speed) regularity_.degenerate = regularity_.degenerate || v <= 1e-12;
}

BlockVector CurveSpec::operator()(double s) const { return derivative(0, s); }

BlockVector CurveSpec::derivative(int j, double s) const {
  BlockVector out;
  for (int i = 0; i < shape_.k(); ++i) {
    Vector b(shape_.dim(i) - 1);
    for (int c = 0; c < b.size(); ++c) b[c] = factors_[i][c].derivative(j, s);
    out.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------

void check_time_cap(double t) {
  if (t > kDoubleTimeCap) {
    throw PrecisionError("t = " + std::to_string(t) + " exceeds the double-precision cap of " +
                         std::to_string(kDoubleTimeCap) + "; use the high-precision experiment mode");
  }
}

void TranslateParams::validate(const ProductShape& shape) const {
  if (!(t >= 0.0)) throw ArgumentError("TranslateParams: t must be >= 0");
  if (!(s >= 0.0 && s <= 1.0)) throw ArgumentError("TranslateParams: s must lie in [0,1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ArgumentError("TranslateParams: eta must lie in [0,1]");
  if (l < shape.min_taylor_order()) {
    throw ArgumentError("TranslateParams: Taylor order l = " + std::to_string(l) + " must exceed 2 zeta_1/zeta_k (need l >= " +
                        std::to_string(shape.min_taylor_order()) + ")");
  }
}

namespace {

BlockVector scaled(const BlockVector& x, double c) {
  BlockVector out = x;
  for (auto& b : out) b *= c;
  return out;
}

BlockVector add(BlockVector a, const BlockVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

// |u(z) - 1|_max for a single horospherical vector.
double unipotent_distance(const Vector& z) {
  if (z.size() == 0) return 0.0;
  return std::max(z.cwiseAbs().maxCoeff(), 0.5 * z.squaredNorm());
}

}  // namespace

BlockVector TaylorData::R(double h) const {
  BlockVector out = scaled(coeffs.front(), 0.0);
  for (int j = static_cast<int>(coeffs.size()); j >= 1; --j) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * h + coeffs[j - 1][i];
  }
  for (auto& b : out) b *= h;
  return out;
}

BlockVector TaylorData::epsilon(double h) const {
  if (h == 0.0) throw DomainError("TaylorData::epsilon: h must be nonzero");
  BlockVector out = scaled(coeffs.front(), 0.0);
  // (R(h) - kappa h)/h = sum_{j>=2} c_j h^{j-1}
  for (int j = static_cast<int>(coeffs.size()); j >= 2; --j) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * h + coeffs[j - 1][i];
  }
  for (auto& b : out) b *= h;
  return out;
}

BlockVector TaylorData::y(double h) const { return add(kappa(), epsilon(h)); }

TaylorData taylor_R(const CurveSpec& curve, double s, int l) {
  if (l < 2) throw ArgumentError("taylor_R: l must be >= 2");
  TaylorData td;
  td.s = s;
  td.l = l;
  double fact = 1.0;
  for (int j = 1; j <= l - 1; ++j) {
    fact *= j;
    td.coeffs.push_back(scaled(curve.derivative(j, s), 1.0 / fact));
  }
  return td;
}

double conjugation_residual(const CurveSpec& curve, double s, double t, double eta, int l) {
  if (!(eta > 0.0)) throw DomainError("conjugation_residual: eta must be positive");
  check_time_cap(t);
  const ProductShape& shape = curve.shape();
  const double h = eta * std::exp(-shape.m() * t);
  const TaylorData td = taylor_R(curve, s, l);
  const double tau = -shape.m() * t + std::log(eta);
  const ProductElement lhs = elem_u(shape, td.R(h));
  const ProductElement rhs = exp_HC(shape, tau) * elem_u(shape, td.y(h)) * exp_HC(shape, -tau);
  return distance(lhs, rhs);
}

ProductElement translate_element(const CurveSpec& curve, const TranslateParams& p) {
  const ProductShape& shape = curve.shape();
  p.validate(shape);
  check_time_cap(p.t);
  const double h = p.eta * std::exp(-shape.m() * p.t);
  const TaylorData td = taylor_R(curve, p.s, p.l);
  return elem_a(shape, p.t) * elem_u(shape, td.R(h)) * elem_u(shape, curve(p.s));
}

ProductElement direct_translate_element(const CurveSpec& curve, double s, double t, double eta) {
  const ProductShape& shape = curve.shape();
  if (!(t >= 0.0)) throw ArgumentError("direct_translate_element: t must be >= 0");
  check_time_cap(t);
  const double arg = s + eta * std::exp(-shape.m() * t);
  if (!(arg >= 0.0 && arg <= 1.0)) {
    throw ArgumentError("direct_translate_element: s + eta e^{-mt} = " + std::to_string(arg) + " is outside [0,1]");
  }
  return elem_a(shape, t) * elem_u(shape, curve(arg));
}

int tie_index(const ProductShape& shape) {
  for (int i = 0; i + 1 < shape.k(); ++i) {
    if (shape.rate(i) > shape.rate(i + 1)) return i + 1;
  }
  return shape.k();
}

WDirection w_k1_direction(const CurveSpec& curve, double s0) {
  const ProductShape& shape = curve.shape();
  WDirection out;
  out.k1 = tie_index(shape);
  const BlockVector d = curve.derivative(1, s0);
  out.w = zero_blocks(shape);
  for (int i = 0; i < out.k1; ++i) {
    if (!(d[i].norm() > 1e-12)) {
      throw DomainError("w_k1_direction: phi_" + std::to_string(i + 1) + "'(s0) vanishes");
    }
    out.w[i] = d[i];
  }
  return out;
}

namespace {

struct ShiftData {
  WDirection dir;
  BlockVector delta;
  TaylorData td;
  double h = 0.0;
  double h_tilde = 0.0;
  double eta_tilde = 0.0;
};

ShiftData shift_data(const CurveSpec& curve, double s0, double s, double t, double r, int l, double eta) {
  const ProductShape& shape = curve.shape();
  ShiftData sd;
  sd.dir = w_k1_direction(curve, s0);
  const BlockVector d0 = curve.derivative(1, s0);
  const BlockVector ds = curve.derivative(1, s);
  sd.delta = zero_blocks(shape);
  for (int i = 0; i < sd.dir.k1; ++i) sd.delta[i] = r * (d0[i] - ds[i]);
  sd.td = taylor_R(curve, s, l);
  const double m = shape.m();
  sd.eta_tilde = eta + r * std::exp((m - shape.rate(0)) * t);
  sd.h = eta * std::exp(-m * t);
  sd.h_tilde = sd.eta_tilde * std::exp(-m * t);
  return sd;
}

}  // namespace

UnipotentResidual unipotent_invariance_residual(const CurveSpec& curve, double s0, double s, double t, double r,
                                                int l, int eta_grid) {
  if (eta_grid < 2) throw ArgumentError("unipotent_invariance_residual: eta grid needs >= 2 points");
  check_time_cap(t);
  const ProductShape& shape = curve.shape();
  UnipotentResidual out;
  const int k1 = tie_index(shape);
  out.alpha = k1 == shape.k() ? shape.m() : std::min(shape.m(), shape.rate(0) - shape.rate(k1));
  const double z1 = shape.rate(0);
  for (int g = 0; g < eta_grid; ++g) {
    const double eta = static_cast<double>(g) / (eta_grid - 1);
    const ShiftData sd = shift_data(curve, s0, s, t, r, l, eta);
    if (sd.eta_tilde < 0.0 || sd.eta_tilde > 1.0) out.eta_tilde_admissible = false;
    // g1 g2^{-1} = u(z) with z_i = r w_i - delta_i + e^{zeta_i t} (R_i(h) - R_i(h~)) and
    // R(h) - R(h~) = (h - h~) sum_j c_j sum_a h^a h~^{j-1-a}, h - h~ = -r e^{-zeta_1 t}.
    double res = 0.0;
    for (int i = 0; i < shape.k(); ++i) {
      Vector sum = Vector::Zero(shape.dim(i) - 1);
      for (int j = 1; j <= static_cast<int>(sd.td.coeffs.size()); ++j) {
        double sj = 0.0;
        for (int a = 0; a < j; ++a) sj += std::pow(sd.h, a) * std::pow(sd.h_tilde, j - 1 - a);
        sum += sj * sd.td.coeffs[j - 1][i];
      }
      const Vector z = r * sd.dir.w[i] - sd.delta[i] - r * std::exp((shape.rate(i) - z1) * t) * sum;
      res = std::max(res, unipotent_distance(z));
    }
    if (res > out.residual) {
      out.residual = res;
      out.eta_at_max = eta;
    }
  }
  return out;
}

double unipotent_invariance_residual_matrix(const CurveSpec& curve, double s0, double s, double t, double r, int l,
                                            double eta) {
  check_time_cap(t);
  const ProductShape& shape = curve.shape();
  const ShiftData sd = shift_data(curve, s0, s, t, r, l, eta);
  const ProductElement g1 = elem_u(shape, scaled(sd.dir.w, r)) * elem_a(shape, t) * elem_u(shape, sd.td.R(sd.h));
  const ProductElement g2 = elem_u(shape, sd.delta) * elem_a(shape, t) * elem_u(shape, sd.td.R(sd.h_tilde));
  return distance(g1 * g2.inverse(), ProductElement::identity(shape));
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_log_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw DomainError("fit_log_slope: values must be positive");
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw DomainError("fit_log_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace horolab
