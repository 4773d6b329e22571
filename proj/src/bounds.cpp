#include "horolab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "horolab/error.hpp"
#include "horolab/parallel.hpp"

namespace horolab {

namespace {

double horner(const double* c, std::size_t n, double x) {
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Ascending Chebyshev points of the first kind on [lo, hi] plus both endpoints.
std::vector<double> chebyshev_with_ends(int count, double lo, double hi) {
  std::vector<double> x{lo};
  for (int i = count - 1; i >= 0; --i) {
    x.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(std::numbers::pi * (i + 0.5) / count));
  }
  x.push_back(hi);
  return x;
}

struct SupResult {
  double value = 0.0;
  std::vector<double> argmax;  // location of each refined local maximum
};

SupResult poly_sup_detail(const double* c, std::size_t n, double lo, double hi) {
  SupResult out;
  std::size_t deg = n;
  while (deg > 0 && c[deg - 1] == 0.0) --deg;
  if (deg <= 1) {
    out.value = deg == 0 ? 0.0 : std::abs(c[0]);
    out.argmax.push_back(lo);
    return out;
  }
  const int degree = static_cast<int>(deg) - 1;
  const auto xs = chebyshev_with_ends(4 * degree + 1, lo, hi);
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = std::abs(horner(c, deg, xs[i]));
  auto f = [&](double x) { return std::abs(horner(c, deg, x)); };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool left = i == 0 || vals[i] >= vals[i - 1];
    const bool right = i + 1 == xs.size() || vals[i] >= vals[i + 1];
    if (!(left && right)) continue;
    double best = vals[i];
    double where = xs[i];
    const double a = xs[i == 0 ? 0 : i - 1];
    const double b = xs[i + 1 == xs.size() ? i : i + 1];
    if (b > a) {
      // locate the refined maximizer by a second golden pass on the same bracket
      const double r = 0.5 * (std::sqrt(5.0) - 1.0);
      double lo2 = a, hi2 = b;
      for (int it = 0; it < 60 && hi2 - lo2 > 1e-15; ++it) {
        const double p = hi2 - r * (hi2 - lo2), q = lo2 + r * (hi2 - lo2);
        if (f(p) >= f(q)) {
          hi2 = q;
        } else {
          lo2 = p;
        }
      }
      const double mid = 0.5 * (lo2 + hi2);
      if (f(mid) > best) {
        best = f(mid);
        where = mid;
      }
    }
    out.value = std::max(out.value, best);
    out.argmax.push_back(where);
  }
  return out;
}

}  // namespace

double poly_sup_abs(const std::vector<double>& coeffs, double lo, double hi) {
  if (!(hi > lo)) throw ArgumentError("poly_sup_abs: empty interval");
  return poly_sup_detail(coeffs.data(), coeffs.size(), lo, hi).value;
}

std::vector<std::vector<double>> translate_polynomials(const TensorVector& v, const TaylorData& taylor,
                                                       const ProductShape& shape, double t) {
  const auto& rep = *v.rep();
  if (!(rep.shape().dims() == shape.dims())) throw ArgumentError("translate_polynomials: shape mismatch");
  const int slot_deg = 2 * (static_cast<int>(taylor.coeffs.size()));
  const std::size_t width = static_cast<std::size_t>(slot_deg * rep.slots() + 1);
  const std::size_t dim = rep.dimension();
  std::vector<double> cur(dim * width, 0.0), next(dim * width);
  for (std::size_t i = 0; i < dim; ++i) cur[i * width] = v[i];

  const double m = shape.m();
  int used = 0;  // degree occupied so far
  for (int s = 0; s < rep.slots(); ++s) {
    const int f = rep.slot_factor(s);
    const int n = shape.dim(f);
    const double up = std::exp(shape.rate(f) * t), down = std::exp(-shape.rate(f) * t);
    // R_c(eta) coefficients and |R|^2/2.
    std::vector<std::vector<double>> R(n - 1, std::vector<double>(slot_deg + 1, 0.0));
    for (int j = 1; j <= static_cast<int>(taylor.coeffs.size()); ++j) {
      const double scale = std::exp(-m * j * t);
      for (int c = 0; c < n - 1; ++c) R[c][j] = taylor.coeffs[j - 1][f][c] * scale;
    }
    std::vector<double> half_sq(slot_deg + 1, 0.0);
    for (int c = 0; c < n - 1; ++c) {
      for (int a = 0; a <= slot_deg / 2; ++a) {
        for (int b = 0; b <= slot_deg / 2; ++b) half_sq[a + b] += 0.5 * R[c][a] * R[c][b];
      }
    }
    // Polynomial entries of a_f(t) u_f(R_f): entry(r, col) as coefficient vector.
    auto entry = [&](int r, int col) -> std::vector<double> {
      std::vector<double> e(slot_deg + 1, 0.0);
      if (r == 0) {
        if (col == 0) e[0] = up;
        else if (col == n) e = half_sq;
        else e = R[col - 1];
        if (col != 0) for (double& x : e) x *= up;
      } else if (r == n) {
        if (col == n) e[0] = down;
      } else {
        if (col == r) e[0] = 1.0;
        else if (col == n) e = R[r - 1];
      }
      return e;
    };
    std::vector<std::vector<std::vector<double>>> M(n + 1, std::vector<std::vector<double>>(n + 1));
    for (int r = 0; r <= n; ++r) {
      for (int col = 0; col <= n; ++col) M[r][col] = entry(r, col);
    }

    const std::size_t d = static_cast<std::size_t>(n + 1);
    const std::size_t inner = rep.stride(s);
    const std::size_t outer = dim / (d * inner);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * d * inner;
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t col = 0; col < d; ++col) {
          const auto& e = M[r][col];
          int edeg = slot_deg;
          while (edeg >= 0 && e[edeg] == 0.0) --edeg;
          if (edeg < 0) continue;
          for (std::size_t q = 0; q < inner; ++q) {
            const double* src = cur.data() + (base + col * inner + q) * width;
            double* dst = next.data() + (base + r * inner + q) * width;
            for (int a = 0; a <= used; ++a) {
              if (src[a] == 0.0) continue;
              for (int b = 0; b <= edeg; ++b) dst[a + b] += src[a] * e[b];
            }
          }
        }
      }
    }
    std::swap(cur, next);
    used += slot_deg;
  }
  std::vector<std::vector<double>> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i].assign(cur.begin() + i * width, cur.begin() + (i + 1) * width);
  return out;
}

double m_t(const TensorVector& v, const CurveSpec& curve, double s, double t, int l) {
  if (!(v.norm() > 0.0)) throw DomainError("m_t: zero vector");
  check_time_cap(t);
  const auto polys = translate_polynomials(v, taylor_R(curve, s, l), curve.shape(), t);
  // Stage 1: grid values for every coordinate; stage 2: refine the competitive ones.
  std::vector<double> grid_max(polys.size(), 0.0);
  double best_grid = 0.0;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const auto& p = polys[i];
    std::size_t deg = p.size();
    while (deg > 0 && p[deg - 1] == 0.0) --deg;
    if (deg == 0) continue;
    const auto xs = chebyshev_with_ends(4 * static_cast<int>(deg - 1) + 1, 0.0, 1.0);
    for (double x : xs) grid_max[i] = std::max(grid_max[i], std::abs(horner(p.data(), deg, x)));
    best_grid = std::max(best_grid, grid_max[i]);
  }
  double best = best_grid;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (grid_max[i] >= 0.5 * best_grid && grid_max[i] > 0.0) {
      best = std::max(best, poly_sup_detail(polys[i].data(), polys[i].size(), 0.0, 1.0).value);
    }
  }
  return best;
}

double m_t_sampled(const TensorVector& v, const CurveSpec& curve, double s, double t, int l, int grid) {
  if (grid < 2) throw ArgumentError("m_t_sampled: grid needs >= 2 points");
  check_time_cap(t);
  const ProductShape& shape = curve.shape();
  const TaylorData td = taylor_R(curve, s, l);
  double best = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double eta = static_cast<double>(g) / (grid - 1);
    const ProductElement x = elem_a(shape, t) * elem_u(shape, td.R(eta * std::exp(-shape.m() * t)));
    best = std::max(best, act(x, v).norm());
  }
  return best;
}

// ---------------------------------------------------------------------------

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["dims"] = dims;
  j["rates"] = rates;
  j["powers"] = powers;
  j["curve_id"] = curve_id;
  j["s"] = s;
  j["l"] = l;
  j["samples"] = samples;
  j["seed"] = seed;
  j["D2"] = d2;
  j["D3"] = d3;
  j["T"] = threshold_time;
  for (const auto& r : per_t) j["per_t"].push_back({{"t", r.t}, {"min_ratio", r.min}, {"median_ratio", r.median}});
  j["c_dJ"] = nlohmann::json::array();
  for (const auto& c : cdj) j["c_dJ"].push_back({{"d", c.d}, {"J", {c.lo, c.hi}}, {"value", c.value}});
  return j.dump(2);
}

std::string BoundReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,min_ratio,median_ratio\n";
  for (const auto& r : per_t) os << r.t << ',' << r.min << ',' << r.median << '\n';
  return os.str();
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BoundReport estimate_D2(const TensorRepPtr& rep, const CurveSpec& curve, double s, const std::vector<double>& t_list,
                        std::size_t n_samples, std::uint64_t seed, int l, const std::string& curve_id) {
  const ProductShape& shape = curve.shape();
  if (!(rep->shape().dims() == shape.dims())) throw ArgumentError("estimate_D2: representation and curve shapes differ");
  if (t_list.empty() || n_samples == 0) throw ArgumentError("estimate_D2: need a non-empty ladder and sample count");
  const BlockVector d1 = curve.derivative(1, s);
  for (int i = 0; i < shape.k(); ++i) {
    if (!(d1[i].norm() > 1e-12)) {
      throw PreconditionError("estimate_D2: phi_" + std::to_string(i + 1) + "'(s) vanishes; the curve is not regular at s");
    }
  }
  if (l == 0) l = shape.min_taylor_order();

  BoundReport rep_out;
  rep_out.dims = shape.dims();
  rep_out.rates = shape.rates();
  rep_out.powers = rep->powers();
  rep_out.curve_id = curve_id;
  rep_out.s = s;
  rep_out.l = l;
  rep_out.samples = n_samples;
  rep_out.seed = seed;

  const std::size_t nt = t_list.size();
  std::vector<double> ratios(n_samples * nt), lattice(n_samples * nt);
  parallel_for(n_samples, [&](std::size_t i) {
    auto rng = substream(seed, i);
    std::normal_distribution<double> gauss;
    TensorVector v(rep);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = gauss(rng);
    v = v * (1.0 / v.norm());
    std::uniform_int_distribution<int> small(-2, 2);
    TensorVector z(rep);
    do {
      for (std::size_t c = 0; c < z.size(); ++c) z[c] = small(rng);
    } while (z.norm() == 0.0);
    for (std::size_t k = 0; k < nt; ++k) {
      ratios[i * nt + k] = m_t(v, curve, s, t_list[k], l);
      lattice[i * nt + k] = m_t(z, curve, s, t_list[k], l);
    }
  });

  rep_out.d2 = std::numeric_limits<double>::infinity();
  rep_out.d3 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> col(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      col[i] = ratios[i * nt + k];
      rep_out.d3 = std::min(rep_out.d3, lattice[i * nt + k]);
    }
    const double mn = *std::min_element(col.begin(), col.end());
    rep_out.per_t.push_back({t_list[k], mn, median(col)});
    rep_out.d2 = std::min(rep_out.d2, mn);
  }
  std::size_t start = nt - 1;
  while (start > 0 && rep_out.per_t[start - 1].min <= rep_out.per_t[start].min) --start;
  rep_out.threshold_time = t_list[start];
  return rep_out;
}

// ---------------------------------------------------------------------------

LpResult simplex_equality(const Matrix& A, const Vector& c, const Vector& g) {
  // Revised simplex: the basis is refactorized from the original columns every iteration,
  // so roundoff does not accumulate across pivots.
  const int p = static_cast<int>(A.rows());
  const int q = static_cast<int>(A.cols());
  if (c.size() != p || g.size() != q) throw ArgumentError("simplex_equality: dimension mismatch");
  Vector sign(p);
  for (int i = 0; i < p; ++i) sign[i] = c[i] < 0 ? -1.0 : 1.0;
  const Matrix As = sign.asDiagonal() * A;
  const Vector cs = sign.asDiagonal() * c;
  auto column = [&](int j) -> Vector {
    if (j < q) return As.col(j);
    return Vector::Unit(p, j - q);
  };
  const double scale = std::max(1.0, max_norm(A));
  const double tol = 1e-12 * scale;

  std::vector<int> basis(p);
  for (int i = 0; i < p; ++i) basis[i] = q + i;
  Vector xb = cs;

  auto solve_phase = [&](const std::vector<double>& obj, int limit) -> bool {
    for (int iter = 0; iter < 100000; ++iter) {
      Matrix B(p, p);
      Vector ob(p);
      for (int i = 0; i < p; ++i) {
        B.col(i) = column(basis[i]);
        ob[i] = obj[basis[i]];
      }
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
      xb = lu.solve(cs);
      const Vector y = lu.transpose().solve(ob);
      const Vector priced = As.transpose() * y;
      std::vector<char> in_basis(q + p, 0);
      for (int b : basis) in_basis[b] = 1;
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (in_basis[j]) continue;
        const double rc = obj[j] - (j < q ? priced[j] : y[j - q]);
        if (rc > tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      const Vector dir = lu.solve(column(enter));
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < p; ++i) {
        if (dir[i] > tol) {
          const double ratio = std::max(0.0, xb[i]) / dir[i];
          if (leave < 0 || ratio < best - 1e-15 * (1.0 + best) ||
              (ratio <= best + 1e-15 * (1.0 + best) && basis[i] < basis[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      basis[leave] = enter;
    }
    throw ConsistencyError("simplex_equality: iteration limit reached");
  };

  LpResult res;
  std::vector<double> phase1(q + p, 0.0);
  for (int i = 0; i < p; ++i) phase1[q + i] = -1.0;
  solve_phase(phase1, q + p);
  double infeas = 0.0;
  for (int i = 0; i < p; ++i) {
    if (basis[i] >= q) infeas += std::abs(xb[i]);
  }
  if (infeas > 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff())) return res;
  res.feasible = true;
  // Swap zero-level artificials for structural columns where the basis stays nonsingular.
  for (int i = 0; i < p; ++i) {
    if (basis[i] < q) continue;
    for (int j = 0; j < q; ++j) {
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      std::vector<int> trial = basis;
      trial[i] = j;
      Matrix B(p, p);
      for (int r = 0; r < p; ++r) B.col(r) = column(trial[r]);
      if (std::abs(B.determinant()) > 1e-10 * std::pow(scale, p)) {
        basis = trial;
        break;
      }
    }
  }
  std::vector<double> phase2(q + p, 0.0);
  for (int j = 0; j < q; ++j) phase2[j] = g[j];
  if (!solve_phase(phase2, q)) {
    res.bounded = false;
    return res;
  }
  res.w.assign(q, 0.0);
  Matrix B(p, p);
  Vector gb(p);
  for (int i = 0; i < p; ++i) {
    if (basis[i] < q) res.w[basis[i]] = std::max(0.0, xb[i]);
    B.col(i) = column(basis[i]);
    gb[i] = basis[i] < q ? g[basis[i]] : 0.0;
  }
  res.value = 0.0;
  for (int j = 0; j < q; ++j) res.value += g[j] * res.w[j];
  const Vector y = B.transpose().partialPivLu().solve(gb);
  res.x.resize(p);
  for (int i = 0; i < p; ++i) res.x[i] = sign[i] * y[i];
  return res;
}

namespace {

// One face a_j = 1 of the coefficient cube: min over the other coefficients of max_grid |f|.
LpResult face_lp(int d, int j, const std::vector<double>& grid) {
  // Primal variables x = (z, a_k for k != j); constraints M x >= g.
  const int nv = d + 1;
  const int rows = static_cast<int>(2 * grid.size()) + 2 * d;
  Matrix M = Matrix::Zero(rows, nv);
  Vector g(rows);
  int r = 0;
  for (double xg : grid) {
    std::vector<double> pw(d + 1, 1.0);
    for (int k = 1; k <= d; ++k) pw[k] = pw[k - 1] * xg;
    M(r, 0) = 1.0;
    M(r + 1, 0) = 1.0;
    int col = 1;
    for (int k = 0; k <= d; ++k) {
      if (k == j) continue;
      M(r, col) = -pw[k];
      M(r + 1, col) = pw[k];
      ++col;
    }
    g[r] = pw[j];
    g[r + 1] = -pw[j];
    r += 2;
  }
  for (int v = 1; v < nv; ++v) {
    M(r, v) = -1.0;
    g[r++] = -1.0;
    M(r, v) = 1.0;
    g[r++] = -1.0;
  }
  Vector obj = Vector::Zero(nv);
  obj[0] = 1.0;
  LpResult res = simplex_equality(M.transpose(), obj, g);
  if (!res.feasible || !res.bounded) {
    throw ConsistencyError(std::string("c_dJ: grid linear program ") + (res.feasible ? "unbounded" : "infeasible"));
  }
  return res;
}

std::vector<double> face_polynomial(int d, int j, const LpResult& res) {
  std::vector<double> a(d + 1, 0.0);
  a[j] = 1.0;
  int col = 1;
  for (int k = 0; k <= d; ++k) {
    if (k == j) continue;
    a[k] = res.x[col++];
  }
  return a;
}

}  // namespace

double c_dJ(int d, double lo, double hi, int resolution) {
  if (d < 0) throw ArgumentError("c_dJ: degree must be >= 0");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("c_dJ: interval must have positive finite length");
  if (resolution < 2) throw ArgumentError("c_dJ: resolution must be >= 2");
  std::vector<double> grid(resolution);
  for (int i = 0; i < resolution; ++i) {
    grid[i] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(std::numbers::pi * i / (resolution - 1));
  }
  grid.front() = lo;
  grid.back() = hi;

  std::vector<double> extra;
  for (int j = 0; j <= d; ++j) {
    const auto a = face_polynomial(d, j, face_lp(d, j, grid));
    const auto sup = poly_sup_detail(a.data(), a.size(), lo, hi);
    extra.insert(extra.end(), sup.argmax.begin(), sup.argmax.end());
  }
  grid.insert(grid.end(), extra.begin(), extra.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= d; ++j) best = std::min(best, face_lp(d, j, grid).value);
  return best;
}

}  // namespace horolab
