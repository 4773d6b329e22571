#include "horolab/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "horolab/error.hpp"
#include "horolab/parallel.hpp"

namespace horolab {

MobiusEmbeddingSpec::MobiusEmbeddingSpec(ProductShape shape, std::vector<std::vector<int>> partition,
                                         std::vector<int> m, std::vector<GroupElement> mobius)
    : shape_(std::move(shape)), partition_(std::move(partition)), m_(std::move(m)), mobius_(std::move(mobius)) {
  const int k = shape_.k();
  if (partition_.size() != m_.size()) throw ArgumentError("MobiusEmbeddingSpec: need one m per block");
  if (static_cast<int>(mobius_.size()) != k) throw ArgumentError("MobiusEmbeddingSpec: need one Moebius element per factor");
  block_of_.assign(k, -1);
  for (std::size_t b = 0; b < partition_.size(); ++b) {
    if (partition_[b].empty()) throw ArgumentError("MobiusEmbeddingSpec: empty block");
    int min_n = std::numeric_limits<int>::max();
    for (int j : partition_[b]) {
      if (j < 0 || j >= k) throw ArgumentError("MobiusEmbeddingSpec: factor index " + std::to_string(j) + " out of range");
      if (block_of_[j] >= 0) throw ArgumentError("MobiusEmbeddingSpec: factor " + std::to_string(j) + " in two blocks");
      block_of_[j] = static_cast<int>(b);
      min_n = std::min(min_n, shape_.dim(j));
      if (std::abs(shape_.rate(j) - shape_.rate(partition_[b].front())) > 1e-12) {
        throw ArgumentError("MobiusEmbeddingSpec: block " + std::to_string(b) + " mixes distinct rates");
      }
    }
    if (m_[b] < 1 || m_[b] > min_n) {
      throw ArgumentError("MobiusEmbeddingSpec: m for block " + std::to_string(b) + " must lie in [1, " +
                          std::to_string(min_n) + "]");
    }
  }
  for (int j = 0; j < k; ++j) {
    if (block_of_[j] < 0) throw ArgumentError("MobiusEmbeddingSpec: factor " + std::to_string(j) + " not covered");
    if (mobius_[j].n() != shape_.dim(j)) throw ArgumentError("MobiusEmbeddingSpec: Moebius element dimension mismatch");
  }
}

MobiusEmbeddingSpec MobiusEmbeddingSpec::diagonal(const ProductShape& shape) {
  std::vector<int> all(shape.k());
  std::vector<GroupElement> ids;
  int m = std::numeric_limits<int>::max();
  for (int j = 0; j < shape.k(); ++j) {
    all[j] = j;
    ids.push_back(GroupElement::identity(shape.space(j)));
    m = std::min(m, shape.dim(j));
  }
  return MobiusEmbeddingSpec(shape, {all}, {m}, ids);
}

Vector include_sphere(const Vector& p, int n) {
  if (p.size() > n) throw ArgumentError("include_sphere: point has more coordinates than the target sphere");
  Vector out = Vector::Zero(n);
  out.tail(p.size()) = p;
  return out;
}

std::vector<BoundaryPoint> embed_point(const MobiusEmbeddingSpec& spec, const std::vector<Vector>& block_points) {
  if (block_points.size() != spec.partition().size()) throw ArgumentError("embed_point: need one point per block");
  std::vector<BoundaryPoint> out;
  for (int j = 0; j < spec.shape().k(); ++j) {
    const int b = spec.block_of(j);
    const int m = spec.m()[b];
    Vector core = m == 1 ? Vector::Ones(1) : block_points[b];
    if (core.size() != m) throw ArgumentError("embed_point: block " + std::to_string(b) + " point must have length m");
    const BoundaryPoint included(include_sphere(core, spec.shape().dim(j)));
    out.push_back(boundary_act(included, spec.mobius()[j]));
  }
  return out;
}

double distance_to_obstruction(const std::vector<BoundaryPoint>& tuple, const MobiusEmbeddingSpec& spec) {
  const int k = spec.shape().k();
  if (static_cast<int>(tuple.size()) != k) throw ArgumentError("distance_to_obstruction: tuple size");
  std::vector<Vector> cores(k);
  double dist = 0.0;
  for (int j = 0; j < k; ++j) {
    const int n = spec.shape().dim(j);
    if (tuple[j].size() != n) throw ArgumentError("distance_to_obstruction: point dimension mismatch");
    const Vector back = boundary_act(tuple[j], spec.mobius()[j].inverse()).coords();
    const int m = spec.m()[spec.block_of(j)];
    dist = std::max(dist, back.head(n - m).norm());
    cores[j] = back.tail(m);
    if (m == 1) dist = std::max(dist, std::abs(cores[j][0] - 1.0));
  }
  for (const auto& block : spec.partition()) {
    for (std::size_t a = 0; a < block.size(); ++a) {
      for (std::size_t b = a + 1; b < block.size(); ++b) {
        dist = std::max(dist, (cores[block[a]] - cores[block[b]]).norm());
      }
    }
  }
  return dist;
}

bool is_on(const std::vector<BoundaryPoint>& tuple, const MobiusEmbeddingSpec& spec, double tol) {
  return distance_to_obstruction(tuple, spec) <= tol;
}

std::vector<BoundaryPoint> curve_boundary_tuple(const CurveSpec& curve, double s) {
  std::vector<BoundaryPoint> out;
  for (const auto& x : curve(s)) out.push_back(inverse_stereographic(x));
  return out;
}

double curve_obstruction_measure(const CurveSpec& curve, const MobiusEmbeddingSpec& spec, double tol, int grid_n) {
  if (grid_n < 2) throw ArgumentError("curve_obstruction_measure: grid needs >= 2 points");
  if (!(curve.shape().dims() == spec.shape().dims())) throw ArgumentError("curve_obstruction_measure: shape mismatch");
  std::vector<char> hit(grid_n, 0);
  parallel_for(static_cast<std::size_t>(grid_n), [&](std::size_t g) {
    const double s = static_cast<double>(g) / (grid_n - 1);
    hit[g] = is_on(curve_boundary_tuple(curve, s), spec, tol) ? 1 : 0;
  });
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / grid_n;
}

// ---------------------------------------------------------------------------

UnstableDirectionSpec::UnstableDirectionSpec(ProductShape shape, std::vector<int> powers, std::vector<Vector> null_vectors)
    : shape_(std::move(shape)), powers_(std::move(powers)), v_(std::move(null_vectors)) {
  const int k = shape_.k();
  if (static_cast<int>(powers_.size()) != k || static_cast<int>(v_.size()) != k) {
    throw ArgumentError("UnstableDirectionSpec: need one power and one null vector per factor");
  }
  for (int i = 0; i < k; ++i) {
    if (powers_[i] < 0) throw ArgumentError("UnstableDirectionSpec: powers must be non-negative");
    if (v_[i].size() != shape_.dim(i) + 1) throw ArgumentError("UnstableDirectionSpec: null vector length");
    const double scale = std::max(1.0, v_[i].squaredNorm());
    if (std::abs(q_eval(shape_.space(i), v_[i])) > kNullTolerance * scale) {
      throw ConsistencyError("UnstableDirectionSpec: vector " + std::to_string(i) + " is not null");
    }
  }
}

double leading_coefficient(const Vector& v, const Vector& x) {
  const int n = static_cast<int>(v.size()) - 1;
  if (x.size() != n - 1) throw ArgumentError("leading_coefficient: x length");
  return v[0] + v.segment(1, n - 1).dot(x) + v[n] * 0.5 * x.squaredNorm();
}

Vector translate_null_vector(const Vector& v, const Vector& x, double t, double zeta) {
  const int n = static_cast<int>(v.size()) - 1;
  Vector out(n + 1);
  out[0] = std::exp(zeta * t) * leading_coefficient(v, x);
  out.segment(1, n - 1) = v.segment(1, n - 1) + v[n] * x;
  out[n] = v[n] * std::exp(-zeta * t);
  return out;
}

std::optional<Vector> nonclosed_constant(const UnstableDirectionSpec& spec, int factor) {
  const Vector& v = spec.null_vectors().at(factor);
  const int n = static_cast<int>(v.size()) - 1;
  const double vn = v[n];
  if (std::abs(vn) <= 1e-14 * std::max(1.0, v.cwiseAbs().maxCoeff())) return std::nullopt;
  Vector x = -v.segment(1, n - 1) / vn;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff()) * (1.0 + x.squaredNorm());
  const double linear = (v.segment(1, n - 1) + vn * x).cwiseAbs().maxCoeff();
  const double quad = std::abs(leading_coefficient(v, x));
  if (linear > 1e-10 * scale || quad > 1e-10 * scale) {
    throw ConsistencyError("nonclosed_constant: constant does not annihilate the leading coefficient");
  }
  return x;
}

const char* growth_name(Growth g) { return g == Growth::Bounded ? "BOUNDED" : "EXPONENTIAL"; }

namespace {

double upper_half_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t start = t.size() / 2;
  std::vector<double> ts(t.begin() + start, t.end()), ys;
  for (std::size_t i = start; i < y.size(); ++i) ys.push_back(std::max(y[i], 1e-300));
  if (ts.size() < 2) throw ArgumentError("unstable_growth_probe: ladder needs >= 4 points");
  return fit_log_slope(ts, ys);
}

}  // namespace

GrowthProbe unstable_growth_probe(const UnstableDirectionSpec& spec, const BlockVector& x,
                                  const std::vector<double>& t_ladder) {
  const ProductShape& shape = spec.shape();
  check_blocks(shape, x);
  const int k = shape.k();
  GrowthProbe out;

  std::vector<Vector> slots;
  for (int i = 0; i < k; ++i) {
    for (int p = 0; p < spec.powers()[i]; ++p) slots.push_back(spec.null_vectors()[i]);
  }
  const auto rep = make_rep(shape, spec.powers());
  const TensorVector w = pure_tensor(rep, slots);
  const ProductElement ux = elem_u(shape, x);

  std::vector<std::vector<double>> factor_norms(k);
  for (double t : t_ladder) {
    const double direct = act(elem_a(shape, t) * ux, w).norm();
    double closed = 1.0, scale = 1.0;
    for (int i = 0; i < k; ++i) {
      const Vector& v = spec.null_vectors()[i];
      const double fn = translate_null_vector(v, x[i], t, shape.rate(i)).cwiseAbs().maxCoeff();
      const double p = spec.powers()[i];
      closed *= std::pow(fn, p);
      factor_norms[i].push_back(std::pow(fn, p));
      const double cond = v.cwiseAbs().maxCoeff() * (1.0 + x[i].lpNorm<1>() + 0.5 * x[i].squaredNorm()) *
                          std::exp(shape.rate(i) * t);
      scale *= std::pow(std::max(cond, 1e-300), p);
    }
    out.direct.push_back(direct);
    out.closed.push_back(closed);
    out.max_disagreement = std::max(out.max_disagreement, std::abs(direct - closed) / scale);
  }

  double threshold = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const int p = spec.powers()[i];
    if (p >= 1) threshold = std::min(threshold, 0.5 * p * shape.rate(i));
    const double slope = upper_half_slope(t_ladder, factor_norms[i]);
    out.factor_rate.push_back(slope);
    out.factor_growth.push_back(p >= 1 && slope >= 0.5 * p * shape.rate(i) ? Growth::Exponential : Growth::Bounded);
  }
  out.rate = upper_half_slope(t_ladder, out.closed);
  out.growth = std::isfinite(threshold) && out.rate >= threshold ? Growth::Exponential : Growth::Bounded;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// dist[g][j] for factors j plus the combined distance in column k.
ObstructionDiagnostics summarize(const std::vector<std::vector<double>>& dist, int k, double tol) {
  const int grid_n = static_cast<int>(dist.size());
  ObstructionDiagnostics out;
  out.factors.resize(k);
  out.min_distance = std::numeric_limits<double>::infinity();
  for (auto& f : out.factors) f.min_distance = std::numeric_limits<double>::infinity();
  int hits = 0;
  for (int g = 0; g < grid_n; ++g) {
    const double s = static_cast<double>(g) / (grid_n - 1);
    hits += dist[g][k] <= tol;
    if (dist[g][k] < out.min_distance) {
      out.min_distance = dist[g][k];
      out.argmin_s = s;
    }
    for (int j = 0; j < k; ++j) {
      auto& f = out.factors[j];
      f.on_fraction += dist[g][j] <= tol;
      if (dist[g][j] < f.min_distance) {
        f.min_distance = dist[g][j];
        f.argmin_s = s;
      }
    }
  }
  out.measure = static_cast<double>(hits) / grid_n;
  for (auto& f : out.factors) f.on_fraction /= grid_n;
  return out;
}

void check_grid(const CurveSpec& curve, const ProductShape& shape, int grid_n) {
  if (grid_n < 2) throw ArgumentError("diagnose_obstruction: grid needs >= 2 points");
  if (!(curve.shape().dims() == shape.dims())) throw ArgumentError("diagnose_obstruction: shape mismatch");
}

}  // namespace

ObstructionDiagnostics diagnose_obstruction(const CurveSpec& curve, const MobiusEmbeddingSpec& spec, double tol,
                                            int grid_n) {
  check_grid(curve, spec.shape(), grid_n);
  const int k = spec.shape().k();
  std::vector<std::vector<double>> dist(grid_n, std::vector<double>(k + 1));
  parallel_for(static_cast<std::size_t>(grid_n), [&](std::size_t g) {
    const auto tuple = curve_boundary_tuple(curve, static_cast<double>(g) / (grid_n - 1));
    for (int j = 0; j < k; ++j) {
      const int n = spec.shape().dim(j);
      const int m = spec.m()[spec.block_of(j)];
      const Vector back = boundary_act(tuple[j], spec.mobius()[j].inverse()).coords();
      double d = back.head(n - m).norm();
      if (m == 1) d = std::max(d, std::abs(back[n - 1] - 1.0));
      dist[g][j] = d;
    }
    dist[g][k] = distance_to_obstruction(tuple, spec);
  });
  ObstructionDiagnostics out = summarize(dist, k, tol);
  for (int j = 0; j < k; ++j) out.factors[j].block = spec.block_of(j);
  return out;
}

ObstructionDiagnostics diagnose_obstruction(const CurveSpec& curve, const UnstableDirectionSpec& spec, double tol,
                                            int grid_n) {
  check_grid(curve, spec.shape(), grid_n);
  const int k = spec.shape().k();
  std::vector<std::optional<Vector>> constants;
  for (int i = 0; i < k; ++i) constants.push_back(nonclosed_constant(spec, i));
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dist(grid_n, std::vector<double>(k + 1, inf));
  parallel_for(static_cast<std::size_t>(grid_n), [&](std::size_t g) {
    const BlockVector x = curve(static_cast<double>(g) / (grid_n - 1));
    for (int i = 0; i < k; ++i) {
      if (!constants[i] || spec.powers()[i] == 0) continue;
      dist[g][i] = (x[i] - *constants[i]).norm();
      dist[g][k] = std::min(dist[g][k], dist[g][i]);
    }
  });
  ObstructionDiagnostics out = summarize(dist, k, tol);
  for (int i = 0; i < k; ++i) {
    out.factors[i].constrained = constants[i].has_value() && spec.powers()[i] > 0;
    if (constants[i]) out.factors[i].constant = *constants[i];
  }
  return out;
}

}  // namespace horolab
