#include "horolab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "horolab/error.hpp"

namespace horolab {

TensorRepShape::TensorRepShape(ProductShape shape, std::vector<int> powers)
    : shape_(std::move(shape)), powers_(std::move(powers)) {
  if (static_cast<int>(powers_.size()) != shape_.k()) {
    throw ArgumentError("TensorRepShape: need one power per factor");
  }
  std::vector<int> dims;
  for (int i = 0; i < shape_.k(); ++i) {
    if (powers_[i] < 0) throw ArgumentError("TensorRepShape: powers must be non-negative");
    for (int p = 0; p < powers_[i]; ++p) {
      slot_factor_.push_back(i);
      dims.push_back(shape_.dim(i) + 1);
    }
  }
  for (int d : dims) {
    if (dimension_ > static_cast<std::size_t>(kMaxDimension / d)) {
      throw ArgumentError("TensorRepShape: dimension exceeds " + std::to_string(kMaxDimension));
    }
    dimension_ *= static_cast<std::size_t>(d);
  }
  strides_.assign(dims.size(), 1);
  for (int s = static_cast<int>(dims.size()) - 2; s >= 0; --s) strides_[s] = strides_[s + 1] * dims[s + 1];

  const int kk = shape_.k();
  weights_.assign(dimension_ * static_cast<std::size_t>(kk), 0);
  for (std::size_t flat = 0; flat < dimension_; ++flat) {
    std::size_t rest = flat;
    for (int s = 0; s < slots(); ++s) {
      const int idx = static_cast<int>(rest / strides_[s]);
      rest %= strides_[s];
      const int f = slot_factor_[s];
      if (idx == 0) weights_[flat * kk + f] += 1;
      if (idx == shape_.dim(f)) weights_[flat * kk + f] -= 1;
    }
  }
}

std::vector<int> TensorRepShape::multi_index(std::size_t flat) const {
  if (flat >= dimension_) throw ArgumentError("multi_index: flat index out of range");
  std::vector<int> m(slots());
  for (int s = 0; s < slots(); ++s) {
    m[s] = static_cast<int>(flat / strides_[s]);
    flat %= strides_[s];
  }
  return m;
}

std::size_t TensorRepShape::flat_index(const std::vector<int>& multi) const {
  if (static_cast<int>(multi.size()) != slots()) throw ArgumentError("flat_index: wrong number of slots");
  std::size_t flat = 0;
  for (int s = 0; s < slots(); ++s) {
    if (multi[s] < 0 || multi[s] >= slot_dim(s)) {
      throw ArgumentError("flat_index: index out of range in slot " + std::to_string(s));
    }
    flat += strides_[s] * static_cast<std::size_t>(multi[s]);
  }
  return flat;
}

TensorRepPtr make_rep(ProductShape shape, std::vector<int> powers) {
  return std::make_shared<const TensorRepShape>(std::move(shape), std::move(powers));
}

// ---------------------------------------------------------------------------

TensorVector::TensorVector(TensorRepPtr rep) : rep_(std::move(rep)), coeffs_(rep_->dimension(), 0.0) {}

TensorVector::TensorVector(TensorRepPtr rep, std::vector<double> coeffs)
    : rep_(std::move(rep)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != rep_->dimension()) {
    throw ArgumentError("TensorVector: expected " + std::to_string(rep_->dimension()) + " coefficients");
  }
}

double TensorVector::norm() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

TensorVector& TensorVector::operator+=(const TensorVector& rhs) {
  if (rhs.size() != size()) throw ArgumentError("TensorVector: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

TensorVector TensorVector::operator*(double c) const {
  TensorVector out = *this;
  for (double& x : out.coeffs_) x *= c;
  return out;
}

TensorVector operator+(TensorVector a, const TensorVector& b) {
  a += b;
  return a;
}

TensorVector operator-(TensorVector a, const TensorVector& b) {
  a += b * -1.0;
  return a;
}

TensorVector pure_tensor(const TensorRepPtr& rep, const std::vector<Vector>& slot_vectors) {
  if (static_cast<int>(slot_vectors.size()) != rep->slots()) {
    throw ArgumentError("pure_tensor: expected one vector per slot");
  }
  for (int s = 0; s < rep->slots(); ++s) {
    if (slot_vectors[s].size() != rep->slot_dim(s)) throw ArgumentError("pure_tensor: slot vector length");
  }
  TensorVector out(rep);
  for (std::size_t flat = 0; flat < rep->dimension(); ++flat) {
    double c = 1.0;
    std::size_t rest = flat;
    for (int s = 0; s < rep->slots() && c != 0.0; ++s) {
      c *= slot_vectors[s][static_cast<Eigen::Index>(rest / rep->stride(s))];
      rest %= rep->stride(s);
    }
    out[flat] = c;
  }
  return out;
}

TensorVector highest_vector(const TensorRepPtr& rep) {
  TensorVector out(rep);
  out[0] = 1.0;
  return out;
}

WeightVector basis_weight(const TensorRepShape& rep, const std::vector<int>& multi_index) {
  const std::size_t flat = rep.flat_index(multi_index);
  auto w = rep.weight(flat);
  return WeightVector(w.begin(), w.end());
}

std::map<WeightVector, TensorVector> weight_components(const TensorVector& v) {
  std::map<WeightVector, TensorVector> out;
  const auto& rep = *v.rep();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    auto w = rep.weight(i);
    WeightVector key(w.begin(), w.end());
    auto it = out.find(key);
    if (it == out.end()) it = out.emplace(key, TensorVector(v.rep())).first;
    it->second[i] = v[i];
  }
  return out;
}

TensorVector act(const ProductElement& g, const TensorVector& v) {
  const auto& rep = *v.rep();
  if (!(g.shape().dims() == rep.shape().dims())) throw ArgumentError("act: shape mismatch");
  std::vector<double> cur = v.coeffs();
  std::vector<double> next(cur.size());
  for (int s = 0; s < rep.slots(); ++s) {
    const Matrix& m = g.factor(rep.slot_factor(s)).matrix();
    const std::size_t d = static_cast<std::size_t>(rep.slot_dim(s));
    const std::size_t inner = rep.stride(s);
    const std::size_t outer = cur.size() / (d * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * d * inner;
      for (std::size_t r = 0; r < d; ++r) {
        double* dst = next.data() + base + r * inner;
        std::fill(dst, dst + inner, 0.0);
        for (std::size_t c = 0; c < d; ++c) {
          const double mrc = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
          if (mrc == 0.0) continue;
          const double* src = cur.data() + base + c * inner;
          for (std::size_t q = 0; q < inner; ++q) dst[q] += mrc * src[q];
        }
      }
    }
    std::swap(cur, next);
  }
  return TensorVector(v.rep(), std::move(cur));
}

std::vector<WeightVector> weight_support(const TensorVector& v) {
  const double thr = kSupportThreshold * v.norm();
  std::set<WeightVector> seen;
  const auto& rep = *v.rep();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > thr) {
      auto w = rep.weight(i);
      seen.emplace(w.begin(), w.end());
    }
  }
  return {seen.begin(), seen.end()};
}

int lambda_max(const TensorVector& v, int factor) {
  if (factor < 0 || factor >= v.rep()->k()) throw ArgumentError("lambda_max: factor out of range");
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw DomainError("lambda_max: zero vector");
  const double thr = kSupportThreshold * nrm;
  int best = std::numeric_limits<int>::min();
  const auto& rep = *v.rep();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > thr) best = std::max(best, rep.weight(i)[factor]);
  }
  return best;
}

TensorVector v_max(const TensorVector& v, int factor) {
  const int lm = lambda_max(v, factor);
  const double thr = kSupportThreshold * v.norm();
  TensorVector out(v.rep());
  const auto& rep = *v.rep();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > thr && rep.weight(i)[factor] == lm) out[i] = v[i];
  }
  return out;
}

Matrix bracket(const Matrix& a, const Matrix& b) { return a * b - b * a; }

SL2Triple sl2_triple(const QuadraticSpace& space, const Vector& x) {
  const int n = space.n();
  if (x.size() != n - 1) throw ArgumentError("sl2_triple: expected length " + std::to_string(n - 1));
  const Vector y = 2.0 * x_inverse(x);
  SL2Triple t;
  t.X = Matrix::Zero(n + 1, n + 1);
  t.Y = Matrix::Zero(n + 1, n + 1);
  for (int j = 0; j < n - 1; ++j) {
    t.X(0, j + 1) = x[j];
    t.X(j + 1, n) = x[j];
    t.Y(j + 1, 0) = y[j];
    t.Y(n, j + 1) = y[j];
  }
  t.H = 2.0 * generator_H(space);
  return t;
}

bool lambda_plus_member(const WeightVector& mu, const WeightVector& lambda, const ProductShape& shape) {
  if (static_cast<int>(mu.size()) != shape.k() || static_cast<int>(lambda.size()) != shape.k()) {
    throw ArgumentError("lambda_plus_member: weight length must equal k");
  }
  const double m = shape.m();
  for (int i = 0; i < shape.k(); ++i) {
    const double v = lambda[i] * m - mu[i] * m + mu[i] * shape.rate(i);
    if (v < -1e-12) return false;
  }
  return true;
}

TensorVector lambda_plus_part(const TensorVector& v, const WeightVector& lambda) {
  const ProductShape& shape = v.rep()->shape();
  return restrict_weights(v, [&](std::span<const int> mu) {
    return lambda_plus_member(WeightVector(mu.begin(), mu.end()), lambda, shape);
  });
}

TensorVector pr_plus(const TensorVector& v) {
  const ProductShape& shape = v.rep()->shape();
  return restrict_weights(v, [&](std::span<const int> mu) {
    double e = 0.0;
    for (int i = 0; i < shape.k(); ++i) e += mu[i] * shape.rate(i);
    return e > 0.0;
  });
}

bool is_nonexpanding(const TensorVector& v, double tol) { return pr_plus(v).norm() <= tol * v.norm(); }

// ---------------------------------------------------------------------------

std::vector<std::size_t> basis_of_weight(const TensorRepShape& rep, const WeightVector& lambda) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rep.dimension(); ++i) {
    auto w = rep.weight(i);
    if (std::equal(w.begin(), w.end(), lambda.begin(), lambda.end())) out.push_back(i);
  }
  return out;
}

std::vector<WeightVector> all_weights(const TensorRepShape& rep) {
  std::set<WeightVector> seen;
  for (std::size_t i = 0; i < rep.dimension(); ++i) {
    auto w = rep.weight(i);
    seen.emplace(w.begin(), w.end());
  }
  return {seen.begin(), seen.end()};
}

namespace {

// Weight-lambda_i vector of the single-factor representation (R^{n+1})^{(x)p}.
std::vector<double> random_factor_component(int n, int p, int lambda, std::mt19937_64& rng) {
  const std::size_t d = static_cast<std::size_t>(n + 1);
  std::size_t dim = 1;
  for (int s = 0; s < p; ++s) dim *= d;
  std::normal_distribution<double> gauss;
  std::vector<double> out(dim, 0.0);
  double mx = 0.0;
  for (std::size_t flat = 0; flat < dim; ++flat) {
    int w = 0;
    std::size_t rest = flat;
    for (int s = 0; s < p; ++s) {
      const int idx = static_cast<int>(rest % d);
      rest /= d;
      if (idx == 0) ++w;
      if (idx == n) --w;
    }
    if (w == lambda) {
      out[flat] = gauss(rng);
      mx = std::max(mx, std::abs(out[flat]));
    }
  }
  if (mx > 0.0) {
    for (double& c : out) c /= mx;
  }
  return out;
}

}  // namespace

TensorVector random_weight_pure_tensor(const TensorRepPtr& rep, const WeightVector& lambda, std::mt19937_64& rng) {
  const auto& shape = rep->shape();
  if (static_cast<int>(lambda.size()) != shape.k()) throw ArgumentError("random_weight_pure_tensor: weight length");
  // Per-factor components use their own slot ordering (first slot most significant, as in TensorRepShape).
  std::vector<std::vector<double>> parts;
  for (int i = 0; i < shape.k(); ++i) {
    if (std::abs(lambda[i]) > rep->powers()[i]) throw ArgumentError("random_weight_pure_tensor: weight out of range");
    parts.push_back(random_factor_component(shape.dim(i), rep->powers()[i], lambda[i], rng));
  }
  // The flat layout of W is the concatenation of factor layouts, so the pure tensor's
  // coefficient is the product of the per-factor coefficients.
  TensorVector out(rep);
  std::vector<std::size_t> factor_size(shape.k());
  for (int i = 0; i < shape.k(); ++i) factor_size[i] = parts[i].size();
  for (std::size_t flat = 0; flat < rep->dimension(); ++flat) {
    std::size_t rest = flat;
    double c = 1.0;
    for (int i = shape.k() - 1; i >= 0; --i) {
      const std::size_t local = rest % factor_size[i];
      rest /= factor_size[i];
      // random_factor_component indexes its slots little-endian; convert to big-endian.
      std::size_t le = 0;
      std::size_t tmp = local;
      const std::size_t d = static_cast<std::size_t>(shape.dim(i) + 1);
      for (int s = 0; s < rep->powers()[i]; ++s) {
        le = le * d + tmp % d;
        tmp /= d;
      }
      c *= parts[i][le];
      if (c == 0.0) break;
    }
    out[flat] = c;
  }
  return out;
}

BlockVector random_blocks(const ProductShape& shape, double r_min, double r_max, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> radius(r_min, r_max);
  BlockVector y;
  for (int i = 0; i < shape.k(); ++i) {
    Vector b(shape.dim(i) - 1);
    do {
      for (Eigen::Index j = 0; j < b.size(); ++j) b[j] = gauss(rng);
    } while (b.norm() < 1e-6);
    y.push_back(b / b.norm() * radius(rng));
  }
  return y;
}

bool claim_weights_increase(const TensorVector& v_lambda, const WeightVector& lambda, const BlockVector& y) {
  const TensorVector w = act(elem_u(v_lambda.rep()->shape(), y), v_lambda);
  for (const auto& mu : weight_support(w)) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu[i] - lambda[i] < 0) return false;
    }
  }
  return true;
}

bool claim_lambda_plus_nonempty(const TensorVector& v_lambda, const WeightVector& lambda, const BlockVector& y) {
  const ProductShape& shape = v_lambda.rep()->shape();
  const TensorVector w = act(elem_u(shape, y), v_lambda);
  for (const auto& mu : weight_support(w)) {
    if (lambda_plus_member(mu, lambda, shape)) return true;
  }
  return false;
}

D1Estimate estimate_D1(const TensorRepPtr& rep, double r_min, double r_max, std::size_t samples_per_weight,
                       std::uint64_t seed) {
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw ArgumentError("estimate_D1: need 0 < r_min <= r_max");
  std::mt19937_64 rng(seed);
  D1Estimate est;
  est.d1 = std::numeric_limits<double>::infinity();
  const ProductShape& shape = rep->shape();
  for (const auto& lambda : all_weights(*rep)) {
    for (std::size_t s = 0; s < samples_per_weight; ++s) {
      const TensorVector v = random_weight_pure_tensor(rep, lambda, rng);
      const BlockVector y = random_blocks(shape, r_min, r_max, rng);
      const double val = lambda_plus_part(act(elem_u(shape, y), v), lambda).norm() / v.norm();
      ++est.samples;
      if (val < est.d1) {
        est.d1 = val;
        est.worst_weight = lambda;
      }
    }
  }
  return est;
}

}  // namespace horolab
