#pragma once

// Tensor-power representations W = (R^{n_1+1})^{(x)p_1} (x) ... (x) (R^{n_k+1})^{(x)p_k}
// of a product of SO(n_i,1)'s, and their weight decomposition relative to
// H_C = (H_1, ..., H_k).

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "horolab/lorentz.hpp"

namespace horolab {

using WeightVector = std::vector<int>;

class TensorRepShape {
 public:
  static constexpr std::int64_t kMaxDimension = 1'000'000;

  TensorRepShape(ProductShape shape, std::vector<int> powers);

  const ProductShape& shape() const noexcept { return shape_; }
  const std::vector<int>& powers() const noexcept { return powers_; }
  int k() const noexcept { return shape_.k(); }
  std::size_t dimension() const noexcept { return dimension_; }
  int slots() const noexcept { return static_cast<int>(slot_factor_.size()); }
  int slot_factor(int slot) const { return slot_factor_.at(slot); }
  int slot_dim(int slot) const { return shape_.dim(slot_factor_.at(slot)) + 1; }
  std::size_t stride(int slot) const { return strides_.at(slot); }

  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::vector<int>& multi) const;

  /// Weight of basis vector `flat`, one entry per factor.
  std::span<const int> weight(std::size_t flat) const {
    return {weights_.data() + flat * static_cast<std::size_t>(k()), static_cast<std::size_t>(k())};
  }

 private:
  ProductShape shape_;
  std::vector<int> powers_;
  std::vector<int> slot_factor_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_ = 1;
  std::vector<int> weights_;
};

using TensorRepPtr = std::shared_ptr<const TensorRepShape>;

TensorRepPtr make_rep(ProductShape shape, std::vector<int> powers);

class TensorVector {
 public:
  explicit TensorVector(TensorRepPtr rep);
  TensorVector(TensorRepPtr rep, std::vector<double> coeffs);

  const TensorRepPtr& rep() const noexcept { return rep_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::vector<double>& coeffs() noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// Sup-norm in the standard basis (a weight basis for H_C).
  double norm() const;

  TensorVector& operator+=(const TensorVector& rhs);
  TensorVector operator*(double c) const;

 private:
  TensorRepPtr rep_;
  std::vector<double> coeffs_;
};

TensorVector operator+(TensorVector a, const TensorVector& b);
TensorVector operator-(TensorVector a, const TensorVector& b);

/// v_1 (x) v_2 (x) ... with one vector per slot (slot order: factor 1 slots first).
TensorVector pure_tensor(const TensorRepPtr& rep, const std::vector<Vector>& slot_vectors);
/// w_0 = e_0^{(x)p_1} (x) ... (x) e_0^{(x)p_k}.
TensorVector highest_vector(const TensorRepPtr& rep);

/// Per factor: +1 for each slot at index 0, -1 for each slot at index n_i.
WeightVector basis_weight(const TensorRepShape& rep, const std::vector<int>& multi_index);

/// Components [v]_lambda for every occupied weight; zero entries are skipped.
std::map<WeightVector, TensorVector> weight_components(const TensorVector& v);

/// Slot-wise matrix action of g on v.
TensorVector act(const ProductElement& g, const TensorVector& v);

/// Componentwise threshold used when reading weight supports.
constexpr double kSupportThreshold = 1e-12;

/// Occupied weights of v (entries above kSupportThreshold * |v|).
std::vector<WeightVector> weight_support(const TensorVector& v);

/// Max occupied weight in factor i. Throws DomainError for v = 0.
int lambda_max(const TensorVector& v, int factor);
/// Sum of the components of v whose factor-i weight equals lambda_max(v, i).
TensorVector v_max(const TensorVector& v, int factor);

struct SL2Triple {
  Matrix X;
  Matrix Y;
  Matrix H;
};

/// X from x, Y from 2 x^{-1}, H = 2 H_i, satisfying the standard sl_2 relations
/// [H,X] = 2X, [H,Y] = -2Y, [X,Y] = H.
SL2Triple sl2_triple(const QuadraticSpace& space, const Vector& x);

Matrix bracket(const Matrix& a, const Matrix& b);

/// lambda_i m - mu_i m + mu_i zeta_i >= 0 for all i.
bool lambda_plus_member(const WeightVector& mu, const WeightVector& lambda, const ProductShape& shape);

/// Keep only the components whose weight satisfies `keep`.
template <class Pred>
TensorVector restrict_weights(const TensorVector& v, Pred keep) {
  TensorVector out(v.rep());
  const auto& rep = *v.rep();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0 && keep(rep.weight(i))) out[i] = v[i];
  }
  return out;
}

/// [v]_{Lambda^+(lambda)}.
TensorVector lambda_plus_part(const TensorVector& v, const WeightVector& lambda);

/// Projection onto V^+(A): components with sum_i mu_i zeta_i > 0.
TensorVector pr_plus(const TensorVector& v);
/// |pr_plus(v)| <= tol |v|, i.e. lim a(t) v exists.
bool is_nonexpanding(const TensorVector& v, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Sampling helpers shared by the claim checks and the bound estimators.

/// Basis indices of weight `lambda`.
std::vector<std::size_t> basis_of_weight(const TensorRepShape& rep, const WeightVector& lambda);
std::vector<WeightVector> all_weights(const TensorRepShape& rep);

/// Random unit (sup-norm) pure tensor v_{lambda_1} (x) ... (x) v_{lambda_k} of weight lambda:
/// each factor component is a random combination of that factor's weight-lambda_i basis.
TensorVector random_weight_pure_tensor(const TensorRepPtr& rep, const WeightVector& lambda, std::mt19937_64& rng);

/// Random block vector with each block of Euclidean norm in [r_min, r_max].
BlockVector random_blocks(const ProductShape& shape, double r_min, double r_max, std::mt19937_64& rng);

/// Claim: every occupied weight mu of u(y) v_lambda has mu_i - lambda_i a non-negative integer.
bool claim_weights_increase(const TensorVector& v_lambda, const WeightVector& lambda, const BlockVector& y);
/// Claim: some occupied weight of u(y) v_lambda lies in Lambda^+(lambda).
bool claim_lambda_plus_nonempty(const TensorVector& v_lambda, const WeightVector& lambda, const BlockVector& y);

struct D1Estimate {
  double d1 = 0.0;
  WeightVector worst_weight;
  std::size_t samples = 0;
};

/// Sampled min over blocks y with |y_i| in [r_min, r_max] and unit pure tensors v_lambda of
/// |[u(y) v_lambda]_{Lambda^+(lambda)}|, over all weights lambda.
D1Estimate estimate_D1(const TensorRepPtr& rep, double r_min, double r_max, std::size_t samples_per_weight,
                       std::uint64_t seed);

}  // namespace horolab
