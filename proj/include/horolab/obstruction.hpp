#pragma once

// Obstruction sets for equidistribution of shrinking translates:
// diagonal Moebius embeddings of products of subspheres (closed orbits) and
// constant-coordinate constraints from null vectors (non-closed orbits).

#include <optional>
#include <string>
#include <vector>

#include "horolab/curve.hpp"
#include "horolab/weights.hpp"

namespace horolab {

/// A partition of the factors into blocks J with sphere dimensions m_J, and one
/// Moebius element g_j per factor. Block j-indices are 0-based.
class MobiusEmbeddingSpec {
 public:
  MobiusEmbeddingSpec(ProductShape shape, std::vector<std::vector<int>> partition, std::vector<int> m,
                      std::vector<GroupElement> mobius);

  /// Identity Moebius elements, a single block holding every factor, m = min n_j.
  static MobiusEmbeddingSpec diagonal(const ProductShape& shape);

  const ProductShape& shape() const noexcept { return shape_; }
  const std::vector<std::vector<int>>& partition() const noexcept { return partition_; }
  const std::vector<int>& m() const noexcept { return m_; }
  const std::vector<GroupElement>& mobius() const noexcept { return mobius_; }
  int block_of(int factor) const { return block_of_.at(factor); }

 private:
  ProductShape shape_;
  std::vector<std::vector<int>> partition_;
  std::vector<int> m_;
  std::vector<GroupElement> mobius_;
  std::vector<int> block_of_;
};

/// Standard inclusion S^{m-1} -> S^{n-1} into the last m coordinates (so the pole stays on it).
Vector include_sphere(const Vector& p, int n);

/// One point per block (m_J = 1 blocks ignore theirs and use the point (1)); returns a point per factor.
std::vector<BoundaryPoint> embed_point(const MobiusEmbeddingSpec& spec, const std::vector<Vector>& block_points);

double distance_to_obstruction(const std::vector<BoundaryPoint>& tuple, const MobiusEmbeddingSpec& spec);
bool is_on(const std::vector<BoundaryPoint>& tuple, const MobiusEmbeddingSpec& spec, double tol);

/// Per-factor boundary image I(u(phi_i(s))).
std::vector<BoundaryPoint> curve_boundary_tuple(const CurveSpec& curve, double s);

/// Fraction of the grid s_g = g / (grid_n - 1) whose boundary tuple lies within tol of the set.
double curve_obstruction_measure(const CurveSpec& curve, const MobiusEmbeddingSpec& spec, double tol, int grid_n);

// ---------------------------------------------------------------------------

class UnstableDirectionSpec {
 public:
  static constexpr double kNullTolerance = 1e-10;

  UnstableDirectionSpec(ProductShape shape, std::vector<int> powers, std::vector<Vector> null_vectors);

  const ProductShape& shape() const noexcept { return shape_; }
  const std::vector<int>& powers() const noexcept { return powers_; }
  const std::vector<Vector>& null_vectors() const noexcept { return v_; }

 private:
  ProductShape shape_;
  std::vector<int> powers_;
  std::vector<Vector> v_;
};

/// x_i = -(v_i1, ..., v_i(n-1)) / v_in, or nullopt when v_in = 0 (no constraint from factor i).
/// Throws ConsistencyError if the constant fails to annihilate the leading coefficient.
std::optional<Vector> nonclosed_constant(const UnstableDirectionSpec& spec, int factor);

/// Leading e^{zeta t} coefficient v_0 + <v_mid, x> + v_n |x|^2 / 2 of a(t) u(x) v.
double leading_coefficient(const Vector& v, const Vector& x);

/// a_i(t) u_i(x) v in closed form.
Vector translate_null_vector(const Vector& v, const Vector& x, double t, double zeta);

enum class Growth { Bounded, Exponential };

const char* growth_name(Growth g);

struct GrowthProbe {
  Growth growth = Growth::Bounded;
  double rate = 0.0;                    // fitted log-slope over the upper half of the ladder
  std::vector<Growth> factor_growth;    // classification of |a_i(t) u_i(x_i) v_i|^{p_i}
  std::vector<double> factor_rate;
  std::vector<double> direct;           // |a(t) u(x) w|, tensor action
  std::vector<double> closed;           // product of closed-form factor norms
  double max_disagreement = 0.0;        // |direct - closed| / conditioning scale, max over the ladder
};

/// Growth of a(t) u(x) (v_1^{p_1} (x) ... (x) v_k^{p_k}) along the ladder.
/// EXPONENTIAL iff the fitted slope is >= 0.5 min_{p_i >= 1} p_i zeta_i; p = 0 everywhere is BOUNDED.
GrowthProbe unstable_growth_probe(const UnstableDirectionSpec& spec, const BlockVector& x,
                                  const std::vector<double>& t_ladder);

// ---------------------------------------------------------------------------
// Diagnostics reported by `horolab obstruct`.

struct FactorDiagnostic {
  int block = -1;              // Moebius spec only
  bool constrained = true;     // unstable spec: false when v_in = 0
  Vector constant;             // unstable spec: the constant x_i
  double on_fraction = 0.0;    // grid fraction where this factor alone meets its constraint
  double min_distance = 0.0;   // min over the grid of this factor's own distance
  double argmin_s = 0.0;
};

struct ObstructionDiagnostics {
  double measure = 0.0;        // grid fraction on the obstruction set
  double min_distance = 0.0;
  double argmin_s = 0.0;
  std::vector<FactorDiagnostic> factors;
};

/// Per factor: distance of the pulled-back point to the included subsphere (forbidden coordinates).
ObstructionDiagnostics diagnose_obstruction(const CurveSpec& curve, const MobiusEmbeddingSpec& spec, double tol,
                                            int grid_n);
/// Per factor: |phi_i(s) - x_i| for the constant x_i; the measure counts s where some constrained
/// factor meets its constant.
ObstructionDiagnostics diagnose_obstruction(const CurveSpec& curve, const UnstableDirectionSpec& spec, double tol,
                                            int grid_n);

}  // namespace horolab
