#include "horolab/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "horolab/bounds.hpp"
#include "horolab/error.hpp"
#include "horolab/harness.hpp"
#include "horolab/json_io.hpp"
#include "horolab/obstruction.hpp"
#include "horolab/weights.hpp"

namespace horolab {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

CheckResult timed(const std::string& name, double budget, const std::function<Outcome()>& fn) {
  CheckResult r;
  r.name = name;
  r.budget = budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Outcome o = fn();
    r.passed = o.passed;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget > 0 && r.seconds >= budget) {
    r.passed = false;
    r.detail += "; runtime " + fmt(r.seconds) + " s exceeds " + fmt(budget) + " s";
  }
  return r;
}

Vector gaussian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Vector unit(int n, std::mt19937_64& rng) {
  Vector v = gaussian(n, rng);
  while (v.norm() < 1e-3) v = gaussian(n, rng);
  return v / v.norm();
}

Vector random_null(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n + 1);
  for (int i = 1; i < n; ++i) v[i] = g(rng);
  double vn = g(rng);
  if (std::abs(vn) < 0.2) vn = vn < 0 ? -0.2 : 0.2;
  v[n] = vn;
  v[0] = v.segment(1, n - 1).squaredNorm() / (2 * vn);
  return v;
}

CurveSpec random_curve(const ProductShape& shape, int degree, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::vector<Polynomial>> f(shape.k());
  for (int i = 0; i < shape.k(); ++i) {
    for (int c = 0; c < shape.dim(i) - 1; ++c) {
      std::vector<double> co(degree + 1);
      for (double& x : co) x = g(rng);
      f[i].emplace_back(co);
    }
  }
  return CurveSpec(shape, f);
}

// Regular quadratic curve used by the bound estimates: phi_i,c(s) = 0.1 c + (1 + c) s + 0.3 (i + 1) s^2.
CurveSpec regular_curve(const ProductShape& shape) {
  std::vector<std::vector<Polynomial>> f(shape.k());
  for (int i = 0; i < shape.k(); ++i) {
    for (int c = 0; c < shape.dim(i) - 1; ++c) f[i].emplace_back(std::vector<double>{0.1 * c, 1.0 + c, 0.3 * (i + 1)});
  }
  return CurveSpec(shape, f);
}

CurveSpec pair_curve(std::vector<double> rates, std::vector<double> c1, std::vector<double> c2) {
  return CurveSpec(ProductShape({2, 2}, std::move(rates)), {{Polynomial(std::move(c1))}, {Polynomial(std::move(c2))}});
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// Criteria

Outcome group_law(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tdist(-3.0, 3.0), zdist(0.2, 2.0);
  double worst_add = 0.0, worst_conj = 0.0, worst_member = 0.0;
  const int per_kind = 3334;
  for (int trial = 0; trial < per_kind; ++trial) {
    const QuadraticSpace q(std::array<int, 3>{2, 3, 5}[trial % 3]);
    const int d = q.n() - 1;
    const Vector x = gaussian(d, rng), y = gaussian(d, rng);
    worst_add = std::max(worst_add, max_norm((elem_u(q, x) * elem_u(q, y)).matrix() - elem_u(q, x + y).matrix()));

    const double t = tdist(rng), zeta = zdist(rng);
    const Matrix lhs = (elem_a(q, t, zeta) * elem_u(q, x) * elem_a(q, -t, zeta)).matrix();
    const Matrix rhs = elem_u(q, std::exp(zeta * t) * x).matrix();
    worst_conj = std::max(worst_conj, max_norm(lhs - rhs) / std::max(1.0, max_norm(rhs)));

    GroupElement g = GroupElement::identity(q);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int f = 0; f < 20; ++f) {
      switch (pick(rng)) {
        case 0: g = g * elem_u(q, gaussian(d, rng, 0.5)); break;
        case 1: g = g * elem_u_minus(q, gaussian(d, rng, 0.5)); break;
        default: g = g * elem_a(q, 0.5 * tdist(rng), 1.0); break;
      }
    }
    worst_member = std::max(worst_member, g.membership_residual());
  }
  const bool ok = worst_add <= 1e-10 && worst_conj <= 1e-9 && worst_member <= 1e-8;
  return {ok, std::to_string(3 * per_kind) + " checks; u-additivity " + fmt(worst_add) + " (<= 1e-10), a-conjugation " +
                  fmt(worst_conj) + " (<= 1e-9 rel), 20-fold membership " + fmt(worst_member) + " (<= 1e-8 |g|^2)"};
}

Outcome weyl(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int n : {2, 3, 5}) {
    const QuadraticSpace q(n);
    for (int trial = 0; trial < 100; ++trial) {
      const GroupElement w = weyl_from_decomposition(q, unit(n - 1, rng));
      const GroupElement winv = w.inverse();
      for (double t : {-2.0, 1.0, 5.0}) {
        const Matrix m = (w * elem_a(q, t, 1.0) * winv * elem_a(q, t, 1.0)).matrix();
        worst = std::max(worst, max_norm(m - Matrix::Identity(n + 1, n + 1)));
      }
    }
  }
  return {worst <= 1e-8, "max |w a(t) w^-1 a(t) - 1| = " + fmt(worst) + " (<= 1e-8) over n in {2,3,5}, 100 X each"};
}

Outcome sl2(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  double worst = 0.0;
  for (int n : {2, 3, 4}) {
    const QuadraticSpace q(n);
    for (int trial = 0; trial < 100; ++trial) {
      const SL2Triple t = sl2_triple(q, radius(rng) * unit(n - 1, rng));
      worst = std::max({worst, max_norm(bracket(t.H, t.X) - 2 * t.X), max_norm(bracket(t.H, t.Y) + 2 * t.Y),
                        max_norm(bracket(t.X, t.Y) - t.H)});
    }
  }
  return {worst <= 1e-12, "max bracket residual " + fmt(worst) + " (<= 1e-12); [H,Y] = -2Y"};
}

Outcome claims(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> power(0, 2);
  int violations_increase = 0, violations_nonempty = 0, count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> p{power(rng), power(rng)};
    if (p[0] + p[1] == 0) p[trial % 2] = 1;
    const ProductShape shape({2, 3}, {1.0, trial % 2 ? 0.8 : 1.0});
    const auto rep = make_rep(shape, p);
    const auto weights = all_weights(*rep);
    const WeightVector lambda = weights[std::uniform_int_distribution<std::size_t>(0, weights.size() - 1)(rng)];
    const TensorVector v = random_weight_pure_tensor(rep, lambda, rng);
    const BlockVector y = random_blocks(shape, 0.3, 2.0, rng);
    violations_increase += !claim_weights_increase(v, lambda, y);
    violations_nonempty += !claim_lambda_plus_nonempty(v, lambda, y);
    ++count;
  }
  return {violations_increase == 0 && violations_nonempty == 0,
          std::to_string(count) + " pure tensors; weight-increase violations " + std::to_string(violations_increase) +
              ", empty Lambda+ intersections " + std::to_string(violations_nonempty)};
}

struct D2Case {
  std::vector<int> dims;
  std::vector<double> rates;
  std::vector<int> powers;
};

const std::vector<D2Case>& d2_cases() {
  static const std::vector<D2Case> cases{
      {{2}, {1.0}, {2}}, {{2, 3}, {1.0, 1.0}, {1, 1}}, {{2, 2}, {1.0, 0.8}, {2, 1}}};
  return cases;
}

BoundReport d2_report(const D2Case& c, std::uint64_t seed, std::size_t samples) {
  const ProductShape shape(c.dims, c.rates);
  std::vector<double> ladder;
  for (int t = 2; t <= 12; ++t) ladder.push_back(t);
  return estimate_D2(make_rep(shape, c.powers), regular_curve(shape), 0.5, ladder, samples, seed, 0, "regular_quadratic");
}

Outcome growth_lower_bound(std::uint64_t seed) {
  bool ok = true;
  std::ostringstream detail;
  for (const auto& c : d2_cases()) {
    const BoundReport r = d2_report(c, seed, 100);
    double late = std::numeric_limits<double>::infinity();
    std::vector<double> early;
    for (const auto& row : r.per_t) {
      if (row.t >= 8) late = std::min(late, row.min);
      if (row.t <= 6) early.push_back(row.median);
    }
    const double ref = median(early);
    const bool case_ok = r.d2 > 0 && late >= 0.5 * ref;
    ok = ok && case_ok;
    detail << "p=(";
    for (std::size_t i = 0; i < c.powers.size(); ++i) detail << (i ? "," : "") << c.powers[i];
    detail << ") D2 " << fmt(r.d2) << ", min[8,12] " << fmt(late) << " vs 0.5*median[2,6] " << fmt(0.5 * ref) << "; ";
  }
  return {ok, detail.str()};
}

Outcome cdj(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  bool ok = true;
  std::ostringstream detail;
  for (auto [d, lo, hi] : std::vector<std::tuple<int, double, double>>{{1, 0, 1}, {2, 1, 2}, {4, 0, 1}}) {
    const double c = c_dJ(d, lo, hi);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> a(d + 1);
      double mx = 0;
      for (double& x : a) {
        x = u(rng);
        mx = std::max(mx, std::abs(x));
      }
      worst = std::min(worst, poly_sup_abs(a, lo, hi) - c * mx);
    }
    ok = ok && c > 0 && worst >= -1e-9;
    detail << "C(" << d << ",[" << lo << "," << hi << "]) = " << fmt(c) << ", min slack " << fmt(worst) << "; ";
  }
  return {ok, detail.str()};
}

Outcome conjugation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<ProductShape> shapes{ProductShape({2, 3}, {1.0, 0.7}), ProductShape({2}, {1.0}),
                                         ProductShape({3, 2}, {1.0, 1.0})};
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ProductShape& shape = shapes[trial % shapes.size()];
    const CurveSpec curve = random_curve(shape, 5, rng);
    const double s = unif(rng), t = 12.0 * unif(rng), eta = 1.0 - unif(rng);
    const int l = shape.min_taylor_order() + static_cast<int>(rng() % 3);
    const double h = eta * std::exp(-shape.m() * t);
    double rnorm = 0.0;
    for (const auto& b : taylor_R(curve, s, l).R(h)) rnorm = std::max(rnorm, b.norm());
    worst = std::max(worst, conjugation_residual(curve, s, t, eta, l) / (1 + rnorm * rnorm));
  }
  return {worst <= 1e-9, "max residual / (1 + |R(h)|^2) = " + fmt(worst) + " (<= 1e-9) over 1000 inputs"};
}

Outcome unipotent(std::uint64_t) {
  bool ok = true;
  std::ostringstream detail;
  for (double z2 : {0.8, 1.0}) {
    const CurveSpec c = pair_curve({1.0, z2}, {0, 1, 0.7}, {0, 1.5, -0.6});
    std::vector<double> ts, res;
    double alpha = 0.0;
    for (double t = 4; t <= 12; t += 0.5) {
      const UnipotentResidual u = unipotent_invariance_residual(c, 0.4, 0.4, t, 1.0, 3);
      ts.push_back(t);
      res.push_back(u.residual);
      alpha = u.alpha;
    }
    const double slope = -fit_log_slope(ts, res);
    ok = ok && std::abs(slope - alpha) <= 0.2 * alpha;
    detail << "zeta=(1," << z2 << "): slope " << fmt(slope) << " vs alpha " << fmt(alpha) << "; ";
  }
  return {ok, detail.str()};
}

Outcome taylor_vs_direct(std::uint64_t) {
  const CurveSpec c = pair_curve({1.0, 1.0}, {0, 1, 0, 0, 0, 1}, {0, 1, 0, 0, 0, -0.5});
  const int l = 5;
  std::vector<double> ts, diffs;
  for (double t = 4; t <= 12; t += 0.5) {
    ts.push_back(t);
    diffs.push_back(distance(translate_element(c, {t, 0.3, l, 1.0}), direct_translate_element(c, 0.3, t, 1.0)));
  }
  const double expected = c.shape().m() * l - c.shape().rate(0);
  const double slope = -fit_log_slope(ts, diffs);
  return {std::abs(slope - expected) <= 0.2 * expected,
          "decay slope " + fmt(slope) + " vs m l - zeta_1 = " + fmt(expected) + " (20%)"};
}

Outcome growth_probe(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> ladder;
  for (int t = 0; t <= 12; ++t) ladder.push_back(t);
  int wrong = 0, probes = 0;
  double disagreement = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ProductShape shape({2, 3}, {1.0, trial % 2 ? 1.0 : 0.7});
    const std::vector<int> powers{1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2)};
    const UnstableDirectionSpec spec(shape, powers, {random_null(2, rng), random_null(3, rng)});
    for (int i = 0; i < 2; ++i) {
      const auto c = nonclosed_constant(spec, i);
      if (!c) {
        ++wrong;
        continue;
      }
      const BlockVector base{unit(1, rng), unit(2, rng)};
      for (int coord = 0; coord < shape.dim(i) - 1; ++coord) {
        for (double delta : {0.0, -0.25, 0.25}) {
          BlockVector x = base;
          x[i] = *c;
          x[i][coord] += delta;
          const GrowthProbe p = unstable_growth_probe(spec, x, ladder);
          disagreement = std::max(disagreement, p.max_disagreement);
          wrong += p.factor_growth[i] != (delta == 0.0 ? Growth::Bounded : Growth::Exponential);
          ++probes;
        }
      }
    }
  }
  return {wrong == 0 && disagreement <= 1e-8, std::to_string(probes) + " probes, " + std::to_string(wrong) +
                                                  " misclassified; closed vs direct " + fmt(disagreement) + " (<= 1e-8)"};
}

ExperimentConfig positive_config() {
  ExperimentConfig cfg;
  cfg.curve = CurveSpec(ProductShape({2}, {1.0}), {{Polynomial({0.0, 1.0})}});
  cfg.curve_id = "line";
  cfg.t_values = {4.0, 8.0, 12.0};
  cfg.s_values = ExperimentConfig::golden_s_grid(20);
  cfg.eta_count = 1000;
  cfg.seed = 20240917;
  return cfg;
}

ExperimentConfig pair_config(std::vector<double> second, const std::string& id) {
  ExperimentConfig cfg = positive_config();
  cfg.curve = pair_curve({1.0, 1.0}, {0.0, 1.0}, std::move(second));
  cfg.curve_id = id;
  return cfg;
}

Outcome positive_control(std::uint64_t) {
  const ExperimentConfig cfg = positive_config();
  const ExperimentReport rep = run_translate_experiment(cfg);
  const int last = static_cast<int>(cfg.t_values.size()) - 1;
  const double cusp = cusp_fraction(rep, last, 3.0), ks = theta_uniformity(rep, last);
  const std::size_t n = select_samples(rep, last, 0).size();
  const bool ok = n == 20000 && std::abs(cusp - 1 / std::numbers::pi) <= 0.06 && ks <= 0.03;
  return {ok, std::to_string(n) + " samples at t=12: cusp(Y=3) " + fmt(cusp) + " vs 1/pi " + fmt(1 / std::numbers::pi) +
                  " (+-0.06), theta KS " + fmt(ks) + " (<= 0.03)"};
}

Outcome negative_control(std::uint64_t) {
  const ExperimentConfig diag = pair_config({0.0, 1.0}, "diagonal");
  const ExperimentConfig indep = pair_config({0.0, 0.5, 1.0}, "independent");
  const ExperimentReport d = run_translate_experiment(diag);
  const ExperimentReport b = run_translate_experiment(indep);
  const double cd = d.per_t.back().correlation, cb = b.per_t.back().correlation;
  const double measure =
      curve_obstruction_measure(*diag.curve, MobiusEmbeddingSpec::diagonal(diag.curve->shape()), 1e-9, 1001);
  const bool ok = cd >= 4 * cb && measure == 1.0;
  return {ok, "t=12 correlation diagonal " + fmt(cd) + " vs 4 x baseline " + fmt(4 * cb) + "; diagonal obstruction measure " +
                  fmt(measure)};
}

// ---------------------------------------------------------------------------
// Extra suite checks

Outcome boundary_invariance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int bruhat_changes = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const QuadraticSpace q(2 + trial % 4);
    const int d = q.n() - 1;
    const GroupElement h = elem_u(q, gaussian(d, rng)) * elem_u_minus(q, gaussian(d, rng, 0.5)) * elem_a(q, g(rng), 1.0);
    const GroupElement p = elem_u_minus(q, gaussian(d, rng)) * elem_a(q, g(rng), 1.0);
    worst = std::max(worst, (boundary_point(p * h).coords() - boundary_point(h).coords()).lpNorm<Eigen::Infinity>());
    bruhat_changes += bruhat_cell(p * h) != bruhat_cell(h);
    const GroupElement w = weyl_from_decomposition(q, unit(d, rng));
    bruhat_changes += bruhat_cell(p * w) != BruhatCell::Small;
  }
  return {worst <= 1e-9 && bruhat_changes == 0,
          "boundary_point P^- invariance " + fmt(worst) + " (<= 1e-9); Bruhat label changes " + std::to_string(bruhat_changes)};
}

Outcome p_minus_round_trip(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int count = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const QuadraticSpace q(2 + trial % 4);
    const int d = q.n() - 1;
    const GroupElement g = elem_u(q, gaussian(d, rng)) * elem_u_minus(q, gaussian(d, rng)) *
                           elem_a(q, gaussian(1, rng)[0], 1.0) * elem_u(q, gaussian(d, rng));
    if (bruhat_cell(g) != BruhatCell::Big) continue;
    const GroupElement back = p_minus_compose(q, p_minus_factorize(g));
    worst = std::max(worst, max_norm(back.matrix() - g.matrix()) / std::max(1.0, max_norm(g.matrix())));
    ++count;
  }
  return {worst <= 1e-8 && count > 0, std::to_string(count) + " big-cell elements, reconstruction " + fmt(worst)};
}

Outcome act_homomorphism(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  const ProductShape shape({2, 3}, {1.0, 0.8});
  const auto rep = make_rep(shape, {2, 1});
  for (int trial = 0; trial < 50; ++trial) {
    const ProductElement g = elem_u(shape, random_blocks(shape, 0.2, 1.5, rng)) * elem_a(shape, 0.3);
    const ProductElement h = elem_u_minus(shape, random_blocks(shape, 0.2, 1.5, rng)) * elem_a(shape, -0.2);
    TensorVector v(rep);
    std::normal_distribution<double> gd;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = gd(rng);
    const TensorVector lhs = act(g, act(h, v)), rhs = act(g * h, v);
    worst = std::max(worst, (lhs - rhs).norm() / std::max(1e-300, rhs.norm()));
  }
  return {worst <= 1e-9, "act(g, act(h, v)) vs act(gh, v): " + fmt(worst) + " relative (<= 1e-9)"};
}

Outcome d1_positive(std::uint64_t seed) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : d2_cases()) {
    worst = std::min(worst, estimate_D1(make_rep(ProductShape(c.dims, c.rates), c.powers), 0.5, 2.0, 20, seed).d1);
  }
  return {worst > 1e-6, "sampled D1 over default shapes " + fmt(worst) + " (> 1e-6)"};
}

Outcome taylor_order(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ProductShape shape({2, 3}, {1.0, 0.7});
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 10; ++trial) {
    const CurveSpec c = random_curve(shape, 7, rng);
    const int l = 2 + trial % 3;
    const double s = 0.3;
    const TaylorData td = taylor_R(c, s, l);
    std::vector<double> logs, errs;
    for (double h : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
      const BlockVector a = c(s + h), b = c(s), r = td.R(h);
      double e = 0.0;
      for (int i = 0; i < shape.k(); ++i) e = std::max(e, (a[i] - b[i] - r[i]).norm());
      logs.push_back(std::log(h));
      errs.push_back(e);
    }
    worst = std::min(worst, fit_log_slope(logs, errs) - (l - 0.1));
  }
  return {worst >= 0, "min log-log slope - (l - 0.1) = " + fmt(worst)};
}

Outcome embed_round_trip(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  bool rejected = false;
  try {
    MobiusEmbeddingSpec(ProductShape({2, 2}, {1.0, 0.5}), {{0, 1}}, {2},
                        {GroupElement::identity(QuadraticSpace(2)), GroupElement::identity(QuadraticSpace(2))});
  } catch (const ArgumentError&) {
    rejected = true;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const ProductShape shape({2 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 3), 3}, {1.0, 1.0, 0.5});
    std::vector<GroupElement> mob;
    for (int j = 0; j < 3; ++j) {
      const QuadraticSpace q(shape.dim(j));
      mob.push_back(elem_u(q, gaussian(q.n() - 1, rng)) * elem_u_minus(q, gaussian(q.n() - 1, rng, 0.5)));
    }
    const int m0 = 1 + static_cast<int>(rng() % std::min(shape.dim(0), shape.dim(1)));
    const int m1 = 1 + static_cast<int>(rng() % 3);
    const MobiusEmbeddingSpec spec(shape, {{0, 1}, {2}}, {m0, m1}, mob);
    const auto tuple = embed_point(spec, {unit(m0, rng), unit(m1, rng)});
    worst = std::max(worst, distance_to_obstruction(tuple, spec));
  }
  return {worst <= 1e-8 && rejected,
          "embed round trip " + fmt(worst) + " (<= 1e-8); mixed-rate block rejected: " + (rejected ? "yes" : "no")};
}

Outcome obstruction_measure(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ProductShape shape({3, 3}, {1.0, 1.0});
  const auto spec = MobiusEmbeddingSpec::diagonal(shape);
  const CurveSpec diag(shape, {{Polynomial({0, 1}), Polynomial({0.2, 0, 1})}, {Polynomial({0, 1}), Polynomial({0.2, 0, 1})}});
  const double on = curve_obstruction_measure(diag, spec, 1e-6, 1001);
  const double off = curve_obstruction_measure(random_curve(shape, 3, rng), spec, 1e-6, 1001);
  return {on == 1.0 && off == 0.0, "diagonal curve " + fmt(on) + " (= 1), generic curve " + fmt(off) + " (= 0)"};
}

Outcome bound_artifacts(const VerifyOptions& opt) {
  BoundReport r = d2_report(d2_cases().front(), opt.seed, 100);
  for (auto [d, lo, hi] : std::vector<std::tuple<int, double, double>>{{0, 0, 1}, {1, 0, 1}, {2, 1, 2}, {4, 0, 1}}) {
    r.cdj.push_back({d, lo, hi, c_dJ(d, lo, hi)});
  }
  BoundReport again = d2_report(d2_cases().front(), opt.seed, 100);
  again.cdj = r.cdj;
  bool positive = r.d2 > 0;
  for (const auto& row : r.per_t) positive = positive && row.min > 0;
  const bool deterministic = r.to_json() == again.to_json();
  std::string where = "not written";
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    const auto dir = std::filesystem::path(opt.out_dir);
    write_text_file((dir / "bound_report.json").string(), r.to_json() + "\n");
    write_text_file((dir / "bound_report.csv").string(), r.to_csv());
    where = (dir / "bound_report.json").string();
  }
  return {positive && deterministic, "D2 " + fmt(r.d2) + ", T " + fmt(r.threshold_time) + ", ratios positive: " +
                                         (positive ? "yes" : "no") + ", seed-deterministic: " +
                                         (deterministic ? "yes" : "no") + ", report " + where};
}

struct CriterionSpec {
  const char* name;
  double budget;
  Outcome (*fn)(std::uint64_t);
};

const CriterionSpec kCriteria[kCriterionCount] = {
    {"group law", 10, group_law},
    {"Weyl factorization", 5, weyl},
    {"SL2 triple brackets", 5, sl2},
    {"weight claims", 60, claims},
    {"translate growth lower bound", 120, growth_lower_bound},
    {"polynomial coefficient constant", 30, cdj},
    {"conjugation identity", 10, conjugation},
    {"unipotent invariance decay", 30, unipotent},
    {"Taylor vs direct translate", 30, taylor_vs_direct},
    {"unstable growth probe", 60, growth_probe},
    {"equidistribution positive control", 60, positive_control},
    {"equidistribution negative control", 120, negative_control},
};

CheckResult criterion_check(int id, const VerifyOptions& opt) {
  const CriterionSpec& c = kCriteria[id - 1];
  const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(id);
  return timed(c.name, c.budget, [&] { return c.fn(seed); });
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string SuiteResult::to_json() const {
  Json j;
  j["suite"] = suite;
  j["passed"] = passed();
  j["checks"] = Json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds},
                           {"budget", c.budget}});
  }
  return j.dump(2);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"core", "weights", "curves", "bounds", "obstructions"};
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& options) {
  SuiteResult r;
  r.suite = name;
  const std::uint64_t seed = options.seed;
  auto extra = [&](const char* check, double budget, Outcome (*fn)(std::uint64_t)) {
    r.checks.push_back(timed(check, budget, [&] { return fn(seed); }));
  };
  if (name == "core") {
    r.checks.push_back(criterion_check(1, options));
    r.checks.push_back(criterion_check(2, options));
    extra("boundary chart and Bruhat cells", 10, boundary_invariance);
    extra("P^- N factorization", 10, p_minus_round_trip);
  } else if (name == "weights") {
    r.checks.push_back(criterion_check(3, options));
    r.checks.push_back(criterion_check(4, options));
    extra("tensor action homomorphism", 10, act_homomorphism);
    extra("Lambda+ lower bound D1", 30, d1_positive);
  } else if (name == "curves") {
    r.checks.push_back(criterion_check(7, options));
    r.checks.push_back(criterion_check(8, options));
    r.checks.push_back(criterion_check(9, options));
    extra("Taylor remainder order", 10, taylor_order);
  } else if (name == "bounds") {
    r.checks.push_back(criterion_check(5, options));
    r.checks.push_back(criterion_check(6, options));
    r.checks.push_back(timed("bound report", 60, [&] { return bound_artifacts(options); }));
  } else if (name == "obstructions") {
    r.checks.push_back(criterion_check(10, options));
    extra("Moebius embedding round trip", 10, embed_round_trip);
    extra("curve obstruction measure", 10, obstruction_measure);
  } else {
    throw ArgumentError("unknown verify suite '" + name + "'");
  }
  return r;
}

CheckResult run_criterion(int id, const VerifyOptions& options) {
  if (id < 1 || id > kCriterionCount) throw ArgumentError("criterion id must lie in [1, 12]");
  return criterion_check(id, options);
}

}  // namespace horolab
