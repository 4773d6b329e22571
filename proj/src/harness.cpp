#include "horolab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include <boost/multiprecision/mpfr.hpp>

#include "horolab/error.hpp"
#include "horolab/json_io.hpp"
#include "horolab/parallel.hpp"

namespace horolab {

using Mpfr = boost::multiprecision::mpfr_float;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kReduceEps = 1e-14;
constexpr int kMaxReductionSteps = 1'000'000;
constexpr double kMaxZetaT = 60.0;  // keeps reducing words well inside int64
constexpr double kCrosscheckTolerance = 1e-9;

std::int64_t checked_sub_mul(std::int64_t a, std::int64_t n, std::int64_t c) {
  std::int64_t prod = 0, out = 0;
  if (__builtin_mul_overflow(n, c, &prod) || __builtin_sub_overflow(a, prod, &out)) {
    throw PrecisionError("reduce: reducing word overflows 64-bit integers");
  }
  return out;
}

template <class T>
struct ReductionT {
  T x, y;
  std::int64_t ga = 1, gb = 0, gc = 0, gd = 1;
  int word_length = 0;
};

template <class T>
ReductionT<T> reduce_t(const T& x0, const T& y0) {
  using std::round;
  if (!(y0 > 0)) throw DomainError("reduce: point is not in the upper half-plane");
  ReductionT<T> r;
  T x = x0, y = y0;
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  std::int64_t letters = 0;
  for (int step = 0;; ++step) {
    if (step > kMaxReductionSteps) throw PrecisionError("reduce: no convergence");
    const T n = round(x);
    const double nd = static_cast<double>(n);
    if (nd != 0.0) {
      if (!(std::abs(nd) < 9.0e15)) throw DomainError("reduce: real part too large");
      const auto ni = static_cast<std::int64_t>(nd);
      x -= n;
      a = checked_sub_mul(a, ni, c);
      b = checked_sub_mul(b, ni, d);
      letters += ni < 0 ? -ni : ni;
    }
    const T r2 = x * x + y * y;
    if (r2 >= 1 - kReduceEps) break;
    x = -x / r2;
    y = y / r2;
    std::tie(a, b, c, d) = std::make_tuple(-c, -d, a, b);
    ++letters;
  }
  // Recompute from the exact word and the original point.
  const T ta(static_cast<long long>(a)), tb(static_cast<long long>(b));
  const T tc(static_cast<long long>(c)), td(static_cast<long long>(d));
  const T re_den = tc * x0 + td;
  const T im_den = tc * y0;
  const T den = re_den * re_den + im_den * im_den;
  r.x = ((ta * x0 + tb) * re_den + ta * tc * y0 * y0) / den;
  r.y = y0 / den;
  r.ga = a;
  r.gb = b;
  r.gc = c;
  r.gd = d;
  r.word_length = static_cast<int>(std::min<std::int64_t>(letters, std::numeric_limits<int>::max()));
  return r;
}

template <class T>
T horner(const std::vector<double>& c, const T& u) {
  T acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + T(*it);
  return acc;
}

// Frame angle of gamma h at i, where h = g^{-1} = [[e^{-zt/2}, -x e^{zt/2}], [0, e^{zt/2}]].
template <class T>
double frame_angle(const ReductionT<T>& r, const T& x, const T& half) {
  using std::atan2;
  const T C = T(static_cast<long long>(r.gc)) / half;
  const T D = half * (T(static_cast<long long>(r.gd)) - T(static_cast<long long>(r.gc)) * x);
  const double ang = static_cast<double>(T(atan2(C, D)));
  double theta = std::fmod(kPi / 2 - 2 * ang, 2 * kPi);
  if (theta < 0) theta += 2 * kPi;
  if (theta >= 2 * kPi) theta = 0.0;
  return theta;
}

template <class T>
ReducedSample reduce_translate(const T& x, const T& tt, double zeta) {
  using std::exp;
  const T y0 = exp(-T(zeta) * tt);
  const T half = exp(T(zeta) * tt / 2);
  const T minus_x = -x;
  const ReductionT<T> r = reduce_t<T>(minus_x, y0);
  ReducedSample out;
  out.x = static_cast<double>(r.x);
  out.y = static_cast<double>(r.y);
  out.theta = frame_angle(r, x, half);
  out.word_length = r.word_length;
  return out;
}

struct Context {
  const ExperimentConfig* cfg = nullptr;
  int k = 1;
  double m = 0.5;
  std::vector<double> rates;
  std::vector<std::vector<double>> phi;                   // phi[i]: coefficients of factor i
  std::vector<std::vector<std::vector<double>>> taylor;   // taylor[s_index][i][j - 1]
  std::vector<char> crosscheck;                           // per (t, s, eta) item
  int l = 0;
};

struct ItemResult {
  std::vector<ReducedSample> direct;
  std::vector<ReducedSample> taylor;
  std::vector<double> displacement;
  double crosscheck = -1.0;  // residual when the item was cross-checked
};

double mat2_distance(const Mat2& p, const Mat2& q) {
  return std::max({std::abs(p.a - q.a), std::abs(p.b - q.b), std::abs(p.c - q.c), std::abs(p.d - q.d)});
}

double mat2_scale(const Mat2& p) {
  return std::max({1.0, std::abs(p.a), std::abs(p.b), std::abs(p.c), std::abs(p.d)});
}

// Relative disagreement between the native 2x2 matrix and the lorentz_core element.
double crosscheck_factor(const Mat2& native, const GroupElement& g) {
  const double iso = max_norm(iso_so21(native).matrix() - g.matrix()) / std::max(1.0, max_norm(g.matrix()));
  const Mat2 lifted = lift_so21(g);
  const double lift = mat2_distance(lifted, native) / mat2_scale(native);
  return std::max(iso, lift);
}

Mat2 native_translate(double x, double t, double zeta) {
  const double e = std::exp(zeta * t / 2);
  return {e, x * e, 0.0, 1.0 / e};
}

template <class T>
ItemResult compute_item(const Context& ctx, std::size_t item) {
  using std::asinh;
  using std::abs;
  using std::exp;
  using std::pow;
  const ExperimentConfig& cfg = *ctx.cfg;
  const std::size_t E = cfg.eta_count, S = cfg.s_values.size();
  const int ti = static_cast<int>(item / (S * E));
  const int si = static_cast<int>((item / E) % S);
  const int ei = static_cast<int>(item % E);
  const double t = cfg.t_values[ti], s = cfg.s_values[si];
  const double eta = (ei + 0.5) / static_cast<double>(E);

  const T tt(t);
  const T hh = T(eta) * exp(-T(ctx.m) * tt);
  const T u = T(s) + hh;
  ItemResult out;
  std::vector<double> x_direct(ctx.k), x_taylor(ctx.k);
  for (int i = 0; i < ctx.k; ++i) {
    const T x = horner(ctx.phi[i], u);
    ReducedSample smp = reduce_translate(x, tt, ctx.rates[i]);
    smp.t_index = ti;
    smp.s_index = si;
    smp.eta_index = ei;
    smp.factor = i;
    smp.t = t;
    smp.s = s;
    smp.eta = eta;
    out.direct.push_back(smp);
    x_direct[i] = static_cast<double>(x);

    if (cfg.mode == TranslateMode::Compare) {
      T xt = horner(ctx.phi[i], T(s));
      T hp = hh;
      for (double c : ctx.taylor[si][i]) {
        xt += T(c) * hp;
        hp *= hh;
      }
      ReducedSample ts = reduce_translate(xt, tt, ctx.rates[i]);
      ts.t_index = ti;
      ts.s_index = si;
      ts.eta_index = ei;
      ts.factor = i;
      ts.t = t;
      ts.s = s;
      ts.eta = eta;
      out.taylor.push_back(ts);
      const T y0 = exp(-T(ctx.rates[i]) * tt);
      out.displacement.push_back(static_cast<double>(T(2 * asinh(abs(x - xt) / (2 * y0)))));
      x_taylor[i] = static_cast<double>(xt);
    }
  }

  if (ctx.crosscheck[item] && t <= kDoubleTimeCap) {
    double worst = 0.0;
    const ProductElement direct = direct_translate_element(*cfg.curve, s, t, eta);
    for (int i = 0; i < ctx.k; ++i) {
      worst = std::max(worst, crosscheck_factor(native_translate(x_direct[i], t, ctx.rates[i]), direct.factor(i)));
    }
    if (cfg.mode == TranslateMode::Compare) {
      const ProductElement taylor = translate_element(*cfg.curve, TranslateParams{t, s, ctx.l, eta});
      for (int i = 0; i < ctx.k; ++i) {
        worst = std::max(worst, crosscheck_factor(native_translate(x_taylor[i], t, ctx.rates[i]), taylor.factor(i)));
      }
    }
    out.crosscheck = worst;
  }
  return out;
}

unsigned mpfr_digits10(int bits) { return static_cast<unsigned>(std::ceil(bits * std::log10(2.0))) + 1; }

// ---------------------------------------------------------------------------
// Statistics

double ks_uniform(std::vector<double> u) {
  if (u.empty()) throw ArgumentError("theta_uniformity: empty sample set");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  }
  return d;
}

const double kMaxInverseHeight = 2.0 / std::sqrt(3.0);

SampleStats sample_stats(const std::vector<ReducedSample>& v, const ExperimentConfig& cfg) {
  SampleStats st;
  st.count = v.size();
  if (v.empty()) return st;
  for (double Y : cfg.cusp_heights) st.cusp.push_back(cusp_fraction(v, Y));
  st.theta_ks = theta_uniformity(v);
  st.theta_bins.assign(cfg.theta_bins, 0.0);
  double words = 0.0;
  for (const auto& smp : v) {
    const int b = std::min(cfg.theta_bins - 1, static_cast<int>(smp.theta / (2 * kPi) * cfg.theta_bins));
    st.theta_bins[b] += 1.0 / v.size();
    words += smp.word_length;
  }
  st.mean_word_length = words / v.size();
  st.box_discrepancy = box_discrepancy(v, cfg.box_grid);
  return st;
}

std::tuple<int, int, int, int> sample_key(const ReducedSample& s) {
  return {s.t_index, s.s_index, s.eta_index, s.factor};
}

Json stats_json(const SampleStats& st, const ExperimentConfig& cfg) {
  Json j;
  j["count"] = st.count;
  Json cusp = Json::array();
  for (std::size_t h = 0; h < st.cusp.size(); ++h) {
    cusp.push_back({{"Y", cfg.cusp_heights[h]}, {"fraction", st.cusp[h]}, {"haar", haar_cusp_fraction(cfg.cusp_heights[h])}});
  }
  j["cusp"] = cusp;
  j["theta_ks"] = st.theta_ks;
  j["theta_bins"] = st.theta_bins;
  j["box_discrepancy"] = st.box_discrepancy;
  j["mean_word_length"] = st.mean_word_length;
  return j;
}

std::string svg_histogram(const std::string& title, const std::vector<double>& freq, const std::vector<double>& reference,
                          double lo, double hi) {
  const double W = 480, H = 300, pad = 40;
  double top = 0.0;
  for (double f : freq) top = std::max(top, f);
  for (double f : reference) top = std::max(top, f);
  if (top <= 0) top = 1;
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  const double bw = (W - 2 * pad) / freq.size();
  for (std::size_t b = 0; b < freq.size(); ++b) {
    const double h = (H - 2 * pad) * freq[b] / top;
    os << "<rect x=\"" << pad + b * bw << "\" y=\"" << H - pad - h << "\" width=\"" << bw * 0.9 << "\" height=\"" << h
       << "\" fill=\"steelblue\"/>\n";
    if (b < reference.size()) {
      const double r = H - pad - (H - 2 * pad) * reference[b] / top;
      os << "<line x1=\"" << pad + b * bw << "\" y1=\"" << r << "\" x2=\"" << pad + (b + 1) * bw << "\" y2=\"" << r
         << "\" stroke=\"firebrick\" stroke-width=\"2\"/>\n";
    }
  }
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"" << H - pad + 16 << "\" font-size=\"11\">" << lo << "</text>\n";
  os << "<text x=\"" << W - pad - 30 << "\" y=\"" << H - pad + 16 << "\" font-size=\"11\">" << hi << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Mat2 and the isogeny

bool Mat2::is_valid() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d) &&
         std::abs(det() - 1.0) <= kDetTolerance;
}

Mat2 Mat2::operator*(const Mat2& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

GroupElement iso_so21(const Mat2& g) {
  if (!g.is_valid()) throw ArgumentError("iso_so21: matrix does not have unit determinant");
  const double a = g.a, b = g.b, c = g.c, d = g.d;
  Matrix m(3, 3);
  m << a * a, a * b, b * b / 2,
       2 * a * c, a * d + b * c, b * d,
       2 * c * c, 2 * c * d, d * d;
  return GroupElement::trusted(QuadraticSpace(2), m);
}

Mat2 lift_so21(const GroupElement& g) {
  if (g.n() != 2) throw ArgumentError("lift_so21: element must lie in SO(Q_2)");
  const Matrix& G = g.matrix();
  const double scale = std::max(1.0, max_norm(G));
  const double aa = G(0, 0), dd = G(2, 2), bb = 2 * G(0, 2), cc = G(2, 0) / 2;
  if (std::min({aa, bb, cc, dd}) < -1e-9 * scale) throw DomainError("lift_so21: element is not in the identity component");
  const double top = std::max({aa, bb, cc, dd});
  Mat2 h;
  if (top == aa) {
    h.a = std::sqrt(aa);
    h.b = G(0, 1) / h.a;
    h.c = G(1, 0) / (2 * h.a);
    h.d = (1 + h.b * h.c) / h.a;
  } else if (top == dd) {
    h.d = std::sqrt(dd);
    h.b = G(1, 2) / h.d;
    h.c = G(2, 1) / (2 * h.d);
    h.a = (1 + h.b * h.c) / h.d;
  } else if (top == bb) {
    h.b = std::sqrt(bb);
    h.a = G(0, 1) / h.b;
    h.d = G(1, 2) / h.b;
    h.c = (h.a * h.d - 1) / h.b;
  } else {
    h.c = std::sqrt(cc);
    h.a = G(1, 0) / (2 * h.c);
    h.d = G(2, 1) / (2 * h.c);
    h.b = (h.a * h.d - 1) / h.c;
  }
  Matrix back(3, 3);
  back << h.a * h.a, h.a * h.b, h.b * h.b / 2,
          2 * h.a * h.c, h.a * h.d + h.b * h.c, h.b * h.d,
          2 * h.c * h.c, 2 * h.c * h.d, h.d * h.d;
  if (max_norm(back - G) > 1e-8 * scale) throw DomainError("lift_so21: element is not in the identity component");
  return h;
}

Reduction reduce(double x, double y) {
  const ReductionT<double> r = reduce_t<double>(x, y);
  return {r.x, r.y, r.ga, r.gb, r.gc, r.gd, r.word_length};
}

// ---------------------------------------------------------------------------
// Configuration

double ExperimentConfig::time_cap() const {
  if (precision == PrecisionMode::Double) return kDoubleTimeCap;
  const double zeta = curve ? curve->shape().rate(0) : 1.0;
  return std::min((mantissa_bits - 34) * std::log(2.0), kMaxZetaT) / std::max(1.0, zeta);
}

std::vector<double> ExperimentConfig::golden_s_grid(int count) {
  if (count < 1) throw ArgumentError("golden_s_grid: count must be positive");
  const double g = (std::sqrt(5.0) - 1) / 2;
  std::vector<double> s(count);
  for (int k = 0; k < count; ++k) {
    const double v = 0.1 + k * g;
    s[k] = 0.05 + 0.8 * (v - std::floor(v));
  }
  return s;
}

void ExperimentConfig::validate() const {
  if (!curve) throw ArgumentError("experiment: no curve");
  const ProductShape& shape = curve->shape();
  if (shape.k() < 1 || shape.k() > 2) throw ArgumentError("experiment: curve must have 1 or 2 factors");
  for (int i = 0; i < shape.k(); ++i) {
    if (shape.dim(i) != 2) throw ArgumentError("experiment: every factor must have n = 2");
  }
  if (precision == PrecisionMode::Mpfr && (mantissa_bits < kMinMpfrBits || mantissa_bits > kMaxMpfrBits)) {
    throw ArgumentError("experiment: mantissa bits must lie in [" + std::to_string(kMinMpfrBits) + ", " +
                        std::to_string(kMaxMpfrBits) + "]");
  }
  if (t_values.empty()) throw ArgumentError("experiment: empty t ladder");
  if (s_values.empty()) throw ArgumentError("experiment: empty s grid");
  const double cap = time_cap();
  for (double t : t_values) {
    if (!std::isfinite(t) || t < 0) throw ArgumentError("experiment: t must be finite and >= 0");
    if (t > cap) {
      throw PrecisionError("experiment: t = " + std::to_string(t) + " exceeds the cap " + std::to_string(cap) +
                           " of the " + (precision == PrecisionMode::Double ? "double" : "mpfr") + " mode");
    }
  }
  for (double s : s_values) {
    if (!(s >= 0 && s <= 1)) throw ArgumentError("experiment: s must lie in [0, 1]");
    for (double t : t_values) {
      if (s + std::exp(-shape.m() * t) > 1 + 1e-12) {
        throw ArgumentError("experiment: s + e^{-mt} exceeds 1 for s = " + std::to_string(s) +
                            ", t = " + std::to_string(t));
      }
    }
  }
  if (eta_count < 1 || eta_count > 10'000'000) throw ArgumentError("experiment: eta_count must lie in [1, 1e7]");
  for (double Y : cusp_heights) {
    if (!(Y >= 1)) throw ArgumentError("experiment: cusp heights must be >= 1");
  }
  if (box_grid < 1 || box_grid > 64) throw ArgumentError("experiment: box_grid must lie in [1, 64]");
  if (theta_bins < 1 || theta_bins > 1000) throw ArgumentError("experiment: theta_bins must lie in [1, 1000]");
  if (!(crosscheck_fraction >= 0 && crosscheck_fraction <= 1)) {
    throw ArgumentError("experiment: crosscheck_fraction must lie in [0, 1]");
  }
  if (mode == TranslateMode::Compare && taylor_order != 0 && taylor_order < shape.min_taylor_order()) {
    throw ArgumentError("experiment: taylor_order must exceed 2 zeta_1 / zeta_k");
  }
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const Json j = parse_json(text);
  ExperimentConfig cfg;
  try {
    cfg.curve = curve_from_json(j.at("curve"));
    cfg.curve_id = j.value("curve_id", cfg.curve_id);
    cfg.t_values = j.at("t").get<std::vector<double>>();
    const Json& s = j.at("s");
    if (s.is_object()) {
      cfg.s_values = ExperimentConfig::golden_s_grid(s.at("golden").get<int>());
    } else {
      cfg.s_values = s.get<std::vector<double>>();
    }
    cfg.eta_count = j.value("eta_count", cfg.eta_count);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("precision")) {
      const Json& p = j.at("precision");
      const std::string name = p.is_string() ? p.get<std::string>() : p.at("mode").get<std::string>();
      if (name == "double") {
        cfg.precision = PrecisionMode::Double;
      } else if (name == "mpfr") {
        cfg.precision = PrecisionMode::Mpfr;
        cfg.mantissa_bits = p.is_object() ? p.value("bits", 128) : 128;
      } else {
        throw ParseError("experiment: unknown precision mode " + name);
      }
    }
    const std::string mode = j.value("mode", std::string("direct"));
    if (mode == "direct") {
      cfg.mode = TranslateMode::Direct;
    } else if (mode == "compare") {
      cfg.mode = TranslateMode::Compare;
    } else {
      throw ParseError("experiment: unknown mode " + mode);
    }
    cfg.taylor_order = j.value("taylor_order", cfg.taylor_order);
    if (j.contains("cusp_heights")) cfg.cusp_heights = j.at("cusp_heights").get<std::vector<double>>();
    cfg.box_grid = j.value("box_grid", cfg.box_grid);
    cfg.theta_bins = j.value("theta_bins", cfg.theta_bins);
    cfg.crosscheck_fraction = j.value("crosscheck_fraction", cfg.crosscheck_fraction);
    if (j.contains("output")) {
      const Json& o = j.at("output");
      cfg.json_path = o.value("json", std::string());
      cfg.csv_path = o.value("csv", std::string());
      cfg.svg_dir = o.value("svg_dir", std::string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(load_json_file(path).dump());
}

// ---------------------------------------------------------------------------
// Experiment

ExperimentReport run_translate_experiment(const ExperimentConfig& config) {
  config.validate();
  const CurveSpec& curve = *config.curve;
  const ProductShape& shape = curve.shape();
  Context ctx;
  ctx.cfg = &config;
  ctx.k = shape.k();
  ctx.m = shape.m();
  ctx.rates = shape.rates();
  for (int i = 0; i < ctx.k; ++i) ctx.phi.push_back(curve.factors()[i][0].coeffs());
  const std::size_t T = config.t_values.size(), S = config.s_values.size(), E = config.eta_count;
  if (config.mode == TranslateMode::Compare) {
    ctx.l = config.taylor_order > 0 ? config.taylor_order : shape.min_taylor_order();
    for (double s : config.s_values) {
      const TaylorData td = taylor_R(curve, s, ctx.l);
      std::vector<std::vector<double>> per_factor(ctx.k);
      for (const auto& c : td.coeffs) {
        for (int i = 0; i < ctx.k; ++i) per_factor[i].push_back(c[i][0]);
      }
      ctx.taylor.push_back(per_factor);
    }
  }

  const std::size_t items = T * S * E;
  ctx.crosscheck.assign(items, 0);
  if (config.crosscheck_fraction > 0) {
    for (std::size_t cell = 0; cell < T * S; ++cell) {
      auto rng = substream(config.seed, cell);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (std::size_t e = 0; e < E; ++e) ctx.crosscheck[cell * E + e] = unif(rng) < config.crosscheck_fraction;
    }
  }

  std::vector<ItemResult> results(items);
  if (config.precision == PrecisionMode::Double) {
    parallel_for(items, [&](std::size_t i) { results[i] = compute_item<double>(ctx, i); });
  } else {
    const unsigned digits = mpfr_digits10(config.mantissa_bits);
    parallel_for(items, [&](std::size_t i) {
      // The default precision is thread-local; every worker sets its own.
      Mpfr::default_precision(digits);
      results[i] = compute_item<Mpfr>(ctx, i);
    });
  }

  ExperimentReport report;
  report.config = config;
  report.samples.reserve(items * ctx.k);
  for (auto& r : results) {
    report.samples.insert(report.samples.end(), r.direct.begin(), r.direct.end());
    report.taylor_samples.insert(report.taylor_samples.end(), r.taylor.begin(), r.taylor.end());
    report.taylor_displacement.insert(report.taylor_displacement.end(), r.displacement.begin(), r.displacement.end());
    if (r.crosscheck >= 0) {
      ++report.crosscheck_count;
      report.crosscheck_max_residual = std::max(report.crosscheck_max_residual, r.crosscheck);
    }
  }
  if (report.crosscheck_max_residual > kCrosscheckTolerance) {
    throw ConsistencyError("experiment: 2x2 and Lorentz translates disagree by " +
                           std::to_string(report.crosscheck_max_residual));
  }
  recompute_statistics(report);
  return report;
}

void recompute_statistics(ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  const int k = cfg.curve->shape().k();
  const std::size_t T = cfg.t_values.size(), S = cfg.s_values.size();
  auto bucket = [&](const std::vector<ReducedSample>& samples) {
    std::vector<std::vector<std::vector<ReducedSample>>> b(T * S, std::vector<std::vector<ReducedSample>>(k));
    for (const auto& smp : samples) {
      if (smp.t_index < 0 || smp.t_index >= static_cast<int>(T) || smp.s_index < 0 ||
          smp.s_index >= static_cast<int>(S) || smp.factor < 0 || smp.factor >= k) {
        throw ConsistencyError("experiment report: sample index out of range");
      }
      b[smp.t_index * S + smp.s_index][smp.factor].push_back(smp);
    }
    return b;
  };
  const auto direct = bucket(report.samples);
  const auto taylor = bucket(report.taylor_samples);

  report.cells.clear();
  report.per_t.clear();
  for (std::size_t ti = 0; ti < T; ++ti) {
    TimeStats ts;
    ts.t = cfg.t_values[ti];
    std::vector<std::vector<ReducedSample>> pooled(k), pooled_taylor(k);
    for (std::size_t si = 0; si < S; ++si) {
      CellStats cell;
      cell.t_index = static_cast<int>(ti);
      cell.s_index = static_cast<int>(si);
      const auto& per_factor = direct[ti * S + si];
      for (int f = 0; f < k; ++f) {
        cell.factors.push_back(sample_stats(per_factor[f], cfg));
        pooled[f].insert(pooled[f].end(), per_factor[f].begin(), per_factor[f].end());
        const auto& tf = taylor[ti * S + si][f];
        pooled_taylor[f].insert(pooled_taylor[f].end(), tf.begin(), tf.end());
      }
      if (k == 2 && !per_factor[0].empty()) cell.correlation = correlation_statistic(per_factor[0], per_factor[1]);
      report.cells.push_back(std::move(cell));
    }
    for (int f = 0; f < k; ++f) {
      ts.factors.push_back(sample_stats(pooled[f], cfg));
      if (!pooled_taylor[f].empty()) ts.taylor.push_back(sample_stats(pooled_taylor[f], cfg));
    }
    if (k == 2 && !pooled[0].empty()) ts.correlation = correlation_statistic(pooled[0], pooled[1]);
    report.per_t.push_back(std::move(ts));
  }
  for (std::size_t i = 0; i < report.taylor_samples.size() && i < report.taylor_displacement.size(); ++i) {
    auto& ts = report.per_t.at(report.taylor_samples[i].t_index);
    ts.taylor_max_displacement = std::max(ts.taylor_max_displacement, report.taylor_displacement[i]);
  }
}

ExperimentReport merge_reports(const std::vector<ExperimentReport>& parts) {
  if (parts.empty()) throw ArgumentError("merge_reports: nothing to merge");
  ExperimentReport out;
  out.config = parts.front().config;
  std::vector<std::pair<ReducedSample, double>> taylor;
  for (const auto& p : parts) {
    if (p.config.t_values != out.config.t_values || p.config.s_values != out.config.s_values ||
        p.config.eta_count != out.config.eta_count || !(p.config.curve->shape() == out.config.curve->shape())) {
      throw ArgumentError("merge_reports: reports come from different configurations");
    }
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    for (std::size_t i = 0; i < p.taylor_samples.size(); ++i) {
      taylor.emplace_back(p.taylor_samples[i], i < p.taylor_displacement.size() ? p.taylor_displacement[i] : 0.0);
    }
    out.crosscheck_count += p.crosscheck_count;
    out.crosscheck_max_residual = std::max(out.crosscheck_max_residual, p.crosscheck_max_residual);
  }
  auto by_key = [](const ReducedSample& a, const ReducedSample& b) { return sample_key(a) < sample_key(b); };
  std::sort(out.samples.begin(), out.samples.end(), by_key);
  std::sort(taylor.begin(), taylor.end(), [&](const auto& a, const auto& b) { return by_key(a.first, b.first); });
  for (const auto& [smp, disp] : taylor) {
    out.taylor_samples.push_back(smp);
    out.taylor_displacement.push_back(disp);
  }
  recompute_statistics(out);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

double haar_cusp_fraction(double Y) {
  if (!(Y >= 1)) throw ArgumentError("haar_cusp_fraction: Y must be >= 1");
  return (1.0 / Y) / (kPi / 3);
}

double haar_box_mass(double x0, double x1, double w0, double w1) {
  if (!(x0 <= x1) || !(w0 <= w1) || x0 < -0.5 - 1e-12 || x1 > 0.5 + 1e-12) {
    throw ArgumentError("haar_box_mass: box must satisfy x0 <= x1 within [-1/2, 1/2] and w0 <= w1");
  }
  // Integral over [x0, x1] of min(c, 1 / sqrt(1 - x^2)).
  auto capped = [&](double c) {
    if (c <= 1.0) return std::max(c, 0.0) * (x1 - x0);
    const double b = std::sqrt(1.0 - 1.0 / (c * c));
    const double lo = std::clamp(x0, -b, b), hi = std::clamp(x1, -b, b);
    return std::asin(hi) - std::asin(lo) + c * ((x1 - x0) - (hi - lo));
  };
  return (capped(w1) - capped(w0)) / (kPi / 3);
}

std::vector<ReducedSample> select_samples(const ExperimentReport& report, int t_index, int factor) {
  std::vector<ReducedSample> out;
  for (const auto& s : report.samples) {
    if (s.t_index == t_index && s.factor == factor) out.push_back(s);
  }
  return out;
}

double cusp_fraction(const std::vector<ReducedSample>& samples, double Y) {
  if (!(Y >= 1)) throw ArgumentError("cusp_fraction: Y must be >= 1");
  if (samples.empty()) throw ArgumentError("cusp_fraction: empty sample set");
  const auto above = std::count_if(samples.begin(), samples.end(), [&](const ReducedSample& s) { return s.y > Y; });
  return static_cast<double>(above) / samples.size();
}

double cusp_fraction(const ExperimentReport& report, int t_index, double Y, int factor) {
  return cusp_fraction(select_samples(report, t_index, factor), Y);
}

double theta_uniformity(const std::vector<ReducedSample>& samples) {
  std::vector<double> u;
  u.reserve(samples.size());
  for (const auto& s : samples) u.push_back(s.theta / (2 * kPi));
  return ks_uniform(std::move(u));
}

double theta_uniformity(const ExperimentReport& report, int t_index, int factor) {
  return theta_uniformity(select_samples(report, t_index, factor));
}

double box_discrepancy(const std::vector<ReducedSample>& samples, int grid) {
  if (samples.empty()) throw ArgumentError("box_discrepancy: empty sample set");
  if (grid < 1) throw ArgumentError("box_discrepancy: grid must be positive");
  std::vector<double> count(static_cast<std::size_t>(grid) * grid, 0.0);
  for (const auto& s : samples) {
    const int ix = std::clamp(static_cast<int>((s.x + 0.5) * grid), 0, grid - 1);
    const int iw = std::clamp(static_cast<int>((1.0 / s.y) / kMaxInverseHeight * grid), 0, grid - 1);
    count[ix * grid + iw] += 1.0;
  }
  double worst = 0.0;
  for (int ix = 0; ix < grid; ++ix) {
    for (int iw = 0; iw < grid; ++iw) {
      const double ref = haar_box_mass(-0.5 + static_cast<double>(ix) / grid, -0.5 + static_cast<double>(ix + 1) / grid,
                                       kMaxInverseHeight * iw / grid, kMaxInverseHeight * (iw + 1) / grid);
      worst = std::max(worst, std::abs(count[ix * grid + iw] / samples.size() - ref));
    }
  }
  return worst;
}

double product_correlation(const std::vector<ReducedSample>& first, const std::vector<ReducedSample>& second,
                           const TestFunction& f1, const TestFunction& f2) {
  if (first.empty()) throw ArgumentError("product_correlation: empty report");
  if (first.size() != second.size()) throw ArgumentError("product_correlation: factor sample counts differ");
  double s1 = 0, s2 = 0, s12 = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double a = f1(first[i].x, first[i].y), b = f2(second[i].x, second[i].y);
    s1 += a;
    s2 += b;
    s12 += a * b;
  }
  const double n = static_cast<double>(first.size());
  return std::abs(s12 / n - (s1 / n) * (s2 / n));
}

double product_correlation(const ExperimentReport& report, int t_index, const TestFunction& f1,
                           const TestFunction& f2) {
  if (report.config.curve->shape().k() != 2) throw ArgumentError("product_correlation: needs two factors");
  return product_correlation(select_samples(report, t_index, 0), select_samples(report, t_index, 1), f1, f2);
}

double correlation_statistic(const std::vector<ReducedSample>& first, const std::vector<ReducedSample>& second) {
  const std::vector<TestFunction> family{
      [](double, double y) { return y > 2 ? 1.0 : 0.0; },
      [](double, double y) { return y > 3 ? 1.0 : 0.0; },
      [](double, double y) { return y > 5 ? 1.0 : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; },
  };
  double best = 0.0;
  for (const auto& f : family) best = std::max(best, product_correlation(first, second, f, f));
  return best;
}

// ---------------------------------------------------------------------------
// Output

std::string ExperimentReport::to_json() const {
  const ExperimentConfig& cfg = config;
  Json j;
  Json c;
  c["curve"] = curve_to_json(*cfg.curve);
  c["curve_id"] = cfg.curve_id;
  c["t"] = cfg.t_values;
  c["s"] = cfg.s_values;
  c["eta_count"] = cfg.eta_count;
  c["seed"] = cfg.seed;
  c["precision"] = cfg.precision == PrecisionMode::Double
                       ? Json("double")
                       : Json{{"mode", "mpfr"}, {"bits", cfg.mantissa_bits}};
  c["mode"] = cfg.mode == TranslateMode::Direct ? "direct" : "compare";
  if (cfg.mode == TranslateMode::Compare) {
    c["taylor_order"] = cfg.taylor_order > 0 ? cfg.taylor_order : cfg.curve->shape().min_taylor_order();
  }
  c["cusp_heights"] = cfg.cusp_heights;
  c["box_grid"] = cfg.box_grid;
  c["theta_bins"] = cfg.theta_bins;
  c["crosscheck_fraction"] = cfg.crosscheck_fraction;
  j["config"] = c;
  j["sample_count"] = samples.size();
  j["crosscheck"] = {{"count", crosscheck_count}, {"max_residual", crosscheck_max_residual}};
  Json pt = Json::array();
  for (const auto& ts : per_t) {
    Json e;
    e["t"] = ts.t;
    for (const auto& f : ts.factors) e["factors"].push_back(stats_json(f, cfg));
    if (cfg.curve->shape().k() == 2) e["correlation"] = ts.correlation;
    if (!ts.taylor.empty()) {
      for (const auto& f : ts.taylor) e["taylor"].push_back(stats_json(f, cfg));
      e["taylor_max_displacement"] = ts.taylor_max_displacement;
    }
    pt.push_back(e);
  }
  j["per_t"] = pt;
  Json cells_json = Json::array();
  for (const auto& cell : cells) {
    Json e;
    e["t"] = cfg.t_values[cell.t_index];
    e["s"] = cfg.s_values[cell.s_index];
    for (const auto& f : cell.factors) e["factors"].push_back(stats_json(f, cfg));
    if (cfg.curve->shape().k() == 2) e["correlation"] = cell.correlation;
    cells_json.push_back(e);
  }
  j["cells"] = cells_json;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "s,t,eta,re_z,im_z,theta,factor\n";
  for (const auto& s : samples) {
    os << s.s << ',' << s.t << ',' << s.eta << ',' << s.x << ',' << s.y << ',' << s.theta << ',' << s.factor + 1 << '\n';
  }
  return os.str();
}

std::vector<std::pair<std::string, std::string>> ExperimentReport::to_svg() const {
  std::vector<std::pair<std::string, std::string>> out;
  const int k = config.curve->shape().k();
  for (std::size_t ti = 0; ti < per_t.size(); ++ti) {
    for (int f = 0; f < k; ++f) {
      const auto& st = per_t[ti].factors[f];
      if (st.count == 0) continue;
      std::ostringstream title;
      title << "theta, t = " << per_t[ti].t << ", factor " << f + 1;
      std::vector<double> uniform(st.theta_bins.size(), 1.0 / st.theta_bins.size());
      out.emplace_back("theta_t" + std::to_string(ti) + "_f" + std::to_string(f + 1) + ".svg",
                       svg_histogram(title.str(), st.theta_bins, uniform, 0.0, 2 * kPi));

      const int g = config.box_grid;
      std::vector<double> freq(g, 0.0), haar(g, 0.0);
      for (const auto& smp : samples) {
        if (smp.t_index != static_cast<int>(ti) || smp.factor != f) continue;
        const int iw = std::clamp(static_cast<int>((1.0 / smp.y) / kMaxInverseHeight * g), 0, g - 1);
        freq[iw] += 1.0 / st.count;
      }
      for (int iw = 0; iw < g; ++iw) {
        haar[iw] = haar_box_mass(-0.5, 0.5, kMaxInverseHeight * iw / g, kMaxInverseHeight * (iw + 1) / g);
      }
      std::ostringstream t2;
      t2 << "1/Im z, t = " << per_t[ti].t << ", factor " << f + 1;
      out.emplace_back("inv_height_t" + std::to_string(ti) + "_f" + std::to_string(f + 1) + ".svg",
                       svg_histogram(t2.str(), freq, haar, 0.0, kMaxInverseHeight));
    }
  }
  return out;
}

namespace {

void write_with_parent(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());
  }
  write_text_file(path, text);
}

}  // namespace

void ExperimentReport::write_outputs() const {
  if (!config.json_path.empty()) write_with_parent(config.json_path, to_json());
  if (!config.csv_path.empty()) write_with_parent(config.csv_path, to_csv());
  if (!config.svg_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.svg_dir, ec);
    if (ec) throw IoError("cannot create " + config.svg_dir + ": " + ec.message());
    for (const auto& [name, text] : to_svg()) write_text_file((std::filesystem::path(config.svg_dir) / name).string(), text);
  }
}

}  // namespace horolab
