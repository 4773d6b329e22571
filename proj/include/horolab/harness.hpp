#pragma once

// Monte-Carlo equidistribution experiments on SL(2,Z)\SL(2,R) and its square.
// Each factor of a translate a(t) u(phi(s + eta e^{-mt})) is realized as a 2x2
// matrix g; the orbit point g^{-1} i is reduced to the standard fundamental domain.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "horolab/curve.hpp"

namespace horolab {

/// 2x2 real matrix [[a, b], [c, d]].
struct Mat2 {
  static constexpr double kDetTolerance = 1e-12;

  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  bool is_valid() const;
  Mat2 operator*(const Mat2& o) const;
  Mat2 inverse() const { return {d, -b, -c, a}; }
};

/// SL(2,R) -> SO(Q_2)_0 through the action on binary quadratic forms, normalized so that
/// diag(e^{t/2}, e^{-t/2}) -> a(t) and [[1, r], [0, 1]] -> u(r). Kernel {+1, -1}.
GroupElement iso_so21(const Mat2& g);

/// Section of iso_so21: the preimage with a > 0 (or d > 0 when a vanishes).
/// Throws DomainError if g is not in the identity component of SO(Q_2).
Mat2 lift_so21(const GroupElement& g);

struct Reduction {
  double x = 0.0;
  double y = 0.0;
  /// Reducing word gamma in SL(2,Z): reduced point = gamma . z.
  std::int64_t ga = 1, gb = 0, gc = 0, gd = 1;
  int word_length = 0;  // letters T^{+-1} and S used
};

/// Gauss reduction into {|Re z| <= 1/2, |z| >= 1}. Throws DomainError if y <= 0 and
/// PrecisionError if the word entries overflow.
Reduction reduce(double x, double y);

struct ReducedSample {
  int t_index = 0;
  int s_index = 0;
  int eta_index = 0;
  int factor = 0;
  double t = 0.0;
  double s = 0.0;
  double eta = 0.0;
  double x = 0.0;      // Re z
  double y = 0.0;      // Im z
  double theta = 0.0;  // frame angle in [0, 2 pi)
  int word_length = 0;
};

enum class PrecisionMode { Double, Mpfr };
enum class TranslateMode { Direct, Compare };

struct ExperimentConfig {
  static constexpr int kMinMpfrBits = 64;
  static constexpr int kMaxMpfrBits = 4096;

  std::optional<CurveSpec> curve;
  std::string curve_id = "curve";
  std::vector<double> t_values;
  std::vector<double> s_values;
  int eta_count = 1000;
  std::uint64_t seed = 0;
  PrecisionMode precision = PrecisionMode::Double;
  int mantissa_bits = 53;
  TranslateMode mode = TranslateMode::Direct;
  int taylor_order = 0;  // 0 selects the shape's minimal admissible order
  std::vector<double> cusp_heights{2.0, 3.0, 5.0};
  int box_grid = 8;
  int theta_bins = 10;
  double crosscheck_fraction = 0.01;
  std::string json_path;
  std::string csv_path;
  std::string svg_dir;

  /// Largest t the precision mode accepts.
  double time_cap() const;
  /// Throws ArgumentError / PrecisionError on inadmissible settings.
  void validate() const;
  /// s_k = 0.05 + 0.8 frac(0.1 + k g), g the golden ratio conjugate.
  static std::vector<double> golden_s_grid(int count);
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_json(const std::string& text);

struct SampleStats {
  std::size_t count = 0;
  std::vector<double> cusp;           // one per configured height
  double theta_ks = 0.0;
  std::vector<double> theta_bins;     // occupancy of equal-width theta bins
  double box_discrepancy = 0.0;       // max |empirical - Haar| over the box grid
  double mean_word_length = 0.0;
};

struct CellStats {
  int t_index = 0;
  int s_index = 0;
  std::vector<SampleStats> factors;
  double correlation = 0.0;           // k = 2 only
};

struct TimeStats {
  double t = 0.0;
  std::vector<SampleStats> factors;   // pooled over the s-grid
  double correlation = 0.0;
  std::vector<SampleStats> taylor;    // compare mode: the same statistics for translate_element points
  double taylor_max_displacement = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReducedSample> samples;         // ordered by (t, s, eta, factor)
  std::vector<ReducedSample> taylor_samples;  // compare mode only, same order
  std::vector<double> taylor_displacement;    // hyperbolic distance per direct/Taylor pair
  std::vector<CellStats> cells;
  std::vector<TimeStats> per_t;
  std::size_t crosscheck_count = 0;
  double crosscheck_max_residual = 0.0;

  std::string to_json() const;
  /// Columns s,t,eta,re_z,im_z,theta,factor.
  std::string to_csv() const;
  /// Histogram of theta and of 1 / Im z per t, as standalone SVG documents keyed by file name.
  std::vector<std::pair<std::string, std::string>> to_svg() const;
  /// Writes the outputs named in the config (empty paths are skipped).
  void write_outputs() const;
};

/// Runs the experiment; deterministic given the config, independent of the worker count.
ExperimentReport run_translate_experiment(const ExperimentConfig& config);

/// Concatenates sample sets of reports sharing a config and recomputes every statistic.
/// The result does not depend on the order of the inputs.
ExperimentReport merge_reports(const std::vector<ExperimentReport>& parts);

/// Recomputes cells and per_t from the samples.
void recompute_statistics(ExperimentReport& report);

/// Haar mass above height Y, (1/Y) / (pi/3). Throws ArgumentError for Y < 1.
double haar_cusp_fraction(double Y);
/// Haar mass of the box [x0, x1] x [w0, w1] in the coordinates (Re z, 1/Im z).
double haar_box_mass(double x0, double x1, double w0, double w1);

/// Samples of one factor at one time (t_index), in sample order.
std::vector<ReducedSample> select_samples(const ExperimentReport& report, int t_index, int factor);

/// Fraction with Im z > Y. Throws ArgumentError for Y < 1 and for an empty sample set.
double cusp_fraction(const std::vector<ReducedSample>& samples, double Y);
double cusp_fraction(const ExperimentReport& report, int t_index, double Y, int factor = 0);

/// Kolmogorov-Smirnov distance of theta / 2 pi to the uniform law.
double theta_uniformity(const std::vector<ReducedSample>& samples);
double theta_uniformity(const ExperimentReport& report, int t_index, int factor = 0);

double box_discrepancy(const std::vector<ReducedSample>& samples, int grid);

using TestFunction = std::function<double(double x, double y)>;

/// |avg(f1(z1) f2(z2)) - avg(f1(z1)) avg(f2(z2))| over paired factor-0 / factor-1 samples at t_index.
double product_correlation(const ExperimentReport& report, int t_index, const TestFunction& f1,
                           const TestFunction& f2);
double product_correlation(const std::vector<ReducedSample>& first, const std::vector<ReducedSample>& second,
                           const TestFunction& f1, const TestFunction& f2);

/// Max of product_correlation over f = f1 = f2 in {1[Im > 2], 1[Im > 3], 1[Im > 5], 1[Re > 0]}.
double correlation_statistic(const std::vector<ReducedSample>& first, const std::vector<ReducedSample>& second);

}  // namespace horolab
