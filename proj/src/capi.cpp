#include "horolab/horolab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "horolab/bounds.hpp"
#include "horolab/error.hpp"
#include "horolab/harness.hpp"
#include "horolab/json_io.hpp"
#include "horolab/obstruction.hpp"
#include "horolab/verify.hpp"

struct hl_curve {
  horolab::CurveSpec curve;
};

struct hl_mobius_spec {
  horolab::MobiusEmbeddingSpec spec;
};

struct hl_unstable_spec {
  horolab::UnstableDirectionSpec spec;
};

struct hl_report {
  horolab::ExperimentReport report;
};

namespace {

thread_local std::string last_error;

template <class Fn>
hl_status guard(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return HL_OK;
  } catch (const horolab::Error& e) {
    last_error = e.what();
    return static_cast<hl_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return HL_ERR_INTERNAL;
}

hl_status null_argument(const char* what) {
  last_error = std::string(what) + " is NULL";
  return HL_ERR_NULL;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

horolab::Json factor_json(const horolab::FactorDiagnostic& f, int index) {
  horolab::Json j;
  j["factor"] = index + 1;
  if (f.block >= 0) j["block"] = f.block + 1;
  j["constrained"] = f.constrained;
  if (f.constant.size() > 0) j["constant"] = std::vector<double>(f.constant.data(), f.constant.data() + f.constant.size());
  j["on_fraction"] = f.on_fraction;
  if (f.constrained) {
    j["min_distance"] = f.min_distance;
    j["argmin_s"] = f.argmin_s;
  }
  return j;
}

std::string diagnostics_json(const horolab::ObstructionDiagnostics& d, const char* kind, double tol, int grid_n) {
  horolab::Json j;
  j["kind"] = kind;
  j["measure"] = d.measure;
  j["tol"] = tol;
  j["grid_n"] = grid_n;
  j["min_distance"] = d.min_distance;
  j["argmin_s"] = d.argmin_s;
  j["factors"] = horolab::Json::array();
  for (std::size_t i = 0; i < d.factors.size(); ++i) j["factors"].push_back(factor_json(d.factors[i], static_cast<int>(i)));
  return j.dump(2);
}

horolab::Json check_json(const horolab::CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}, {"budget", c.budget}};
}

}  // namespace

extern "C" {

const char* hl_version(void) { return "0.1.0"; }

const char* hl_last_error(void) { return last_error.c_str(); }

const char* hl_status_name(hl_status status) {
  switch (status) {
    case HL_OK: return "ok";
    case HL_ERR_ARGUMENT: return "argument";
    case HL_ERR_DOMAIN: return "domain";
    case HL_ERR_CONSISTENCY: return "consistency";
    case HL_ERR_PRECONDITION: return "precondition";
    case HL_ERR_IO: return "io";
    case HL_ERR_PARSE: return "parse";
    case HL_ERR_PRECISION: return "precision";
    case HL_ERR_NULL: return "null";
    case HL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void hl_string_free(char* s) { std::free(s); }

hl_status hl_curve_from_json(const char* json, hl_curve** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guard([&] { *out = new hl_curve{horolab::curve_from_json(horolab::parse_json(json))}; });
}

hl_status hl_curve_load(const char* path, hl_curve** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guard([&] { *out = new hl_curve{horolab::curve_from_json(horolab::load_json_file(path))}; });
}

void hl_curve_free(hl_curve* curve) { delete curve; }

hl_status hl_curve_factor_count(const hl_curve* curve, int* out) {
  if (!curve) return null_argument("curve");
  if (!out) return null_argument("out");
  *out = curve->curve.shape().k();
  return HL_OK;
}

hl_status hl_curve_eval(const hl_curve* curve, double s, double* out, size_t capacity, size_t* written) {
  if (!curve) return null_argument("curve");
  if (!written) return null_argument("written");
  return guard([&] {
    const horolab::BlockVector x = curve->curve(s);
    std::size_t n = 0;
    for (const auto& b : x) n += static_cast<std::size_t>(b.size());
    *written = n;
    if (n > capacity || (!out && n > 0)) throw horolab::ArgumentError("hl_curve_eval: buffer holds " +
                                                                     std::to_string(capacity) + " of " + std::to_string(n));
    std::size_t pos = 0;
    for (const auto& b : x) {
      for (Eigen::Index i = 0; i < b.size(); ++i) out[pos++] = b[i];
    }
  });
}

hl_status hl_mobius_spec_from_json(const hl_curve* curve, const char* json, hl_mobius_spec** out) {
  if (!curve) return null_argument("curve");
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guard([&] {
    *out = new hl_mobius_spec{horolab::mobius_spec_from_json(horolab::parse_json(json), curve->curve.shape())};
  });
}

void hl_mobius_spec_free(hl_mobius_spec* spec) { delete spec; }

hl_status hl_unstable_spec_from_json(const hl_curve* curve, const char* json, hl_unstable_spec** out) {
  if (!curve) return null_argument("curve");
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guard([&] {
    *out = new hl_unstable_spec{horolab::unstable_spec_from_json(horolab::parse_json(json), curve->curve.shape())};
  });
}

void hl_unstable_spec_free(hl_unstable_spec* spec) { delete spec; }

hl_status hl_obstruct_mobius(const hl_curve* curve, const hl_mobius_spec* spec, double tol, int grid_n, double* measure,
                             char** diagnostics) {
  if (!curve) return null_argument("curve");
  if (!spec) return null_argument("spec");
  if (!measure) return null_argument("measure");
  return guard([&] {
    const auto d = horolab::diagnose_obstruction(curve->curve, spec->spec, tol, grid_n);
    *measure = d.measure;
    if (diagnostics) *diagnostics = dup(diagnostics_json(d, "mobius", tol, grid_n));
  });
}

hl_status hl_obstruct_unstable(const hl_curve* curve, const hl_unstable_spec* spec, double tol, int grid_n,
                               double* measure, char** diagnostics) {
  if (!curve) return null_argument("curve");
  if (!spec) return null_argument("spec");
  if (!measure) return null_argument("measure");
  return guard([&] {
    const auto d = horolab::diagnose_obstruction(curve->curve, spec->spec, tol, grid_n);
    *measure = d.measure;
    if (diagnostics) *diagnostics = dup(diagnostics_json(d, "unstable", tol, grid_n));
  });
}

hl_status hl_obstruct_json(const hl_curve* curve, const char* spec_json, double tol, int grid_n, double* measure,
                           char** diagnostics) {
  if (!curve) return null_argument("curve");
  if (!spec_json) return null_argument("spec_json");
  if (!measure) return null_argument("measure");
  return guard([&] {
    const horolab::Json j = horolab::parse_json(spec_json);
    const auto& c = curve->curve;
    if (j.is_object() && j.contains("null_vectors")) {
      const auto d = horolab::diagnose_obstruction(c, horolab::unstable_spec_from_json(j, c.shape()), tol, grid_n);
      *measure = d.measure;
      if (diagnostics) *diagnostics = dup(diagnostics_json(d, "unstable", tol, grid_n));
    } else {
      const auto d = horolab::diagnose_obstruction(c, horolab::mobius_spec_from_json(j, c.shape()), tol, grid_n);
      *measure = d.measure;
      if (diagnostics) *diagnostics = dup(diagnostics_json(d, "mobius", tol, grid_n));
    }
  });
}

hl_status hl_verify_suite(const char* suite, uint64_t seed, const char* out_dir, int* passed, char** result) {
  if (!suite) return null_argument("suite");
  if (!passed) return null_argument("passed");
  return guard([&] {
    horolab::VerifyOptions opt;
    opt.seed = seed;
    if (out_dir) opt.out_dir = out_dir;
    const horolab::SuiteResult r = horolab::run_suite(suite, opt);
    *passed = r.passed() ? 1 : 0;
    if (result) *result = dup(r.to_json());
  });
}

hl_status hl_verify_criterion(int id, uint64_t seed, int* passed, char** result) {
  if (!passed) return null_argument("passed");
  return guard([&] {
    horolab::VerifyOptions opt;
    opt.seed = seed;
    const horolab::CheckResult r = horolab::run_criterion(id, opt);
    *passed = r.passed ? 1 : 0;
    if (result) {
      horolab::Json j = check_json(r);
      j["criterion"] = id;
      *result = dup(j.dump(2));
    }
  });
}

hl_status hl_experiment_run_json(const char* config_json, hl_report** out) {
  if (!config_json) return null_argument("config_json");
  if (!out) return null_argument("out");
  return guard([&] {
    *out = new hl_report{horolab::run_translate_experiment(horolab::experiment_config_from_json(config_json))};
  });
}

hl_status hl_experiment_run_file(const char* config_path, hl_report** out) {
  if (!config_path) return null_argument("config_path");
  if (!out) return null_argument("out");
  return guard([&] {
    *out = new hl_report{horolab::run_translate_experiment(horolab::load_experiment_config(config_path))};
  });
}

hl_status hl_report_set_outputs(hl_report* report, const char* json_path, const char* csv_path, const char* svg_dir) {
  if (!report) return null_argument("report");
  auto& cfg = report->report.config;
  if (json_path) cfg.json_path = json_path;
  if (csv_path) cfg.csv_path = csv_path;
  if (svg_dir) cfg.svg_dir = svg_dir;
  return HL_OK;
}

hl_status hl_report_write(const hl_report* report) {
  if (!report) return null_argument("report");
  return guard([&] { report->report.write_outputs(); });
}

hl_status hl_report_json(const hl_report* report, char** out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  return guard([&] { *out = dup(report->report.to_json()); });
}

hl_status hl_report_csv(const hl_report* report, char** out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  return guard([&] { *out = dup(report->report.to_csv()); });
}

hl_status hl_report_sample_count(const hl_report* report, size_t* out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  *out = report->report.samples.size();
  return HL_OK;
}

hl_status hl_report_cusp_fraction(const hl_report* report, int t_index, int factor, double Y, double* out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  return guard([&] {
    const auto& r = report->report;
    if (t_index < 0 || t_index >= static_cast<int>(r.config.t_values.size())) {
      throw horolab::ArgumentError("t_index out of range");
    }
    if (factor < 0 || factor >= r.config.curve->shape().k()) throw horolab::ArgumentError("factor out of range");
    *out = horolab::cusp_fraction(r, t_index, Y, factor);
  });
}

void hl_report_free(hl_report* report) { delete report; }

hl_status hl_c_dJ(int d, double lo, double hi, double* out) {
  if (!out) return null_argument("out");
  return guard([&] { *out = horolab::c_dJ(d, lo, hi); });
}

hl_status hl_haar_cusp_fraction(double Y, double* out) {
  if (!out) return null_argument("out");
  return guard([&] { *out = horolab::haar_cusp_fraction(Y); });
}

}  // extern "C"
