// horolab: command-line front end over the C API.
//   horolab verify [suite]            property suites (all when omitted)
//   horolab criteria [id ...]         numbered acceptance criteria
//   horolab experiment <config.json>  translate experiment
//   horolab obstruct <curve.json> <spec.json>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "horolab/horolab.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

using Json = nlohmann::json;

struct Owned {
  char* p = nullptr;
  ~Owned() { hl_string_free(p); }
};

int report_error(hl_status st, const std::string& what) {
  std::cerr << "horolab: " << what << ": " << hl_status_name(st) << " error: " << hl_last_error() << "\n";
  return kExitError;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream os;
  os << in.rdbuf();
  out = os.str();
  return true;
}

void print_check(const Json& c) {
  std::printf("  %-4s %-40s %7.2f s  %s\n", c["passed"].get<bool>() ? "ok" : "FAIL", c["name"].get<std::string>().c_str(),
              c["seconds"].get<double>(), c["detail"].get<std::string>().c_str());
}

int run_verify(const std::vector<std::string>& suites, std::uint64_t seed, const std::string& out_dir, bool as_json) {
  bool all_passed = true;
  Json docs = Json::array();
  for (const auto& suite : suites) {
    int passed = 0;
    Owned result;
    const hl_status st = hl_verify_suite(suite.c_str(), seed, out_dir.empty() ? nullptr : out_dir.c_str(), &passed, &result.p);
    if (st != HL_OK) return report_error(st, "verify " + suite);
    const Json doc = Json::parse(result.p);
    all_passed = all_passed && passed;
    if (as_json) {
      docs.push_back(doc);
      continue;
    }
    std::printf("%s: %s\n", suite.c_str(), passed ? "PASS" : "FAIL");
    for (const auto& c : doc["checks"]) print_check(c);
  }
  if (as_json) std::cout << (docs.size() == 1 ? docs[0] : docs).dump(2) << "\n";
  return all_passed ? 0 : kExitFail;
}

int run_criteria(std::vector<int> ids, std::uint64_t seed, bool as_json) {
  if (ids.empty()) {
    for (int i = 1; i <= 12; ++i) ids.push_back(i);
  }
  int failed = 0;
  Json docs = Json::array();
  for (int id : ids) {
    int passed = 0;
    Owned result;
    const hl_status st = hl_verify_criterion(id, seed, &passed, &result.p);
    if (st != HL_OK) return report_error(st, "criterion " + std::to_string(id));
    const Json doc = Json::parse(result.p);
    failed += !passed;
    if (as_json) {
      docs.push_back(doc);
    } else {
      std::printf("criterion %d: %s  %s [%.2f s] %s\n", id, passed ? "PASS" : "FAIL", doc["name"].get<std::string>().c_str(),
                  doc["seconds"].get<double>(), doc["detail"].get<std::string>().c_str());
      std::fflush(stdout);
    }
  }
  if (as_json) std::cout << docs.dump(2) << "\n";
  return failed == 0 ? 0 : kExitFail;
}

struct ExperimentArgs {
  std::string config;
  std::string json_path, csv_path, svg_dir;
  bool json_set = false, csv_set = false, svg_set = false;
};

int run_experiment(const ExperimentArgs& a) {
  hl_report* report = nullptr;
  hl_status st = hl_experiment_run_file(a.config.c_str(), &report);
  if (st != HL_OK) return report_error(st, "experiment " + a.config);
  struct Free {
    hl_report* r;
    ~Free() { hl_report_free(r); }
  } guard{report};

  st = hl_report_set_outputs(report, a.json_set ? a.json_path.c_str() : nullptr, a.csv_set ? a.csv_path.c_str() : nullptr,
                             a.svg_set ? a.svg_dir.c_str() : nullptr);
  if (st == HL_OK) st = hl_report_write(report);
  if (st != HL_OK) return report_error(st, "writing outputs");

  Owned text;
  st = hl_report_json(report, &text.p);
  if (st != HL_OK) return report_error(st, "report");
  const Json doc = Json::parse(text.p);
  if (a.json_set && a.json_path == "-") {
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  const auto& cfg = doc["config"];
  std::printf("curve %s, %zu samples, cross-checks %zu (max residual %.3g)\n", cfg["curve_id"].get<std::string>().c_str(),
              doc["sample_count"].get<std::size_t>(), doc["crosscheck"]["count"].get<std::size_t>(),
              doc["crosscheck"]["max_residual"].get<double>());
  for (const auto& row : doc["per_t"]) {
    std::printf("t = %g\n", row["t"].get<double>());
    int f = 1;
    for (const auto& s : row["factors"]) {
      std::printf("  factor %d: theta KS %.4f, box discrepancy %.4f, cusp", f++, s["theta_ks"].get<double>(),
                  s["box_discrepancy"].get<double>());
      for (const auto& c : s["cusp"]) std::printf(" Y=%g %.4f (Haar %.4f)", c["Y"].get<double>(), c["fraction"].get<double>(),
                                                   c["haar"].get<double>());
      std::printf("\n");
    }
    if (row.contains("correlation")) std::printf("  correlation %.4f\n", row["correlation"].get<double>());
  }
  return 0;
}

int run_obstruct(const std::string& curve_path, const std::string& spec_path, double tol, int grid, bool as_json) {
  hl_curve* curve = nullptr;
  hl_status st = hl_curve_load(curve_path.c_str(), &curve);
  if (st != HL_OK) return report_error(st, "curve " + curve_path);
  struct Free {
    hl_curve* c;
    ~Free() { hl_curve_free(c); }
  } guard{curve};

  std::string spec;
  if (!read_file(spec_path, spec)) {
    std::cerr << "horolab: cannot open " << spec_path << "\n";
    return kExitError;
  }
  double measure = 0.0;
  Owned diag;
  st = hl_obstruct_json(curve, spec.c_str(), tol, grid, &measure, &diag.p);
  if (st != HL_OK) return report_error(st, "obstruct " + spec_path);
  const Json doc = Json::parse(diag.p);
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::printf("%s obstruction, grid %d, tol %g\n", doc["kind"].get<std::string>().c_str(), grid, tol);
  std::printf("measure %.6g (min distance %.3g at s = %.4g)\n", measure, doc["min_distance"].get<double>(),
              doc["argmin_s"].get<double>());
  for (const auto& f : doc["factors"]) {
    std::printf("  factor %d:", f["factor"].get<int>());
    if (f.contains("block")) std::printf(" block %d,", f["block"].get<int>());
    if (!f["constrained"].get<bool>()) {
      std::printf(" no constant constraint\n");
      continue;
    }
    if (f.contains("constant")) std::printf(" constant %s,", f["constant"].dump().c_str());
    std::printf(" on-set fraction %.6g, min distance %.3g at s = %.4g\n", f["on_fraction"].get<double>(),
                f["min_distance"].get<double>(), f["argmin_s"].get<double>());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horospherical translates of curves in products of Lorentz groups"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hl_version()));
  std::uint64_t seed = 20240917;
  bool as_json = false;

  auto* verify = app.add_subcommand("verify", "Run property suites; exit 0 when every check passes");
  std::string suite;
  std::string out_dir;
  verify->add_option("suite", suite, "core, weights, curves, bounds or obstructions (default: all)")
      ->check(CLI::IsMember({"core", "weights", "curves", "bounds", "obstructions"}));
  verify->add_option("--out-dir", out_dir, "Directory for bound_report.json / bound_report.csv");
  verify->add_option("--seed", seed, "Base seed");
  verify->add_flag("--json", as_json, "Print the suite results as JSON");

  auto* criteria = app.add_subcommand("criteria", "Run the numbered acceptance criteria");
  std::vector<int> ids;
  criteria->add_option("ids", ids, "Criterion numbers (default: 1-12)")->check(CLI::Range(1, 12));
  criteria->add_option("--seed", seed, "Base seed");
  criteria->add_flag("--json", as_json, "Print results as JSON");

  auto* experiment = app.add_subcommand("experiment", "Run a translate experiment from a JSON config");
  ExperimentArgs ex;
  experiment->add_option("config", ex.config, "Experiment config")->required()->check(CLI::ExistingFile);
  auto* oj = experiment->add_option("--json", ex.json_path, "Report JSON path ('-' prints it)");
  auto* oc = experiment->add_option("--csv", ex.csv_path, "Sample CSV path");
  auto* os = experiment->add_option("--svg-dir", ex.svg_dir, "Directory for SVG histograms");
  int threads = 0;
  experiment->add_option("--threads", threads, "Worker count (overrides HOROLAB_THREADS)")->check(CLI::PositiveNumber);

  auto* obstruct = app.add_subcommand("obstruct", "Estimate the grid measure of s with phi(s) on an obstruction set");
  std::string curve_path, spec_path;
  double tol = 1e-9;
  int grid = 1001;
  obstruct->add_option("curve", curve_path, "Curve JSON")->required()->check(CLI::ExistingFile);
  obstruct->add_option("spec", spec_path, "Moebius or unstable-direction spec JSON")->required()->check(CLI::ExistingFile);
  obstruct->add_option("--tol", tol, "Distance tolerance")->check(CLI::PositiveNumber);
  obstruct->add_option("--grid", grid, "Number of grid points in [0, 1]")->check(CLI::Range(2, 10000000));
  obstruct->add_flag("--json", as_json, "Print diagnostics as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (*verify) {
    std::vector<std::string> suites;
    if (suite.empty()) {
      suites = {"core", "weights", "curves", "bounds", "obstructions"};
    } else {
      suites = {suite};
    }
    return run_verify(suites, seed, out_dir, as_json);
  }
  if (*criteria) return run_criteria(ids, seed, as_json);
  if (*experiment) {
    ex.json_set = oj->count() > 0;
    ex.csv_set = oc->count() > 0;
    ex.svg_set = os->count() > 0;
    if (threads > 0) setenv("HOROLAB_THREADS", std::to_string(threads).c_str(), 1);
    return run_experiment(ex);
  }
  return run_obstruct(curve_path, spec_path, tol, grid, as_json);
}
