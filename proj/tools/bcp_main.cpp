// Command-line front end: parse a JSON run configuration, evaluate the
// requested estimators, and emit machine-readable reports.
//
// Subcommands:
//   eval      one record per method (JSON)
//   compare   method-vs-reference table (CSV by default)
//   diagnose  decomposition statistics and factorization gaps (JSON)
//   sweep     Cartesian parameter sweep (CSV by default)
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical error.

#include <chrono>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "bcp/bridge.hpp"
#include "bcp/config.hpp"
#include "bcp/errors.hpp"
#include "bcp/estimators.hpp"
#include "bcp/girsanov.hpp"
#include "bcp/mc.hpp"
#include "bcp/problem.hpp"

namespace {

using bcp::json;

struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    bcp::fail(bcp::ErrorCode::ConfigInvalid, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load_config(const CliOptions& opt, const char* default_format) {
  json raw = json::parse(slurp(opt.config_path), nullptr,
                         /*allow_exceptions=*/false);
  if (raw.is_discarded())
    bcp::fail(bcp::ErrorCode::ConfigInvalid,
              "config file is not valid JSON: " + opt.config_path);
  if (!raw.is_object())
    bcp::fail(bcp::ErrorCode::ConfigInvalid, "config root must be an object");
  for (const std::string& ov : opt.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      bcp::fail(bcp::ErrorCode::ConfigInvalid,
                "--set expects PATH=VALUE, got: " + ov);
    bcp::apply_override(raw, ov.substr(0, eq), ov.substr(eq + 1));
  }
  if (opt.seed) raw["seed"] = *opt.seed;
  if (opt.out) raw["output"]["path"] = *opt.out;
  if (opt.format) raw["output"]["format"] = *opt.format;
  json& out = raw["output"];
  if (out.is_null()) out = json::object();
  if (out.is_object() && !out.contains("format"))
    out["format"] = default_format;
  return raw;
}

void write_text(const bcp::OutputSpec& out, const std::string& text) {
  if (out.path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f)
    bcp::fail(bcp::ErrorCode::ConfigInvalid,
              "cannot open output path: " + out.path);
  f << text;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return csv_field(fmt17(v.get<double>()));
  if (v.is_string()) return csv_field(v.get<std::string>());
  return csv_field(v.dump());
}

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

bcp::ReducedProblem reduce_of(const bcp::ProblemVariant& pv) {
  if (const auto* one = std::get_if<bcp::OneSidedProblem>(&pv))
    return bcp::reduce_one_sided(*one);
  return bcp::reduce_two_sided(std::get<bcp::TwoSidedProblem>(pv));
}

bcp::Estimate run_method(const bcp::RunConfig& cfg, const bcp::MethodSpec& ms) {
  if (cfg.problem)
    return bcp::evaluate_method(*cfg.problem, ms.method, ms.controls);
  return bcp::mixture_marginal(*cfg.mixture, ms.method, ms.controls);
}

void require_json_format(const bcp::RunConfig& cfg, const char* command) {
  if (cfg.output.format != "json")
    bcp::fail(bcp::ErrorCode::ConfigInvalid,
              std::string("/output/format: ") + command +
                  " emits a JSON report");
}

struct ProblemDiag {
  bool available = false;
  bool degenerate = false;
  double alpha = 0.0;
  double alpha_tilde = 0.0;
  double rho = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  bool clamped = false;
};

ProblemDiag problem_diagnostics(const bcp::ProblemVariant& pv) {
  ProblemDiag d;
  const bcp::ReducedProblem red = reduce_of(pv);
  try {
    const bcp::GirsanovCoefficients cf = bcp::compute_coefficients(red);
    d.available = true;
    d.alpha = cf.alpha;
    d.alpha_tilde = cf.alpha_tilde;
    d.rho = cf.rho;
    d.i1 = cf.i1;
    d.i2 = cf.i2;
    if (cf.i2 > 0.0) {
      const double raw =
          cf.i1 / (std::sqrt(red.horizon) * std::sqrt(cf.i2));
      d.clamped = std::fabs(raw) > 1.0;
    }
  } catch (const bcp::Error& e) {
    if (e.code() != bcp::ErrorCode::DegenerateDrift) throw;
    d.available = true;
    d.degenerate = true;
  }
  return d;
}

int cmd_eval(const bcp::RunConfig& cfg) {
  require_json_format(cfg, "eval");
  std::optional<ProblemDiag> pd;
  if (cfg.problem) pd = problem_diagnostics(*cfg.problem);

  json records = json::array();
  for (const bcp::MethodSpec& ms : cfg.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    const bcp::Estimate est = run_method(cfg, ms);
    const auto t1 = std::chrono::steady_clock::now();

    json diag = json::object();
    if (pd) {
      diag["alpha"] = pd->degenerate ? 0.0 : pd->alpha;
      diag["alpha_tilde"] = pd->degenerate ? 0.0 : pd->alpha_tilde;
      diag["rho"] = pd->degenerate ? 0.0 : pd->rho;
      diag["I1"] = pd->degenerate ? 0.0 : pd->i1;
      diag["I2"] = pd->degenerate ? 0.0 : pd->i2;
      diag["tail_bound"] = bcp::normal_cdf(-ms.controls.quad.tail_z);
      diag["clamped"] = pd->clamped;
      if (pd->degenerate) diag["degenerate"] = true;
    }
    for (const auto& kv : est.diagnostics)
      if (!diag.contains(kv.first)) diag[kv.first] = kv.second;
    if (pd && !pd->degenerate && cfg.problem &&
        ms.method == bcp::Method::hybrid) {
      // Quantify the conditional-independence assumption the hybrid relies
      // on, at the central endpoint value.
      const bcp::ReducedProblem red = reduce_of(*cfg.problem);
      const bcp::GirsanovCoefficients cf = bcp::compute_coefficients(red);
      const bcp::FactorizationGap gap =
          bcp::factorization_gap(red, cf, 0.0, ms.controls.mc);
      diag["factorization_gap"] = gap.gap;
      diag["factorization_gap_se"] = gap.gap_se;
    }

    json rec = json::object();
    rec["method"] = bcp::method_name(ms.method);
    rec["value"] = est.value;
    rec["error"] = est.error;
    if (cfg.timing) {
      rec["runtime_ms"] =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    } else {
      rec["runtime_ms"] = nullptr;
    }
    rec["diagnostics"] = std::move(diag);
    records.push_back(std::move(rec));
  }

  json report = json::object();
  report["command"] = "eval";
  report["config"] = cfg.resolved;
  report["records"] = std::move(records);
  write_text(cfg.output, report.dump(2) + "\n");
  return 0;
}

int cmd_compare(const bcp::RunConfig& cfg) {
  std::vector<bcp::Estimate> ests;
  ests.reserve(cfg.methods.size());
  for (const bcp::MethodSpec& ms : cfg.methods) ests.push_back(run_method(cfg, ms));

  const bcp::Method ref_method = bcp::method_from_name(cfg.compare_reference);
  std::optional<std::size_t> ref_idx;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    if (cfg.methods[i].method == ref_method) {
      ref_idx = i;
      break;
    }
  bcp::Estimate ref_est;
  if (ref_idx) {
    ref_est = ests[*ref_idx];
  } else {
    bcp::MethodSpec ref_spec;
    ref_spec.method = ref_method;
    ref_spec.controls.mc.seed = cfg.seed;
    ref_est = run_method(cfg, ref_spec);
  }

  struct Row {
    std::string method;
    double value, error, delta, sigmas;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    Row r;
    r.method = bcp::method_name(cfg.methods[i].method);
    r.value = ests[i].value;
    r.error = ests[i].error;
    r.delta = ests[i].value - ref_est.value;
    const double combined =
        std::sqrt(ests[i].error * ests[i].error +
                  ref_est.error * ref_est.error);
    r.sigmas = (r.delta == 0.0) ? 0.0 : r.delta / std::max(combined, 1e-300);
    rows.push_back(r);
  }

  if (cfg.output.format == "csv") {
    std::string text = "# resolved_config " + cfg.resolved.dump() + "\n";
    text += "method,value,error,delta_vs_reference,sigmas\n";
    for (const Row& r : rows) {
      text += csv_join({csv_field(r.method), fmt17(r.value), fmt17(r.error),
                        fmt17(r.delta), fmt17(r.sigmas)});
      text += '\n';
    }
    write_text(cfg.output, text);
  } else {
    json jrows = json::array();
    for (const Row& r : rows) {
      json o = json::object();
      o["method"] = r.method;
      o["value"] = r.value;
      o["error"] = r.error;
      o["delta_vs_reference"] = r.delta;
      o["sigmas"] = r.sigmas;
      jrows.push_back(std::move(o));
    }
    json report = json::object();
    report["command"] = "compare";
    report["config"] = cfg.resolved;
    report["reference"] = cfg.compare_reference;
    report["rows"] = std::move(jrows);
    write_text(cfg.output, report.dump(2) + "\n");
  }
  return 0;
}

int cmd_diagnose(const bcp::RunConfig& cfg) {
  require_json_format(cfg, "diagnose");
  if (!cfg.problem)
    bcp::fail(bcp::ErrorCode::ConfigInvalid,
              "/problem: diagnose requires a problem block");
  const bcp::MCControl& mc = cfg.methods.front().controls.mc;
  const bcp::ReducedProblem red = reduce_of(*cfg.problem);

  json report = json::object();
  report["command"] = "diagnose";
  report["config"] = cfg.resolved;
  try {
    const bcp::GirsanovCoefficients cf = bcp::compute_coefficients(red);
    report["degenerate"] = false;
    {
      json co = json::object();
      co["alpha"] = cf.alpha;
      co["alpha_tilde"] = cf.alpha_tilde;
      co["rho"] = cf.rho;
      co["I1"] = cf.i1;
      co["I2"] = cf.i2;
      co["i_cross"] = cf.i_cross;
      report["coefficients"] = std::move(co);
    }

    const bcp::DecompositionStats st = bcp::decomposition_stats(red, cf, mc);
    if (st.degenerate) {
      json dec = json::object();
      dec["degenerate"] = true;
      dec["note"] =
          "reduced drift rate is constant: the centered component vanishes "
          "and the decomposition is trivial";
      report["decomposition"] = std::move(dec);
    } else {
      const double n = static_cast<double>(st.n_paths);
      const double rn = std::sqrt(n);
      const double horizon = red.horizon;
      json bands = json::object();
      bands["max_residual"] = 1e-10;
      bands["mean_wtilde"] = 3.0 / rn;
      bands["var_wtilde"] = 5.0 / rn;
      bands["corr_w_wtilde"] = 3.0 / rn;
      bands["q_mean_shifted"] = 3.0 / rn;
      bands["q_var_shifted"] = 5.0 / rn;
      bands["q_mean_endpoint"] = 3.0 * std::sqrt(horizon) / rn;
      json pass = json::object();
      pass["max_residual"] = st.max_residual <= 1e-10;
      pass["mean_wtilde"] = std::fabs(st.mean_wtilde) <= 3.0 / rn;
      pass["var_wtilde"] = std::fabs(st.var_wtilde - 1.0) <= 5.0 / rn;
      pass["corr_w_wtilde"] = std::fabs(st.corr_w_wtilde) <= 3.0 / rn;
      pass["q_mean_shifted"] = std::fabs(st.q_mean_shifted) <= 3.0 / rn;
      pass["q_var_shifted"] = std::fabs(st.q_var_shifted - 1.0) <= 5.0 / rn;
      pass["q_mean_endpoint"] =
          std::fabs(st.q_mean_endpoint) <= 3.0 * std::sqrt(horizon) / rn;
      bool all = true;
      for (const auto& kv : pass.items()) all = all && kv.value().get<bool>();

      json dec = json::object();
      dec["degenerate"] = false;
      dec["n_paths"] = st.n_paths;
      dec["max_residual"] = st.max_residual;
      dec["mean_wtilde"] = st.mean_wtilde;
      dec["var_wtilde"] = st.var_wtilde;
      dec["corr_w_wtilde"] = st.corr_w_wtilde;
      dec["q_mean_shifted"] = st.q_mean_shifted;
      dec["q_var_shifted"] = st.q_var_shifted;
      dec["q_mean_endpoint"] = st.q_mean_endpoint;
      dec["bands"] = std::move(bands);
      dec["pass"] = std::move(pass);
      dec["all_pass"] = all;
      report["decomposition"] = std::move(dec);
    }

    json gaps = json::array();
    for (double x : cfg.diagnose_x) {
      const bcp::FactorizationGap g = bcp::factorization_gap(red, cf, x, mc);
      json o = json::object();
      o["x"] = x;
      o["gap"] = g.gap;
      o["gap_se"] = g.gap_se;
      o["normalized_gap"] = g.normalized_gap;
      o["normalized_se"] = g.normalized_se;
      o["indicator_mean"] = g.indicator_mean;
      o["weight_mean"] = g.weight_mean;
      o["within_3se"] = std::fabs(g.gap) <= 3.0 * g.gap_se;
      gaps.push_back(std::move(o));
    }
    report["factorization"] = std::move(gaps);
  } catch (const bcp::Error& e) {
    if (e.code() != bcp::ErrorCode::DegenerateDrift) throw;
    report["degenerate"] = true;
    report["note"] =
        "reduced drift is identically zero: Girsanov reweighting is bypassed "
        "and all estimators reduce to the direct bridge formulas";
  }
  write_text(cfg.output, report.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const json& raw, const bcp::RunConfig& base) {
  const std::vector<bcp::SweepAxis>& axes = base.sweep;

  std::vector<std::string> headers;
  for (const bcp::SweepAxis& ax : axes) headers.push_back(ax.path);
  headers.push_back("method");
  headers.push_back("value");
  headers.push_back("error");

  struct SweepRow {
    std::vector<json> cells;  // axis values, then method/value/error
  };
  std::vector<SweepRow> rows;

  if (!axes.empty()) {
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      json pr = raw;
      pr.erase("sweep");
      for (std::size_t i = 0; i < axes.size(); ++i)
        bcp::apply_override(pr, axes[i].path, axes[i].values[idx[i]].dump());
      const bcp::RunConfig pc = bcp::parse_run_config(pr);
      for (const bcp::MethodSpec& ms : pc.methods) {
        const bcp::Estimate est = run_method(pc, ms);
        SweepRow row;
        for (std::size_t i = 0; i < axes.size(); ++i)
          row.cells.push_back(axes[i].values[idx[i]]);
        row.cells.push_back(json(bcp::method_name(ms.method)));
        row.cells.push_back(json(est.value));
        row.cells.push_back(json(est.error));
        rows.push_back(std::move(row));
      }
      // odometer: advance with the last axis fastest
      std::size_t k = axes.size();
      bool done = false;
      while (true) {
        if (k == 0) {
          done = true;
          break;
        }
        --k;
        if (++idx[k] < axes[k].values.size()) break;
        idx[k] = 0;
      }
      if (done) break;
    }
  }

  if (base.output.format == "csv") {
    std::string text = "# resolved_config " + base.resolved.dump() + "\n";
    {
      std::vector<std::string> cells;
      for (const std::string& h : headers) cells.push_back(csv_field(h));
      text += csv_join(cells);
      text += '\n';
    }
    for (const SweepRow& row : rows) {
      std::vector<std::string> cells;
      for (const json& c : row.cells) cells.push_back(csv_cell(c));
      text += csv_join(cells);
      text += '\n';
    }
    write_text(base.output, text);
  } else {
    json jrows = json::array();
    for (const SweepRow& row : rows) {
      json o = json::object();
      for (std::size_t i = 0; i < headers.size(); ++i)
        o[headers[i]] = row.cells[i];
      jrows.push_back(std::move(o));
    }
    json report = json::object();
    report["command"] = "sweep";
    report["config"] = base.resolved;
    report["rows"] = std::move(jrows);
    write_text(base.output, report.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Boundary-crossing probabilities for drifted Wiener processes"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file")
        ->required();
    sub->add_option("--seed", opt.seed, "Override the top-level seed");
    sub->add_option("--out", opt.out, "Override output.path ('-' = stdout)");
    sub->add_option("--format", opt.format, "Override output.format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--set", opt.overrides,
                    "Override a config field: dotted.path=value (repeatable)");
  };
  CLI::App* sub_eval =
      app.add_subcommand("eval", "Evaluate each method once");
  CLI::App* sub_compare =
      app.add_subcommand("compare", "Compare methods against a reference");
  CLI::App* sub_diagnose = app.add_subcommand(
      "diagnose", "Decomposition statistics and factorization gaps");
  CLI::App* sub_sweep =
      app.add_subcommand("sweep", "Evaluate methods over a parameter grid");
  add_common(sub_eval);
  add_common(sub_compare);
  add_common(sub_diagnose);
  add_common(sub_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sub_eval)) {
      const json raw = load_config(opt, "json");
      return cmd_eval(bcp::parse_run_config(raw));
    }
    if (app.got_subcommand(sub_compare)) {
      const json raw = load_config(opt, "csv");
      return cmd_compare(bcp::parse_run_config(raw));
    }
    if (app.got_subcommand(sub_diagnose)) {
      const json raw = load_config(opt, "json");
      return cmd_diagnose(bcp::parse_run_config(raw));
    }
    const json raw = load_config(opt, "csv");
    const bcp::RunConfig base = bcp::parse_run_config(raw);
    return cmd_sweep(raw, base);
  } catch (const bcp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bcp::is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
