#include "bcp/config.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "bcp/errors.hpp"

namespace bcp {

const char* method_name(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::explicit_form: return "explicit";
    case Method::hybrid: return "hybrid";
    case Method::paper_literal: return "paper_literal";
    case Method::path_mc: return "path_mc";
    case Method::timesplit: return "timesplit";
    case Method::mixture: return "mixture";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "closed_form") return Method::closed_form;
  if (name == "explicit") return Method::explicit_form;
  if (name == "hybrid") return Method::hybrid;
  if (name == "paper_literal") return Method::paper_literal;
  if (name == "path_mc") return Method::path_mc;
  if (name == "timesplit") return Method::timesplit;
  if (name == "mixture") return Method::mixture;
  fail(ErrorCode::ConfigInvalid, "unknown method name: " + name);
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, where + ": " + what);
}

void require_object(const json& v, const std::string& where) {
  if (!v.is_object()) bad(where, "expected an object");
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) bad(where + "/" + it.key(), "unknown field");
  }
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) bad(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(where, "must be finite");
  return x;
}

double number_field(const json& obj, const std::string& where, const char* key,
                    double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return as_number(*it, where + "/" + key);
}

double require_number(const json& obj, const std::string& where,
                      const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where + "/" + key, "required field is missing");
  return as_number(*it, where + "/" + key);
}

std::uint64_t uint_field(const json& obj, const std::string& where,
                         const char* key, std::uint64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned())
    bad(where + "/" + key, "expected a nonnegative integer");
  return it->get<std::uint64_t>();
}

bool bool_field(const json& obj, const std::string& where, const char* key,
                bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) bad(where + "/" + key, "expected a boolean");
  return it->get<bool>();
}

std::string string_field(const json& obj, const std::string& where,
                         const char* key, const std::string& fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) bad(where + "/" + key, "expected a string");
  return it->get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], where + "/" + std::to_string(i)));
  return out;
}

ProblemVariant parse_problem(const json& block, const std::string& where) {
  require_object(block, where);
  std::string side = string_field(block, where, "side", "");
  if (side.empty())
    side = (block.contains("upper") || block.contains("lower")) ? "two_sided"
                                                                : "one_sided";
  if (side != "one_sided" && side != "two_sided")
    bad(where + "/side", "expected \"one_sided\" or \"two_sided\"");

  const double horizon = number_field(block, where, "horizon", 1.0);
  if (!(horizon > 0.0)) bad(where + "/horizon", "must be positive");
  const double sigma = number_field(block, where, "sigma", 1.0);
  if (!(sigma > 0.0))
    fail(ErrorCode::SigmaNonpositive, where + "/sigma: must be positive");
  const std::uint64_t grid_size = uint_field(block, where, "grid_size", 512);
  if (grid_size < 2) bad(where + "/grid_size", "must be at least 2");

  BoundaryCurve drift = BoundaryCurve::constant(0.0);
  if (block.contains("drift")) drift = parse_curve(block["drift"], where + "/drift");

  if (side == "one_sided") {
    reject_unknown(block, where,
                   {"side", "horizon", "sigma", "grid_size", "drift",
                    "boundary"});
    if (!block.contains("boundary"))
      bad(where + "/boundary", "required field is missing");
    OneSidedProblem p;
    p.drift = std::move(drift);
    p.boundary = parse_curve(block["boundary"], where + "/boundary");
    p.sigma = sigma;
    p.horizon = horizon;
    p.grid_size = static_cast<std::size_t>(grid_size);
    return p;
  }

  reject_unknown(block, where,
                 {"side", "horizon", "sigma", "grid_size", "drift", "upper",
                  "lower", "beta", "tol_beta"});
  if (!block.contains("upper")) bad(where + "/upper", "required field is missing");
  if (!block.contains("lower")) bad(where + "/lower", "required field is missing");
  TwoSidedProblem p;
  p.drift = std::move(drift);
  p.upper = parse_curve(block["upper"], where + "/upper");
  p.lower = parse_curve(block["lower"], where + "/lower");
  if (block.contains("beta")) {
    p.beta = require_number(block, where, "beta");
  } else {
    // Default: the gap slope the curves themselves realize over the horizon.
    p.beta = ((p.lower.value(horizon) - p.lower.value(0.0)) -
              (p.upper.value(horizon) - p.upper.value(0.0))) /
             horizon;
  }
  p.tol_beta = number_field(block, where, "tol_beta", -1.0);
  p.sigma = sigma;
  p.horizon = horizon;
  p.grid_size = static_cast<std::size_t>(grid_size);
  return p;
}

QuadratureControl parse_quad(const json& obj, const std::string& where) {
  require_object(obj, where);
  reject_unknown(obj, where, {"tol", "max_intervals", "tail_z"});
  QuadratureControl q;
  q.tol = number_field(obj, where, "tol", q.tol);
  if (!(q.tol > 0.0)) bad(where + "/tol", "must be positive");
  q.max_intervals = static_cast<std::size_t>(
      uint_field(obj, where, "max_intervals", q.max_intervals));
  if (q.max_intervals < 1) bad(where + "/max_intervals", "must be at least 1");
  q.tail_z = number_field(obj, where, "tail_z", q.tail_z);
  if (!(q.tail_z >= 1.0)) bad(where + "/tail_z", "must be at least 1");
  return q;
}

MCControl parse_mc(const json& obj, const std::string& where,
                   std::uint64_t default_seed) {
  require_object(obj, where);
  reject_unknown(obj, where,
                 {"n_paths", "n_steps", "seed", "antithetic", "workers"});
  MCControl mc;
  mc.n_paths =
      static_cast<std::size_t>(uint_field(obj, where, "n_paths", mc.n_paths));
  mc.n_steps =
      static_cast<std::size_t>(uint_field(obj, where, "n_steps", mc.n_steps));
  mc.seed = uint_field(obj, where, "seed", default_seed);
  mc.antithetic = bool_field(obj, where, "antithetic", mc.antithetic);
  mc.workers =
      static_cast<unsigned>(uint_field(obj, where, "workers", mc.workers));
  if (mc.workers < 1) bad(where + "/workers", "must be at least 1");
  return mc;
}

SplitControl parse_split(const json& obj, const std::string& where) {
  require_object(obj, where);
  reject_unknown(obj, where, {"n_splits", "n_nodes", "local_method"});
  SplitControl sp;
  sp.n_splits =
      static_cast<std::size_t>(uint_field(obj, where, "n_splits", sp.n_splits));
  sp.n_nodes =
      static_cast<std::size_t>(uint_field(obj, where, "n_nodes", sp.n_nodes));
  const std::string lm = string_field(obj, where, "local_method",
                                      local_method_name(sp.local_method));
  sp.local_method = local_method_from_name(lm);
  return sp;
}

SeriesControl parse_series(const json& obj, const std::string& where) {
  require_object(obj, where);
  reject_unknown(obj, where, {"tol", "j_max"});
  SeriesControl s;
  s.tol = number_field(obj, where, "tol", s.tol);
  if (!(s.tol > 0.0)) bad(where + "/tol", "must be positive");
  const std::uint64_t jm =
      uint_field(obj, where, "j_max", static_cast<std::uint64_t>(s.j_max));
  if (jm < 1 || jm > 100000) bad(where + "/j_max", "must lie in [1, 100000]");
  s.j_max = static_cast<int>(jm);
  return s;
}

MethodSpec parse_method(const json& elem, const std::string& where,
                        std::uint64_t default_seed) {
  MethodSpec spec;
  spec.controls.mc.seed = default_seed;
  std::string name;
  if (elem.is_string()) {
    name = elem.get<std::string>();
  } else {
    require_object(elem, where);
    reject_unknown(elem, where, {"name", "quad", "mc", "split", "series"});
    if (!elem.contains("name")) bad(where + "/name", "required field is missing");
    if (!elem["name"].is_string()) bad(where + "/name", "expected a string");
    name = elem["name"].get<std::string>();
    if (elem.contains("quad"))
      spec.controls.quad = parse_quad(elem["quad"], where + "/quad");
    if (elem.contains("mc"))
      spec.controls.mc = parse_mc(elem["mc"], where + "/mc", default_seed);
    if (elem.contains("split"))
      spec.controls.split = parse_split(elem["split"], where + "/split");
    if (elem.contains("series"))
      spec.controls.series = parse_series(elem["series"], where + "/series");
  }
  spec.method = method_from_name(name);
  if (spec.method == Method::mixture)
    bad(where, "mixture is selected by the mixture block, not as a method");
  return spec;
}

json curve_to_json(const BoundaryCurve& c) {
  json o = json::object();
  o["kind"] = curve_kind_name(c.kind);
  switch (c.kind) {
    case CurveKind::constant:
      o["level"] = c.coeffs.at(0);
      break;
    case CurveKind::linear:
      o["intercept"] = c.coeffs.at(0);
      o["slope"] = c.coeffs.at(1);
      break;
    case CurveKind::polynomial:
      o["coeffs"] = c.coeffs;
      break;
    case CurveKind::sinusoid:
      o["offset"] = c.coeffs.at(0);
      o["amplitude"] = c.coeffs.at(1);
      o["angular_frequency"] = c.coeffs.at(2);
      o["phase"] = c.coeffs.at(3);
      break;
    case CurveKind::piecewise_linear:
    case CurveKind::sampled_grid:
      o["times"] = c.times;
      o["values"] = c.values;
      break;
  }
  return o;
}

json problem_to_json(const ProblemVariant& pv) {
  json o = json::object();
  if (const auto* one = std::get_if<OneSidedProblem>(&pv)) {
    o["side"] = "one_sided";
    o["horizon"] = one->horizon;
    o["sigma"] = one->sigma;
    o["grid_size"] = one->grid_size;
    o["drift"] = curve_to_json(one->drift);
    o["boundary"] = curve_to_json(one->boundary);
  } else {
    const auto& two = std::get<TwoSidedProblem>(pv);
    o["side"] = "two_sided";
    o["horizon"] = two.horizon;
    o["sigma"] = two.sigma;
    o["grid_size"] = two.grid_size;
    o["drift"] = curve_to_json(two.drift);
    o["upper"] = curve_to_json(two.upper);
    o["lower"] = curve_to_json(two.lower);
    o["beta"] = two.beta;
    o["tol_beta"] = two.tol_beta;
  }
  return o;
}

json controls_to_json(const MethodControls& c) {
  json o = json::object();
  o["quad"] = {{"tol", c.quad.tol},
               {"max_intervals", c.quad.max_intervals},
               {"tail_z", c.quad.tail_z}};
  o["mc"] = {{"n_paths", c.mc.n_paths},
             {"n_steps", c.mc.n_steps},
             {"seed", c.mc.seed},
             {"antithetic", c.mc.antithetic},
             {"workers", c.mc.workers}};
  o["split"] = {{"n_splits", c.split.n_splits},
                {"n_nodes", c.split.n_nodes},
                {"local_method", local_method_name(c.split.local_method)}};
  o["series"] = {{"tol", c.series.tol}, {"j_max", c.series.j_max}};
  return o;
}

}  // namespace

BoundaryCurve parse_curve(const json& block, const std::string& where) {
  require_object(block, where);
  const std::string kind = string_field(block, where, "kind", "");
  if (kind.empty()) bad(where + "/kind", "required field is missing");
  if (kind == "constant") {
    reject_unknown(block, where, {"kind", "level"});
    return BoundaryCurve::constant(require_number(block, where, "level"));
  }
  if (kind == "linear") {
    reject_unknown(block, where, {"kind", "intercept", "slope"});
    return BoundaryCurve::linear(require_number(block, where, "intercept"),
                                 require_number(block, where, "slope"));
  }
  if (kind == "polynomial") {
    reject_unknown(block, where, {"kind", "coeffs"});
    if (!block.contains("coeffs"))
      bad(where + "/coeffs", "required field is missing");
    std::vector<double> coeffs =
        number_array(block["coeffs"], where + "/coeffs");
    if (coeffs.empty()) bad(where + "/coeffs", "must not be empty");
    return BoundaryCurve::polynomial(std::move(coeffs));
  }
  if (kind == "sinusoid") {
    reject_unknown(block, where,
                   {"kind", "offset", "amplitude", "angular_frequency",
                    "phase"});
    return BoundaryCurve::sinusoid(
        require_number(block, where, "offset"),
        require_number(block, where, "amplitude"),
        require_number(block, where, "angular_frequency"),
        number_field(block, where, "phase", 0.0));
  }
  if (kind == "piecewise_linear" || kind == "sampled_grid") {
    reject_unknown(block, where, {"kind", "times", "values"});
    if (!block.contains("times"))
      bad(where + "/times", "required field is missing");
    if (!block.contains("values"))
      bad(where + "/values", "required field is missing");
    std::vector<double> times = number_array(block["times"], where + "/times");
    std::vector<double> values =
        number_array(block["values"], where + "/values");
    return kind == "piecewise_linear"
               ? BoundaryCurve::piecewise_linear(std::move(times),
                                                 std::move(values))
               : BoundaryCurve::sampled_grid(std::move(times),
                                             std::move(values));
  }
  bad(where + "/kind", "unknown curve kind: " + kind);
}

RunConfig parse_run_config(const json& raw) {
  require_object(raw, "/");
  reject_unknown(raw, "",
                 {"problem", "mixture", "methods", "output", "seed", "timing",
                  "compare_reference", "diagnose_x", "sweep"});

  RunConfig cfg;
  cfg.seed = uint_field(raw, "", "seed", 1);
  cfg.timing = bool_field(raw, "", "timing", false);

  const bool has_problem = raw.contains("problem");
  const bool has_mixture = raw.contains("mixture");
  if (has_problem == has_mixture)
    bad("", "exactly one of \"problem\" and \"mixture\" is required");
  if (has_problem) {
    cfg.problem = parse_problem(raw["problem"], "/problem");
  } else {
    const json& mix = raw["mixture"];
    require_object(mix, "/mixture");
    reject_unknown(mix, "/mixture", {"scenarios"});
    if (!mix.contains("scenarios") || !mix["scenarios"].is_array())
      bad("/mixture/scenarios", "expected an array of scenarios");
    ScenarioMixture sm;
    for (std::size_t i = 0; i < mix["scenarios"].size(); ++i) {
      const std::string where = "/mixture/scenarios/" + std::to_string(i);
      const json& s = mix["scenarios"][i];
      require_object(s, where);
      reject_unknown(s, where, {"weight", "problem"});
      Scenario sc;
      sc.weight = require_number(s, where, "weight");
      if (!s.contains("problem"))
        bad(where + "/problem", "required field is missing");
      sc.problem = parse_problem(s["problem"], where + "/problem");
      sm.scenarios.push_back(std::move(sc));
    }
    validate_mixture(sm);
    cfg.mixture = std::move(sm);
  }

  if (!raw.contains("methods") || !raw["methods"].is_array() ||
      raw["methods"].empty())
    bad("/methods", "at least one method is required");
  for (std::size_t i = 0; i < raw["methods"].size(); ++i)
    cfg.methods.push_back(parse_method(raw["methods"][i],
                                       "/methods/" + std::to_string(i),
                                       cfg.seed));

  if (raw.contains("output")) {
    const json& out = raw["output"];
    require_object(out, "/output");
    reject_unknown(out, "/output", {"format", "path"});
    cfg.output.format = string_field(out, "/output", "format", "json");
    cfg.output.path = string_field(out, "/output", "path", "-");
    if (cfg.output.format != "json" && cfg.output.format != "csv")
      bad("/output/format", "expected \"json\" or \"csv\"");
    if (cfg.output.path.empty()) bad("/output/path", "must not be empty");
  }

  cfg.compare_reference =
      string_field(raw, "", "compare_reference", "path_mc");
  method_from_name(cfg.compare_reference);  // validates the name

  if (raw.contains("diagnose_x")) {
    cfg.diagnose_x = number_array(raw["diagnose_x"], "/diagnose_x");
    if (cfg.diagnose_x.empty()) bad("/diagnose_x", "must not be empty");
  }

  if (raw.contains("sweep")) {
    const json& sw = raw["sweep"];
    if (!sw.is_array()) bad("/sweep", "expected an array of axes");
    for (std::size_t i = 0; i < sw.size(); ++i) {
      const std::string where = "/sweep/" + std::to_string(i);
      const json& axis = sw[i];
      require_object(axis, where);
      reject_unknown(axis, where, {"path", "values"});
      SweepAxis ax;
      ax.path = string_field(axis, where, "path", "");
      if (ax.path.empty()) bad(where + "/path", "required field is missing");
      if (!axis.contains("values") || !axis["values"].is_array() ||
          axis["values"].empty())
        bad(where + "/values", "expected a nonempty array");
      for (const json& v : axis["values"]) ax.values.push_back(v);
      cfg.sweep.push_back(std::move(ax));
    }
  }

  // Materialize the full configuration with defaults for the report.
  json resolved = json::object();
  if (cfg.problem) {
    resolved["problem"] = problem_to_json(*cfg.problem);
  } else {
    json scenarios = json::array();
    for (const Scenario& sc : cfg.mixture->scenarios) {
      json s = json::object();
      s["weight"] = sc.weight;
      s["problem"] = problem_to_json(sc.problem);
      scenarios.push_back(std::move(s));
    }
    resolved["mixture"] = {{"scenarios", std::move(scenarios)}};
  }
  json methods = json::array();
  for (const MethodSpec& ms : cfg.methods) {
    json m = json::object();
    m["name"] = method_name(ms.method);
    json controls = controls_to_json(ms.controls);
    for (auto it = controls.begin(); it != controls.end(); ++it)
      m[it.key()] = it.value();
    methods.push_back(std::move(m));
  }
  resolved["methods"] = std::move(methods);
  resolved["output"] = {{"format", cfg.output.format},
                        {"path", cfg.output.path}};
  resolved["seed"] = cfg.seed;
  resolved["timing"] = cfg.timing;
  resolved["compare_reference"] = cfg.compare_reference;
  resolved["diagnose_x"] = cfg.diagnose_x;
  json sweep_out = json::array();
  for (const SweepAxis& ax : cfg.sweep) {
    json a = json::object();
    a["path"] = ax.path;
    a["values"] = json::array();
    for (const json& v : ax.values) a["values"].push_back(v);
    sweep_out.push_back(std::move(a));
  }
  resolved["sweep"] = std::move(sweep_out);
  cfg.resolved = std::move(resolved);
  return cfg;
}

void apply_override(json& raw, const std::string& dotted_path,
                    const std::string& value_text) {
  if (dotted_path.empty())
    fail(ErrorCode::ConfigInvalid, "override path must not be empty");
  std::vector<std::string> segments;
  std::string::size_type start = 0;
  while (true) {
    const auto dot = dotted_path.find('.', start);
    segments.push_back(dotted_path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const std::string& seg : segments)
    if (seg.empty())
      fail(ErrorCode::ConfigInvalid,
           "override path has an empty segment: " + dotted_path);

  auto is_index = [](const std::string& s) {
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return !s.empty();
  };
  auto descend = [&](json* cur, const std::string& seg,
                     bool create) -> json* {
    if (cur->is_array()) {
      if (!is_index(seg))
        fail(ErrorCode::ConfigInvalid,
             "override path indexes an array with \"" + seg + "\"");
      const std::size_t idx = static_cast<std::size_t>(std::stoull(seg));
      if (idx >= cur->size())
        fail(ErrorCode::ConfigInvalid,
             "override path index " + seg + " is out of range");
      return &(*cur)[idx];
    }
    if (!cur->is_object()) {
      if (!create)
        fail(ErrorCode::ConfigInvalid,
             "override path crosses a non-container value at \"" + seg + "\"");
      *cur = json::object();
    }
    json& child = (*cur)[seg];
    return &child;
  };

  json* cur = &raw;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    cur = descend(cur, segments[i], /*create=*/true);
    if (cur->is_null()) *cur = json::object();
  }
  json value = json::parse(value_text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = json(value_text);
  if (cur->is_array()) {
    json* slot = descend(cur, segments.back(), /*create=*/false);
    *slot = std::move(value);
  } else {
    if (!cur->is_object()) *cur = json::object();
    (*cur)[segments.back()] = std::move(value);
  }
}

}  // namespace bcp
