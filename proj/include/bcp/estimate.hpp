#pragma once

#include <map>
#include <string>

namespace bcp {

/// Estimation strategies surfaced to callers and reports.
enum class Method {
  closed_form,    // exact linear-boundary formulas
  explicit_form,  // factorized conditional integrated by quadrature
  hybrid,         // quadrature outside, conditional-bridge MC inside
  paper_literal,  // the unnormalized diagnostic variant, as printed
  path_mc,        // full path simulation with per-step bridge corrections
  timesplit,      // chained local kernels over a split partition
  mixture,        // weighted scenario combination
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws ConfigInvalid

/// One estimator result: a probability, an uncertainty (standard error for
/// MC-backed methods, truncation/quadrature bound for deterministic ones),
/// and named diagnostic scalars.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  Method method = Method::closed_form;
  std::map<std::string, double> diagnostics;
};

}  // namespace bcp
