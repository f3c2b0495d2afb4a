#pragma once

#include <cstddef>
#include <string>

#include "bcp/estimate.hpp"
#include "bcp/problem.hpp"

namespace bcp {

/// How the per-interval kernel obtains its interface boundary values:
/// local_explicit reads the reduced drift-gap grid; piecewise_linear
/// evaluates the original curves at the split times (the secant scheme).
enum class LocalMethod { local_explicit, piecewise_linear };

const char* local_method_name(LocalMethod m);
LocalMethod local_method_from_name(const std::string& name);

struct SplitControl {
  std::size_t n_splits = 4;
  std::size_t n_nodes = 32;  // Gauss-Legendre points per transition panel
  LocalMethod local_method = LocalMethod::local_explicit;
};

void validate_split_control(const SplitControl& ctrl);

/// Crossing probability by chaining locally linear kernels over a uniform
/// split of the horizon: backward induction of the survival value function
/// across split times.  Each transition integrates (Gaussian step weight) x
/// (linear-boundary noncrossing kernel) x (next value function) over the
/// admissible region with Gauss-Legendre panels; the value function is held
/// on Chebyshev-Lobatto nodes.
Estimate split_marginal(const OneSidedProblem& problem,
                        const SplitControl& ctrl);
Estimate split_marginal_two_sided(const TwoSidedProblem& problem,
                                  const SplitControl& ctrl);

}  // namespace bcp
