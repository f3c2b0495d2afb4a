#include "bcp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stack>

#include "bcp/errors.hpp"

namespace bcp {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Interval {
  double x0, x1, x2;  // left, mid, right
  NoisyValue f0, f1, f2;
  double simpson;  // Simpson estimate on [x0, x2] using x1
};

double simpson_value(double x0, double x2, double f0, double f1, double f2) {
  return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<NoisyValue(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t max_intervals) {
  QuadratureResult result;
  if (!(b > a)) {
    return result;
  }
  const double total_width = b - a;
  const double min_width = 1e-13 * total_width;

  double value = 0.0;
  double bound = 0.0;
  double var = 0.0;  // propagated node-noise variance
  std::size_t used = 0;

  auto make_interval = [&](double x0, double x2, NoisyValue f0, NoisyValue f2) {
    Interval iv;
    iv.x0 = x0;
    iv.x2 = x2;
    iv.x1 = 0.5 * (x0 + x2);
    iv.f0 = f0;
    iv.f2 = f2;
    iv.f1 = f(iv.x1);
    iv.simpson = simpson_value(x0, x2, f0.value, iv.f1.value, f2.value);
    return iv;
  };

  auto accept = [&](const Interval& iv, double err) {
    double h6 = (iv.x2 - iv.x0) / 6.0;
    value += iv.simpson;
    bound += err;
    var += h6 * h6 * (iv.f0.se * iv.f0.se + 16.0 * iv.f1.se * iv.f1.se +
                      iv.f2.se * iv.f2.se);
    ++used;
  };

  // seed with a handful of base intervals so symmetric integrands cannot pass
  // the first Richardson test by accident
  constexpr int kBaseIntervals = 8;
  std::stack<Interval> work;
  {
    NoisyValue prev = f(a);
    for (int k = 0; k < kBaseIntervals; ++k) {
      double x0 = a + total_width * k / kBaseIntervals;
      double x2 = (k + 1 == kBaseIntervals)
                      ? b
                      : a + total_width * (k + 1) / kBaseIntervals;
      NoisyValue fx2 = f(x2);
      work.push(make_interval(x0, x2, prev, fx2));
      prev = fx2;
    }
  }

  while (!work.empty()) {
    Interval iv = work.top();
    work.pop();

    if (used + work.size() >= max_intervals) {
      // budget exhausted: flush everything at its current estimate
      accept(iv, std::fabs(iv.simpson) * 1e-2 + 1e-300);
      result.budget_exceeded = true;
      continue;
    }

    Interval left = make_interval(iv.x0, iv.x1, iv.f0, iv.f1);
    Interval right = make_interval(iv.x1, iv.x2, iv.f1, iv.f2);
    double s2 = left.simpson + right.simpson;
    double disc = s2 - iv.simpson;
    double err = std::fabs(disc) / 15.0;

    double width = iv.x2 - iv.x0;
    double tol_share = tol * width / total_width;

    // noise floor: standard deviation of the Richardson discrepancy implied
    // by the node standard errors; refining past it would chase MC noise
    double h = width;
    double sd_disc = std::sqrt(
        (h / 12.0) * (h / 12.0) * (iv.f0.se * iv.f0.se + iv.f2.se * iv.f2.se) +
        (h / 2.0) * (h / 2.0) * (iv.f1.se * iv.f1.se) +
        (h / 3.0) * (h / 3.0) *
            (left.f1.se * left.f1.se + right.f1.se * right.f1.se));

    bool noise_limited = sd_disc > 0.0 && std::fabs(disc) <= 3.0 * sd_disc;
    if (err <= tol_share || noise_limited || width <= min_width) {
      // accept the refined estimate (one extra extrapolation order for free)
      left.simpson += disc / 30.0;
      right.simpson += disc / 30.0;
      accept(left, 0.5 * err);
      accept(right, 0.5 * err);
    } else {
      work.push(right);
      work.push(left);
    }
  }

  result.value = value;
  result.error = bound;
  result.se = std::sqrt(var);
  result.intervals = used;
  return result;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t max_intervals) {
  return integrate_adaptive(
      [&](double x) {
        return NoisyValue{f(x), 0.0};
      },
      a, b, tol, max_intervals);
}

double trapezoid_uniform(const std::vector<double>& y, double h) {
  if (y.size() < 2) {
    return 0.0;
  }
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    acc += y[i];
  }
  return acc * h;
}

namespace {

GaussRule build_hermite(std::size_t n) {
  GaussRule rule;
  rule.x.assign(n, 0.0);
  rule.w.assign(n, 0.0);
  const double pi_quarter = std::pow(kPi, -0.25);
  double z = 0.0, z_prev = 0.0, z_prev2 = 0.0;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // asymptotic initial guesses for the roots, largest first
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * z_prev2;
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * z_prev2;
    } else {
      z = 2.0 * z - z_prev2;
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      // orthonormal Hermite recurrence (weight exp(-x^2))
      double p1 = pi_quarter;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        double jj = static_cast<double>(j + 1);
        p1 = z * std::sqrt(2.0 / jj) * p2 - std::sqrt(j / jj) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15 * (1.0 + std::fabs(z))) {
        break;
      }
    }
    z_prev2 = z_prev;
    z_prev = z;
    rule.x[i] = z;
    rule.x[n - 1 - i] = -z;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / (pp * pp);
  }
  // roots were produced largest-first; flip to ascending order
  std::vector<double> xs(n), ws(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = rule.x[n - 1 - i];
    ws[i] = rule.w[n - 1 - i];
  }
  rule.x = std::move(xs);
  rule.w = std::move(ws);
  return rule;
}

GaussRule build_legendre(std::size_t n) {
  GaussRule rule;
  rule.x.assign(n, 0.0);
  rule.w.assign(n, 0.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) {
        break;
      }
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return rule;
}

template <GaussRule (*Builder)(std::size_t)>
const GaussRule& cached_rule(std::size_t n) {
  static std::map<std::size_t, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, Builder(n)).first;
  }
  return it->second;
}

}  // namespace

const GaussRule& gauss_hermite(std::size_t n) {
  if (n == 0) {
    fail(ErrorCode::ConfigInvalid, "gauss_hermite needs n >= 1");
  }
  return cached_rule<build_hermite>(n);
}

const GaussRule& gauss_legendre(std::size_t n) {
  if (n == 0) {
    fail(ErrorCode::ConfigInvalid, "gauss_legendre needs n >= 1");
  }
  return cached_rule<build_legendre>(n);
}

}  // namespace bcp
