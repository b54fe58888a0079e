#include <algorithm>
#include <cmath>
#include <string>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/offline.hpp"

namespace stochmatch {
namespace {

void check_probability(double p, const char* what) {
  if (!(p > 0.0 && p <= 1.0))
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + ": probability must lie in (0,1], got " + std::to_string(p));
}

constexpr double kOneMinusInvE = 1.0 - 0.36787944117144233;  // 1 - 1/e

}  // namespace

double y_support_end(double p) {
  check_probability(p, "y_support_end");
  if (p == 1.0) return kInfinity;
  return -std::log1p(-p) / p;
}

double attenuation_g(double p) {
  check_probability(p, "attenuation_g");
  return (1.0 / (2.0 + p)) * (1.0 - std::exp(-(2.0 + p) * y_support_end(p)));
}

double attenuation_h(double p) {
  check_probability(p, "attenuation_h");
  return (1.0 / (1.0 + p)) * (1.0 - std::exp(-(1.0 + p) * y_support_end(p)));
}

double y_from_uniform(double p, double u) {
  check_probability(p, "y_from_uniform");
  return -std::log1p(-p * u) / p;
}

double sample_y(double p, Rng& rng) { return y_from_uniform(p, uniform01(rng)); }

double y_cdf(double p, double y) {
  check_probability(p, "y_cdf");
  if (y <= 0.0) return 0.0;
  return std::min(1.0, -std::expm1(-p * y) / p);
}

const char* to_string(PatchChoice c) noexcept {
  return c == PatchChoice::greedy ? "greedy" : "algorithm1";
}

namespace {

// Rounding branch as intercept + slope * gamma; greedy branch is
// greedy_scale * gamma * delta.
struct Branches {
  double intercept;
  double slope;
  double greedy_scale;
};

Branches branches(RatioMode mode, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::invalid_argument, "delta must lie in (0,1)");
  switch (mode) {
    case RatioMode::bipartite: {
      const double g = attenuation_g(delta);
      return {g, 1.0 / 3.0 - g, 1.0};
    }
    case RatioMode::general: {
      const double h = attenuation_h(delta);
      return {h / 2.0, 0.25 - h / 2.0, 1.0};
    }
    case RatioMode::online: {
      const double h = attenuation_h(delta);
      const double scale = kOneMinusInvE / (1.0 + h * kOneMinusInvE);
      return {scale * h, scale * (0.5 - h), kOneMinusInvE};
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown ratio mode");
}

}  // namespace

PatchDecision decide_patch(RatioMode mode, double gamma, double delta) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw Error(ErrorCode::invalid_argument, "gamma must lie in [0,1]");
  const Branches b = branches(mode, delta);
  PatchDecision d;
  d.gamma = gamma;
  d.delta = delta;
  d.greedy_branch = b.greedy_scale * gamma * delta;
  d.rounding_branch = b.intercept + b.slope * gamma;
  d.chosen = d.greedy_branch >= d.rounding_branch ? PatchChoice::greedy : PatchChoice::algorithm1;
  d.predicted_ratio = std::max(d.greedy_branch, d.rounding_branch);
  return d;
}

double equalizing_gamma(RatioMode mode, double delta) {
  const Branches b = branches(mode, delta);
  return b.intercept / (b.greedy_scale * delta - b.slope);
}

double worst_case_ratio(RatioMode mode, double delta) {
  // max of the two linear branches is convex in gamma, so its minimum over
  // [0,1] sits at an endpoint or at the crossing point.
  const double cross = std::clamp(equalizing_gamma(mode, delta), 0.0, 1.0);
  double best = kInfinity;
  for (double gamma : {0.0, 1.0, cross})
    best = std::min(best, decide_patch(mode, gamma, delta).predicted_ratio);
  return best;
}

DeltaOptimum optimize_delta(RatioMode mode, double tolerance) {
  auto f = [mode](double d) { return worst_case_ratio(mode, d); };
  // Coarse scan to bracket the maximum, then golden-section refinement.
  constexpr int kGrid = 1000;
  int best_i = 1;
  double best_v = -kInfinity;
  for (int i = 1; i < kGrid; ++i) {
    const double v = f(static_cast<double>(i) / kGrid);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double lo = static_cast<double>(best_i - 1) / kGrid;
  double hi = static_cast<double>(best_i + 1) / kGrid;
  lo = std::max(lo, 1e-9);
  hi = std::min(hi, 1.0 - 1e-9);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = f(a), fb = f(b);
  while (hi - lo > tolerance) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = f(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = f(a);
    }
  }
  const double delta = (lo + hi) / 2.0;
  return {delta, f(delta)};
}

}  // namespace stochmatch
