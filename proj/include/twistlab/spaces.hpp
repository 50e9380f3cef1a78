#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// (sum |x_i|^p)^{1/p}, or max |x_i| for p = inf. Computed on x/|x|_inf so that
// large entries do not overflow.
inline double lp_norm(const Vector& x, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1 (got " + std::to_string(p) + ")");
  double amax = 0.0;
  for (double v : x.entries()) amax = std::max(amax, std::abs(v));
  if (p == kInfinity || amax == 0.0) return amax;
  double s = 0.0;
  if (p == 2.0) {
    for (double v : x.entries()) {
      const double r = v / amax;
      s += r * r;
    }
    return amax * std::sqrt(s);
  }
  if (p == 1.0) {
    for (double v : x.entries()) s += std::abs(v);
    return s;
  }
  for (double v : x.entries()) s += std::pow(std::abs(v) / amax, p);
  return amax * std::pow(s, 1.0 / p);
}

inline double l2_norm(const Vector& x) { return lp_norm(x, 2.0); }

inline void require_positive_weights(const char* where, const Vector& w) {
  for (std::size_t i = 0; i < w.dim(); ++i) {
    if (!(w[i] > 0.0))
      throw InvalidArgument(std::string(where) + ": weight " + std::to_string(i) +
                            " is not strictly positive (" + std::to_string(w[i]) + ")");
  }
}

// |(w_i x_i)_i|_2
inline double weighted_l2_norm(const Vector& x, const Vector& w) {
  require_same_dim("weighted_l2_norm", x, w);
  require_positive_weights("weighted_l2_norm", w);
  return l2_norm(hadamard(w, x));
}

enum class OrliczMode {
  fp,     // t^p |log t|^p near 0
  gq,     // t^q |log t|^{-q} near 0, q = p/(p-1)
  power,  // t^p on all of [0, inf); Luxemburg norm is then the lp norm
};

inline std::string to_string(OrliczMode m) {
  switch (m) {
    case OrliczMode::fp: return "fp";
    case OrliczMode::gq: return "gq";
    case OrliczMode::power: return "power";
  }
  return "?";
}

// An Orlicz function given by its germ at 0 on [0, t0] and continued linearly
// with slope s0 past t0. Only the germ determines the sequence space.
struct OrliczFn {
  double p = 2.0;
  double t0 = std::exp(-2.0);
  OrliczMode mode = OrliczMode::fp;
  double s0 = 0.0;

  static OrliczFn fp(double p, double t0 = std::exp(-2.0)) { return make(p, t0, OrliczMode::fp); }
  static OrliczFn gq(double p, double t0 = std::exp(-2.0)) { return make(p, t0, OrliczMode::gq); }
  static OrliczFn power(double p) { return make(p, 0.5, OrliczMode::power); }

  double exponent() const { return mode == OrliczMode::gq ? p / (p - 1.0) : p; }

  // Value of the germ on (0, t0].
  double germ(double t) const {
    if (t == 0.0) return 0.0;
    const double e = exponent();
    const double lg = -std::log(t);
    switch (mode) {
      case OrliczMode::fp: return std::pow(t * lg, e);
      case OrliczMode::gq: return std::pow(t / lg, e);
      case OrliczMode::power: return std::pow(t, e);
    }
    return 0.0;
  }

  // Derivative of the germ, used for the tangent continuation at t0.
  double germ_slope(double t) const {
    const double e = exponent();
    const double lg = -std::log(t);
    switch (mode) {
      case OrliczMode::fp: return e * std::pow(t, e - 1.0) * std::pow(lg, e - 1.0) * (lg - 1.0);
      case OrliczMode::gq: return e * std::pow(t, e - 1.0) * std::pow(lg, -e - 1.0) * (lg + 1.0);
      case OrliczMode::power: return e * std::pow(t, e - 1.0);
    }
    return 0.0;
  }

  void validate() const {
    if (!(p > 1.0)) throw InvalidArgument("OrliczFn: p must exceed 1");
    if (!(t0 > 0.0 && t0 < 1.0)) throw InvalidArgument("OrliczFn: cutoff t0 must lie in (0,1)");
    if (mode == OrliczMode::fp && !(t0 < std::exp(-1.0)))
      throw InvalidArgument("OrliczFn: fp germ is increasing only below 1/e");
    if (!(s0 > 0.0)) throw InvalidArgument("OrliczFn: extension slope must be positive");
  }

 private:
  static OrliczFn make(double p, double t0, OrliczMode mode) {
    OrliczFn f;
    f.p = p;
    f.t0 = t0;
    f.mode = mode;
    if (!(p > 1.0)) throw InvalidArgument("OrliczFn: p must exceed 1");
    if (!(t0 > 0.0 && t0 < 1.0)) throw InvalidArgument("OrliczFn: cutoff t0 must lie in (0,1)");
    f.s0 = f.germ_slope(t0);
    f.validate();
    return f;
  }
};

inline double orlicz_eval(const OrliczFn& phi, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("orlicz_eval: argument must be nonnegative");
  if (phi.mode == OrliczMode::power || t <= phi.t0) return phi.germ(t);
  return phi.germ(phi.t0) + phi.s0 * (t - phi.t0);
}

struct LuxemburgOptions {
  double tol = 1e-10;  // relative width of the final bisection bracket
  int max_bracket_steps = 2200;
  int max_bisection_steps = 400;
};

// inf{rho > 0 : sum phi(|x_i|/rho) <= 1}. The problem is solved for x/|x|_inf
// and rescaled, which makes the result exactly homogeneous under power-of-two
// scalings and homogeneous to round-off otherwise.
inline double luxemburg_norm(const Vector& x, const OrliczFn& phi, const LuxemburgOptions& opt = {}) {
  double amax = 0.0;
  for (double v : x.entries()) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return 0.0;

  std::vector<double> y;
  y.reserve(x.dim());
  for (double v : x.entries())
    if (v != 0.0) y.push_back(std::abs(v) / amax);

  auto modular = [&](double rho) {
    double s = 0.0;
    for (double t : y) s += orlicz_eval(phi, t / rho);
    return s;
  };

  double hi = 1.0;
  double m_hi = modular(hi);
  int steps = 0;
  while (m_hi > 1.0) {
    hi *= 2.0;
    m_hi = modular(hi);
    if (++steps > opt.max_bracket_steps)
      throw BracketFailure("luxemburg_norm: modular stays above 1 up to rho=" + std::to_string(hi));
  }
  double lo = hi;
  double m_lo = m_hi;
  steps = 0;
  while (m_lo <= 1.0) {
    lo *= 0.5;
    m_lo = modular(lo);
    if (++steps > opt.max_bracket_steps)
      throw BracketFailure("luxemburg_norm: modular stays below 1 down to rho=" + std::to_string(lo));
  }
  if (lo == hi) hi = 2.0 * lo;

  for (int it = 0; hi - lo > opt.tol * lo; ++it) {
    if (it >= opt.max_bisection_steps)
      throw BracketFailure("luxemburg_norm: bisection did not reach tolerance");
    const double mid = 0.5 * (lo + hi);
    const double m_mid = modular(mid);
    if (m_mid > m_lo || m_mid < m_hi)
      throw BracketFailure("luxemburg_norm: modular is not nonincreasing in rho near " +
                           std::to_string(mid));
    if (m_mid > 1.0) {
      lo = mid;
      m_lo = m_mid;
    } else {
      hi = mid;
      m_hi = m_mid;
    }
  }
  // Final secant step inside the bracket: continuous in the data, so the result
  // does not depend on which side a near-tie bisection decision fell.
  double rho = 0.5 * (lo + hi);
  if (m_lo > m_hi) rho = std::clamp(lo + (m_lo - 1.0) / (m_lo - m_hi) * (hi - lo), lo, hi);
  return amax * rho;
}

}  // namespace twistlab
