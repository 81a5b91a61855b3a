#include "layerlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "layerlab/quadrature.hpp"

namespace layerlab {

namespace {

std::string at_point(double s, double v) {
  std::ostringstream os;
  os << "s=" << s << " value=" << v;
  return os.str();
}

}  // namespace

PotentialSpec PotentialSpec::quartic(double a, double b, double lambda) {
  if (!(a < b)) throw std::invalid_argument("degenerate wells: need a < b");
  if (!(lambda > 0.0)) throw std::invalid_argument("quartic scale must be > 0");
  PotentialSpec s;
  s.a = a;
  s.b = b;
  s.w = [a, b, lambda](double x) {
    const double p = x - a, q = x - b;
    return lambda * p * p * q * q;
  };
  s.dw = [a, b, lambda](double x) {
    const double p = x - a, q = x - b;
    return 2.0 * lambda * p * q * (p + q);
  };
  s.ddw = [a, b, lambda](double x) {
    const double p = x - a, q = x - b;
    return 2.0 * lambda * ((p + q) * (p + q) + 2.0 * p * q);
  };
  std::ostringstream os;
  os << "quartic(a=" << a << ", b=" << b << ", lambda=" << lambda << ")";
  s.description = os.str();
  return s;
}

PotentialSpec PotentialSpec::custom(double a, double b,
                                    std::function<double(double)> w,
                                    std::function<double(double)> dw,
                                    std::function<double(double)> ddw,
                                    std::string description) {
  if (!(a < b)) throw std::invalid_argument("degenerate wells: need a < b");
  PotentialSpec s;
  s.a = a;
  s.b = b;
  s.w = std::move(w);
  s.dw = std::move(dw);
  s.ddw = std::move(ddw);
  s.description = std::move(description);
  return s;
}

bool HypothesisReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

double find_saddle(const PotentialSpec& spec) {
  // W' > 0 just right of a and < 0 just left of b; bisect the sign change.
  const double span = spec.b - spec.a;
  double lo = spec.a + 1e-9 * span, hi = spec.b - 1e-9 * span;
  if (!(spec.dw(lo) > 0.0) || !(spec.dw(hi) < 0.0))
    throw std::runtime_error("saddle search: W' sign pattern violated");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spec.dw(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

HypothesisReport validate_hypotheses(const PotentialSpec& spec,
                                     int grid_size) {
  if (!(spec.a < spec.b))
    throw std::invalid_argument("degenerate wells: need a < b");
  if (grid_size < 1000)
    throw std::invalid_argument("validate_hypotheses: grid_size >= 1000");

  HypothesisReport rep;
  const double a = spec.a, b = spec.b, span = b - a;
  auto add = [&rep](std::string name, bool pass, std::string detail = "") {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  const double tol = 1e-9 * std::max(1.0, std::abs(spec.w(0.5 * (a + b))));
  add("W(a)=0", std::abs(spec.w(a)) <= tol, at_point(a, spec.w(a)));
  add("W(b)=0", std::abs(spec.w(b)) <= tol, at_point(b, spec.w(b)));

  bool positive_between = true;
  std::string witness;
  for (int i = 1; i < grid_size; ++i) {
    const double s = a + span * i / grid_size;
    const double margin = std::min(s - a, b - s);
    // Quadratic vanishing at the wells: only require positivity away from
    // machine-level neighborhoods of a, b.
    if (margin < 1e-7 * span) continue;
    if (!(spec.w(s) > 0.0)) {
      positive_between = false;
      witness = at_point(s, spec.w(s));
      break;
    }
  }
  add("W>0 between wells", positive_between, witness);

  bool positive_outside = true;
  witness.clear();
  for (int i = 1; i <= grid_size / 4; ++i) {
    const double off = span * i / (grid_size / 4);
    if (!(spec.w(a - off) > 0.0)) {
      positive_outside = false;
      witness = at_point(a - off, spec.w(a - off));
      break;
    }
    if (!(spec.w(b + off) > 0.0)) {
      positive_outside = false;
      witness = at_point(b + off, spec.w(b + off));
      break;
    }
  }
  add("W>0 outside wells", positive_outside, witness);

  add("W''(a)>0", spec.ddw(a) > 0.0, at_point(a, spec.ddw(a)));
  add("W''(b)>0", spec.ddw(b) > 0.0, at_point(b, spec.ddw(b)));

  double c = std::numeric_limits<double>::quiet_NaN();
  bool saddle_ok = false;
  std::string saddle_detail;
  try {
    c = find_saddle(spec);
    saddle_ok = a < c && c < b && spec.ddw(c) < 0.0;
    saddle_detail = at_point(c, spec.ddw(c));
  } catch (const std::exception& e) {
    saddle_detail = e.what();
  }
  rep.saddle = c;
  add("W' saddle c in (a,b) with W''(c)<0", saddle_ok, saddle_detail);

  // Sign pattern of W': positive on (a,c), negative on (c,b).
  bool sign_ok = saddle_ok;
  witness.clear();
  if (saddle_ok) {
    for (int i = 1; i < grid_size; ++i) {
      const double s = a + span * i / grid_size;
      if (std::min({std::abs(s - a), std::abs(s - b), std::abs(s - c)}) <
          1e-6 * span)
        continue;
      const double d = spec.dw(s);
      if ((s < c && !(d > 0.0)) || (s > c && !(d < 0.0))) {
        sign_ok = false;
        witness = at_point(s, d);
        break;
      }
    }
  }
  add("W' sign pattern (+ on (a,c), - on (c,b))", sign_ok, witness);

  const double far = 10.0 * span;
  add("W' -> -inf at -inf", spec.dw(a - far) < -1.0,
      at_point(a - far, spec.dw(a - far)));
  add("W' -> +inf at +inf", spec.dw(b + far) > 1.0,
      at_point(b + far, spec.dw(b + far)));
  return rep;
}

double geodesic_distance(const PotentialSpec& spec, double r, double s) {
  const double span = spec.b - spec.a;
  if (r < spec.a - 1.0 - 1e-12 * span || r > spec.b + 1.0 + 1e-12 * span ||
      s < spec.a - 1.0 - 1e-12 * span || s > spec.b + 1.0 + 1e-12 * span)
    throw std::invalid_argument("geodesic_distance: argument out of [a-1,b+1]");
  const double well_tol = 1e-12 * std::max(1.0, span);
  const bool r_is_well =
      std::abs(r - spec.a) <= well_tol || std::abs(r - spec.b) <= well_tol;
  const bool s_is_well =
      std::abs(s - spec.a) <= well_tol || std::abs(s - spec.b) <= well_tol;
  if (!r_is_well && !s_is_well)
    return std::numeric_limits<double>::infinity();
  if (r == s) return 0.0;
  auto integrand = [&spec](double rho) { return std::sqrt(spec.w(rho)); };
  const double v = integrate_with_breaks(integrand, r, s, {spec.a, spec.b},
                                         0.5e-12);
  return 2.0 * std::abs(v);
}

double compute_cw(const PotentialSpec& spec) {
  return geodesic_distance(spec, spec.a, spec.b);
}

double compute_sigma(const PotentialSpec& spec, double alpha_minus,
                     double beta_minus) {
  const double a = spec.a, b = spec.b;
  const double c = find_saddle(spec);
  const double mid = 0.5 * (a + b);
  if (!(a < alpha_minus && alpha_minus < std::min(c, mid) &&
        std::max(c, mid) < beta_minus && beta_minus < b))
    throw std::invalid_argument(
        "compute_sigma: thresholds must satisfy a < alpha_minus < min(c,(a+b)/2)"
        " <= max(c,(a+b)/2) < beta_minus < b");

  auto holds = [&](double sigma) {
    const double s2 = sigma * sigma;
    auto both = [&](double lo, double hi, double well) {
      const int n = std::max(64, int(1e4 * (hi - lo)));
      for (int i = 0; i <= n; ++i) {
        const double s = lo + (hi - lo) * i / n;
        const double d2 = (s - well) * (s - well);
        const double w = spec.w(s);
        if (w < s2 * d2 - 1e-14) return false;
        if (w > d2 / s2 + 1e-14) return false;
      }
      return true;
    };
    return both(alpha_minus, b + 1.0, b) && both(a - 1.0, beta_minus, a);
  };

  if (!holds(1e-8))
    throw std::runtime_error(
        "compute_sigma: no sigma > 1e-8 satisfies the quadratic comparison");
  double lo = 1e-8, hi = 1.0;
  if (holds(1.0)) return 1.0;
  while (hi - lo > 1e-6) {
    const double mid_s = 0.5 * (lo + hi);
    if (holds(mid_s))
      lo = mid_s;
    else
      hi = mid_s;
  }
  return lo;
}

double compute_alpha_bar(const PotentialSpec& spec) {
  auto phi = [&spec](double alpha) {
    return geodesic_distance(spec, spec.a, alpha) -
           geodesic_distance(spec, alpha, spec.b);
  };
  double lo = spec.a, hi = spec.b;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = phi(mid);
    if (std::abs(v) <= 1e-10) return mid;
    if (v < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool check_b_unique_minimizer(const PotentialSpec& spec, double g_min) {
  if (!(g_min > spec.a && g_min <= spec.b))
    throw std::invalid_argument("check_b_unique_minimizer: g_min in (a,b]");
  return g_min > compute_alpha_bar(spec);
}

double decay_rate_mu(const PotentialSpec& spec, double rho) {
  const double b = spec.b;
  const double c = find_saddle(spec);
  if (!(rho > 0.0 && rho < b - c))
    throw std::invalid_argument("decay_rate_mu: need 0 < rho < b - c");
  const double dwb = spec.dw(b);
  const int n = 20000;
  double inf_q = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double s = b - rho + rho * i / n;
    const double gap = b - s;
    // The difference quotient limits to W''(b) at s -> b.
    const double q = gap > 1e-9 * rho ? (dwb - spec.dw(s)) / gap : spec.ddw(b);
    inf_q = std::min(inf_q, q);
  }
  if (!(inf_q > 0.0))
    throw std::runtime_error(
        "decay_rate_mu: quotient infimum nonpositive (hypothesis violation)");
  return std::sqrt(0.5 * inf_q);
}

WellConstants compute_well_constants(const PotentialSpec& spec) {
  const double q = 0.25 * (spec.b - spec.a);
  return compute_well_constants(spec, spec.a + q, spec.b - q);
}

WellConstants compute_well_constants(const PotentialSpec& spec,
                                     double alpha_minus, double beta_minus) {
  WellConstants wc;
  wc.alpha_minus = alpha_minus;
  wc.beta_minus = beta_minus;
  wc.saddle = find_saddle(spec);
  wc.sigma = compute_sigma(spec, alpha_minus, beta_minus);
  wc.cw = compute_cw(spec);
  wc.alpha_bar = compute_alpha_bar(spec);
  return wc;
}

}  // namespace layerlab
