#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace layerlab {

// Adaptive Gauss(7)-Kronrod(15) quadrature. Panels are bisected until the
// embedded error estimate meets the local share of the absolute tolerance.
// Kronrod nodes are interior, so integrable endpoint singularities
// (W^{1/2} kinks at the wells, inverse-square-root ramps) are never hit.
namespace gk {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double kronrod;
  double err;
};

template <class F>
PanelResult panel(const F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = f(c);
  double resk = wgk[7] * fc;
  double resg = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * xgk[i];
    const double fs = f(c - x) + f(c + x);
    resk += wgk[i] * fs;
    if (i % 2 == 1) resg += wg[i / 2] * fs;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

}  // namespace gk

inline double integrate(const std::function<double(double)>& f, double lo,
                        double hi, double abs_tol = 1e-12,
                        int max_depth = 52) {
  if (lo == hi) return 0.0;
  struct Item {
    double lo, hi, tol;
    int depth;
  };
  std::vector<Item> stack{{lo, hi, abs_tol, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    auto r = gk::panel(f, it.lo, it.hi);
    if (r.err <= it.tol || it.depth >= max_depth) {
      total += r.kronrod;
      continue;
    }
    const double mid = 0.5 * (it.lo + it.hi);
    stack.push_back({it.lo, mid, 0.5 * it.tol, it.depth + 1});
    stack.push_back({mid, it.hi, 0.5 * it.tol, it.depth + 1});
  }
  return total;
}

// Same, with interior break points (e.g. the wells, where the integrand has a
// kink) inserted as panel boundaries up front.
inline double integrate_with_breaks(const std::function<double(double)>& f,
                                    double lo, double hi,
                                    std::initializer_list<double> breaks,
                                    double abs_tol = 1e-12) {
  const double sgn = lo <= hi ? 1.0 : -1.0;
  double a = std::min(lo, hi), b = std::max(lo, hi);
  std::vector<double> pts{a};
  for (double t : breaks)
    if (t > a && t < b) pts.push_back(t);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate(f, pts[i], pts[i + 1], abs_tol / double(pts.size()));
  return sgn * total;
}

}  // namespace layerlab
