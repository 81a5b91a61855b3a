#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace layerlab {

// Piecewise cubic Hermite on a strictly increasing abscissa. Slopes are
// either supplied exactly (profiles and time maps, where the derivative is
// known analytically) or filled with Fritsch-Carlson monotone estimates.
class CubicHermite {
 public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y,
               std::vector<double> dy)
      : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != dy_.size())
      throw std::invalid_argument("CubicHermite: bad table sizes");
    for (size_t i = 0; i + 1 < x_.size(); ++i)
      if (!(x_[i] < x_[i + 1]))
        throw std::invalid_argument("CubicHermite: abscissa not increasing");
  }

  static CubicHermite monotone(std::vector<double> x, std::vector<double> y) {
    const size_t n = x.size();
    if (n < 2) throw std::invalid_argument("CubicHermite: need >= 2 points");
    std::vector<double> d(n, 0.0), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i)
      delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
        const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    return CubicHermite(std::move(x), std::move(y), std::move(d));
  }

  double operator()(double t) const {
    const size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * y_[i] + h * h10 * dy_[i] + h01 * y_[i + 1] +
           h * h11 * dy_[i + 1];
  }

  double derivative(double t) const {
    const size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s;
    const double dh00 = (6 * s2 - 6 * s) / h, dh10 = 3 * s2 - 4 * s + 1;
    const double dh01 = (-6 * s2 + 6 * s) / h, dh11 = 3 * s2 - 2 * s;
    return dh00 * y_[i] + dh10 * dy_[i] + dh01 * y_[i + 1] + dh11 * dy_[i + 1];
  }

  // Inverse evaluation for strictly monotone tables: finds t with f(t) = v by
  // bracketing on the node values and safeguarded Newton within the segment.
  double inverse(double v) const {
    const bool incr = y_.back() > y_.front();
    const double vmin = incr ? y_.front() : y_.back();
    const double vmax = incr ? y_.back() : y_.front();
    if (v <= vmin) return incr ? x_.front() : x_.back();
    if (v >= vmax) return incr ? x_.back() : x_.front();
    size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if ((y_[mid] < v) == incr)
        lo = mid;
      else
        hi = mid;
    }
    double ta = x_[lo], tb = x_[hi];
    double t = 0.5 * (ta + tb);
    for (int it = 0; it < 100; ++it) {
      const double f = (*this)(t)-v;
      if ((f < 0) == incr)
        ta = t;
      else
        tb = t;
      const double df = derivative(t);
      double tn = (df != 0.0) ? t - f / df : 0.5 * (ta + tb);
      if (!(tn > ta && tn < tb)) tn = 0.5 * (ta + tb);
      if (std::abs(tn - t) <= 1e-15 * (std::abs(t) + 1.0)) return tn;
      t = tn;
    }
    return t;
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }

 private:
  size_t segment(double t) const {
    if (t <= x_.front()) return 0;
    if (t >= x_.back()) return x_.size() - 2;
    const size_t i =
        size_t(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
    return i - 1;
  }

  std::vector<double> x_, y_, dy_;
};

}  // namespace layerlab
