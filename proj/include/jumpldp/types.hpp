#pragma once

#include <Eigen/Dense>

namespace jumpldp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default tolerance for model validation; callers can override per call.
inline constexpr double kDefaultTol = 1e-9;

// A nonnegative value extended with a distinct infinity, used by relative
// entropies where absolute-continuity failures must stay out of arithmetic.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  static ExtReal finite(double v) { return {v, false}; }
  static ExtReal infinity() { return {0.0, true}; }

  bool is_finite() const { return !infinite; }

  ExtReal operator+(const ExtReal& o) const {
    if (infinite || o.infinite) return infinity();
    return finite(value + o.value);
  }
  ExtReal operator*(double a) const {
    if (infinite) return a == 0.0 ? finite(0.0) : infinity();
    return finite(a * value);
  }
};

}  // namespace jumpldp
