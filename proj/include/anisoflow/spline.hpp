#pragma once

#include <vector>

namespace anisoflow {

/// C2 periodic cubic spline through (x_i, y_i) with period `period`.
/// Knots must be strictly increasing and span less than one period.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline(std::vector<double> x, std::vector<double> y, double period);

  double operator()(double x) const { return eval(x, 0); }
  double derivative(double x) const { return eval(x, 1); }
  double second_derivative(double x) const { return eval(x, 2); }

 private:
  double eval(double x, int order) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
  double period_;
};

}  // namespace anisoflow
