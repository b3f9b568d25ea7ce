#include "anisoflow/spline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "anisoflow/error.hpp"

namespace anisoflow {

PeriodicCubicSpline::PeriodicCubicSpline(std::vector<double> x, std::vector<double> y, double period)
    : x_(std::move(x)), y_(std::move(y)), period_(period) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n) throw Error(ErrorKind::InsufficientData, "periodic spline needs >= 3 matching knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorKind::DegenerateData, "spline knots must be strictly increasing");
  }
  if (!(x_.back() - x_.front() < period_)) throw Error(ErrorKind::DegenerateData, "spline knots exceed one period");

  auto step = [&](std::size_t i) {  // interval i -> i+1 (wrapping)
    return i + 1 < n ? x_[i + 1] - x_[i] : x_.front() + period_ - x_.back();
  };
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs(size);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    const double hp = step(prev);
    const double hn = step(i);
    const auto r = static_cast<Eigen::Index>(i);
    a(r, static_cast<Eigen::Index>(prev)) += hp;
    a(r, r) += 2.0 * (hp + hn);
    a(r, static_cast<Eigen::Index>(next)) += hn;
    rhs(r) = 6.0 * ((y_[next] - y_[i]) / hn - (y_[i] - y_[prev]) / hp);
  }
  const Eigen::VectorXd m = a.partialPivLu().solve(rhs);
  m_.assign(m.data(), m.data() + m.size());
}

double PeriodicCubicSpline::eval(double x, int order) const {
  const std::size_t n = x_.size();
  double u = std::fmod(x - x_.front(), period_);
  if (u < 0.0) u += period_;
  u += x_.front();
  auto it = std::upper_bound(x_.begin(), x_.end(), u);
  const std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it)) - 1;
  const std::size_t j = (i + 1) % n;
  const double x0 = x_[i];
  const double x1 = i + 1 < n ? x_[i + 1] : x_.front() + period_;
  const double h = x1 - x0;
  const double a = (x1 - u) / h;
  const double b = (u - x0) / h;
  switch (order) {
    case 0:
      return a * y_[i] + b * y_[j] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[j]) * h * h / 6.0;
    case 1:
      return (y_[j] - y_[i]) / h - (3.0 * a * a - 1.0) * h / 6.0 * m_[i] + (3.0 * b * b - 1.0) * h / 6.0 * m_[j];
    default:
      return a * m_[i] + b * m_[j];
  }
}

}  // namespace anisoflow
