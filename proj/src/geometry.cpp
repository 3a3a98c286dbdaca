#include "slfv/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "slfv/quadrature.hpp"

namespace slfv {

namespace {

void check_dim(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1, got " + std::to_string(d));
}

}  // namespace

double unit_ball_volume(int d) {
  check_dim(d);
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double unit_sphere_area(int d) {
  check_dim(d);
  return d * unit_ball_volume(d);
}

double lens_volume(int d, double r, double h) {
  check_dim(d);
  if (!(r > 0.0)) throw std::invalid_argument("lens_volume: radius must be > 0");
  if (h < 0.0) throw std::invalid_argument("lens_volume: separation must be >= 0");
  if (h >= 2.0 * r) return 0.0;
  switch (d) {
    case 1: return 2.0 * r - h;
    case 2: return 2.0 * r * r * std::acos(h / (2.0 * r)) - 0.5 * h * std::sqrt(4.0 * r * r - h * h);
    case 3: return std::numbers::pi * (4.0 * r + h) * (2.0 * r - h) * (2.0 * r - h) / 12.0;
    default: {
      double q = h / (2.0 * r);
      return unit_ball_volume(d) * std::pow(r, d) *
             boost::math::ibeta((d + 1) / 2.0, 0.5, 1.0 - q * q);
    }
  }
}

// Both constants split at r = 1; on [1, inf) substitute r = 1/s so the
// tail becomes a proper integral over (0, 1].
double c1_constant(int d, double alpha) {
  check_dim(d);
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("c1_constant: alpha must lie in (0,2]");
  const double v1 = unit_ball_volume(d);
  auto inner = [&](double r) {
    return lens_volume(d, r, 1.0) / (v1 * v1 * std::pow(r, 2 * d)) * std::pow(r, -1.0 - alpha);
  };
  auto tail = [&](double s) {
    if (s == 0.0) return 0.0;
    return lens_volume(d, 1.0, s) * std::pow(s, d + alpha - 1.0) / (v1 * v1);
  };
  return quad::integrate(inner, 0.5, 1.0, 1e-12) + quad::integrate(tail, 0.0, 1.0, 1e-12);
}

double c2_constant(int d, double beta) {
  check_dim(d);
  if (!(beta > 0.0 && beta < d))
    throw std::invalid_argument("c2_constant: beta must lie in (0,d), got " + std::to_string(beta));
  const double v1 = unit_ball_volume(d);
  auto inner = [&](double r) { return lens_volume(d, r, 1.0) * std::pow(r, -1.0 - d - beta); };
  // lens(1,s) -> V1 as s -> 0; the V1 s^{beta-1} part is integrated exactly.
  auto tail = [&](double s) {
    if (s == 0.0) return 0.0;
    return (lens_volume(d, 1.0, s) - v1) * std::pow(s, beta - 1.0);
  };
  return quad::integrate(inner, 0.5, 1.0, 1e-12) + quad::integrate(tail, 0.0, 1.0, 1e-12) +
         v1 / beta;
}

Point sample_uniform_ball(RngStream& rng, int d, const Point& center, double r) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("sample_uniform_ball: d must be 1..3");
  Point p = center;
  if (d == 1) {
    p[0] += r * (2.0 * rng.uniform() - 1.0);
    return p;
  }
  for (;;) {
    Point q{};
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      q[i] = 2.0 * rng.uniform() - 1.0;
      n2 += q[i] * q[i];
    }
    if (n2 < 1.0) {
      for (int i = 0; i < d; ++i) p[i] += r * q[i];
      return p;
    }
  }
}

double norm(const Point& p, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

double distance(const Point& a, const Point& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace slfv
