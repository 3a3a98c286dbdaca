#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "slfv/kernels.hpp"
#include "slfv/quadrature.hpp"

namespace slfv {

double TestFunction::reach() const {
  switch (decay) {
    case DecayClass::Gaussian: return 12.0 * scale;
    case DecayClass::CompactSupport: return scale;
    case DecayClass::Bounded: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

namespace testfn {

namespace {

double sq_dist(const Point& x, const Point& c, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return s;
}

}  // namespace

TestFunction gaussian(int d, const Point& center, double sd, double amplitude) {
  if (!(sd > 0.0)) throw std::invalid_argument("gaussian: sd must be > 0");
  TestFunction f;
  f.d = d;
  f.center = center;
  f.scale = sd;
  f.decay = DecayClass::Gaussian;
  const double v = sd * sd;
  f.value = [=](const Point& x) { return amplitude * std::exp(-sq_dist(x, center, d) / (2.0 * v)); };
  f.laplacian = [=](const Point& x) {
    double q = sq_dist(x, center, d);
    return amplitude * std::exp(-q / (2.0 * v)) * (q / (v * v) - d / v);
  };
  if (d == 1) {
    const double c = center[0];
    const double k = amplitude * sd * std::sqrt(std::numbers::pi / 2.0);
    f.primitive = [=](double x) { return k * std::erfc(-(x - c) / (sd * std::sqrt(2.0))); };
    f.primitive2 = [=](double x) {
      double y = (x - c) / (sd * std::sqrt(2.0));
      return amplitude * v * std::sqrt(std::numbers::pi) *
             (y * std::erfc(-y) + std::exp(-y * y) / std::sqrt(std::numbers::pi));
    };
  }
  f.mass = amplitude * std::pow(2.0 * std::numbers::pi * v, d / 2.0);
  f.gaussian_sd = sd;
  return f;
}

TestFunction gaussian_density(int d, const Point& center, double sd) {
  return gaussian(d, center, sd, std::pow(2.0 * std::numbers::pi * sd * sd, -d / 2.0));
}

TestFunction cosine(double xi, double phase) {
  if (xi == 0.0) throw std::invalid_argument("cosine: frequency must be nonzero");
  TestFunction f;
  f.d = 1;
  f.decay = DecayClass::Bounded;
  f.scale = 1.0 / std::abs(xi);
  f.value = [=](const Point& x) { return std::cos(xi * x[0] + phase); };
  f.laplacian = [=](const Point& x) { return -xi * xi * std::cos(xi * x[0] + phase); };
  f.primitive = [=](double x) { return std::sin(xi * x + phase) / xi; };
  f.primitive2 = [=](double x) { return -std::cos(xi * x + phase) / (xi * xi); };
  return f;
}

TestFunction constant(int d, double c) {
  TestFunction f;
  f.d = d;
  f.decay = DecayClass::Bounded;
  f.value = [=](const Point&) { return c; };
  f.laplacian = [](const Point&) { return 0.0; };
  if (d == 1) {
    f.primitive = [=](double x) { return c * x; };
    f.primitive2 = [=](double x) { return 0.5 * c * x * x; };
  }
  return f;
}

TestFunction indicator(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("indicator: need lo < hi");
  TestFunction f;
  f.d = 1;
  f.decay = DecayClass::CompactSupport;
  f.center = Point{0.5 * (lo + hi), 0.0, 0.0};
  f.scale = 0.5 * (hi - lo);
  f.value = [=](const Point& x) { return x[0] >= lo && x[0] <= hi ? 1.0 : 0.0; };
  f.primitive = [=](double x) { return std::clamp(x, lo, hi) - lo; };
  f.primitive2 = [=](double x) {
    if (x <= lo) return 0.0;
    if (x <= hi) return 0.5 * (x - lo) * (x - lo);
    return 0.5 * (hi - lo) * (hi - lo) + (hi - lo) * (x - hi);
  };
  f.mass = hi - lo;
  f.breakpoints = {lo, hi};
  return f;
}

TestFunction uniform_density(double lo, double hi) {
  TestFunction f = indicator(lo, hi);
  const double k = 1.0 / (hi - lo);
  auto v = f.value;
  auto p1 = f.primitive;
  auto p2 = f.primitive2;
  f.value = [=](const Point& x) { return k * v(x); };
  f.primitive = [=](double x) { return k * p1(x); };
  f.primitive2 = [=](double x) { return k * p2(x); };
  f.mass = 1.0;
  return f;
}

TestFunction smooth_bump(double center, double radius, double amplitude) {
  if (!(radius > 0.0)) throw std::invalid_argument("smooth_bump: radius must be > 0");
  TestFunction f;
  f.d = 1;
  f.decay = DecayClass::CompactSupport;
  f.center = Point{center, 0.0, 0.0};
  f.scale = radius;
  const double c = center, R = radius, A = amplitude;
  f.value = [=](const Point& x) {
    double s = (x[0] - c) / R;
    if (std::abs(s) >= 1.0) return 0.0;
    return A * std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  f.laplacian = [=](const Point& x) {
    double s = (x[0] - c) / R;
    if (std::abs(s) >= 1.0) return 0.0;
    double g = 1.0 / (1.0 - s * s);
    double phi = A * std::exp(1.0 - g);
    double g1 = 2.0 * s * g * g;
    double g2 = 2.0 * g * g + 8.0 * s * s * g * g * g;
    return phi * (g1 * g1 - g2) / (R * R);
  };
  auto v = f.value;
  f.mass = quad::integrate([&](double x) { return v(Point{x, 0, 0}); }, c - R, c + R, 1e-13);
  f.breakpoints = {c - R, c + R};
  return f;
}

TestFunction windowed_linear(double w) {
  TestFunction f;
  f.d = 1;
  f.decay = DecayClass::CompactSupport;
  f.scale = w;
  f.value = [=](const Point& x) { return std::abs(x[0]) <= w ? x[0] : 0.0; };
  f.laplacian = [](const Point&) { return 0.0; };
  f.primitive = [=](double x) { return std::abs(x) <= w ? 0.5 * (x * x - w * w) : 0.0; };
  f.primitive2 = [=](double x) {
    if (x <= -w) return 0.0;
    if (x >= w) return -2.0 * w * w * w / 3.0;
    return 0.5 * (x * x * x / 3.0 - w * w * x) - w * w * w / 3.0;
  };
  f.mass = 0.0;
  f.breakpoints = {-w, w};
  return f;
}

}  // namespace testfn

double integral(const TestFunction& f) {
  if (f.mass) return *f.mass;
  if (f.decay == DecayClass::Bounded) throw std::invalid_argument("integral: function is not integrable");
  const double R = f.reach();
  if (f.d == 1) {
    auto g = [&](double x) { return f(x); };
    return quad::integrate_split(g, f.center[0] - R, f.center[0] + R, f.breakpoints, 1e-12);
  }
  const auto& rule = quad::gauss_legendre(64);
  double total = 0.0;
  const int n = static_cast<int>(rule.nodes.size());
  std::vector<int> idx(f.d, 0);
  for (;;) {
    Point x = f.center;
    double w = 1.0;
    for (int k = 0; k < f.d; ++k) {
      x[k] += R * rule.nodes[idx[k]];
      w *= R * rule.weights[idx[k]];
    }
    total += w * f(x);
    int k = 0;
    while (k < f.d && ++idx[k] == n) idx[k++] = 0;
    if (k == f.d) break;
  }
  return total;
}

}  // namespace slfv
