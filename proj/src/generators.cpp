#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kernel_detail.hpp"
#include "slfv/kernels.hpp"
#include "slfv/quadrature.hpp"

namespace slfv {

namespace {

double radial_distance(const TestFunction& phi, const Point& x) { return distance(x, phi.center, phi.d); }

// Mean of phi over the sphere |y - x| = rho, d = 2 or 3, by fixed rules.
double sphere_mean(const TestFunction& phi, const Point& x, double rho) {
  const auto& gl = quad::gauss_legendre(48);
  constexpr int kTheta = 96;
  double total = 0.0;
  if (phi.d == 2) {
    for (int i = 0; i < kTheta; ++i) {
      double t = 2.0 * std::numbers::pi * (i + 0.5) / kTheta;
      total += phi(Point{x[0] + rho * std::cos(t), x[1] + rho * std::sin(t), 0.0});
    }
    return total / kTheta;
  }
  for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
    double ct = gl.nodes[j];
    double st = std::sqrt(1.0 - ct * ct);
    double ring = 0.0;
    for (int i = 0; i < kTheta; ++i) {
      double t = 2.0 * std::numbers::pi * (i + 0.5) / kTheta;
      ring += phi(Point{x[0] + rho * st * std::cos(t), x[1] + rho * st * std::sin(t), x[2] + rho * ct});
    }
    total += 0.5 * gl.weights[j] * ring / kTheta;
  }
  return total;
}

}  // namespace

double ball_average(const TestFunction& phi, const Point& x, double r) {
  if (!(r > 0.0)) return phi(x);
  const int d = phi.d;
  if (d == 1) {
    if (phi.primitive) return (phi.primitive(x[0] + r) - phi.primitive(x[0] - r)) / (2.0 * r);
    auto g = [&](double y) { return phi(y); };
    return quad::integrate_split(g, x[0] - r, x[0] + r, phi.breakpoints, 1e-12) / (2.0 * r);
  }
  if (d > 3) throw std::invalid_argument("ball_average: d must be 1..3");
  const double S = unit_sphere_area(d);
  const double Vr = unit_ball_volume(d) * std::pow(r, d);
  if (phi.gaussian_sd) {
    const double s = *phi.gaussian_sd;
    const double D = radial_distance(phi, x);
    const double amp = phi(phi.center);
    auto g = [&](double rho) {
      return S * std::pow(rho, d - 1) * detail::gaussian_sphere_mean(d, s, D, rho);
    };
    // the shell carrying the bump is the only place with structure
    std::vector<double> cuts{std::max(0.0, D - 8.0 * s), D, D + 8.0 * s};
    // the excess crosses zero at some radii; floor the error at roundoff of the ball mass
    return amp * quad::integrate_split(g, 0.0, r, cuts, 1e-12, 1e-15 * Vr) / Vr;
  }
  auto g = [&](double rho) { return S * std::pow(rho, d - 1) * sphere_mean(phi, x, rho); };
  return quad::integrate(g, 0.0, r, 1e-10) / Vr;
}

double double_ball_average_1d(const TestFunction& phi, double x, double r1, double r2) {
  if (phi.d != 1) throw std::invalid_argument("double_ball_average_1d: d must be 1");
  if (phi.primitive2 && r1 > 0.0 && r2 > 0.0) {
    const auto& P = phi.primitive2;
    return (P(x + r1 + r2) - P(x + r1 - r2) - P(x - r1 + r2) + P(x - r1 - r2)) / (4.0 * r1 * r2);
  }
  if (!(r1 > 0.0)) return ball_average(phi, Point{x, 0, 0}, r2);
  if (!(r2 > 0.0)) return ball_average(phi, Point{x, 0, 0}, r1);
  // trapezoid kernel: convolution of the two uniform densities
  const double lo = std::abs(r1 - r2), hi = r1 + r2;
  auto k = [&](double w) {
    double a = std::abs(w);
    if (a <= lo) return 1.0 / (2.0 * std::max(r1, r2));
    if (a >= hi) return 0.0;
    return (hi - a) / (4.0 * r1 * r2);
  };
  std::vector<double> cuts{-lo, lo};
  for (double b : phi.breakpoints) cuts.push_back(b - x);
  auto g = [&](double w) { return k(w) * phi(x + w); };
  return quad::integrate_split(g, -hi, hi, cuts, 1e-11);
}

namespace {

// ball_average(phi, x, r) - phi(x), integrating the difference so that the
// quadrature tolerance applies to the (small) excess rather than to phi
double ball_excess(const TestFunction& phi, const Point& x, double r, double fx) {
  const int d = phi.d;
  const double S = unit_sphere_area(d);
  const double Vr = unit_ball_volume(d) * std::pow(r, d);
  if (phi.gaussian_sd) {
    const double s = *phi.gaussian_sd;
    const double D = radial_distance(phi, x);
    const double amp = phi(phi.center);
    auto g = [&](double rho) { return S * std::pow(rho, d - 1) * detail::gaussian_sphere_excess(d, s, D, rho); };
    std::vector<double> cuts{std::max(0.0, D - 8.0 * s), D, D + 8.0 * s};
    // the excess crosses zero at some radii; floor the error at roundoff of the ball mass
    return amp * quad::integrate_split(g, 0.0, r, cuts, 1e-12, 1e-15 * Vr) / Vr;
  }
  if (d == 1) {
    if (phi.primitive) return (phi.primitive(x[0] + r) - phi.primitive(x[0] - r)) / (2.0 * r) - fx;
    auto g = [&](double y) { return phi(y) - fx; };
    return quad::integrate_split(g, x[0] - r, x[0] + r, phi.breakpoints, 1e-12) / (2.0 * r);
  }
  auto g = [&](double rho) { return S * std::pow(rho, d - 1) * (sphere_mean(phi, x, rho) - fx); };
  return quad::integrate(g, 0.0, r, 1e-10) / Vr;
}

}  // namespace

double apply_D_alpha(const KernelSpec& spec, const TestFunction& phi, const Point& x) {
  if (phi.d != spec.d) throw std::invalid_argument("apply_D_alpha: dimension mismatch");
  if (!phi.laplacian) throw std::invalid_argument("apply_D_alpha: test function needs a laplacian");
  const int d = spec.d;
  if (spec.alpha == 2.0) return 0.5 * spec.diffusivity * phi.laplacian(x);
  const double a = spec.alpha;
  const double fx = phi(x);
  const double rs = 1e-3 * phi.scale;
  double head = phi.laplacian(x) * std::pow(rs, 2.0 - a) / (2.0 * (d + 2) * (2.0 - a));
  auto g = [&](double r) { return ball_excess(phi, x, r, fx) * std::pow(r, -1.0 - a); };
  double body = 0.0, tail = 0.0;
  if (phi.decay == DecayClass::Bounded) {
    if (d != 1 || !phi.primitive)
      throw std::invalid_argument("apply_D_alpha: bounded test functions need d = 1 and a primitive");
    double R = (a < 1.0 ? 1e5 : 1e4) * phi.scale;
    double mag = std::max(std::abs(fx), 1.0) * std::pow(phi.scale, -a);
    body = quad::integrate_geometric(g, rs, R, 1e-11, 1e-12 * mag);
    // far out the ball average has settled to the mean of phi
    tail = (ball_average(phi, x, R) - fx) * std::pow(R, -a) / a;
  } else {
    double R = radial_distance(phi, x) + phi.reach() + rs;
    double M = integral(phi);
    body = quad::integrate_geometric(g, rs, R, 1e-11);
    // beyond R the ball holds all of phi
    tail = M / unit_ball_volume(d) * std::pow(R, -d - a) / (d + a) - fx * std::pow(R, -a) / a;
  }
  return spec.diffusivity * (head + body + tail);
}

namespace {

// int_delta^inf (avg(s) - phi(x)) s^{-1-a} ds on doubling panels, plus the
// flat-average tail past R (avg ~ M * tail_coef * s^{-tail_pow}).
double radial_generator(const std::function<double(double)>& avg, double fx, double a, double lo,
                        double R, double M, double tail_coef, double tail_pow, double tol, bool bounded) {
  auto g = [&](double s) { return (avg(s) - fx) * std::pow(s, -1.0 - a); };
  double body = quad::integrate_geometric(g, lo, R, tol);
  double far = bounded ? avg(R) : 0.0;
  double tail = M * tail_coef * std::pow(R, -a - tail_pow) / (a + tail_pow) + (far - fx) * std::pow(R, -a) / a;
  return body + tail;
}

}  // namespace

double apply_L_N(const RegimeParams& p, const DerivedParams& dp, double delta, const TestFunction& phi,
                 const Point& x) {
  if (p.d != 1 || phi.d != 1) throw std::invalid_argument("apply_L_N: only d = 1 is supported");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("apply_L_N: delta must lie in (0,1)");
  const double x0 = x[0];
  const double fx = phi(x);
  const double V1 = unit_ball_volume(1);
  const double alpha = dp.alpha;
  // bounded functions: averages are O(1/s) or flat far out, only -phi(x) survives
  const bool bounded = phi.decay == DecayClass::Bounded;
  if (bounded && !phi.primitive2)
    throw std::invalid_argument("apply_L_N: bounded test functions need a second primitive");
  const double M = bounded ? 0.0 : integral(phi);
  const double R = bounded ? 1e4 * phi.scale : 1e6 * (std::abs(x0 - phi.center[0]) + phi.reach() + delta);
  if (const auto* ot = std::get_if<OneTail>(&p.tail)) {
    const double a = ot->a, b = ot->b;
    const double lift = std::pow(delta, 1.0 - b);
    auto avg = [&](double s) { return double_ball_average_1d(phi, x0, lift * std::pow(s, b), s); };
    double coef = 0.5, pow_ = 1.0;
    if (b > 1.0) {
      coef = 0.5 / lift;
      pow_ = b;
    }
    double v = radial_generator(avg, fx, a, delta, R, M, coef, pow_, 1e-10, bounded);
    return p.u0 * V1 * std::pow(delta, a - alpha) * v;
  }
  const auto& tt = std::get<TwoTails>(p.tail);
  const double a1 = tt.a1, a2 = tt.a2;
  // inner over s1 for fixed s2, outer over s2
  auto inner = [&](double s2) {
    auto avg = [&](double s1) { return double_ball_average_1d(phi, x0, s1, s2); };
    return radial_generator(avg, fx, a1, delta, std::max(R, 1e3 * s2), M, 0.5, 1.0, 1e-9, bounded);
  };
  auto g = [&](double s2) { return inner(s2) * std::pow(s2, -1.0 - a2); };
  double body = quad::integrate_geometric(g, delta, R, 1e-8);
  double da = std::pow(delta, -a1) / a1;
  double far = bounded ? double_ball_average_1d(phi, x0, R, R) : 0.0;
  double tail = M * 0.5 * da * std::pow(R, -1.0 - a2) / (1.0 + a2) + (far - fx) * da * std::pow(R, -a2) / a2;
  return p.u0 * V1 * std::pow(delta, a1 + a2 - alpha) * (body + tail);
}

}  // namespace slfv
