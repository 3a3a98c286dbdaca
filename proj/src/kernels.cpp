#include "slfv/kernels.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kernel_detail.hpp"
#include "slfv/quadrature.hpp"

namespace slfv {

using std::numbers::pi;

namespace {

// Normalized Fourier transform of the unit-ball indicator at radius s.
double ball_transform(int d, double s) {
  switch (d) {
    case 1: return std::sin(s) / s;
    case 2: return 2.0 * boost::math::cyl_bessel_j(1, s) / s;
    case 3: return 3.0 * (std::sin(s) - s * std::cos(s)) / (s * s * s);
    default:
      return std::tgamma(d / 2.0 + 1.0) * std::pow(2.0 / s, d / 2.0) *
             boost::math::cyl_bessel_j(d / 2.0, s);
  }
}

}  // namespace

double symbol_constant(int d, double alpha) {
  if (d < 1) throw std::invalid_argument("symbol_constant: d must be >= 1");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("symbol_constant: alpha must lie in (0,2)");
  // [0,1]: 1 - m_d(s) = sum_k (-1)^{k+1} (s/2)^{2k} G(d/2+1)/(k! G(d/2+k+1)),
  // integrated term by term against s^{-1-alpha}
  double head = 0.0;
  double coef = 1.0;  // G(d/2+1)/(k! G(d/2+k+1)) 4^{-k}
  for (int k = 1; k < 60; ++k) {
    coef *= 0.25 / (k * (d / 2.0 + k));
    double term = (k % 2 == 1 ? 1.0 : -1.0) * coef / (2.0 * k - alpha);
    head += term;
    if (std::abs(term) < 1e-18 * std::abs(head)) break;
  }
  // [1,inf): 1/alpha - int m_d(s) s^{-1-alpha}; m_d changes sign near the
  // zeros of J_{d/2}, (k + d/4 - 1/4) pi
  auto g = [&](double s) { return ball_transform(d, s) * std::pow(s, -1.0 - alpha); };
  auto boundary = [&](int k) { return k == 0 ? 1.0 : (k + d / 4.0 - 0.25) * pi; };
  quad::OscillatoryOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-16;
  double tail = 1.0 / alpha - quad::oscillatory_panels(g, boundary, opt);
  return head + tail;
}

double KernelSpec::symbol(double xi) const {
  if (alpha == 2.0) return 0.5 * diffusivity * xi * xi;
  return diffusivity * kappa * std::pow(std::abs(xi), alpha);
}

KernelSpec make_kernel_spec(int d, double alpha, double diffusivity) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("kernel: alpha must lie in (0,2]");
  if (!(diffusivity > 0.0)) throw std::invalid_argument("kernel: diffusivity must be > 0");
  KernelSpec k;
  k.d = d;
  k.alpha = alpha;
  k.diffusivity = diffusivity;
  if (alpha < 2.0) k.kappa = symbol_constant(d, alpha);
  return k;
}

KernelSpec make_kernel_spec(const DerivedParams& dp, int d) {
  return make_kernel_spec(d, dp.alpha, dp.diffusivity());
}

namespace {

// Large-r expansion of the standard symmetric stable density (symbol |xi|^alpha).
// Convergent for alpha < 1, asymptotic otherwise; empty when it does not
// settle to double precision.
std::optional<double> stable_series(int d, double alpha, double rho) {
  double sum = 0.0;
  double prev_abs = std::numeric_limits<double>::infinity();
  const double log_pref = -(d / 2.0 + 1.0) * std::log(pi) - d * std::log(rho);
  for (int k = 1; k < 200; ++k) {
    double ka = k * alpha;
    double s = std::sin(k * pi * alpha / 2.0);
    double mag = std::lgamma(ka / 2.0 + 1.0) + std::lgamma((ka + d) / 2.0) - std::lgamma(k + 1.0) +
                 ka * std::log(2.0 / rho) + log_pref;
    double term = (k % 2 == 1 ? 1.0 : -1.0) * s * std::exp(mag);
    double bound = std::exp(mag);  // ignores the sine factor
    sum += term;
    if (bound < 1e-16 * std::abs(sum)) return sum;
    if (bound > prev_abs && k > 3) return std::nullopt;
    prev_abs = bound;
  }
  return std::nullopt;
}

double stable_standard(int d, double alpha, double rho) {
  if (rho == 0.0)
    return unit_sphere_area(d) * std::tgamma(d / (double)alpha) / (alpha * std::pow(2.0 * pi, d));
  if (rho > 2.0) {
    if (auto s = stable_series(d, alpha, rho)) return *s;
  }
  quad::OscillatoryOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-20;
  opt.smooth_at_zero = false;  // e^{-xi^alpha} has a branch point at 0
  opt.scale = 1.0;
  switch (d) {
    case 1:
      return quad::oscillatory([&](double x) { return std::exp(-std::pow(x, alpha)); },
                               quad::Oscillator::Cos, rho, opt) / pi;
    case 2:
      return quad::oscillatory([&](double x) { return x * std::exp(-std::pow(x, alpha)); },
                               quad::Oscillator::BesselJ0, rho, opt) / (2.0 * pi);
    case 3:
      return quad::oscillatory([&](double x) { return x * std::exp(-std::pow(x, alpha)); },
                               quad::Oscillator::Sin, rho, opt) / (2.0 * pi * pi * rho);
    default: throw std::invalid_argument("stable_density: d must be 1..3");
  }
}

}  // namespace

double stable_density(const KernelSpec& spec, double t, double r) {
  if (!(t > 0.0)) throw std::invalid_argument("stable_density: t must be > 0");
  if (r < 0.0) throw std::invalid_argument("stable_density: r must be >= 0");
  const int d = spec.d;
  if (spec.alpha == 2.0) {
    double v = spec.diffusivity * t;
    return std::pow(2.0 * pi * v, -d / 2.0) * std::exp(-r * r / (2.0 * v));
  }
  double s = std::pow(t * spec.diffusivity * spec.kappa, 1.0 / spec.alpha);
  return std::pow(s, -d) * stable_standard(d, spec.alpha, r / s);
}

double riesz_constant(int d, double beta) {
  if (!(beta > 0.0 && beta < d)) throw std::invalid_argument("riesz_constant: beta must lie in (0,d)");
  return std::pow(pi, d / 2.0) * std::pow(2.0, d - beta) * std::tgamma((d - beta) / 2.0) /
         std::tgamma(beta / 2.0);
}

double wm_function(const KernelSpec& spec, const DerivedParams& dp, double mu, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("wm_function: r must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("wm_function: mu must be > 0");
  const int d = spec.d;
  const bool long_range = dp.coalescence == Coalescence::LongRange;
  double h_const = 1.0;
  if (long_range) {
    if (dp.beta >= d) throw std::invalid_argument("wm_function: long-range branch needs beta < d");
    h_const = riesz_constant(d, dp.beta);
  }
  auto w_hat = [&](double xi) {
    // integrable singularity at 0; the endpoint rule can land on xi = 0 exactly
    if (long_range && xi < 1e-150) return 0.0;
    double h = long_range ? h_const * std::pow(xi, dp.beta - d) : 1.0;
    return h / (2.0 * mu + 2.0 * spec.symbol(xi));
  };
  quad::OscillatoryOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-18;
  opt.smooth_at_zero = false;
  opt.scale = spec.alpha == 2.0 ? std::sqrt(2.0 * mu / spec.diffusivity)
                                : std::pow(mu / (spec.diffusivity * spec.kappa), 1.0 / spec.alpha);
  double v = 0.0;
  switch (d) {
    case 1: v = quad::oscillatory(w_hat, quad::Oscillator::Cos, r, opt) / pi; break;
    case 2:
      v = quad::oscillatory([&](double x) { return x * w_hat(x); }, quad::Oscillator::BesselJ0, r, opt) /
          (2.0 * pi);
      break;
    case 3:
      v = quad::oscillatory([&](double x) { return x * w_hat(x); }, quad::Oscillator::Sin, r, opt) /
          (2.0 * pi * pi * r);
      break;
    default: throw std::invalid_argument("wm_function: d must be 1..3");
  }
  return dp.gamma * v;
}

double wm_function(const DerivedParams& dp, int d, double mu, double r) {
  return wm_function(make_kernel_spec(dp, d), dp, mu, r);
}

namespace detail {

double scaled_sphere_mean(int d, double z) {
  if (z < 1e-8) return std::exp(-z) * (1.0 + z * z / (2.0 * d));
  switch (d) {
    case 1: return 0.5 * (1.0 + std::exp(-2.0 * z));
    case 2:
      if (z > 500.0) return (1.0 + 1.0 / (8.0 * z) + 9.0 / (128.0 * z * z)) / std::sqrt(2.0 * pi * z);
      return boost::math::cyl_bessel_i(0, z) * std::exp(-z);
    case 3: return -std::expm1(-2.0 * z) / (2.0 * z);
    default: {
      double nu = d / 2.0 - 1.0;
      return std::tgamma(d / 2.0) * std::pow(2.0 / z, nu) * boost::math::cyl_bessel_i(nu, z) *
             std::exp(-z);
    }
  }
}

double gaussian_sphere_mean(int d, double s, double D, double rho) {
  double v = s * s;
  return std::exp(-(rho - D) * (rho - D) / (2.0 * v)) * scaled_sphere_mean(d, rho * D / v);
}

namespace {

// log of the sphere average of e^{z cos(theta)}
double log_sphere_mean_exp(int d, double z) {
  if (z < 1.0) {
    // Gamma(d/2) sum_k (z/2)^{2k} / (k! Gamma(k + d/2)), minus its k=0 term
    double term = 1.0, sum = 0.0;
    const double q = 0.25 * z * z;
    for (int k = 1; k < 40; ++k) {
      term *= q / (k * (k - 1 + d / 2.0));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::log1p(sum);
  }
  return z + std::log(scaled_sphere_mean(d, z));
}

}  // namespace

double gaussian_sphere_excess(int d, double s, double D, double rho) {
  const double v = s * s;
  const double base = -D * D / (2.0 * v);
  const double e = -rho * rho / (2.0 * v) + log_sphere_mean_exp(d, rho * D / v);
  if (std::abs(e) < 1.0) return std::exp(base) * std::expm1(e);
  return std::exp(base + e) - std::exp(base);
}

}  // namespace detail

}  // namespace slfv
