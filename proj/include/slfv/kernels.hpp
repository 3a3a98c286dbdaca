#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "slfv/geometry.hpp"
#include "slfv/regimes.hpp"

namespace slfv {

struct KernelSpec {
  int d = 1;
  double alpha = 2.0;
  double diffusivity = 1.0;  // zeta (alpha < 2) or sigma^2 (alpha = 2)
  double kappa = 0.0;        // symbol constant, alpha < 2 only

  // Fourier symbol: -D_alpha e^{i xi x} = symbol(|xi|) e^{i xi x}
  double symbol(double xi) const;
};

double symbol_constant(int d, double alpha);
KernelSpec make_kernel_spec(int d, double alpha, double diffusivity);
KernelSpec make_kernel_spec(const DerivedParams& dp, int d);

enum class DecayClass { Gaussian, CompactSupport, Bounded };

struct TestFunction {
  int d = 1;
  std::function<double(const Point&)> value;
  std::function<double(const Point&)> laplacian;  // optional
  std::function<double(double)> primitive;        // optional, d = 1
  std::function<double(double)> primitive2;       // optional, d = 1
  DecayClass decay = DecayClass::Gaussian;
  Point center{};
  double scale = 1.0;  // sd (Gaussian), support radius (compact), wavelength/2pi (bounded)
  std::optional<double> mass;
  std::optional<double> gaussian_sd;  // set for isotropic Gaussian densities
  std::vector<double> breakpoints;    // d = 1 kinks and jumps

  double operator()(double x) const { return value(Point{x, 0.0, 0.0}); }
  double operator()(const Point& x) const { return value(x); }
  // Radius around center outside which the function is negligible (< 1e-30 relative).
  double reach() const;
};

namespace testfn {
TestFunction gaussian(int d, const Point& center, double sd, double amplitude = 1.0);
TestFunction gaussian_density(int d, const Point& center, double sd);
TestFunction cosine(double xi, double phase = 0.0);
TestFunction constant(int d, double c);
TestFunction indicator(double lo, double hi);
TestFunction uniform_density(double lo, double hi);
TestFunction smooth_bump(double center, double radius, double amplitude = 1.0);
// x on [-w, w], zero outside
TestFunction windowed_linear(double w);
}  // namespace testfn

double integral(const TestFunction& f);

double stable_density(const KernelSpec& spec, double t, double r);
// Fourier constant of the Riesz kernel: FT(|x|^{-beta}) = c |xi|^{beta-d}
double riesz_constant(int d, double beta);

double ball_average(const TestFunction& phi, const Point& x, double r);
double double_ball_average_1d(const TestFunction& phi, double x, double r1, double r2);

double apply_D_alpha(const KernelSpec& spec, const TestFunction& phi, const Point& x);
double apply_L_N(const RegimeParams& p, const DerivedParams& dp, double delta,
                 const TestFunction& phi, const Point& x);

double k_beta_pairing(const DerivedParams& dp, int d, const TestFunction& f, const TestFunction& g);
// <psi,psi>_{L2[0,1]} - (int psi)^2 for the caller's type function
double q_pairing(const DerivedParams& dp, int d, const TestFunction& phi, double type_factor);

double wm_function(const KernelSpec& spec, const DerivedParams& dp, double mu, double r);
double wm_function(const DerivedParams& dp, int d, double mu, double r);
double wm_pairing(const KernelSpec& spec, const DerivedParams& dp, double mu,
                  const TestFunction& phi, const TestFunction& psi);
double wm_pairing(const DerivedParams& dp, int d, double mu, const TestFunction& phi,
                  const TestFunction& psi);

}  // namespace slfv
