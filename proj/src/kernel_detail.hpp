#pragma once

#include "slfv/kernels.hpp"

namespace slfv::detail {

// e^{-z} times the sphere average of e^{z cos(theta)} in R^d.
double scaled_sphere_mean(int d, double z);

// Mean of a Gaussian bump (amplitude 1, sd s, centered at distance D) over
// the sphere of radius rho.
double gaussian_sphere_mean(int d, double s, double D, double rho);

// gaussian_sphere_mean(d, s, D, rho) - gaussian_sphere_mean(d, s, D, 0),
// without the cancellation at small rho.
double gaussian_sphere_excess(int d, double s, double D, double rho);

// Law of |Y - X| under f(x) g(y) dx dy, written as rho^{d-1} * density(rho)
// so that density is bounded near 0. breakpoints are kinks of density.
struct SeparationDensity {
  std::function<double(double)> density;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> breakpoints;
};
SeparationDensity separation_density(const TestFunction& f, const TestFunction& g);

}  // namespace slfv::detail
