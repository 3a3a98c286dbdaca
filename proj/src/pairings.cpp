#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kernel_detail.hpp"
#include "slfv/kernels.hpp"
#include "slfv/quadrature.hpp"

namespace slfv {

namespace detail {

SeparationDensity separation_density(const TestFunction& f, const TestFunction& g) {
  if (f.d != g.d) throw std::invalid_argument("separation density: dimension mismatch");
  const int d = f.d;
  if (f.decay == DecayClass::Bounded || g.decay == DecayClass::Bounded)
    throw std::invalid_argument("separation density: test functions must be integrable");
  SeparationDensity out;
  const double D = distance(f.center, g.center, d);
  if (f.gaussian_sd && g.gaussian_sd) {
    const double v = *f.gaussian_sd * *f.gaussian_sd + *g.gaussian_sd * *g.gaussian_sd;
    const double s = std::sqrt(v);
    const double k = integral(f) * integral(g) * unit_sphere_area(d) * std::pow(2.0 * std::numbers::pi * v, -d / 2.0);
    out.density = [=](double rho) { return k * gaussian_sphere_mean(d, s, D, rho); };
    out.hi = D + 12.0 * s;
    out.breakpoints = {std::max(0.0, D - 8.0 * s), D, D + 8.0 * s};
    return out;
  }
  if (d != 1) throw std::invalid_argument("separation density: d >= 2 needs Gaussian test functions");
  const double cf = f.center[0], rf = f.reach();
  out.hi = D + rf + g.reach();
  auto fb = f.breakpoints;
  auto gb = g.breakpoints;
  out.density = [f, g, cf, rf, fb, gb](double rho) {
    std::vector<double> cuts = fb;
    for (double b : gb) {
      cuts.push_back(b - rho);
      cuts.push_back(b + rho);
    }
    auto h = [&](double x) { return f(x) * (g(x + rho) + g(x - rho)); };
    return quad::integrate_split(h, cf - rf, cf + rf, cuts, 1e-11);
  };
  for (double a : fb)
    for (double b : gb) out.breakpoints.push_back(std::abs(b - a));
  if (fb.empty() || gb.empty()) {
    out.breakpoints.push_back(D);
  }
  return out;
}

}  // namespace detail

namespace {

bool both_gaussian(const TestFunction& f, const TestFunction& g) {
  return f.gaussian_sd.has_value() && g.gaussian_sd.has_value();
}

double diagonal_pairing(const TestFunction& f, const TestFunction& g) {
  const int d = f.d;
  if (both_gaussian(f, g)) {
    const double sf = *f.gaussian_sd, sg = *g.gaussian_sd;
    const double v = sf * sf + sg * sg;
    const double D = distance(f.center, g.center, d);
    const double af = f(f.center), ag = g(g.center);
    return af * ag * std::pow(2.0 * std::numbers::pi * sf * sf * sg * sg / v, d / 2.0) *
           std::exp(-D * D / (2.0 * v));
  }
  // integrate over the narrower of the two supports
  const TestFunction& base = f.reach() <= g.reach() ? f : g;
  if (base.decay == DecayClass::Bounded) throw std::invalid_argument("k_beta_pairing: test functions must be integrable");
  const double R = base.reach();
  if (d == 1) {
    std::vector<double> cuts = f.breakpoints;
    cuts.insert(cuts.end(), g.breakpoints.begin(), g.breakpoints.end());
    auto h = [&](double x) { return f(x) * g(x); };
    return quad::integrate_split(h, base.center[0] - R, base.center[0] + R, cuts, 1e-12);
  }
  const auto& rule = quad::gauss_legendre(64);
  const int n = static_cast<int>(rule.nodes.size());
  std::vector<int> idx(d, 0);
  double total = 0.0;
  for (;;) {
    Point x = base.center;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      x[k] += R * rule.nodes[idx[k]];
      w *= R * rule.weights[idx[k]];
    }
    total += w * f(x) * g(x);
    int k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  return total;
}

}  // namespace

double k_beta_pairing(const DerivedParams& dp, int d, const TestFunction& f, const TestFunction& g) {
  if (f.d != d || g.d != d) throw std::invalid_argument("k_beta_pairing: dimension mismatch");
  if (dp.coalescence == Coalescence::Local) return diagonal_pairing(f, g);
  const double beta = dp.beta;
  if (!(beta > 0.0 && beta < d)) throw std::invalid_argument("k_beta_pairing: need 0 < beta < d");
  auto sep = detail::separation_density(f, g);
  // v = rho^{d-beta} absorbs rho^{d-1-beta}
  const double e = d - beta;
  auto h = [&](double v) { return sep.density(std::pow(v, 1.0 / e)); };
  std::vector<double> cuts;
  for (double b : sep.breakpoints)
    if (b > 0.0) cuts.push_back(std::pow(b, e));
  return quad::integrate_split(h, 0.0, std::pow(sep.hi, e), cuts, 1e-11) / e;
}

double q_pairing(const DerivedParams& dp, int d, const TestFunction& phi, double type_factor) {
  return dp.gamma * k_beta_pairing(dp, d, phi, phi) * type_factor;
}

namespace {

void require_density(const TestFunction& f, const char* name) {
  if (f.decay == DecayClass::Bounded) throw std::invalid_argument(std::string(name) + " must be a probability density");
  double m = integral(f);
  if (std::abs(m - 1.0) > 1e-6) throw std::invalid_argument(std::string(name) + " must integrate to 1");
  const double R = f.reach();
  for (int i = 0; i <= 200; ++i) {
    Point x = f.center;
    x[0] += R * (i / 100.0 - 1.0);
    if (f(x) < 0.0) throw std::invalid_argument(std::string(name) + " must be nonnegative");
  }
}

}  // namespace

double wm_pairing(const KernelSpec& spec, const DerivedParams& dp, double mu, const TestFunction& phi,
                  const TestFunction& psi) {
  require_density(phi, "wm_pairing: phi");
  require_density(psi, "wm_pairing: psi");
  const int d = spec.d;
  auto sep = detail::separation_density(phi, psi);
  const double floor_r = 1e-12 * sep.hi;
  auto h = [&](double rho) {
    double r = std::max(rho, floor_r);
    return wm_function(spec, dp, mu, r) * std::pow(r, d - 1) * sep.density(rho);
  };
  std::vector<double> cuts;
  for (double b : sep.breakpoints)
    if (b > 0.0 && b < sep.hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double first = cuts.empty() ? sep.hi : cuts.front();
  double head = quad::integrate_singular(h, 0.0, first, 1e-8);
  return head + quad::integrate_split(h, first, sep.hi, cuts, 1e-9);
}

double wm_pairing(const DerivedParams& dp, int d, double mu, const TestFunction& phi, const TestFunction& psi) {
  return wm_pairing(make_kernel_spec(dp, d), dp, mu, phi, psi);
}

}  // namespace slfv
