#pragma once

#include <functional>
#include <vector>

namespace slfv::quad {

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (31 points) on a finite interval. Stops when the
// error estimate is below rel_tol*|I| or abs_tol.
double integrate(const Fn& f, double a, double b, double rel_tol = 1e-10,
                 double* error = nullptr, double abs_tol = 0.0);

// Same, split at the given interior points (sorted or not; out-of-range
// points are ignored).
double integrate_split(const Fn& f, double a, double b, std::vector<double> points,
                       double rel_tol = 1e-10, double abs_tol = 0.0);

// Double-exponential rule, for integrable endpoint singularities.
double integrate_singular(const Fn& f, double a, double b, double rel_tol = 1e-10);

// Fixed Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

enum class Oscillator { Cos, Sin, BesselJ0 };

struct OscillatoryOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_panels = 4000;
  // f is smooth at 0 (no endpoint singularity in the first panel)
  bool smooth_at_zero = true;
  // Natural length scale of f; a first panel much wider than this is split
  // geometrically. 0 disables.
  double scale = 0.0;
};

// int_0^inf f(x) w(x r) dx, split at the zeros of w, accelerated with the
// epsilon algorithm.
double oscillatory(const Fn& f, Oscillator w, double r,
                   const OscillatoryOptions& opt = {});

// int_{b(0)}^inf g, with g already oscillating and b(k) its (approximate)
// successive sign changes.
double oscillatory_panels(const Fn& g, const std::function<double(int)>& boundary,
                          const OscillatoryOptions& opt = {});

// int_lo^hi over panels growing geometrically by a factor 2. Each panel is
// resolved to rel_tol of the running total (or abs_tol spread over panels).
double integrate_geometric(const Fn& g, double lo, double hi, double rel_tol = 1e-10,
                           double abs_tol = 0.0);

// Epsilon-algorithm limit of a sequence of partial sums.
class EpsilonAccelerator {
 public:
  void push(double partial_sum);
  double estimate() const { return estimate_; }
  double last_change() const { return change_; }
  int size() const { return static_cast<int>(count_); }

 private:
  std::vector<double> row_;
  std::size_t count_ = 0;
  double estimate_ = 0.0;
  double change_ = 0.0;
};

}  // namespace slfv::quad
