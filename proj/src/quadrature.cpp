#include "slfv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace slfv::quad {

namespace bq = boost::math::quadrature;

double integrate(const Fn& f, double a, double b, double rel_tol, double* error, double abs_tol) {
  if (a == b) return 0.0;
  // Globally adaptive bisection on the worst interval. Stops on the relative
  // tolerance of the total or when the error estimate reaches roundoff of
  // the L1 norm (cancelling integrands never meet a relative target).
  using GK = bq::gauss_kronrod<double, 31>;
  struct Piece {
    double a, b, value, err, l1;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  auto eval = [&](double lo, double hi) {
    Piece p{lo, hi, 0.0, 0.0, 0.0};
    p.value = GK::integrate(f, lo, hi, 0, 0.0, &p.err, &p.l1);
    return p;
  };
  std::priority_queue<Piece> heap;
  Piece first = eval(a, b);
  double total = first.value, err = first.err, l1 = first.l1;
  heap.push(first);
  constexpr int kMaxPieces = 4000;
  const double floor_eps = 50.0 * std::numeric_limits<double>::epsilon();
  for (int n = 1; n < kMaxPieces; ++n) {
    if (err <= std::max(rel_tol * std::abs(total), abs_tol) || err <= floor_eps * l1) break;
    Piece worst = heap.top();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Piece left = eval(worst.a, mid), right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  if (error) *error = err;
  return total;
}

double integrate_split(const Fn& f, double a, double b, std::vector<double> points,
                       double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> cuts{a};
  std::sort(points.begin(), points.end());
  for (double p : points)
    if (p > a && p < b && p > cuts.back()) cuts.push_back(p);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(f, cuts[i], cuts[i + 1], rel_tol, nullptr, abs_tol / static_cast<double>(cuts.size() - 1));
  return sign * total;
}

double integrate_singular(const Fn& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  static thread_local bq::tanh_sinh<double> rule(12);
  auto g = [&f](double x) { return f(x); };
  return rule.integrate(g, a, b, rel_tol);
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    double dp = boost::math::legendre_p_prime(n, z);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes.push_back(z);
    rule.weights.push_back(w);
    if (z != 0.0) {
      rule.nodes.push_back(-z);
      rule.weights.push_back(w);
    }
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

void EpsilonAccelerator::push(double s) {
  // Table rebuilt over a trailing window; long tables lose accuracy.
  constexpr std::size_t kWindow = 24;
  row_.push_back(s);
  ++count_;
  if (row_.size() > kWindow) row_.erase(row_.begin());
  const std::size_t n = row_.size();
  std::vector<double> prev(row_.begin(), row_.end());  // eps_0
  std::vector<double> prev2(n + 1, 0.0);                // eps_{-1}
  double best = row_.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    bool ok = true;
    for (std::size_t i = 0; i < n - k; ++i) {
      double d = prev[i + 1] - prev[i];
      if (d == 0.0 || !std::isfinite(d)) {
        ok = false;
        break;
      }
      next[i] = prev2[i + 1] + 1.0 / d;
    }
    if (!ok) break;
    if (k % 2 == 0) best = next.back();
    prev2 = std::move(prev);
    prev = std::move(next);
  }
  change_ = count_ > 1 ? std::abs(best - estimate_) : std::numeric_limits<double>::infinity();
  estimate_ = best;
}

namespace {

double j0_zero(int k) {
  static std::once_flag once;
  static std::vector<double> table;
  constexpr int kTable = 2048;
  std::call_once(once, [] {
    table.reserve(kTable);
    for (int i = 1; i <= kTable; ++i)
      table.push_back(boost::math::cyl_bessel_j_zero(0.0, i));
  });
  if (k <= kTable) return table[k - 1];
  // McMahon expansion
  double beta = (k - 0.25) * std::numbers::pi;
  return beta + 1.0 / (8.0 * beta) - 124.0 / (3.0 * std::pow(8.0 * beta, 3));
}

double zero_of(Oscillator w, int k) {
  switch (w) {
    case Oscillator::Cos: return (k - 0.5) * std::numbers::pi;
    case Oscillator::Sin: return k * std::numbers::pi;
    case Oscillator::BesselJ0: return j0_zero(k);
  }
  return 0.0;
}

double weight(Oscillator w, double x) {
  switch (w) {
    case Oscillator::Cos: return std::cos(x);
    case Oscillator::Sin: return std::sin(x);
    case Oscillator::BesselJ0: return boost::math::cyl_bessel_j(0, x);
  }
  return 0.0;
}

}  // namespace

double oscillatory_panels(const Fn& g, const std::function<double(int)>& boundary,
                          const OscillatoryOptions& opt) {
  double left = boundary(0);
  double right = boundary(1);
  double head_end = right;
  if (opt.scale > 0.0 && right - left > 4.0 * opt.scale) head_end = left + opt.scale;
  double sum = opt.smooth_at_zero ? integrate(g, left, head_end, opt.rel_tol * 1e-2)
                                  : integrate_singular(g, left, head_end, opt.rel_tol * 1e-2);
  if (head_end < right) sum += integrate_geometric(g, head_end, right, opt.rel_tol * 1e-2);
  EpsilonAccelerator acc;
  acc.push(sum);
  int settled = 0;
  for (int k = 1; k < opt.max_panels; ++k) {
    left = right;
    right = boundary(k + 1);
    double panel_abs = std::max(opt.rel_tol * 1e-2 * std::abs(sum), opt.abs_tol * 1e-2);
    sum += integrate(g, left, right, opt.rel_tol * 1e-2, nullptr, panel_abs);
    acc.push(sum);
    double est = acc.estimate();
    double tol = std::max(opt.rel_tol * std::abs(est), opt.abs_tol);
    if (k >= 4 && acc.last_change() <= tol)
      ++settled;
    else
      settled = 0;
    if (settled >= 3) return est;
  }
  return acc.estimate();
}

double oscillatory(const Fn& f, Oscillator w, double r, const OscillatoryOptions& opt) {
  auto g = [&](double x) { return f(x) * weight(w, x * r); };
  auto boundary = [&](int k) { return k == 0 ? 0.0 : zero_of(w, k) / r; };
  return oscillatory_panels(g, boundary, opt);
}

double integrate_geometric(const Fn& g, double lo, double hi, double rel_tol, double abs_tol) {
  if (!(lo > 0.0)) throw std::invalid_argument("integrate_geometric: lower limit must be > 0");
  if (!(hi > lo)) return 0.0;
  const double panels = std::ceil(std::log2(hi / lo));
  double total = 0.0;
  for (double a = lo; a < hi;) {
    double b = std::min(2.0 * a, hi);
    double target = std::max(abs_tol / panels, 0.1 * rel_tol * std::abs(total));
    total += integrate(g, a, b, rel_tol, nullptr, target);
    a = b;
  }
  return total;
}

}  // namespace slfv::quad
