#include "slfv/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slfv/geometry.hpp"

namespace slfv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExact = 1e-12;

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ParamError(field, what);
}

double one_tail_alpha_raw(const OneTail& t) {
  double ab = t.b == 0.0 ? kInf : t.a / t.b;
  return std::min(t.a, ab);
}

}  // namespace

void validate(const RegimeParams& p) {
  require(p.d >= 1, "d", "dimension must be >= 1");
  require(p.u0 > 0.0 && p.u0 <= 1.0, "u0", "must lie in (0,1]");
  require(p.mu > 0.0 && std::isfinite(p.mu), "mu", "must be > 0");
  if (auto* t = std::get_if<OneTail>(&p.tail)) {
    require(t->a > 0.0 && std::isfinite(t->a), "a", "must be > 0");
    require(t->b >= 0.0 && std::isfinite(t->b), "b", "must be >= 0");
    require(t->c >= 0.0 && std::isfinite(t->c), "c", "must be >= 0");
    double m = one_tail_alpha_raw(*t);
    require(!near(m, 2.0, kBoundaryTolerance), near(t->a, 2.0, kBoundaryTolerance) ? "a" : "b",
            "min(a, a/b) = 2 is the Brownian boundary; the limit needs a > 2 and a/b > 2, "
            "or min(a, a/b) < 2 strictly");
  } else {
    const auto& u = std::get<TwoTails>(p.tail);
    require(u.a1 > 0.0 && std::isfinite(u.a1), "a1", "must be > 0");
    require(u.a2 > 0.0 && std::isfinite(u.a2), "a2", "must be > 0");
    require(u.c1 >= 0.0 && std::isfinite(u.c1), "c1", "must be >= 0");
    require(u.c2 >= 0.0 && std::isfinite(u.c2), "c2", "must be >= 0");
    require(!near(u.a1, 2.0, kBoundaryTolerance), "a1", "a1 = 2 is a Brownian boundary");
    require(!near(u.a2, 2.0, kBoundaryTolerance), "a2", "a2 = 2 is a Brownian boundary");
  }
}

DerivedParams derive_params(const RegimeParams& p) {
  validate(p);
  const int d = p.d;
  const double v1 = unit_ball_volume(d);
  const double u0 = p.u0;
  DerivedParams dp;
  double gamma_scale = 1.0;  // (a + c) or (a1 + c1)(...) denominators
  if (auto* t = std::get_if<OneTail>(&p.tail)) {
    dp.alpha = std::min(one_tail_alpha_raw(*t), 2.0);
    dp.beta = t->a + t->c;
    if (dp.alpha == 2.0) {
      dp.sigma2 = u0 * v1 / (d + 2.0) * (1.0 / (t->a - 2.0 * t->b) + 1.0 / (t->a - 2.0));
    } else if (near(t->b, 1.0, kExact)) {
      // r1 = r2: the jump is r (Y1 + Y2), whose density is V_1(0,z)/V1^2.
      dp.zeta = u0 * v1 * v1 * (d + dp.alpha) * c1_constant(d, dp.alpha);
    } else {
      dp.zeta = u0 * v1 / std::max(1.0, t->b);
    }
  } else {
    const auto& u = std::get<TwoTails>(p.tail);
    dp.alpha = std::min({u.a1, u.a2, 2.0});
    dp.beta = u.a2 + u.c2;
    gamma_scale = u.a1 + u.c1;
    if (dp.alpha == 2.0) {
      dp.sigma2 = u0 * v1 / (d + 2.0) *
                  (1.0 / ((u.a1 - 2.0) * u.a2) + 1.0 / (u.a1 * (u.a2 - 2.0)));
    } else if (near(u.a1, u.a2, kExact)) {
      dp.zeta = u0 * v1 * (1.0 / u.a1 + 1.0 / u.a2);
    } else {
      dp.zeta = u0 * v1 / std::max(u.a1, u.a2);
    }
  }
  if (near(dp.beta, d, kExact)) {
    dp.gamma_branch = GammaBranch::BetaEqualsD;
    dp.gamma = u0 * u0 * v1 * v1 / gamma_scale;
    dp.coalescence = Coalescence::Local;
  } else if (dp.beta > d) {
    dp.gamma_branch = GammaBranch::BetaAboveD;
    dp.gamma = u0 * u0 * v1 * v1 / (gamma_scale * (dp.beta - d));
    dp.coalescence = Coalescence::Local;
  } else {
    dp.gamma_branch = GammaBranch::BetaBelowD;
    dp.gamma = u0 * u0 * c2_constant(d, dp.beta) / gamma_scale;
    dp.coalescence = Coalescence::LongRange;
  }
  return dp;
}

double eta_N(double alpha, double beta, int d, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParamError("delta", "must lie in (0,1)");
  if (near(beta, d, kExact)) return std::pow(delta, alpha - d) / std::log(1.0 / delta);
  if (beta > d) return std::pow(delta, alpha - d);
  return std::pow(delta, alpha - beta);
}

double eta_N(const DerivedParams& dp, const RegimeParams& p, double delta) {
  return eta_N(dp.alpha, dp.beta, p.d, delta);
}

ScalingSchedule rescaled_rates(const RegimeParams& p, const DerivedParams& dp, double N,
                               double delta) {
  if (!(N >= 1.0)) throw ParamError("N", "must be >= 1");
  ScalingSchedule s;
  s.N = N;
  s.delta = delta;
  s.etaN = eta_N(dp, p, delta);
  const double da = std::pow(delta, dp.alpha);
  s.uN = p.u0 / N;
  s.muN = da * p.mu / N;
  s.time_factor = N / da;
  s.space_factor = 1.0 / delta;
  return s;
}

ValidityReport check_asymptotics(const RegimeParams& p, double theta) {
  if (!(theta > 0.0)) throw ParamError("theta", "must be > 0");
  DerivedParams dp = derive_params(p);
  const int d = p.d;
  const double c = p.one_tail() ? std::get<OneTail>(p.tail).c : std::get<TwoTails>(p.tail).c2;
  // eta_N = N^{-theta e}, times 1/(theta log N) when beta = d
  const bool log_branch = dp.gamma_branch == GammaBranch::BetaEqualsD;
  const double e = dp.beta < d && !log_branch ? dp.alpha - dp.beta : dp.alpha - d;
  ValidityReport r;
  r.lln_exponent = 1.0 - theta * e;
  // a log factor in the denominator only matters when the exponent is 0,
  // where it sends N eta_N to 0
  r.lln_ok = r.lln_exponent > 0.0;
  r.clt_exponent = (-theta * e - 1.0) / 2.0 - theta * std::min<double>(d, c);
  r.clt_ok = c >= d || r.clt_exponent < 0.0 || (r.clt_exponent == 0.0 && log_branch);
  return r;
}

double lineage_jump_rate(const RegimeParams& p) {
  validate(p);
  const double v1 = unit_ball_volume(p.d);
  if (auto* t = std::get_if<OneTail>(&p.tail)) return p.u0 * v1 / t->a;
  const auto& u = std::get<TwoTails>(p.tail);
  return p.u0 * v1 / (u.a1 * u.a2);
}

double event_impact(const RegimeParams& p, double uN, double r1, double r2) {
  if (auto* t = std::get_if<OneTail>(&p.tail)) return t->c == 0.0 ? uN : uN * std::pow(r2, -t->c);
  const auto& u = std::get<TwoTails>(p.tail);
  return uN * std::pow(r1, -u.c1) * std::pow(r2, -u.c2);
}

const char* to_string(Coalescence c) { return c == Coalescence::Local ? "Local" : "LongRange"; }

const char* to_string(GammaBranch g) {
  switch (g) {
    case GammaBranch::BetaAboveD: return "BetaAboveD";
    case GammaBranch::BetaEqualsD: return "BetaEqualsD";
    case GammaBranch::BetaBelowD: return "BetaBelowD";
  }
  return "?";
}

}  // namespace slfv
