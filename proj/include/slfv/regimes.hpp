#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace slfv {

struct OneTail {
  double a = 0.0;  // tail exponent of r2
  double b = 0.0;  // r1 = r2^b
  double c = 0.0;  // impact u = u_N r2^{-c}
};

struct TwoTails {
  double a1 = 0.0;
  double a2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct RegimeParams {
  int d = 1;
  double u0 = 1.0;
  double mu = 1.0;
  std::variant<OneTail, TwoTails> tail;

  bool one_tail() const { return std::holds_alternative<OneTail>(tail); }
};

enum class Coalescence { Local, LongRange };
enum class GammaBranch { BetaAboveD, BetaEqualsD, BetaBelowD };

struct DerivedParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<double> sigma2;
  std::optional<double> zeta;
  Coalescence coalescence = Coalescence::Local;
  GammaBranch gamma_branch = GammaBranch::BetaAboveD;

  // sigma2 when alpha == 2, zeta otherwise
  double diffusivity() const { return sigma2 ? *sigma2 : *zeta; }
};

struct ScalingSchedule {
  double N = 1.0;
  double delta = 0.5;
  double uN = 0.0;
  double muN = 0.0;
  double etaN = 1.0;
  std::optional<double> theta;

  double time_factor = 1.0;   // N / delta^alpha
  double space_factor = 1.0;  // 1 / delta
};

struct ValidityReport {
  bool lln_ok = false;
  bool clt_ok = false;
  double lln_exponent = 0.0;  // exponent of N in N eta_N
  double clt_exponent = 0.0;  // exponent of N in sqrt(eta_N/N) delta_N^{d^c}
};

// Thrown for invalid regime parameters; field() names the offending entry.
class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Distance from the alpha = 2 boundary below which parameters are rejected.
inline constexpr double kBoundaryTolerance = 1e-4;

void validate(const RegimeParams& p);
DerivedParams derive_params(const RegimeParams& p);

double eta_N(double alpha, double beta, int d, double delta);
double eta_N(const DerivedParams& dp, const RegimeParams& p, double delta);

ScalingSchedule rescaled_rates(const RegimeParams& p, const DerivedParams& dp, double N,
                               double delta);
ValidityReport check_asymptotics(const RegimeParams& p, double theta);

// u0 V1 int r^{-1-a}: per-lineage rate of events that mark it, unrescaled time,
// before the 1/N of u_N.
double lineage_jump_rate(const RegimeParams& p);

// Impact of an event with radii (r1, r2) at u_N.
double event_impact(const RegimeParams& p, double uN, double r1, double r2);

const char* to_string(Coalescence c);
const char* to_string(GammaBranch g);

}  // namespace slfv
