#include "slfv/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <string_view>

namespace slfv {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ParamError(where, "expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(),
                          [&](const char* k) { return it.key() == k; });
    if (!ok) throw ParamError(where + "." + it.key(), "unknown field");
  }
}

namespace {

double get_number(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParamError(where + "." + key, "missing field");
  if (!it->is_number()) throw ParamError(where + "." + key, "expected a number");
  return it->get<double>();
}

std::string get_string(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParamError(where + "." + key, "missing field");
  if (!it->is_string()) throw ParamError(where + "." + key, "expected a string");
  return it->get<std::string>();
}

}  // namespace

Json to_json(const RegimeParams& p) {
  Json j;
  j["d"] = p.d;
  j["u0"] = p.u0;
  j["mu"] = p.mu;
  if (auto* t = std::get_if<OneTail>(&p.tail)) {
    j["kind"] = "OneTail";
    j["a"] = t->a;
    j["b"] = t->b;
    j["c"] = t->c;
  } else {
    const auto& u = std::get<TwoTails>(p.tail);
    j["kind"] = "TwoTails";
    j["a1"] = u.a1;
    j["a2"] = u.a2;
    j["c1"] = u.c1;
    j["c2"] = u.c2;
  }
  return j;
}

RegimeParams regime_from_json(const Json& j) {
  const std::string where = "regime";
  std::string kind = get_string(j, "kind", where);
  RegimeParams p;
  if (kind == "OneTail") {
    reject_unknown_keys(j, {"kind", "d", "u0", "mu", "a", "b", "c"}, where);
    p.tail = OneTail{get_number(j, "a", where), get_number(j, "b", where),
                     get_number(j, "c", where)};
  } else if (kind == "TwoTails") {
    reject_unknown_keys(j, {"kind", "d", "u0", "mu", "a1", "a2", "c1", "c2"}, where);
    p.tail = TwoTails{get_number(j, "a1", where), get_number(j, "a2", where),
                      get_number(j, "c1", where), get_number(j, "c2", where)};
  } else {
    throw ParamError(where + ".kind", "expected OneTail or TwoTails, got " + kind);
  }
  double d = get_number(j, "d", where);
  if (d != static_cast<int>(d)) throw ParamError(where + ".d", "must be an integer");
  p.d = static_cast<int>(d);
  p.u0 = get_number(j, "u0", where);
  p.mu = get_number(j, "mu", where);
  validate(p);
  return p;
}

Json to_json(const DerivedParams& dp) {
  Json j;
  j["alpha"] = dp.alpha;
  j["beta"] = dp.beta;
  j["gamma"] = dp.gamma;
  if (dp.sigma2) j["sigma2"] = *dp.sigma2;
  if (dp.zeta) j["zeta"] = *dp.zeta;
  j["coalescence"] = to_string(dp.coalescence);
  j["gamma_branch"] = to_string(dp.gamma_branch);
  return j;
}

DerivedParams derived_from_json(const Json& j) {
  const std::string where = "derived";
  reject_unknown_keys(j, {"alpha", "beta", "gamma", "sigma2", "zeta", "coalescence", "gamma_branch"},
                      where);
  DerivedParams dp;
  dp.alpha = get_number(j, "alpha", where);
  dp.beta = get_number(j, "beta", where);
  dp.gamma = get_number(j, "gamma", where);
  if (j.contains("sigma2")) dp.sigma2 = get_number(j, "sigma2", where);
  if (j.contains("zeta")) dp.zeta = get_number(j, "zeta", where);
  if (dp.sigma2.has_value() == dp.zeta.has_value())
    throw ParamError(where, "exactly one of sigma2 and zeta must be present");
  std::string c = get_string(j, "coalescence", where);
  if (c == "Local") dp.coalescence = Coalescence::Local;
  else if (c == "LongRange") dp.coalescence = Coalescence::LongRange;
  else throw ParamError(where + ".coalescence", "expected Local or LongRange");
  std::string g = get_string(j, "gamma_branch", where);
  if (g == "BetaAboveD") dp.gamma_branch = GammaBranch::BetaAboveD;
  else if (g == "BetaEqualsD") dp.gamma_branch = GammaBranch::BetaEqualsD;
  else if (g == "BetaBelowD") dp.gamma_branch = GammaBranch::BetaBelowD;
  else throw ParamError(where + ".gamma_branch", "unknown branch " + g);
  return dp;
}

Json to_json(const ScalingSchedule& s) {
  Json j;
  j["N"] = s.N;
  j["delta"] = s.delta;
  j["uN"] = s.uN;
  j["muN"] = s.muN;
  j["etaN"] = s.etaN;
  if (s.theta) j["theta"] = *s.theta;
  j["time_factor"] = s.time_factor;
  j["space_factor"] = s.space_factor;
  return j;
}

ScalingSchedule schedule_from_json(const Json& j) {
  const std::string where = "schedule";
  reject_unknown_keys(j, {"N", "delta", "uN", "muN", "etaN", "theta", "time_factor", "space_factor"},
                      where);
  ScalingSchedule s;
  s.N = get_number(j, "N", where);
  s.delta = get_number(j, "delta", where);
  s.uN = get_number(j, "uN", where);
  s.muN = get_number(j, "muN", where);
  s.etaN = get_number(j, "etaN", where);
  if (j.contains("theta")) s.theta = get_number(j, "theta", where);
  s.time_factor = get_number(j, "time_factor", where);
  s.space_factor = get_number(j, "space_factor", where);
  return s;
}

Json to_json(const ValidityReport& r) {
  Json j;
  j["lln_ok"] = r.lln_ok;
  j["clt_ok"] = r.clt_ok;
  j["lln_exponent"] = r.lln_exponent;
  j["clt_exponent"] = r.clt_exponent;
  return j;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace slfv
