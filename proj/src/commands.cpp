#include "slfv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "slfv/rng.hpp"

namespace slfv {

namespace {

double number(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParamError(where + "." + key, "missing");
  if (!j.at(key).is_number()) throw ParamError(where + "." + key, "must be a number");
  return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::int64_t integer(const Json& j, const char* key, const std::string& where) {
  const double v = number(j, key, where);
  if (v != std::floor(v) || v < 0) throw ParamError(where + "." + key, "must be a non-negative integer");
  return static_cast<std::int64_t>(v);
}

const Json& block(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_object()) throw ParamError(where + key, "missing block");
  return j.at(key);
}

std::string kind_of(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParamError(where + ".kind", "missing");
  return j.at("kind").get<std::string>();
}

Point point_from(const Json& j, int d, const std::string& where) {
  Point x{};
  if (j.is_number()) {
    x[0] = j.get<double>();
    return x;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw ParamError(where, "expected a number or a d-vector");
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<double>();
  return x;
}

// Either an explicit list or {"from", "to", "count"} (inclusive, evenly spaced).
std::vector<double> grid_from(const Json& j, const std::string& where) {
  std::vector<double> g;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ParamError(where, "grid entries must be numbers");
      g.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    reject_unknown_keys(j, {"from", "to", "count"}, where);
    const double a = number(j, "from", where), b = number(j, "to", where);
    const auto n = integer(j, "count", where);
    if (n < 1) throw ParamError(where + ".count", "must be >= 1");
    for (std::int64_t i = 0; i < n; ++i)
      g.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    throw ParamError(where, "expected a list or {from, to, count}");
  }
  if (g.empty()) throw ParamError(where, "empty grid");
  return g;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json header(const Json& config, std::uint64_t seed) {
  Json j;
  j["config_hash"] = hex64(config_hash(config));
  j["seed"] = seed;
  return j;
}

std::string stem_csv(const Json& config, std::uint64_t seed) { return csv_banner(config, seed); }

DerivedParams derived_for(int d, double alpha, double beta, double gamma, double diffusivity) {
  DerivedParams dp;
  dp.alpha = alpha;
  dp.beta = beta;
  dp.gamma = gamma;
  if (alpha == 2.0)
    dp.sigma2 = diffusivity;
  else
    dp.zeta = diffusivity;
  dp.coalescence = beta < d ? Coalescence::LongRange : Coalescence::Local;
  dp.gamma_branch = beta > d ? GammaBranch::BetaAboveD
                    : beta == d ? GammaBranch::BetaEqualsD
                                : GammaBranch::BetaBelowD;
  return dp;
}

Json four_curve_sets() {
  return Json::array({{{"label", "red"}, {"alpha", 1.5}, {"beta", 1.5}},
                      {{"label", "blue"}, {"alpha", 1.5}, {"beta", 2.2}},
                      {{"label", "purple"}, {"alpha", 2.0}, {"beta", 2.2}},
                      {{"label", "grey"}, {"alpha", 2.0}, {"beta", 3.0}}});
}

// Fills in a wmf block from a named preset; explicit keys win.
Json expand_wmf_preset(const Json& w) {
  if (!w.contains("preset")) return w;
  const auto name = w.at("preset").get<std::string>();
  Json out;
  if (name == "four-curves-d2" || name == "four-curves-d3") {
    out["d"] = name == "four-curves-d2" ? 2 : 3;
    out["mu"] = 0.2;
    out["normalize_at"] = 3.0;
    out["r"] = Json{{"from", 0.5}, {"to", 10.0}, {"count", 20}};
    out["sets"] = four_curve_sets();
  } else {
    throw ParamError("wmf.preset", "unknown preset '" + name + "'");
  }
  for (const auto& [k, v] : w.items())
    if (k != "preset") out[k] = v;
  return out;
}

// Two-allele ball runs in d = 2: alpha = 1.3 reached through a/b (b = 2) or a (b = 0.5).
Json expand_forward_preset(const Json& config) {
  if (!config.contains("forward") || !config.at("forward").contains("preset")) return config;
  const auto name = config.at("forward").at("preset").get<std::string>();
  double a = 0.0, b = 0.0;
  if (name == "two-allele-b2") {
    a = 2.6;
    b = 2.0;
  } else if (name == "two-allele-b0.5") {
    a = 1.3;
    b = 0.5;
  } else {
    throw ParamError("forward.preset", "unknown preset '" + name + "'");
  }
  Json out = config;
  if (!out.contains("regime"))
    out["regime"] = {{"kind", "OneTail"}, {"d", 2}, {"u0", 0.8}, {"mu", 0.1}, {"a", a}, {"b", b}, {"c", 0.0}};
  if (!out.contains("scaling")) out["scaling"] = {{"N", 10.0}, {"delta", 0.1}};
  Json f = {{"L", 20.0},
            {"cells", 200},
            {"mode", "two_allele"},
            {"init", {{"kind", "ball"}, {"center", {10.0, 10.0}}, {"radius", 5.0}}},
            {"t_end", 0.2},
            {"snapshots", {0.1, 0.2}}};
  for (const auto& [k, v] : config.at("forward").items())
    if (k != "preset") f[k] = v;
  out["forward"] = f;
  return out;
}

FieldInit field_init_from(const Json& j, int d, const std::string& where) {
  const auto kind = kind_of(j, where);
  if (kind == "uniform") {
    reject_unknown_keys(j, {"kind"}, where);
    return FieldInit::uniform();
  }
  if (kind == "ball") {
    reject_unknown_keys(j, {"kind", "center", "radius"}, where);
    if (!j.contains("center")) throw ParamError(where + ".center", "missing");
    return FieldInit::ball(point_from(j.at("center"), d, where + ".center"), number(j, "radius", where));
  }
  if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "w"}, where);
    return FieldInit::constant(number(j, "w", where));
  }
  throw ParamError(where + ".kind", "unknown init '" + kind + "'");
}

struct RegimeSetup {
  RegimeParams p;
  DerivedParams dp;
  ScalingSchedule sched;
};

RegimeSetup regime_setup(const Json& config) {
  RegimeSetup s;
  s.p = regime_from_json(block(config, "regime", ""));
  validate(s.p);
  s.dp = derive_params(s.p);
  s.sched = schedule_from_config(s.p, block(config, "scaling", ""));
  return s;
}

std::string csv_row(std::initializer_list<double> xs) {
  std::string s;
  bool first = true;
  for (double x : xs) {
    if (!first) s += ',';
    s += format_double(x);
    first = false;
  }
  return s + "\n";
}

}  // namespace

std::uint64_t config_hash(const Json& config) {
  Json c = config;
  if (c.is_object()) c.erase("seed");
  const std::string text = c.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_banner(const Json& config, std::uint64_t seed) {
  return "# config_hash=" + hex64(config_hash(config)) + " seed=" + std::to_string(seed) + "\n";
}

Json error_json(const std::exception& e) {
  Json j;
  j["message"] = e.what();
  if (const auto* pe = dynamic_cast<const ParamError*>(&e)) j["field"] = pe->field();
  return Json{{"error", j}};
}

std::uint64_t resolve_seed(const Json& config, const std::uint64_t* flag) {
  if (flag) return *flag;
  if (config.is_object() && config.contains("seed")) {
    const auto& s = config.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ParamError("seed", "must be an unsigned 64-bit integer");
    return s.get<std::uint64_t>();
  }
  return 1;
}

ScalingSchedule schedule_from_config(const RegimeParams& p, const Json& scaling) {
  const std::string where = "scaling";
  reject_unknown_keys(scaling, {"N", "delta", "theta"}, where);
  const double N = number(scaling, "N", where);
  const bool has_delta = scaling.contains("delta"), has_theta = scaling.contains("theta");
  if (has_delta == has_theta) throw ParamError(where, "give exactly one of delta, theta");
  double delta = 0.0;
  std::optional<double> theta;
  if (has_delta) {
    delta = number(scaling, "delta", where);
  } else {
    theta = number(scaling, "theta", where);
    if (!(*theta > 0.0)) throw ParamError("scaling.theta", "must be > 0");
    delta = std::pow(N, -*theta);
  }
  if (!(delta > 0.0 && delta < 1.0)) throw ParamError("scaling.delta", "must be in (0,1)");
  auto s = rescaled_rates(p, derive_params(p), N, delta);
  s.theta = theta;
  return s;
}

TestFunction test_function_from_json(const Json& j, int d, const std::string& where) {
  const auto kind = kind_of(j, where);
  if (kind == "gaussian") {
    reject_unknown_keys(j, {"kind", "center", "sd", "amplitude"}, where);
    const Point c = j.contains("center") ? point_from(j.at("center"), d, where + ".center") : Point{};
    return testfn::gaussian(d, c, number(j, "sd", where), number_or(j, "amplitude", 1.0, where));
  }
  if (kind == "gaussian_density") {
    reject_unknown_keys(j, {"kind", "center", "sd"}, where);
    const Point c = j.contains("center") ? point_from(j.at("center"), d, where + ".center") : Point{};
    return testfn::gaussian_density(d, c, number(j, "sd", where));
  }
  if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "c"}, where);
    return testfn::constant(d, number(j, "c", where));
  }
  if (d != 1) throw ParamError(where + ".kind", "'" + kind + "' is only available in d = 1");
  if (kind == "bump") {
    reject_unknown_keys(j, {"kind", "center", "radius", "amplitude"}, where);
    return testfn::smooth_bump(number_or(j, "center", 0.0, where), number(j, "radius", where),
                               number_or(j, "amplitude", 1.0, where));
  }
  if (kind == "indicator") {
    reject_unknown_keys(j, {"kind", "lo", "hi"}, where);
    return testfn::indicator(number(j, "lo", where), number(j, "hi", where));
  }
  if (kind == "uniform_density") {
    reject_unknown_keys(j, {"kind", "lo", "hi"}, where);
    return testfn::uniform_density(number(j, "lo", where), number(j, "hi", where));
  }
  if (kind == "cosine") {
    reject_unknown_keys(j, {"kind", "xi", "phase"}, where);
    return testfn::cosine(number(j, "xi", where), number_or(j, "phase", 0.0, where));
  }
  throw ParamError(where + ".kind", "unknown test function '" + kind + "'");
}

TypeFunction type_function_from_json(const Json& j, const std::string& where) {
  const auto kind = kind_of(j, where);
  if (kind == "indicator") {
    reject_unknown_keys(j, {"kind", "lo", "hi"}, where);
    return type_indicator(number(j, "lo", where), number(j, "hi", where));
  }
  if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "c"}, where);
    return type_constant(number(j, "c", where));
  }
  if (kind == "identity") {
    reject_unknown_keys(j, {"kind"}, where);
    return type_identity();
  }
  throw ParamError(where + ".kind", "unknown type function '" + kind + "'");
}

StartLaw start_law_from_json(const Json& j, int d, const std::string& where) {
  const auto kind = kind_of(j, where);
  StartLaw law;
  if (kind == "uniform") {
    reject_unknown_keys(j, {"kind", "center", "width"}, where);
    const Point c = j.contains("center") ? point_from(j.at("center"), d, where + ".center") : Point{};
    const double w = number(j, "width", where);
    law.sampler = uniform_block_sampler(d, c, w);
    if (d == 1) law.density = testfn::uniform_density(c[0] - w / 2.0, c[0] + w / 2.0);
    return law;
  }
  if (kind == "gaussian") {
    reject_unknown_keys(j, {"kind", "center", "sd"}, where);
    const Point c = j.contains("center") ? point_from(j.at("center"), d, where + ".center") : Point{};
    const double sd = number(j, "sd", where);
    law.sampler = gaussian_sampler(d, c, sd);
    law.density = testfn::gaussian_density(d, c, sd);
    return law;
  }
  throw ParamError(where + ".kind", "unknown start law '" + kind + "'");
}

std::vector<WmfCurve> wmf_curves_from_json(const Json& sets, int d, const std::string& where) {
  if (!sets.is_array() || sets.empty()) throw ParamError(where, "expected a non-empty list");
  std::vector<WmfCurve> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& s = sets[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    WmfCurve c;
    c.label = s.contains("label") ? s.at("label").get<std::string>() : "F" + std::to_string(i);
    if (s.contains("regime")) {
      reject_unknown_keys(s, {"label", "regime"}, w);
      const auto p = regime_from_json(s.at("regime"));
      validate(p);
      if (p.d != d) throw ParamError(w + ".regime.d", "must match wmf.d");
      c.dp = derive_params(p);
    } else {
      reject_unknown_keys(s, {"label", "alpha", "beta", "gamma", "diffusivity"}, w);
      const double alpha = number(s, "alpha", w), beta = number(s, "beta", w);
      if (!(alpha > 0.0 && alpha <= 2.0)) throw ParamError(w + ".alpha", "must be in (0,2]");
      if (!(beta > 0.0)) throw ParamError(w + ".beta", "must be > 0");
      c.dp = derived_for(d, alpha, beta, number_or(s, "gamma", 1.0, w), number_or(s, "diffusivity", 1.0, w));
    }
    for (const auto& other : out)
      if (other.label == c.label) throw ParamError(w + ".label", "duplicate label");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<double>> wmf_table(const std::vector<WmfCurve>& curves, int d, double mu,
                                           const std::vector<double>& r, double normalize_at) {
  std::vector<std::vector<double>> rows(r.size(), std::vector<double>(curves.size()));
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto spec = make_kernel_spec(curves[k].dp, d);
    const double norm = normalize_at > 0.0 ? wm_function(spec, curves[k].dp, mu, normalize_at) : 1.0;
    for (std::size_t i = 0; i < r.size(); ++i) rows[i][k] = wm_function(spec, curves[k].dp, mu, r[i]) / norm;
  }
  return rows;
}

Artifacts cmd_params(const Json& config, const RunContext& ctx) {
  reject_unknown_keys(config, {"regime", "scaling", "seed"}, "config");
  const auto p = regime_from_json(block(config, "regime", ""));
  validate(p);
  const auto dp = derive_params(p);
  Json out = header(config, ctx.seed);
  out["regime"] = to_json(p);
  out["derived"] = to_json(dp);
  if (config.contains("scaling")) {
    const auto s = schedule_from_config(p, config.at("scaling"));
    out["schedule"] = to_json(s);
    std::optional<double> theta = s.theta;
    if (!theta && s.N > 1.0) theta = -std::log(s.delta) / std::log(s.N);
    if (theta) out["validity"] = to_json(check_asymptotics(p, *theta));
  }
  return {{"params.json", json_text(out)}};
}

Artifacts cmd_wmf(const Json& config, const RunContext& ctx) {
  reject_unknown_keys(config, {"wmf", "seed"}, "config");
  const Json w = expand_wmf_preset(block(config, "wmf", ""));
  reject_unknown_keys(w, {"d", "mu", "r", "normalize_at", "sets"}, "wmf");
  const double dd = number(w, "d", "wmf");
  if (dd != 1 && dd != 2 && dd != 3) throw ParamError("wmf.d", "must be 1, 2 or 3");
  const int d = static_cast<int>(dd);
  const double mu = number(w, "mu", "wmf");
  if (!(mu > 0.0)) throw ParamError("wmf.mu", "must be > 0");
  if (!w.contains("r")) throw ParamError("wmf.r", "missing");
  const auto r = grid_from(w.at("r"), "wmf.r");
  for (double x : r)
    if (!(x > 0.0)) throw ParamError("wmf.r", "grid must stay away from r = 0");
  const double r0 = number_or(w, "normalize_at", 0.0, "wmf");
  if (w.contains("normalize_at") && !(r0 > 0.0)) throw ParamError("wmf.normalize_at", "must be > 0");
  if (!w.contains("sets")) throw ParamError("wmf.sets", "missing");
  const auto curves = wmf_curves_from_json(w.at("sets"), d, "wmf.sets");
  const auto rows = wmf_table(curves, d, mu, r, r0);

  std::string csv = stem_csv(config, ctx.seed) + "r";
  for (const auto& c : curves) csv += "," + c.label;
  csv += "\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    csv += format_double(r[i]);
    for (double v : rows[i]) csv += "," + format_double(v);
    csv += "\n";
  }

  // Pairs of curves that coincide on the whole grid (relative 1e-6).
  Json same = Json::array();
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      bool eq = true;
      for (const auto& row : rows)
        eq = eq && std::abs(row[a] - row[b]) <= 1e-6 * std::max(std::abs(row[a]), std::abs(row[b]));
      if (eq) same.push_back({curves[a].label, curves[b].label});
    }
  Json meta = header(config, ctx.seed);
  meta["d"] = d;
  meta["mu"] = mu;
  meta["points"] = r.size();
  if (r0 > 0.0) meta["normalize_at"] = r0;
  meta["superposed"] = same;
  Json cs = Json::array();
  for (const auto& c : curves) cs.push_back({{"label", c.label}, {"derived", to_json(c.dp)}});
  meta["curves"] = cs;
  return {{"wmf.csv", csv}, {"wmf.json", json_text(meta)}};
}

Artifacts cmd_dual(const Json& config, const RunContext& ctx) {
  reject_unknown_keys(config, {"regime", "scaling", "dual", "seed"}, "config");
  const auto s = regime_setup(config);
  const auto& j = block(config, "dual", "");
  reject_unknown_keys(j, {"t", "reps", "phi", "psi", "compare", "replicates"}, "dual");
  const double t = number(j, "t", "dual");
  if (!(t >= 0.0)) throw ParamError("dual.t", "must be >= 0");
  const auto reps = integer(j, "reps", "dual");
  if (reps < 1) throw ParamError("dual.reps", "must be >= 1");
  if (!j.contains("phi") || !j.contains("psi")) throw ParamError("dual", "phi and psi start laws are required");
  const auto phi = start_law_from_json(j.at("phi"), s.p.d, "dual.phi");
  const auto psi = start_law_from_json(j.at("psi"), s.p.d, "dual.psi");
  const bool compare = j.value("compare", false);
  const bool keep = j.value("replicates", false);
  if (compare && (!phi.density.value || !psi.density.value))
    throw ParamError("dual.compare", "needs start laws with a closed-form density (gaussian, or uniform in d = 1)");

  const auto run = estimate_ibd(command_seed(ctx.seed, "dual"), phi.sampler, psi.sampler, t, s.p, s.sched, reps,
                                ctx.threads, keep);
  Json out = header(config, ctx.seed);
  out["reps"] = run.estimate.reps;
  out["successes"] = run.estimate.successes;
  out["estimate"] = run.estimate.estimate;
  out["ci_low"] = run.estimate.ci_low;
  out["ci_high"] = run.estimate.ci_high;
  out["se"] = run.estimate.se;
  out["t"] = t;
  out["schedule"] = to_json(s.sched);
  if (compare) {
    const double f = wm_pairing(s.dp, s.p.d, s.p.mu, phi.density, psi.density);
    out["formula"] = f;
    out["z"] = run.estimate.se > 0.0 ? (run.estimate.estimate - f) / run.estimate.se : 0.0;
  }
  Artifacts a{{"dual.json", json_text(out)}};
  if (keep) a.emplace_back("replicates.csv", stem_csv(config, ctx.seed) + replicate_csv(run.records));
  return a;
}

Artifacts cmd_forward(const Json& config_in, const RunContext& ctx) {
  const Json config = expand_forward_preset(config_in);
  reject_unknown_keys(config, {"regime", "scaling", "forward", "seed"}, "config");
  const auto s = regime_setup(config);
  const auto& j = block(config, "forward", "");
  reject_unknown_keys(j, {"L", "cells", "mode", "init", "t_end", "snapshots", "mutation", "series", "psi"},
                      "forward");
  const double L = number(j, "L", "forward");
  const auto n = integer(j, "cells", "forward");
  const std::string mode_s = j.value("mode", std::string("two_allele"));
  FieldMode mode;
  if (mode_s == "two_allele")
    mode = FieldMode::TwoAllele;
  else if (mode_s == "atomic")
    mode = FieldMode::Atomic;
  else
    throw ParamError("forward.mode", "must be two_allele or atomic");
  const double t_end = number(j, "t_end", "forward");
  if (!(t_end >= 0.0)) throw ParamError("forward.t_end", "must be >= 0");
  const bool mutation = j.value("mutation", mode == FieldMode::Atomic);
  if (mutation && mode == FieldMode::TwoAllele) throw ParamError("forward.mutation", "two_allele runs have no mutation");
  const FieldInit init = j.contains("init") ? field_init_from(j.at("init"), s.p.d, "forward.init")
                                            : (mode == FieldMode::Atomic ? FieldInit::uniform() : FieldInit::constant(0.5));
  TypeFunction psi = mode == FieldMode::TwoAllele ? type_identity() : type_indicator(0.0, 0.5);
  if (j.contains("psi")) psi = type_function_from_json(j.at("psi"), "forward.psi");

  // Snapshot at 0 always; configured times beyond t_end are dropped.
  std::vector<double> snaps{0.0};
  if (j.contains("snapshots"))
    for (double x : grid_from(j.at("snapshots"), "forward.snapshots"))
      if (x > 0.0 && x <= t_end) snaps.push_back(x);
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  std::vector<double> series;
  if (j.contains("series"))
    for (double x : grid_from(j.at("series"), "forward.series"))
      if (x >= 0.0 && x <= t_end) series.push_back(x);
  std::sort(series.begin(), series.end());
  series.erase(std::unique(series.begin(), series.end()), series.end());

  AlleleField field(mode, s.p.d, L, static_cast<int>(n), init, mutation ? s.p.mu : 0.0);
  const std::string banner = stem_csv(config, ctx.seed);
  Artifacts files;
  Json snap_meta = Json::array();
  std::string series_csv = banner + "t,value\n";
  std::vector<Observer> obs;
  obs.push_back({snaps, [&](const AlleleField& f, double t) {
                   char name[32];
                   std::snprintf(name, sizeof name, "snapshot_%03zu.csv", files.size());
                   files.emplace_back(name, banner + f.snapshot_csv());
                   snap_meta.push_back({{"file", name}, {"time", t}});
                 }});
  if (!series.empty())
    obs.push_back({series, [&](const AlleleField& f, double t) {
                     double m = 0.0;
                     for (std::int64_t c = 0; c < f.cell_count(); ++c) m += f.cell_mean(c, psi);
                     series_csv += csv_row({t, m / static_cast<double>(f.cell_count())});
                   }});
  RngStream rng(command_seed(ctx.seed, "forward"));
  const auto run = run_forward(rng, field, s.p, s.sched, t_end, obs);

  Json meta = header(config, ctx.seed);
  meta["regime"] = to_json(s.p);
  meta["derived"] = to_json(s.dp);
  meta["schedule"] = to_json(s.sched);
  meta["mode"] = mode_s;
  meta["L"] = L;
  meta["cells"] = n;
  meta["t_end"] = t_end;
  meta["events"] = run.events;
  meta["event_rate"] = run.event_rate;
  meta["truncation_radius"] = run.truncation_radius;
  meta["snapshots"] = snap_meta;
  if (!series.empty()) files.emplace_back("series.csv", series_csv);
  files.emplace_back("forward.json", json_text(meta));
  return files;
}

Artifacts cmd_qv(const Json& config, const RunContext& ctx) {
  reject_unknown_keys(config, {"regime", "scaling", "qv", "seed"}, "config");
  const auto s = regime_setup(config);
  const auto& j = block(config, "qv", "");
  reject_unknown_keys(j, {"L", "cells", "times", "reps", "phi", "psi", "mutation"}, "qv");
  QvConfig cfg;
  cfg.L = number_or(j, "L", cfg.L, "qv");
  cfg.cells = static_cast<int>(j.contains("cells") ? integer(j, "cells", "qv") : cfg.cells);
  if (!j.contains("times")) throw ParamError("qv.times", "missing");
  cfg.times = grid_from(j.at("times"), "qv.times");
  for (std::size_t i = 0; i < cfg.times.size(); ++i)
    if (!(cfg.times[i] > 0.0) || (i > 0 && !(cfg.times[i] > cfg.times[i - 1])))
      throw ParamError("qv.times", "must be positive and increasing");
  cfg.mutation = j.value("mutation", true);
  const auto reps = integer(j, "reps", "qv");
  if (reps < 1) throw ParamError("qv.reps", "must be >= 1");
  if (!j.contains("phi")) throw ParamError("qv.phi", "missing");
  const auto phi = test_function_from_json(j.at("phi"), s.p.d, "qv.phi");
  const auto psi = j.contains("psi") ? type_function_from_json(j.at("psi"), "qv.psi") : type_indicator(0.0, 0.5);

  const auto res = empirical_qv(command_seed(ctx.seed, "qv"), s.p, s.sched, phi, psi, cfg, static_cast<int>(reps),
                                ctx.threads);
  const double var_psi = psi.second - psi.mean * psi.mean;
  const double target = q_pairing(s.dp, s.p.d, phi, var_psi);

  std::string csv = stem_csv(config, ctx.seed) + "t,qv,qv_ci_low,qv_ci_high,qv_over_t,target\n";
  Json rows = Json::array();
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const double t = res.times[i];
    const auto& q = res.qv[i];
    csv += csv_row({t, q.estimate, q.ci_low, q.ci_high, q.estimate / t, target});
    rows.push_back({{"t", t},
                    {"qv", q.estimate},
                    {"ci_low", q.ci_low},
                    {"ci_high", q.ci_high},
                    {"qv_over_t", q.estimate / t},
                    {"rel_err", (q.estimate / t - target) / target}});
  }
  Json out = header(config, ctx.seed);
  out["reps"] = reps;
  out["schedule"] = to_json(s.sched);
  out["q_pairing"] = target;
  out["checkpoints"] = rows;
  out["mean_events"] = res.mean_events;
  if (s.p.d == 1) out["prelimit_rate"] = prelimit_qv_rate(s.p, s.sched, phi, psi, cfg.L, cfg.cells);
  return {{"qv.csv", csv}, {"qv.json", json_text(out)}};
}

Artifacts cmd_gencheck(const Json& config, const RunContext& ctx) {
  reject_unknown_keys(config, {"regime", "gencheck", "seed"}, "config");
  const auto p = regime_from_json(block(config, "regime", ""));
  validate(p);
  if (p.d != 1) throw ParamError("regime.d", "gencheck is available in d = 1 only");
  const auto dp = derive_params(p);
  const auto& j = block(config, "gencheck", "");
  reject_unknown_keys(j, {"deltas", "x", "phi"}, "gencheck");
  if (!j.contains("deltas") || !j.contains("x")) throw ParamError("gencheck", "deltas and x are required");
  const auto deltas = grid_from(j.at("deltas"), "gencheck.deltas");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw ParamError("gencheck.deltas", "must be in (0,1)");
  const auto xs = grid_from(j.at("x"), "gencheck.x");
  const auto phi = j.contains("phi") ? test_function_from_json(j.at("phi"), 1, "gencheck.phi")
                                     : testfn::gaussian(1, Point{}, 2.0);
  const auto spec = make_kernel_spec(dp, 1);

  std::vector<double> target(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) target[i] = apply_D_alpha(spec, phi, Point{xs[i], 0.0, 0.0});
  std::string csv = stem_csv(config, ctx.seed) + "delta,x,L_N,D_alpha,abs_err\n";
  Json sweep = Json::array();
  std::vector<double> sups;
  for (double delta : deltas) {
    double sup = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double ln = apply_L_N(p, dp, delta, phi, Point{xs[i], 0.0, 0.0});
      const double err = std::abs(ln - target[i]);
      sup = std::max(sup, err);
      csv += csv_row({delta, xs[i], ln, target[i], err});
    }
    sups.push_back(sup);
    sweep.push_back({{"delta", delta}, {"sup_err", sup}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < sups.size(); ++i) decreasing = decreasing && sups[i] < sups[i - 1];
  Json out = header(config, ctx.seed);
  out["derived"] = to_json(dp);
  out["sweep"] = sweep;
  out["strictly_decreasing"] = decreasing;
  out["final_sup_err"] = sups.back();
  return {{"gencheck.csv", csv}, {"gencheck.json", json_text(out)}};
}

}  // namespace slfv
