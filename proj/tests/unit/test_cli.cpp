#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "slfv/commands.hpp"
#include "slfv/geometry.hpp"

using namespace slfv;

namespace {

Json load(const std::string& name) {
  std::ifstream in(std::string(SLFV_TEST_DATA) + "/" + name);
  REQUIRE(in.good());
  return Json::parse(in);
}

const std::string& file(const Artifacts& a, const std::string& name) {
  for (const auto& [n, text] : a)
    if (n == name) return text;
  FAIL("missing artifact " << name);
  static std::string none;
  return none;
}

Json one_tail_regime(int d, double a, double b, double c) {
  return {{"kind", "OneTail"}, {"d", d}, {"u0", 0.5}, {"mu", 0.2}, {"a", a}, {"b", b}, {"c", c}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config hash ignores the seed and nothing else") {
  Json a = {{"regime", one_tail_regime(1, 1.5, 1, 0)}, {"seed", 3}};
  Json b = a;
  b["seed"] = 4;
  CHECK(config_hash(a) == config_hash(b));
  b["regime"]["u0"] = 0.25;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  std::uint64_t flag = 9;
  CHECK(resolve_seed(a, &flag) == 9);
  CHECK(resolve_seed(a, nullptr) == 3);
  CHECK(resolve_seed(Json::object(), nullptr) == 1);
  CHECK_THROWS_AS(resolve_seed(Json{{"seed", -1}}, nullptr), ParamError);
}

TEST_CASE("params: worked example, boundary error, two tails with a1 = a2") {
  auto cfg = load("params_example.json");
  RunContext ctx{7, 1};
  auto out = Json::parse(file(cmd_params(cfg, ctx), "params.json"));
  CHECK(out["derived"]["alpha"].get<double>() == 1.5);
  CHECK(std::abs(out["derived"]["beta"].get<double>() - 2.2) < 1e-12);
  CHECK(out["derived"]["coalescence"] == "Local");
  CHECK(out["seed"] == 7);
  CHECK(out["config_hash"] == hex64(config_hash(cfg)));
  CHECK(out["schedule"]["theta"].get<double>() == 0.3);
  CHECK(out.contains("validity"));

  try {
    cmd_params(load("params_boundary.json"), ctx);
    FAIL("boundary config accepted");
  } catch (const ParamError& e) {
    auto err = error_json(e);
    CHECK(err["error"]["field"] == "a");
    CHECK(err["error"]["message"].get<std::string>().find("boundary") != std::string::npos);
  }

  Json two = {{"regime", {{"kind", "TwoTails"}, {"d", 1}, {"u0", 0.5}, {"mu", 0.2},
                          {"a1", 1.5}, {"a2", 1.5}, {"c1", 0.1}, {"c2", 0.0}}}};
  auto t = Json::parse(file(cmd_params(two, ctx), "params.json"));
  const double zeta = 0.5 * unit_ball_volume(1) * (1.0 / 1.5 + 1.0 / 1.5);
  CHECK(std::abs(t["derived"]["zeta"].get<double>() - zeta) < 1e-12);
  CHECK(!t.contains("schedule"));

  Json extra = cfg;
  extra["bogus"] = 1;
  CHECK_THROWS_AS(cmd_params(extra, ctx), std::exception);
  Json both = cfg;
  both["scaling"]["delta"] = 0.1;
  CHECK_THROWS_AS(cmd_params(both, ctx), ParamError);
}

TEST_CASE("wmf: presets, single point, zero rejected, mu steepens") {
  RunContext ctx;
  auto a = cmd_wmf(Json{{"wmf", {{"preset", "four-curves-d2"}}}}, ctx);
  auto rows = lines(file(a, "wmf.csv"));
  CHECK(rows[0].rfind("# config_hash=", 0) == 0);
  CHECK(rows[1] == "r,red,blue,purple,grey");
  CHECK(rows.size() == 22);
  auto meta = Json::parse(file(a, "wmf.json"));
  REQUIRE(meta["superposed"].size() == 1);
  CHECK(meta["superposed"][0] == Json::array({"purple", "grey"}));

  Json one = {{"wmf", {{"d", 1}, {"mu", 0.2}, {"r", {1.0}}, {"sets", {{{"alpha", 1.5}, {"beta", 1.5}}}}}}};
  CHECK(lines(file(cmd_wmf(one, ctx), "wmf.csv")).size() == 3);

  Json zero = one;
  zero["wmf"]["r"] = {{"from", 0.0}, {"to", 2.0}, {"count", 5}};
  try {
    cmd_wmf(zero, ctx);
    FAIL("r = 0 accepted");
  } catch (const ParamError& e) {
    CHECK(std::string(e.field()) == "wmf.r");
  }

  // F(r)/F(3) falls faster for larger mu
  std::vector<WmfCurve> c{{"x", {}}};
  c[0].dp.alpha = 1.5;
  c[0].dp.beta = 1.5;
  c[0].dp.gamma = 1.0;
  c[0].dp.zeta = 1.0;
  std::vector<double> r{4.0, 6.0, 8.0};
  auto slow = wmf_table(c, 1, 0.2, r, 3.0);
  auto fast = wmf_table(c, 1, 0.4, r, 3.0);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(fast[i][0] < slow[i][0]);
}

TEST_CASE("dual: summary fields, replicate log, thread independence") {
  auto cfg = load("dual_small.json");
  auto a = cmd_dual(cfg, RunContext{11, 1});
  auto b = cmd_dual(cfg, RunContext{11, 3});
  REQUIRE(a.size() == 2);
  CHECK(a == b);
  auto j = Json::parse(file(a, "dual.json"));
  CHECK(j["reps"] == 5000);
  CHECK(j["seed"] == 11);
  CHECK(j.contains("formula"));
  CHECK(j.contains("z"));
  CHECK(j["ci_low"].get<double>() <= j["estimate"].get<double>());
  auto rep = lines(file(a, "replicates.csv"));
  CHECK(rep.size() == 5002);
  CHECK(rep[1] == "rep,outcome,coal_time,n_events");
  auto c = cmd_dual(cfg, RunContext{12, 1});
  CHECK(file(c, "dual.json") != file(a, "dual.json"));
}

TEST_CASE("forward: snapshots, zero duration, presets") {
  auto cfg = load("forward_small.json");
  auto a = cmd_forward(cfg, RunContext{3, 1});
  CHECK(a == cmd_forward(cfg, RunContext{3, 4}));
  auto meta = Json::parse(file(a, "forward.json"));
  CHECK(meta["snapshots"].size() == 3);
  CHECK(meta["events"].get<std::int64_t>() > 0);
  auto snap = lines(file(a, "snapshot_002.csv"));
  CHECK(snap.size() == 3 + 40 * 40);
  CHECK(snap[2] == "cell,x,y,w");
  CHECK(lines(file(a, "series.csv")).size() == 5);

  Json zero = cfg;
  zero["forward"]["t_end"] = 0.0;
  auto z = cmd_forward(zero, RunContext{3, 1});
  CHECK(z.size() == 2);
  auto zm = Json::parse(file(z, "forward.json"));
  CHECK(zm["events"] == 0);
  CHECK(zm["snapshots"].size() == 1);

  // alpha = 1.3 through a/b for b = 2 and through a for b = 0.5
  for (const char* preset : {"two-allele-b2", "two-allele-b0.5"}) {
    Json p = {{"forward", {{"preset", preset}, {"t_end", 0.0}, {"cells", 20}}}};
    auto m = Json::parse(file(cmd_forward(p, RunContext{}), "forward.json"));
    CHECK(std::abs(m["derived"]["alpha"].get<double>() - 1.3) < 1e-12);
  }
}

TEST_CASE("qv and gencheck reports") {
  Json q = {{"regime", one_tail_regime(1, 1.5, 1, 0)},
            {"scaling", {{"N", 100}, {"delta", 0.25}}},
            {"qv", {{"L", 10}, {"cells", 100}, {"times", {0.2, 0.4}}, {"reps", 2},
                    {"phi", {{"kind", "bump"}, {"center", 5}, {"radius", 2}}}}}};
  auto a = cmd_qv(q, RunContext{5, 1});
  CHECK(a == cmd_qv(q, RunContext{5, 2}));
  auto j = Json::parse(file(a, "qv.json"));
  CHECK(j["checkpoints"].size() == 2);
  CHECK(j["q_pairing"].get<double>() > 0.0);
  CHECK(j.contains("prelimit_rate"));

  Json g = {{"regime", one_tail_regime(1, 1.5, 0, 0)},
            {"gencheck", {{"deltas", {0.2, 0.1}}, {"x", {{"from", -1}, {"to", 1}, {"count", 3}}}}}};
  auto ga = cmd_gencheck(g, RunContext{});
  CHECK(lines(file(ga, "gencheck.csv")).size() == 2 + 6);
  CHECK(Json::parse(file(ga, "gencheck.json"))["strictly_decreasing"] == true);
  g["regime"]["d"] = 2;
  CHECK_THROWS_AS(cmd_gencheck(g, RunContext{}), ParamError);
}
