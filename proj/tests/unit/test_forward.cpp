#include <doctest.h>

#include <cmath>
#include <vector>

#include "slfv/forward_sim.hpp"

using namespace slfv;

namespace {

RegimeParams one_tail(int d, double a, double b, double c, double u0 = 0.5, double mu = 0.2) {
  RegimeParams p;
  p.d = d;
  p.u0 = u0;
  p.mu = mu;
  p.tail = OneTail{a, b, c};
  return p;
}

ScalingSchedule schedule(const RegimeParams& p, double N, double delta) {
  return rescaled_rates(p, derive_params(p), N, delta);
}

ForwardEvent event_at(double x, double r2, double u, double pick, double y = -1.0) {
  ForwardEvent ev;
  ev.center = Point{x, 0, 0};
  ev.r1 = 0.1;
  ev.r2 = r2;
  ev.u = u;
  ev.parent = Point{y < 0 ? x : y, 0, 0};
  ev.pick = pick;
  ev.fresh = 0.25;
  return ev;
}

double torus_mean(const AlleleField& f) {
  double s = 0.0;
  for (std::int64_t c = 0; c < f.cell_count(); ++c) s += f.frequency(c);
  return s / f.cell_count();
}

}  // namespace

TEST_CASE("field construction") {
  AlleleField a(FieldMode::TwoAllele, 1, 10.0, 40, FieldInit::constant(0.3));
  for (std::int64_t c = 0; c < a.cell_count(); ++c) CHECK(a.frequency(c) == 0.3);

  AlleleField b(FieldMode::TwoAllele, 2, 10.0, 40, FieldInit::ball(Point{5, 5, 0}, 2.0));
  for (std::int64_t c = 0; c < b.cell_count(); ++c) {
    Point x = b.cell_center(c);
    double r = std::hypot(x[0] - 5.0, x[1] - 5.0);
    CHECK(b.frequency(c) == (r < 2.0 ? 0.0 : 1.0));
  }

  AlleleField u(FieldMode::Atomic, 1, 10.0, 16, FieldInit::uniform());
  for (std::int64_t c = 0; c < u.cell_count(); ++c) {
    CHECK(u.atom_count(c) == 0);
    CHECK(u.background_weight(c) == 1.0);
  }

  CHECK_THROWS(AlleleField(FieldMode::TwoAllele, 1, 10.0, 40, FieldInit::ball(Point{}, 6.0)));
  CHECK_THROWS(AlleleField(FieldMode::TwoAllele, 1, 10.0, 4, FieldInit::constant(0.5)));
  CHECK_THROWS(AlleleField(FieldMode::Atomic, 1, 10.0, 16, FieldInit::constant(0.5)));
  CHECK_THROWS(AlleleField(FieldMode::TwoAllele, 4, 10.0, 16, FieldInit::constant(0.5)));
}

TEST_CASE("covered cells agree with brute-force torus distance") {
  RngStream rng(4);
  for (int d = 1; d <= 3; ++d) {
    const int n = d == 3 ? 12 : 24;
    const double L = 6.0;
    for (int trial = 0; trial < 60; ++trial) {
      AlleleField f(FieldMode::TwoAllele, d, L, n, FieldInit::constant(0.5));
      ForwardEvent ev;
      for (int k = 0; k < d; ++k) ev.center[k] = L * rng.uniform();
      ev.parent = ev.center;
      ev.r2 = L / 2.0 * rng.uniform();
      ev.u = 1.0;
      ev.pick = 0.0;  // parent type 1
      auto eff = f.apply_event(ev);
      std::int64_t expect = 0;
      for (std::int64_t c = 0; c < f.cell_count(); ++c) {
        Point x = f.cell_center(c);
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          double dx = std::remainder(x[k] - ev.center[k], L);
          s += dx * dx;
        }
        bool in = s < ev.r2 * ev.r2;
        expect += in;
        CHECK(f.frequency(c) == (in ? 1.0 : 0.5));
      }
      CHECK(eff.cells == expect);
    }
  }
}

TEST_CASE("two-allele event arithmetic") {
  AlleleField f(FieldMode::TwoAllele, 1, 10.0, 100, FieldInit::constant(0.5));
  auto eff = f.apply_event(event_at(5.0, 1.0, 0.3, 0.2));  // pick < 0.5: type 1
  CHECK(eff.parent_type == 1.0);
  CHECK(eff.cells == 20);
  CHECK(f.frequency(f.cell_of(Point{5.0, 0, 0})) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(f.frequency(f.cell_of(Point{7.0, 0, 0})) == 0.5);

  f.apply_event(event_at(5.0, 1.0, 1.0, 0.99));  // pick >= 0.65: type 0
  CHECK(f.frequency(f.cell_of(Point{5.0, 0, 0})) == 0.0);
  CHECK(f.frequency(f.cell_of(Point{4.1, 0, 0})) == 0.0);
  CHECK_THROWS(f.apply_event(event_at(5.0, 6.0, 0.5, 0.5)));
  CHECK_THROWS(f.apply_event(event_at(5.0, 1.0, 0.0, 0.5)));
}

TEST_CASE("torus mean is a martingale across events") {
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  auto s = schedule(p, 10, 0.5);
  auto src = make_event_source(p, s, 20.0);
  RngStream rng(8);
  AlleleField f(FieldMode::TwoAllele, 1, 20.0, 200, FieldInit::constant(0.5));
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double before = torus_mean(f);
    f.apply_event(draw_event(rng, src, i));
    double dm = torus_mean(f) - before;
    sum += dm;
    sq += dm * dm;
  }
  double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("frequencies stay in [0,1]") {
  auto p = one_tail(1, 1.2, 2.0, 0.0, 0.9);
  auto s = schedule(p, 1, 0.25);
  auto src = make_event_source(p, s, 8.0);
  RngStream rng(2);
  AlleleField f(FieldMode::TwoAllele, 1, 8.0, 32, FieldInit::ball(Point{4, 0, 0}, 2.0));
  for (int i = 0; i < 1000000; ++i) f.apply_event(draw_event(rng, src, i));
  for (std::int64_t c = 0; c < f.cell_count(); ++c) {
    CHECK(f.frequency(c) >= 0.0);
    CHECK(f.frequency(c) <= 1.0);
  }
}

TEST_CASE("atomic cells stay probability measures") {
  auto p = one_tail(1, 1.5, 0.5, 0.3, 0.5, 0.5);
  auto s = schedule(p, 50, 0.2);
  RngStream rng(6);
  AlleleField f(FieldMode::Atomic, 1, 8.0, 64, FieldInit::uniform(), p.mu);
  auto run = run_forward(rng, f, p, s, 0.3);
  CHECK(run.events > 1000);
  std::size_t atoms = 0;
  for (std::int64_t c = 0; c < f.cell_count(); ++c) {
    CHECK(std::abs(f.total_weight(c) - 1.0) < 1e-9);
    CHECK(f.background_weight(c) >= 0.0);
    for (auto [k, w] : f.atoms(c)) {
      CHECK(k >= 0.0);
      CHECK(k <= 1.0);
      CHECK(w > 0.0);
    }
    atoms += f.atom_count(c);
  }
  CHECK(atoms > 0);
}

TEST_CASE("atomic events: weights, parent draw and lazy mutation") {
  AlleleField f(FieldMode::Atomic, 1, 10.0, 100, FieldInit::uniform(), 0.7);
  // fresh type from the background
  auto eff = f.apply_event(event_at(5.0, 0.5, 0.4, 0.1));
  CHECK(eff.parent_type == 0.25);
  const auto c = f.cell_of(Point{5.0, 0, 0});
  auto a = f.atoms(c);
  REQUIRE(a.size() == 1);
  CHECK(a[0].second == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(f.background_weight(c) == doctest::Approx(0.6).epsilon(1e-14));

  // mutation decays the atom toward the background between events
  f.advance_to(1.0);
  a = f.atoms(c);
  CHECK(a[0].second == doctest::Approx(0.4 * std::exp(-0.7)).epsilon(1e-13));
  CHECK(f.total_weight(c) == doctest::Approx(1.0).epsilon(1e-14));

  // a pick past the background lands on the atom
  ForwardEvent ev = event_at(5.0, 0.5, 1.0, 0.999);
  ev.time = 1.0;
  eff = f.apply_event(ev);
  CHECK(eff.parent_type == 0.25);
  a = f.atoms(c);
  REQUIRE(a.size() == 1);
  CHECK(a[0].second == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.background_weight(c) < 1e-14);
}

TEST_CASE("fluctuation projection") {
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  auto s = schedule(p, 100, 0.2);
  auto phi = testfn::smooth_bump(5.0, 2.0);
  auto psi = type_indicator(0.0, 0.5);
  AlleleField f(FieldMode::Atomic, 1, 10.0, 200, FieldInit::uniform());
  CHECK(fluctuation_projection(f, s, phi, psi) == 0.0);

  // one event: jump = sqrt(N eta) u (psi(k0) - int psi) sum_B h phi
  f.track(phi, psi);
  auto ev = event_at(4.5, 0.8, 0.3, 0.5);
  ev.fresh = 0.1;
  auto eff = f.apply_event(ev);
  double sum_b = 0.0;
  for (std::int64_t c = 0; c < f.cell_count(); ++c) {
    double x = f.cell_center(c)[0];
    if (std::abs(x - 4.5) < 0.8) sum_b += f.cell_width() * phi(x);
  }
  double expect = std::sqrt(s.N * s.etaN) * 0.3 * (1.0 - 0.5) * sum_b;
  CHECK(fluctuation_projection(f, s, phi, psi) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::sqrt(s.N * s.etaN) * eff.projection_jump == doctest::Approx(expect).epsilon(1e-12));
  CHECK(fluctuation_projection(f, s, phi, type_constant(1.0)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  AlleleField g(FieldMode::TwoAllele, 1, 10.0, 200, FieldInit::constant(1.0));
  CHECK(fluctuation_projection(g, s, phi, type_constant(1.0)) == 0.0);
  CHECK_THROWS(fluctuation_projection(g, s, phi, psi));
}

TEST_CASE("tracked projection jumps match recomputation under a random stream") {
  auto p = one_tail(1, 1.5, 1.0, 0.2, 0.5, 0.3);
  auto s = schedule(p, 20, 0.3);
  auto phi = testfn::smooth_bump(4.0, 1.5);
  auto psi = type_indicator(0.2, 0.7);
  RngStream rng(12);
  AlleleField f(FieldMode::Atomic, 1, 8.0, 64, FieldInit::uniform(), p.mu);
  f.track(phi, psi);
  double acc = 0.0;
  // mutation moves the projection between events, so compare event by event
  auto src = make_event_source(p, s, 8.0);
  double t = 0.0;
  for (int i = 0; i < 3000; ++i) {
    t += rng.exponential(src.rate);
    f.advance_to(t);
    double before = fluctuation_projection(f, s, phi, psi);
    auto eff = f.apply_event(draw_event(rng, src, t));
    double after = fluctuation_projection(f, s, phi, psi);
    acc = std::max(acc, std::abs(std::sqrt(s.N * s.etaN) * eff.projection_jump - (after - before)));
  }
  CHECK(acc < 1e-9);
}

TEST_CASE("event counts are Poisson") {
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  auto s = schedule(p, 10, 0.5);
  const double T = 0.05;
  auto src = make_event_source(p, s, 10.0);
  const int runs = 2000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < runs; ++i) {
    RngStream rng(mix_seed(77, i));
    AlleleField f(FieldMode::TwoAllele, 1, 10.0, 16, FieldInit::constant(0.5));
    double n = static_cast<double>(run_forward(rng, f, p, s, T).events);
    sum += n;
    sq += n * n;
  }
  double mean = sum / runs, var = (sq - sum * sum / runs) / (runs - 1);
  double expect = src.rate * T;
  CAPTURE(mean);
  CAPTURE(expect);
  CHECK(std::abs(mean - expect) < 4.0 * std::sqrt(expect / runs));
  CHECK(var / mean > 0.9);
  CHECK(var / mean < 1.1);
}

TEST_CASE("degenerate runs and observers") {
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  // torus too small for any radius >= 1 unrescaled
  auto s = schedule(p, 10, 0.5);
  RngStream rng(1);
  AlleleField f(FieldMode::TwoAllele, 1, 0.8, 8, FieldInit::constant(0.4));
  std::vector<double> seen;
  Observer obs{{0.5, 1.0, 3.0}, [&](const AlleleField& g, double t) {
                 seen.push_back(t);
                 CHECK(g.time() == t);
               }};
  auto run = run_forward(rng, f, p, s, 2.0, {obs});
  CHECK(run.events == 0);
  CHECK(run.event_rate == 0.0);
  CHECK(seen == std::vector<double>{0.5, 1.0});
  for (std::int64_t c = 0; c < f.cell_count(); ++c) CHECK(f.frequency(c) == 0.4);

  AlleleField g(FieldMode::TwoAllele, 1, 10.0, 16, FieldInit::constant(0.4));
  run = run_forward(rng, g, p, s, 0.0, {obs});
  CHECK(run.events == 0);
}

TEST_CASE("torus mean has no drift over runs") {
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  auto s = schedule(p, 5, 0.5);
  const int runs = 200;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < runs; ++i) {
    RngStream rng(mix_seed(91, i));
    AlleleField f(FieldMode::TwoAllele, 1, 10.0, 64, FieldInit::ball(Point{5, 0, 0}, 2.5));
    double m0 = torus_mean(f);
    run_forward(rng, f, p, s, 0.5);
    double dm = torus_mean(f) - m0;
    sum += dm;
    sq += dm * dm;
  }
  double mean = sum / runs, se = std::sqrt((sq / runs - mean * mean) / runs);
  CHECK(se > 0.0);
  CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("translation equivariance on the torus") {
  auto p = one_tail(2, 1.5, 0.5, 0.0, 0.5);
  auto s = schedule(p, 2, 0.25);
  const double L = 16.0;
  const int n = 64;
  const double h = L / n;
  auto src = make_event_source(p, s, L);
  AlleleField a(FieldMode::TwoAllele, 2, L, n, FieldInit::ball(Point{6, 7, 0}, 3.0));
  AlleleField b(FieldMode::TwoAllele, 2, L, n, FieldInit::ball(Point{6 + h, 7, 0}, 3.0));
  RngStream rng(21);
  for (int i = 0; i < 20000; ++i) {
    ForwardEvent ev = draw_event(rng, src, i);
    a.apply_event(ev);
    ev.center[0] += h;
    ev.parent[0] += h;
    b.apply_event(ev);
  }
  int mismatches = 0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      mismatches += a.frequency(ix + n * iy) != b.frequency((ix + 1) % n + n * iy);
  CHECK(mismatches == 0);
}

TEST_CASE("empirical quadratic variation") {
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  auto s = schedule(p, 100, std::pow(100.0, -1.0 / 3.0));
  auto phi = testfn::smooth_bump(10.0, 4.0);
  auto psi = type_indicator(0.0, 0.5);
  QvConfig cfg;
  cfg.L = 20.0;
  cfg.cells = 400;
  cfg.times = {0.05, 0.1};

  // short horizon: the field is still close to lambda
  auto r = empirical_qv(5, p, s, phi, psi, cfg, 12);
  double rate = prelimit_qv_rate(p, s, phi, psi, cfg.L, cfg.cells);
  CAPTURE(rate);
  CAPTURE(r.qv[1].estimate / 0.1);
  CHECK(std::abs(r.qv[1].estimate / 0.1 - rate) < 4.0 * r.qv[1].se / 0.1 + 0.03 * rate);

  auto zero = empirical_qv(5, p, s, phi, type_constant(1.0), cfg, 2);
  CHECK(zero.qv[1].estimate == doctest::Approx(0.0).scale(1.0).epsilon(1e-20));
  QvConfig tiny = cfg;
  tiny.L = 0.4;
  tiny.cells = 8;
  CHECK(empirical_qv(5, p, s, phi, psi, tiny, 2).qv[1].estimate == 0.0);

  auto r2 = empirical_qv(5, p, s, phi, psi, cfg, 12, 3);
  for (std::size_t k = 0; k < cfg.times.size(); ++k) CHECK(r.qv[k].estimate == r2.qv[k].estimate);
  CHECK_THROWS(empirical_qv(5, p, s, phi, psi, QvConfig{20.0, 400, {}, true}, 2));
}

TEST_CASE("truncation sensitivity of the quadratic variation") {
  // same cell width and window, torus doubled
  auto p = one_tail(1, 1.5, 1.0, 0.0);
  auto s = schedule(p, 100, std::pow(100.0, -1.0 / 3.0));
  auto phi = testfn::smooth_bump(10.0, 4.0);
  auto psi = type_indicator(0.0, 0.5);
  QvConfig small{20.0, 400, {0.2}, true}, big{40.0, 800, {0.2}, true};
  auto a = empirical_qv(31, p, s, phi, psi, small, 8);
  auto b = empirical_qv(32, p, s, phi, psi, big, 8);
  double half = 0.5 * (a.qv[0].ci_high - a.qv[0].ci_low);
  CAPTURE(a.qv[0].estimate);
  CAPTURE(b.qv[0].estimate);
  CHECK(std::abs(a.qv[0].estimate - b.qv[0].estimate) < half);
}
