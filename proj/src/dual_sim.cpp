#include "slfv/dual_sim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slfv/json_io.hpp"
#include "slfv/parallel.hpp"

namespace slfv {

const char* to_string(PairStatus s) {
  switch (s) {
    case PairStatus::BothAlive: return "survived";
    case PairStatus::Coalesced: return "coal";
    case PairStatus::Killed: return "killed";
  }
  return "?";
}

DualModel make_dual_model(const RegimeParams& p, const ScalingSchedule& sched) {
  validate(p);
  if (p.d > kMaxDim) throw std::invalid_argument("dual simulation supports d = 1..3");
  DualModel m;
  m.p = p;
  m.sched = sched;
  m.lineage_rate = lineage_jump_rate(p) * sched.uN / p.u0;
  m.kill_rate = sched.muN;
  return m;
}

RadiusPair sample_radius_pair(RngStream& rng, const RegimeParams& p) {
  RadiusPair r;
  if (const auto* t = std::get_if<OneTail>(&p.tail)) {
    r.r2 = std::pow(rng.uniform_pos(), -1.0 / t->a);
    r.r1 = t->b == 0.0 ? 1.0 : std::pow(r.r2, t->b);
    return r;
  }
  const auto& t = std::get<TwoTails>(p.tail);
  r.r1 = std::pow(rng.uniform_pos(), -1.0 / t.a1);
  r.r2 = std::pow(rng.uniform_pos(), -1.0 / t.a2);
  return r;
}

double pair_event_rate(const RegimeParams& p, const ScalingSchedule& sched, double h) {
  if (h < 0.0) throw std::invalid_argument("pair_event_rate: h must be >= 0");
  return 2.0 * make_dual_model(p, sched).lineage_rate * sched.time_factor;
}

double coincident_coalescence_rate(const RegimeParams& p, const ScalingSchedule& sched) {
  validate(p);
  // int u^2 V_{r2} nu: both lineages covered, both marked
  const double v1 = unit_ball_volume(p.d);
  double j = 0.0;
  if (const auto* t = std::get_if<OneTail>(&p.tail))
    j = 1.0 / (t->a + t->c);
  else {
    const auto& tt = std::get<TwoTails>(p.tail);
    j = 1.0 / ((tt.a1 + tt.c1) * (tt.a2 + tt.c2));
  }
  return sched.uN * sched.uN * v1 * j * sched.time_factor;
}

DualPairState step_pair(RngStream& rng, const DualPairState& state, const DualModel& model, double horizon) {
  if (state.status != PairStatus::BothAlive) throw std::logic_error("step_pair: pair already terminal");
  DualPairState s = state;
  const int d = model.p.d;
  const double event_total = 2.0 * model.lineage_rate;
  const double total = event_total + 2.0 * model.kill_rate;
  if (total <= 0.0) {
    s.clock = std::max(s.clock, horizon);
    return s;
  }
  for (;;) {
    double dt = rng.exponential(total);
    if (s.clock + dt > horizon) {
      s.clock = horizon;
      return s;
    }
    s.clock += dt;
    if (rng.uniform() * total >= event_total) {
      s.status = PairStatus::Killed;
      return s;
    }
    // proposer i is marked by construction; j is marked if covered, w.p. u
    const int i = (rng.uniform() < 0.5) ? 1 : 0;
    Point& xi = i == 0 ? s.x1 : s.x2;
    Point& xj = i == 0 ? s.x2 : s.x1;
    RadiusPair r = sample_radius_pair(rng, model.p);
    double u = event_impact(model.p, model.sched.uN, r.r1, r.r2);
    Point center = sample_uniform_ball(rng, d, xi, r.r2);
    bool j_marked = distance(center, xj, d) < r.r2 && rng.uniform() < u;
    // an event marking both is proposed by either lineage: keep half
    if (j_marked && (rng.uniform() < 0.5)) continue;
    Point parent = sample_uniform_ball(rng, d, center, r.r1);
    s.last = EventDraw{r.r1, r.r2, u, center, parent, distance(s.x1, s.x2, d), j_marked ? 2 : 1};
    ++s.events;
    if (j_marked) {
      s.x1 = s.x2 = parent;
      s.status = PairStatus::Coalesced;
      return s;
    }
    xi = parent;
    ++s.relocations[i];
    return s;
  }
}

DualPairState run_pair(RngStream& rng, const Point& x1, const Point& x2, double t_max, const DualModel& model) {
  DualPairState s;
  s.x1 = x1;
  s.x2 = x2;
  const double horizon = t_max * model.sched.time_factor;
  while (s.status == PairStatus::BothAlive && s.clock < horizon) s = step_pair(rng, s, model, horizon);
  return s;
}

EstimateWithCI binomial_estimate(std::int64_t k, std::int64_t n, double scale) {
  if (n <= 0) throw std::invalid_argument("binomial_estimate: need n >= 1");
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double mid = (ph + z * z / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn));
  EstimateWithCI e;
  e.estimate = scale * ph;
  e.ci_low = k == 0 ? 0.0 : scale * std::max(0.0, mid - half);
  e.ci_high = k == n ? scale : scale * std::min(1.0, mid + half);
  e.se = scale * std::sqrt(ph * (1.0 - ph) / nn);
  e.reps = n;
  e.successes = k;
  return e;
}

PointSampler uniform_block_sampler(int d, const Point& center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("uniform block: width must be > 0");
  return [=](RngStream& rng) {
    Point p = center;
    for (int i = 0; i < d; ++i) p[i] += width * (rng.uniform() - 0.5);
    return p;
  };
}

PointSampler gaussian_sampler(int d, const Point& center, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("gaussian sampler: sd must be > 0");
  return [=](RngStream& rng) {
    Point p = center;
    for (int i = 0; i < d; ++i) p[i] += sd * rng.normal();
    return p;
  };
}

IbdRun estimate_ibd(std::uint64_t seed, const PointSampler& phi, const PointSampler& psi, double t,
                    const RegimeParams& p, const ScalingSchedule& sched, std::int64_t reps, int threads,
                    bool keep_records) {
  if (reps <= 0) throw std::invalid_argument("estimate_ibd: reps must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("estimate_ibd: horizon must be > 0");
  const DualModel model = make_dual_model(p, sched);
  std::vector<ReplicateRecord> rec(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](std::int64_t i) {
    RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    Point a = phi(rng), b = psi(rng);
    for (int k = 0; k < p.d; ++k) {
      a[k] *= sched.space_factor;
      b[k] *= sched.space_factor;
    }
    DualPairState s = run_pair(rng, a, b, t, model);
    rec[i] = ReplicateRecord{i, s.status, s.clock / sched.time_factor, s.events};
  });
  std::int64_t k = 0;
  for (const auto& r : rec) k += r.outcome == PairStatus::Coalesced;
  IbdRun out;
  out.estimate = binomial_estimate(k, reps, sched.N * sched.etaN);
  if (keep_records) out.records = std::move(rec);
  return out;
}

HazardEstimate estimate_coincident_hazard(std::uint64_t seed, const RegimeParams& p,
                                          const ScalingSchedule& sched, std::int64_t reps, int threads) {
  if (reps <= 0) throw std::invalid_argument("hazard: reps must be >= 1");
  const DualModel model = make_dual_model(p, sched);
  std::vector<double> exposure(static_cast<std::size_t>(reps));
  std::vector<unsigned char> merged(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](std::int64_t i) {
    RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    DualPairState s;
    s = step_pair(rng, s, model);
    exposure[i] = s.clock / sched.time_factor;
    merged[i] = s.status == PairStatus::Coalesced;
  });
  HazardEstimate h;
  h.reps = reps;
  for (std::int64_t i = 0; i < reps; ++i) {
    h.exposure += exposure[i];
    h.merges += merged[i];
  }
  h.rate = h.merges / h.exposure;
  h.se = std::sqrt(static_cast<double>(h.merges)) / h.exposure;
  return h;
}

std::string replicate_csv(const std::vector<ReplicateRecord>& records) {
  std::ostringstream os;
  os << "rep,outcome,coal_time,n_events\n";
  for (const auto& r : records) {
    os << r.rep << ',' << to_string(r.outcome) << ',';
    if (r.outcome == PairStatus::Coalesced) os << format_double(r.end_time);
    os << ',' << r.events << '\n';
  }
  return os.str();
}

}  // namespace slfv
