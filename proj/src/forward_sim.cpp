#include "slfv/forward_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slfv/json_io.hpp"
#include "slfv/parallel.hpp"

namespace slfv {

const char* to_string(FieldMode m) { return m == FieldMode::TwoAllele ? "TwoAllele" : "Atomic"; }

TypeFunction type_indicator(double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw std::invalid_argument("type_indicator: need 0 <= lo < hi <= 1");
  return {[=](double k) { return k >= lo && k < hi ? 1.0 : 0.0; }, hi - lo, hi - lo};
}

TypeFunction type_constant(double c) {
  return {[=](double) { return c; }, c, c * c};
}

TypeFunction type_identity() {
  return {[](double k) { return k; }, 0.5, 1.0 / 3.0};
}

AlleleField::AlleleField(FieldMode mode, int d, double L, int n, const FieldInit& init, double mu)
    : mode_(mode), d_(d), L_(L), n_(n), mu_(mu) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("field: d must be 1..3");
  if (!(L > 0.0)) throw std::invalid_argument("field: L must be > 0");
  if (n < 8) throw std::invalid_argument("field: need at least 8 cells per axis");
  if (!(mu >= 0.0)) throw std::invalid_argument("field: mutation rate must be >= 0");
  h_ = L / n;
  cell_volume_ = std::pow(h_, d);
  ncell_ = 1;
  for (int i = 0; i < d; ++i) ncell_ *= n;

  if (mode == FieldMode::Atomic) {
    if (init.kind != FieldInit::Kind::UniformLebesgue)
      throw std::invalid_argument("field: Atomic mode starts from the uniform background");
    cells_.resize(static_cast<std::size_t>(ncell_));
    return;
  }
  switch (init.kind) {
    case FieldInit::Kind::UniformLebesgue:
      throw std::invalid_argument("field: TwoAllele mode needs a ball or constant start");
    case FieldInit::Kind::ConstantFrequency:
      if (!(init.w >= 0.0 && init.w <= 1.0)) throw std::invalid_argument("field: frequency must be in [0,1]");
      w_.assign(static_cast<std::size_t>(ncell_), init.w);
      break;
    case FieldInit::Kind::TwoAlleleBall: {
      if (!(init.radius > 0.0) || init.radius > L / 2.0)
        throw std::invalid_argument("field: ball radius must be in (0, L/2]");
      w_.assign(static_cast<std::size_t>(ncell_), 1.0);
      for_each_covered(init.center, init.radius, [&](std::int64_t c) { w_[c] = 0.0; });
      break;
    }
  }
}

Point AlleleField::cell_center(std::int64_t c) const {
  Point x{};
  for (int k = 0; k < d_; ++k) {
    x[k] = (static_cast<double>(c % n_) + 0.5) * h_;
    c /= n_;
  }
  return x;
}

std::int64_t AlleleField::cell_of(const Point& x) const {
  std::int64_t c = 0, stride = 1;
  for (int k = 0; k < d_; ++k) {
    double y = x[k] - L_ * std::floor(x[k] / L_);
    auto i = static_cast<std::int64_t>(y / h_);
    i = std::clamp<std::int64_t>(i, 0, n_ - 1);
    c += i * stride;
    stride *= n_;
  }
  return c;
}

// Cells whose center lies in the open torus ball B(center, r), r <= L/2.
template <class F>
void AlleleField::for_each_covered(const Point& center, double r, F&& f) const {
  std::int64_t lo[kMaxDim] = {0, 0, 0}, cnt[kMaxDim] = {1, 1, 1};
  for (int k = 0; k < d_; ++k) {
    lo[k] = static_cast<std::int64_t>(std::ceil((center[k] - r) / h_ - 0.5));
    std::int64_t hi = static_cast<std::int64_t>(std::floor((center[k] + r) / h_ - 0.5));
    cnt[k] = std::min<std::int64_t>(std::max<std::int64_t>(hi - lo[k] + 1, 0), n_);
  }
  const double r2 = r * r;
  auto wrap = [&](std::int64_t i) { return ((i % n_) + n_) % n_; };
  auto offset = [&](int k, std::int64_t i) { return std::remainder((i + 0.5) * h_ - center[k], L_); };
  for (std::int64_t a = 0; a < cnt[0]; ++a) {
    double dx = offset(0, lo[0] + a);
    double s0 = dx * dx;
    if (s0 >= r2) continue;
    std::int64_t ia = wrap(lo[0] + a);
    if (d_ == 1) {
      f(ia);
      continue;
    }
    for (std::int64_t b = 0; b < cnt[1]; ++b) {
      double dy = offset(1, lo[1] + b);
      double s1 = s0 + dy * dy;
      if (s1 >= r2) continue;
      std::int64_t ib = ia + n_ * wrap(lo[1] + b);
      if (d_ == 2) {
        f(ib);
        continue;
      }
      for (std::int64_t e = 0; e < cnt[2]; ++e) {
        double dz = offset(2, lo[2] + e);
        if (s1 + dz * dz >= r2) continue;
        f(ib + static_cast<std::int64_t>(n_) * n_ * wrap(lo[2] + e));
      }
    }
  }
}

void AlleleField::track(const TestFunction& phi, const TypeFunction& psi) {
  tracking_ = true;
  psi_ = psi;
  phi_weight_.resize(static_cast<std::size_t>(ncell_));
  for (std::int64_t c = 0; c < ncell_; ++c) phi_weight_[c] = cell_volume_ * phi(cell_center(c));
  for (auto& cell : cells_) {
    cell.cum_psi.assign(cell.cum.size(), 0.0);
    for (std::size_t j = cell.front; j < cell.type.size(); ++j)
      cell.cum_psi[j + 1] = cell.cum_psi[j] + (cell.cum[j + 1] - cell.cum[j]) * psi(cell.type[j]);
  }
}

void AlleleField::mutate_to(Cell& c, double t) const {
  if (mu_ > 0.0 && t > c.last) {
    double f = std::exp(-mu_ * (t - c.last));
    c.scale *= f;
    c.bg = c.bg * f + (1.0 - f);
  }
  c.last = std::max(c.last, t);
}

double AlleleField::draw_type(const Cell& c, double pick, double fresh) const {
  const double total = c.bg + c.scale * sum_raw(c);
  double target = pick * total;
  if (target < c.bg || c.type.size() == c.front) return fresh;
  double x = c.cum[c.front] + (target - c.bg) / c.scale;
  auto it = std::upper_bound(c.cum.begin() + static_cast<std::ptrdiff_t>(c.front) + 1, c.cum.end(), x);
  auto j = static_cast<std::size_t>(it - c.cum.begin()) - 1;
  return c.type[std::min(j, c.type.size() - 1)];
}

void AlleleField::push_atom(Cell& c, double type, double true_weight) {
  if (c.scale < 1e-200) {
    // fold the scale back into the raw weights
    std::vector<double> cum{0.0}, cum_psi{0.0};
    std::vector<double> ty;
    for (std::size_t j = c.front; j < c.type.size(); ++j) {
      double raw = (c.cum[j + 1] - c.cum[j]) * c.scale;
      ty.push_back(c.type[j]);
      cum.push_back(cum.back() + raw);
      if (tracking_) cum_psi.push_back(cum_psi.back() + raw * psi_(c.type[j]));
    }
    if (!tracking_) cum_psi.assign(cum.size(), 0.0);
    c.type.swap(ty);
    c.cum.swap(cum);
    c.cum_psi.swap(cum_psi);
    c.front = 0;
    c.scale = 1.0;
  } else if (c.front > 256 && 2 * c.front > c.type.size()) {
    const double base = c.cum[c.front], base_psi = c.cum_psi[c.front];
    c.type.erase(c.type.begin(), c.type.begin() + static_cast<std::ptrdiff_t>(c.front));
    c.cum.erase(c.cum.begin(), c.cum.begin() + static_cast<std::ptrdiff_t>(c.front));
    c.cum_psi.erase(c.cum_psi.begin(), c.cum_psi.begin() + static_cast<std::ptrdiff_t>(c.front));
    for (auto& v : c.cum) v -= base;
    for (auto& v : c.cum_psi) v -= base_psi;
    c.front = 0;
  }
  const double raw = true_weight / c.scale;
  c.type.push_back(type);
  c.cum.push_back(c.cum.back() + raw);
  c.cum_psi.push_back(c.cum_psi.back() + (tracking_ ? raw * psi_(type) : 0.0));
}

void AlleleField::prune(Cell& c) {
  while (c.front < c.type.size()) {
    double wt = c.scale * (c.cum[c.front + 1] - c.cum[c.front]);
    if (wt >= kPruneThreshold) break;
    c.bg += wt;
    ++c.front;
  }
  // renormalize through the background weight
  double atoms = c.scale * sum_raw(c);
  if (atoms > 1.0) {
    c.scale /= atoms;
    c.bg = 0.0;
  } else {
    c.bg = 1.0 - atoms;
  }
}

double AlleleField::tracked_mean(const Cell& c) const { return c.scale * sum_psi(c) + c.bg * psi_.mean; }

EventEffect AlleleField::apply_event(const ForwardEvent& ev) {
  if (ev.r1 > L_ / 2.0 || ev.r2 > L_ / 2.0) throw std::invalid_argument("apply_event: radii must be <= L/2");
  if (!(ev.u > 0.0 && ev.u <= 1.0)) throw std::invalid_argument("apply_event: u must be in (0,1]");
  time_ = std::max(time_, ev.time);
  EventEffect eff;
  const double u = ev.u;
  const std::int64_t pc = cell_of(ev.parent);

  if (mode_ == FieldMode::TwoAllele) {
    const double k = ev.pick < w_[pc] ? 1.0 : 0.0;
    eff.parent_type = k;
    double p0 = 0.0, p1 = 0.0;
    if (tracking_) p0 = psi_(0.0), p1 = psi_(1.0);
    for_each_covered(ev.center, ev.r2, [&](std::int64_t c) {
      double before = w_[c];
      w_[c] = (1.0 - u) * before + u * k;
      if (tracking_) eff.projection_jump += phi_weight_[c] * (p1 - p0) * (w_[c] - before);
      ++eff.cells;
    });
    return eff;
  }

  Cell& parent = cells_[pc];
  mutate_to(parent, ev.time);
  const double k = draw_type(parent, ev.pick, ev.fresh);
  eff.parent_type = k;
  const double pk = tracking_ ? psi_(k) : 0.0;
  for_each_covered(ev.center, ev.r2, [&](std::int64_t ci) {
    Cell& c = cells_[ci];
    mutate_to(c, ev.time);
    if (tracking_) {
      // the event moves <rho_c, psi> by u (psi(k) - <rho_c, psi>)
      eff.projection_jump += phi_weight_[ci] * u * (pk - tracked_mean(c));
    }
    c.scale *= 1.0 - u;
    c.bg *= 1.0 - u;
    push_atom(c, k, u);
    prune(c);
    ++eff.cells;
  });
  return eff;
}

void AlleleField::advance_to(double t) { time_ = std::max(time_, t); }

double AlleleField::frequency(std::int64_t c) const {
  if (mode_ != FieldMode::TwoAllele) throw std::logic_error("frequency: TwoAllele mode only");
  return w_[c];
}

double AlleleField::cell_mean(std::int64_t ci, const TypeFunction& psi) const {
  if (mode_ == FieldMode::TwoAllele) return psi(0.0) * (1.0 - w_[ci]) + psi(1.0) * w_[ci];
  Cell c = Cell{};
  const Cell& src = cells_[ci];
  c.scale = src.scale;
  c.bg = src.bg;
  c.last = src.last;
  mutate_to(c, time_);
  double s = 0.0;
  for (std::size_t j = src.front; j < src.type.size(); ++j) s += (src.cum[j + 1] - src.cum[j]) * psi(src.type[j]);
  return c.scale * s + c.bg * psi.mean;
}

double AlleleField::background_weight(std::int64_t ci) const {
  if (mode_ != FieldMode::Atomic) return 0.0;
  Cell c;
  c.scale = cells_[ci].scale;
  c.bg = cells_[ci].bg;
  c.last = cells_[ci].last;
  mutate_to(c, time_);
  return c.bg;
}

std::vector<std::pair<double, double>> AlleleField::atoms(std::int64_t ci) const {
  std::vector<std::pair<double, double>> out;
  if (mode_ != FieldMode::Atomic) return out;
  const Cell& src = cells_[ci];
  double f = mu_ > 0.0 && time_ > src.last ? std::exp(-mu_ * (time_ - src.last)) : 1.0;
  for (std::size_t j = src.front; j < src.type.size(); ++j)
    out.emplace_back(src.type[j], src.scale * f * (src.cum[j + 1] - src.cum[j]));
  return out;
}

std::size_t AlleleField::atom_count(std::int64_t ci) const {
  return mode_ == FieldMode::Atomic ? cells_[ci].type.size() - cells_[ci].front : 0;
}

double AlleleField::total_weight(std::int64_t ci) const {
  if (mode_ == FieldMode::TwoAllele) return 1.0;
  double s = background_weight(ci);
  for (const auto& a : atoms(ci)) s += a.second;
  return s;
}

std::string AlleleField::snapshot_csv() const {
  std::ostringstream os;
  os << "# mode=" << to_string(mode_) << " d=" << d_ << " L=" << format_double(L_) << " n=" << n_
     << " time=" << format_double(time_) << '\n';
  os << "cell";
  const char* axes[] = {"x", "y", "z"};
  for (int k = 0; k < d_; ++k) os << ',' << axes[k];
  os << (mode_ == FieldMode::TwoAllele ? ",w\n" : ",mean_type\n");
  const TypeFunction id = type_identity();
  for (std::int64_t c = 0; c < ncell_; ++c) {
    os << c;
    Point x = cell_center(c);
    for (int k = 0; k < d_; ++k) os << ',' << format_double(x[k]);
    os << ',' << format_double(mode_ == FieldMode::TwoAllele ? w_[c] : cell_mean(c, id)) << '\n';
  }
  return os.str();
}

namespace {

// r >= 1 with density proportional to r^{-1-e} on [1, rmax]
double truncated_pareto(double v, double e, double rmax) {
  const double tail = std::pow(rmax, -e);
  return std::pow(1.0 - v * (1.0 - tail), -1.0 / e);
}

double pareto_mass(double e, double rmax) { return rmax > 1.0 ? (1.0 - std::pow(rmax, -e)) / e : 0.0; }

}  // namespace

EventSource make_event_source(const RegimeParams& p, const ScalingSchedule& sched, double L) {
  validate(p);
  if (!(L > 0.0)) throw std::invalid_argument("event source: L must be > 0");
  if (sched.uN > 1.0) throw std::invalid_argument("event source: u_N must be <= 1");
  EventSource s;
  s.p = p;
  s.sched = sched;
  s.L = L;
  const double cap = L / (2.0 * sched.delta);  // unrescaled radius limit
  const int d = p.d;
  double mass = 0.0;
  if (const auto* t = std::get_if<OneTail>(&p.tail)) {
    s.r2_max = t->b > 1.0 ? std::pow(cap, 1.0 / t->b) : cap;
    s.r1_max = t->b > 1.0 ? cap : std::pow(s.r2_max, t->b);
    mass = pareto_mass(d + t->a, s.r2_max);
  } else {
    const auto& tt = std::get<TwoTails>(p.tail);
    s.r1_max = s.r2_max = cap;
    mass = pareto_mass(tt.a1, cap) * pareto_mass(d + tt.a2, cap);
  }
  s.rate = sched.time_factor * std::pow(L / sched.delta, d) * mass;
  return s;
}

ForwardEvent draw_event(RngStream& rng, const EventSource& src, double time) {
  const int d = src.p.d;
  ForwardEvent ev;
  ev.time = time;
  for (int k = 0; k < d; ++k) ev.center[k] = src.L * rng.uniform();
  double r1 = 1.0, r2 = 1.0;
  if (const auto* t = std::get_if<OneTail>(&src.p.tail)) {
    r2 = truncated_pareto(rng.uniform(), d + t->a, src.r2_max);
    r1 = t->b == 0.0 ? 1.0 : std::pow(r2, t->b);
  } else {
    const auto& tt = std::get<TwoTails>(src.p.tail);
    r1 = truncated_pareto(rng.uniform(), tt.a1, src.r1_max);
    r2 = truncated_pareto(rng.uniform(), d + tt.a2, src.r2_max);
  }
  ev.u = event_impact(src.p, src.sched.uN, r1, r2);
  const double half = src.L / 2.0;
  ev.r1 = std::min(src.sched.delta * r1, half);
  ev.r2 = std::min(src.sched.delta * r2, half);
  ev.parent = sample_uniform_ball(rng, d, ev.center, ev.r1);
  ev.pick = rng.uniform();
  ev.fresh = rng.uniform();
  return ev;
}

ForwardRun run_forward(RngStream& rng, AlleleField& field, const RegimeParams& p, const ScalingSchedule& sched,
                       double t_end, const std::vector<Observer>& observers,
                       const std::function<void(const ForwardEvent&, const EventEffect&)>& on_event) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("run_forward: t_end must be >= 0");
  if (p.d != field.dim()) throw std::invalid_argument("run_forward: dimension mismatch");
  const EventSource src = make_event_source(p, sched, field.side());
  ForwardRun run;
  run.event_rate = src.rate;
  run.truncation_radius = sched.delta * src.r2_max;

  std::vector<std::pair<double, std::size_t>> marks;
  for (std::size_t i = 0; i < observers.size(); ++i)
    for (double t : observers[i].times)
      if (t <= t_end) marks.emplace_back(t, i);
  std::stable_sort(marks.begin(), marks.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t next_mark = 0;
  auto fire_until = [&](double t) {
    while (next_mark < marks.size() && marks[next_mark].first < t) {
      field.advance_to(marks[next_mark].first);
      observers[marks[next_mark].second].fn(field, marks[next_mark].first);
      ++next_mark;
    }
  };

  double t = field.time();
  if (src.rate > 0.0) {
    for (;;) {
      double next = t + rng.exponential(src.rate);
      if (next > t_end) break;
      fire_until(next);
      t = next;
      ForwardEvent ev = draw_event(rng, src, t);
      EventEffect eff = field.apply_event(ev);
      ++run.events;
      if (on_event) on_event(ev, eff);
    }
  }
  while (next_mark < marks.size()) {
    field.advance_to(marks[next_mark].first);
    observers[marks[next_mark].second].fn(field, marks[next_mark].first);
    ++next_mark;
  }
  field.advance_to(t_end);
  return run;
}

double fluctuation_projection(const AlleleField& field, const ScalingSchedule& sched, const TestFunction& phi,
                              const TypeFunction& psi) {
  if (field.mode() == FieldMode::TwoAllele) {
    double affine = psi(0.0) + (psi(1.0) - psi(0.0)) * 0.5;
    if (std::abs(psi(0.5) - affine) > 1e-12)
      throw std::invalid_argument("fluctuation_projection: TwoAllele mode needs an affine psi");
  }
  const double vol = std::pow(field.cell_width(), field.dim());
  double s = 0.0;
  for (std::int64_t c = 0; c < field.cell_count(); ++c) {
    double f = phi(field.cell_center(c));
    if (f != 0.0) s += vol * f * (field.cell_mean(c, psi) - psi.mean);
  }
  return std::sqrt(sched.N * sched.etaN) * s;
}

QvResult empirical_qv(std::uint64_t seed, const RegimeParams& p, const ScalingSchedule& sched,
                      const TestFunction& phi, const TypeFunction& psi, const QvConfig& cfg, int reps,
                      int threads) {
  if (reps <= 0) throw std::invalid_argument("empirical_qv: reps must be >= 1");
  if (cfg.times.empty()) throw std::invalid_argument("empirical_qv: need at least one checkpoint");
  for (std::size_t i = 0; i < cfg.times.size(); ++i)
    if (!(cfg.times[i] > 0.0) || (i > 0 && cfg.times[i] <= cfg.times[i - 1]))
      throw std::invalid_argument("empirical_qv: checkpoints must be positive and increasing");
  const std::size_t m = cfg.times.size();
  const double scale2 = sched.N * sched.etaN;
  std::vector<double> table(static_cast<std::size_t>(reps) * m, 0.0);
  std::vector<std::int64_t> events(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, threads, [&](std::int64_t r) {
    RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    AlleleField field(FieldMode::Atomic, p.d, cfg.L, cfg.cells, FieldInit::uniform(), cfg.mutation ? p.mu : 0.0);
    field.track(phi, psi);
    double acc = 0.0;
    Observer obs{cfg.times, [&](const AlleleField&, double t) {
                   auto k = static_cast<std::size_t>(std::find(cfg.times.begin(), cfg.times.end(), t) -
                                                     cfg.times.begin());
                   table[static_cast<std::size_t>(r) * m + k] = acc;
                 }};
    auto run = run_forward(rng, field, p, sched, cfg.times.back(), {obs},
                           [&](const ForwardEvent&, const EventEffect& e) {
                             acc += scale2 * e.projection_jump * e.projection_jump;
                           });
    events[r] = run.events;
  });
  QvResult out;
  out.times = cfg.times;
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0, ss = 0.0;
    for (int r = 0; r < reps; ++r) {
      double v = table[static_cast<std::size_t>(r) * m + k];
      s += v;
      ss += v * v;
    }
    EstimateWithCI e;
    e.reps = reps;
    e.estimate = s / reps;
    double var = reps > 1 ? std::max(0.0, (ss - s * s / reps) / (reps - 1)) : 0.0;
    e.se = std::sqrt(var / reps);
    e.ci_low = e.estimate - 1.959963984540054 * e.se;
    e.ci_high = e.estimate + 1.959963984540054 * e.se;
    out.qv.push_back(e);
  }
  double ev = 0.0;
  for (auto n : events) ev += static_cast<double>(n);
  out.mean_events = ev / reps;
  return out;
}

double prelimit_qv_rate(const RegimeParams& p, const ScalingSchedule& sched, const TestFunction& phi,
                        const TypeFunction& psi, double L, int cells) {
  if (p.d != 1) throw std::invalid_argument("prelimit_qv_rate: d = 1 only");
  const EventSource src = make_event_source(p, sched, L);
  if (src.rate == 0.0) return 0.0;
  const double h = L / cells;
  std::vector<double> w(static_cast<std::size_t>(cells));
  for (int c = 0; c < cells; ++c) w[c] = h * phi((c + 0.5) * h);
  // periodic prefix sums over three copies of the torus
  std::vector<double> pre(3 * static_cast<std::size_t>(cells) + 1, 0.0);
  for (int i = 0; i < 3 * cells; ++i) pre[i + 1] = pre[i] + w[i % cells];
  auto window = [&](double x, double R) {
    // centers strictly inside (x - R, x + R); x in [0, L)
    auto lo = static_cast<std::int64_t>(std::ceil((x - R) / h - 0.5));
    auto hi = static_cast<std::int64_t>(std::floor((x + R) / h - 0.5));
    if (hi - lo + 1 > cells) hi = lo + cells - 1;
    if (hi < lo) return 0.0;
    return pre[hi + cells + 1] - pre[lo + cells];
  };
  // mean over x of S(x)^2: S is piecewise constant between the points x_c +- R
  auto mean_square = [&](double R) {
    std::vector<double> br;
    br.reserve(2 * static_cast<std::size_t>(cells) + 2);
    for (int c = 0; c < cells; ++c) {
      for (double s : {-R, R}) {
        double b = (c + 0.5) * h + s;
        br.push_back(b - L * std::floor(b / L));
      }
    }
    br.push_back(0.0);
    br.push_back(L);
    std::sort(br.begin(), br.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      double len = br[i + 1] - br[i];
      if (len <= 0.0) continue;
      double s = window(0.5 * (br[i] + br[i + 1]), R);
      acc += len * s * s;
    }
    return acc / L;
  };
  // expectation over the truncated radius law, midpoint rule in the uniform variable
  const int m = 4000;
  double e = 0.0;
  if (const auto* t = std::get_if<OneTail>(&p.tail)) {
    for (int i = 0; i < m; ++i) {
      double r2 = truncated_pareto((i + 0.5) / m, 1 + t->a, src.r2_max);
      double u = event_impact(p, sched.uN, 1.0, r2);
      e += u * u * mean_square(std::min(sched.delta * r2, L / 2.0));
    }
  } else {
    const auto& tt = std::get<TwoTails>(p.tail);
    double c1 = 0.0;
    for (int i = 0; i < m; ++i) c1 += std::pow(truncated_pareto((i + 0.5) / m, tt.a1, src.r1_max), -2.0 * tt.c1);
    c1 /= m;
    for (int i = 0; i < m; ++i) {
      double r2 = truncated_pareto((i + 0.5) / m, 1 + tt.a2, src.r2_max);
      double u = event_impact(p, sched.uN, 1.0, r2);
      e += c1 * u * u * mean_square(std::min(sched.delta * r2, L / 2.0));
    }
  }
  e /= m;
  const double var = psi.second - psi.mean * psi.mean;
  return sched.N * sched.etaN * src.rate * e * var;
}

}  // namespace slfv
