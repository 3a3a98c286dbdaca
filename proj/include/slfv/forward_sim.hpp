#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "slfv/dual_sim.hpp"
#include "slfv/geometry.hpp"
#include "slfv/kernels.hpp"
#include "slfv/regimes.hpp"
#include "slfv/rng.hpp"

namespace slfv {

enum class FieldMode { TwoAllele, Atomic };
const char* to_string(FieldMode m);

// A function of the type k in [0,1] with its first two moments under
// the uniform law on [0,1].
struct TypeFunction {
  std::function<double(double)> value;
  double mean = 0.0;
  double second = 0.0;  // integral of value^2
  double operator()(double k) const { return value(k); }
};
TypeFunction type_indicator(double lo, double hi);
TypeFunction type_constant(double c);
TypeFunction type_identity();

struct FieldInit {
  enum class Kind { UniformLebesgue, TwoAlleleBall, ConstantFrequency } kind = Kind::UniformLebesgue;
  Point center{};
  double radius = 0.0;
  double w = 0.0;
  static FieldInit uniform() { return {}; }
  static FieldInit ball(const Point& c, double r) { return {Kind::TwoAlleleBall, c, r, 0.0}; }
  static FieldInit constant(double w) { return {Kind::ConstantFrequency, Point{}, 0.0, w}; }
};

// Everything an event needs, drawn independently of the field state so a
// stream can be replayed or shifted. Coordinates are rescaled.
struct ForwardEvent {
  double time = 0.0;
  Point center{};
  double r1 = 0.0;
  double r2 = 0.0;
  double u = 0.0;
  Point parent{};     // parent location, uniform in B(center, r1)
  double pick = 0.0;  // uniform used to draw the parent type at `parent`
  double fresh = 0.0; // type used if the draw lands on the uniform background
};

struct EventEffect {
  double parent_type = 0.0;
  std::int64_t cells = 0;
  double projection_jump = 0.0;  // change of sum_c h^d phi(x_c) <rho_c, psi>, tracked pair only
};

constexpr double kPruneThreshold = 1e-7;

// Type field on the torus [0,L)^d with n cells per axis. TwoAllele cells
// store the frequency of type 1; Atomic cells store a uniform background
// weight plus a list of (type, weight) atoms, oldest first.
class AlleleField {
 public:
  AlleleField(FieldMode mode, int d, double L, int n, const FieldInit& init, double mu = 0.0);

  FieldMode mode() const { return mode_; }
  int dim() const { return d_; }
  double side() const { return L_; }
  int cells_per_axis() const { return n_; }
  std::int64_t cell_count() const { return ncell_; }
  double cell_width() const { return h_; }
  double time() const { return time_; }
  Point cell_center(std::int64_t c) const;
  std::int64_t cell_of(const Point& x) const;

  // Track sum_c h^d phi(x_c) <rho_c, psi> incrementally.
  void track(const TestFunction& phi, const TypeFunction& psi);

  EventEffect apply_event(const ForwardEvent& ev);
  // Brings lazily applied mutation up to time t (no events in between).
  void advance_to(double t);

  double frequency(std::int64_t c) const;                       // TwoAllele
  double cell_mean(std::int64_t c, const TypeFunction& psi) const;  // <rho_c, psi>
  double background_weight(std::int64_t c) const;
  std::vector<std::pair<double, double>> atoms(std::int64_t c) const;  // (type, weight)
  std::size_t atom_count(std::int64_t c) const;
  double total_weight(std::int64_t c) const;

  // Row-major grid with a metadata header line.
  std::string snapshot_csv() const;

 private:
  struct Cell {
    double scale = 1.0;  // true weight = scale * raw
    double bg = 1.0;
    double last = 0.0;   // time up to which mutation has been applied
    std::size_t front = 0;
    std::vector<double> type;
    std::vector<double> cum{0.0};      // prefix sums of raw weights
    std::vector<double> cum_psi{0.0};  // prefix sums of raw * psi(type)
  };
  void mutate_to(Cell& c, double t) const;
  double sum_raw(const Cell& c) const { return c.cum.back() - c.cum[c.front]; }
  double sum_psi(const Cell& c) const { return c.cum_psi.back() - c.cum_psi[c.front]; }
  double draw_type(const Cell& c, double pick, double fresh) const;
  void push_atom(Cell& c, double type, double true_weight);
  void prune(Cell& c);
  double tracked_mean(const Cell& c) const;
  template <class F>
  void for_each_covered(const Point& center, double r, F&& f) const;

  FieldMode mode_;
  int d_;
  double L_;
  int n_;
  std::int64_t ncell_;
  double h_;
  double cell_volume_;
  double mu_;
  double time_ = 0.0;
  std::vector<double> w_;
  std::vector<Cell> cells_;
  bool tracking_ = false;
  TypeFunction psi_;
  std::vector<double> phi_weight_;
};

// Poisson event stream for a regime on the torus, in rescaled units.
struct EventSource {
  RegimeParams p;
  ScalingSchedule sched;
  double L = 1.0;
  double rate = 0.0;    // events per rescaled time over the whole torus
  double r2_max = 0.0;  // unrescaled truncation of r2
  double r1_max = 0.0;  // unrescaled truncation of r1 (two-tails)
};
EventSource make_event_source(const RegimeParams& p, const ScalingSchedule& sched, double L);
ForwardEvent draw_event(RngStream& rng, const EventSource& src, double time);

struct Observer {
  std::vector<double> times;  // rescaled, increasing
  std::function<void(const AlleleField&, double)> fn;
};

struct ForwardRun {
  std::int64_t events = 0;
  double truncation_radius = 0.0;  // rescaled
  double event_rate = 0.0;
};

// Runs events in time order up to t_end (rescaled); observers fire at their
// times, after all earlier events. on_event sees each event and its effect.
ForwardRun run_forward(RngStream& rng, AlleleField& field, const RegimeParams& p, const ScalingSchedule& sched,
                       double t_end, const std::vector<Observer>& observers = {},
                       const std::function<void(const ForwardEvent&, const EventEffect&)>& on_event = {});

// sqrt(N eta_N) (<rho, phi x psi> - <lambda, phi x psi>) by grid quadrature.
// TwoAllele fields need an affine psi (only psi(0), psi(1) are used).
double fluctuation_projection(const AlleleField& field, const ScalingSchedule& sched, const TestFunction& phi,
                              const TypeFunction& psi);

struct QvConfig {
  double L = 20.0;
  int cells = 1000;
  std::vector<double> times;  // checkpoints, rescaled; the last one is the horizon
  bool mutation = true;
};

struct QvResult {
  std::vector<double> times;
  std::vector<EstimateWithCI> qv;  // <M>_t at each checkpoint, mean over replicates
  double mean_events = 0.0;
};

// Sum of squared jumps of <Z^N, phi x psi> from a uniform Atomic start.
QvResult empirical_qv(std::uint64_t seed, const RegimeParams& p, const ScalingSchedule& sched,
                      const TestFunction& phi, const TypeFunction& psi, const QvConfig& cfg, int reps,
                      int threads = 1);

// Expected rate of the same sum at rho = lambda, on the same grid and with the
// same truncation: the prelimit target that empirical_qv estimates at small t.
double prelimit_qv_rate(const RegimeParams& p, const ScalingSchedule& sched, const TestFunction& phi,
                        const TypeFunction& psi, double L, int cells);

}  // namespace slfv
