#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "slfv/geometry.hpp"
#include "slfv/regimes.hpp"
#include "slfv/rng.hpp"

namespace slfv {

enum class PairStatus { BothAlive, Coalesced, Killed };
const char* to_string(PairStatus s);

// Radii, impact, center and parent of the last accepted event.
struct EventDraw {
  double r1 = 0.0;
  double r2 = 0.0;
  double u = 0.0;
  Point center{};
  Point parent{};
  double separation = 0.0;  // |x1 - x2| just before the event
  int marked = 0;           // lineages that jumped
};

// Positions and clock are unrescaled.
struct DualPairState {
  Point x1{};
  Point x2{};
  PairStatus status = PairStatus::BothAlive;
  double clock = 0.0;
  std::int64_t events = 0;        // accepted events (relocations or merges)
  std::int64_t relocations[2] = {0, 0};
  EventDraw last;
};

// Precomputed rates for one (regime, schedule) pair, unrescaled units.
struct DualModel {
  RegimeParams p;
  ScalingSchedule sched;
  double lineage_rate = 0.0;  // marked-event rate per lineage
  double kill_rate = 0.0;     // mutation rate per lineage
};
DualModel make_dual_model(const RegimeParams& p, const ScalingSchedule& sched);

struct RadiusPair {
  double r1 = 1.0;
  double r2 = 1.0;
};
// Radii size-biased by u * V_{r2}: unit Pareto draws.
RadiusPair sample_radius_pair(RngStream& rng, const RegimeParams& p);

// Upper bound on the pair's event rate, per rescaled time unit.
double pair_event_rate(const RegimeParams& p, const ScalingSchedule& sched, double h);

// Rate at which two coincident lineages merge, per rescaled time unit.
double coincident_coalescence_rate(const RegimeParams& p, const ScalingSchedule& sched);

// Advances to the next accepted transition (relocation, merge or kill), or
// to `horizon` (unrescaled) if nothing happens before it.
DualPairState step_pair(RngStream& rng, const DualPairState& state, const DualModel& model,
                        double horizon = std::numeric_limits<double>::infinity());

// t_max is rescaled time.
DualPairState run_pair(RngStream& rng, const Point& x1, const Point& x2, double t_max,
                       const DualModel& model);

struct EstimateWithCI {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double se = 0.0;
  std::int64_t reps = 0;
  std::int64_t successes = 0;
};

// Wilson 95% interval for k successes out of n, scaled by `scale`.
EstimateWithCI binomial_estimate(std::int64_t k, std::int64_t n, double scale);

using PointSampler = std::function<Point(RngStream&)>;
PointSampler uniform_block_sampler(int d, const Point& center, double width);
PointSampler gaussian_sampler(int d, const Point& center, double sd);

struct ReplicateRecord {
  std::int64_t rep = 0;
  PairStatus outcome = PairStatus::BothAlive;
  double end_time = 0.0;  // rescaled; coalescence or kill time, horizon if survived
  std::int64_t events = 0;
};

struct IbdRun {
  EstimateWithCI estimate;
  std::vector<ReplicateRecord> records;  // filled when requested
};

// N eta_N times the fraction of replicates whose lineages merge before
// either is killed, within rescaled time t. Starts are drawn in rescaled
// coordinates. Replicate i uses the stream mix_seed(seed, i).
IbdRun estimate_ibd(std::uint64_t seed, const PointSampler& phi, const PointSampler& psi, double t,
                    const RegimeParams& p, const ScalingSchedule& sched, std::int64_t reps, int threads = 1,
                    bool keep_records = false);

struct HazardEstimate {
  double rate = 0.0;  // per rescaled time
  double se = 0.0;
  std::int64_t merges = 0;
  std::int64_t reps = 0;
  double exposure = 0.0;  // rescaled time spent coincident
};

// Starts each replicate with coincident lineages and watches until the first
// accepted transition; merges / exposure estimates the merge hazard.
HazardEstimate estimate_coincident_hazard(std::uint64_t seed, const RegimeParams& p,
                                          const ScalingSchedule& sched, std::int64_t reps, int threads = 1);

std::string replicate_csv(const std::vector<ReplicateRecord>& records);

}  // namespace slfv
