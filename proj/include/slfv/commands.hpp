#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slfv/dual_sim.hpp"
#include "slfv/forward_sim.hpp"
#include "slfv/json_io.hpp"
#include "slfv/kernels.hpp"

namespace slfv {

// FNV-1a of the canonical dump of the config with any "seed" entry removed.
std::uint64_t config_hash(const Json& config);
std::string hex64(std::uint64_t h);
// First line of every CSV artifact.
std::string csv_banner(const Json& config, std::uint64_t seed);

struct RunContext {
  std::uint64_t seed = 1;  // master seed
  int threads = 1;
};

// The --seed flag wins over the config's "seed"; 1 when neither is given.
std::uint64_t resolve_seed(const Json& config, const std::uint64_t* flag);

// {"error": {"message", "field"?}} for reporting failures.
Json error_json(const std::exception& e);

// Named output files (name, content), in emission order.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

Artifacts cmd_params(const Json& config, const RunContext& ctx);
Artifacts cmd_wmf(const Json& config, const RunContext& ctx);
Artifacts cmd_dual(const Json& config, const RunContext& ctx);
Artifacts cmd_forward(const Json& config, const RunContext& ctx);
Artifacts cmd_qv(const Json& config, const RunContext& ctx);
Artifacts cmd_gencheck(const Json& config, const RunContext& ctx);

// Config pieces shared with the acceptance driver.
ScalingSchedule schedule_from_config(const RegimeParams& p, const Json& scaling);
TestFunction test_function_from_json(const Json& j, int d, const std::string& where);
TypeFunction type_function_from_json(const Json& j, const std::string& where);
struct StartLaw {
  PointSampler sampler;
  TestFunction density;  // empty value when no closed-form density is available
};
StartLaw start_law_from_json(const Json& j, int d, const std::string& where);

struct WmfCurve {
  std::string label;
  DerivedParams dp;
};
// Curves for the wmf command: either a regime or (alpha, beta, gamma, diffusivity).
std::vector<WmfCurve> wmf_curves_from_json(const Json& sets, int d, const std::string& where);
// Rows of F(r) per curve, divided by F(normalize_at) when that is > 0.
std::vector<std::vector<double>> wmf_table(const std::vector<WmfCurve>& curves, int d, double mu,
                                           const std::vector<double>& r, double normalize_at);

}  // namespace slfv
