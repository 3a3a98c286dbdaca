#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "slfv/regimes.hpp"

namespace slfv {

using Json = nlohmann::json;

// Rejects keys outside `allowed`, naming the first offender.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& where);

Json to_json(const RegimeParams& p);
Json to_json(const DerivedParams& dp);
Json to_json(const ScalingSchedule& s);
Json to_json(const ValidityReport& r);

RegimeParams regime_from_json(const Json& j);
DerivedParams derived_from_json(const Json& j);
ScalingSchedule schedule_from_json(const Json& j);

// Fixed-format number rendering shared by every CSV writer.
std::string format_double(double x);

}  // namespace slfv
