// SPDX-License-Identifier: Apache-2.0
//
// JSON conversions for learner configurations. Missing keys keep their
// defaults; wrong types or out-of-range values raise InvalidConfig.
#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "helio/boost.hpp"
#include "helio/dataset.hpp"
#include "helio/forest.hpp"
#include "helio/mlp.hpp"

namespace helio {

using json = nlohmann::json;

// Exact round-trip text for a double ("%a").
std::string hexfloat(double v);
// Accepts hex-float or decimal text, or a JSON number.
double parse_real_text(std::string_view text);
double real_from_json(const json& j);

json to_json(const ForestConfig& c);
json to_json(const BoostConfig& c);
json to_json(const MlpTrainConfig& c);
json to_json(const StandardizationParams& p);

ForestConfig forest_config_from_json(const json& j, ForestConfig base = {});
BoostConfig boost_config_from_json(const json& j, BoostConfig base = {});
MlpTrainConfig mlp_config_from_json(const json& j, MlpTrainConfig base = {});
StandardizationParams standardization_from_json(const json& j);

}  // namespace helio
