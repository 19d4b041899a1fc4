// SPDX-License-Identifier: Apache-2.0
//
// JSON forms of designs, solver outcomes and BER reports.

#pragma once

#include <json.hpp>

#include "sdsm/conic_design.hpp"
#include "sdsm/downlink.hpp"
#include "sdsm/modulator.hpp"

namespace sdsm {

nlohmann::json design_to_json(const FilterDesign& d);
/// Throws ConfigError on a malformed document or an invalid design.
FilterDesign design_from_json(const nlohmann::json& j);

nlohmann::json solution_to_json(const ConicSolution& s);
nlohmann::json report_to_json(const DesignReport& r);
nlohmann::json ber_to_json(const BerReport& r);

}  // namespace sdsm
