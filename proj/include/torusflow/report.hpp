#pragma once

// Machine-readable outputs: report JSON, poset DOT, basin / trajectory / decay CSV.

#include <string>

#include "json.hpp"
#include "torusflow/metric.hpp"
#include "torusflow/morse.hpp"

namespace torusflow {

/// Header line carried by every report.
inline constexpr const char* kSignConvention =
    "dw_i/ds = -a_i w_i with a_i = 2*pi*<m_i,a0>; a_i > 0 means coordinate i contracts forward in time";

nlohmann::json fixed_point_json(const FixedPointRecord& rec);
nlohmann::json report_to_json(const DecompositionReport& rep);
std::string poset_to_dot(const DecompositionReport& rep);
std::string basins_csv(const DecompositionReport& rep);
nlohmann::json limit_to_json(const LimitResult& r, const TorusManifold& model);
std::string decay_csv(const DecayResult& result);

/// Stable text form: two-space indent, trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace torusflow
