#pragma once

#include <string>

#include "json.hpp"

namespace torusflow {

/// Outcome of a verification sweep. Failures are data, not exceptions.
struct Verdict {
  bool pass = true;
  double max_violation = 0.0;
  nlohmann::json witnesses = nlohmann::json::array();
  /// Check-specific tables (hit counts, exponent tables, ...).
  nlohmann::json details = nlohmann::json::object();

  /// Records a violation; the verdict fails when it exceeds `tol`.
  void observe(double violation, double tol) {
    if (violation > max_violation || violation != violation) max_violation = violation;
    if (!(violation < tol)) pass = false;
  }
};

/// {"pass", "max_violation", "witnesses"} plus any details keys.
inline void to_json(nlohmann::json& j, const Verdict& v) {
  j = nlohmann::json{{"pass", v.pass}, {"max_violation", v.max_violation}, {"witnesses", v.witnesses}};
  for (auto it = v.details.begin(); it != v.details.end(); ++it) j[it.key()] = it.value();
}

}  // namespace torusflow
