#pragma once

// Smooth complete fans: validation and the combinatorics (cone counts,
// h-vector) that cross-check the Morse data of the associated toric manifold.

#include <cstdint>
#include <string>
#include <vector>

#include "torusflow/torus.hpp"
#include "torusflow/verdict.hpp"

namespace torusflow {

struct Fan {
  int rank = 0;
  std::vector<std::vector<std::int64_t>> rays;
  std::vector<std::vector<int>> maximal_cones;
};

struct FanViolation {
  std::string kind;  // "rank", "primitivity", "smoothness", "completeness", "overlap", "index"
  std::string message;
};

struct FanValidation {
  bool valid = true;
  std::vector<FanViolation> violations;

  Verdict to_verdict() const;
};

/// Primitivity, unimodular maximal cones and the facet-pairing completeness test.
FanValidation validate_fan(const Fan& fan);

/// Exact determinant of a square integer matrix (Bareiss elimination).
std::int64_t integer_determinant(std::vector<std::vector<std::int64_t>> m);

/// Dual basis {m_i} of a unimodular cone: <m_i, v_j> = delta_ij, v_j the cone's rays in order.
std::vector<Weight> dual_basis(const Fan& fan, const std::vector<int>& cone);

/// d_i = number of i-dimensional cones (faces of maximal cones), i = 0..rank.
std::vector<std::int64_t> cone_counts(const Fan& fan);

/// h_k = sum_{j>=k} (-1)^{j-k} C(j,k) d_{n-j}.
std::vector<std::int64_t> h_vector(const Fan& fan);

namespace fans {
Fan projective_space(int n);
/// Rays e1, e2, -e1 + a e2, -e2.
Fan hirzebruch(int a);
}  // namespace fans

}  // namespace torusflow
