#pragma once

// Model descriptors, presets and the JSON forms of weights and generators.
//
//   {"kind": "projective", "n": 2, "coordinate_weights": [[0,0],[1,0],[0,1]]}
//   {"kind": "toric", "rank": 2, "rays": [[1,0],[0,1],[-1,-1]], "maximal_cones": [[0,1],[1,2],[2,0]]}
//   {"kind": "sphere", "n": 2}
//
// A bare fan file {"rank", "rays", "maximal_cones"} is read as a toric model.

#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"
#include "torusflow/manifold.hpp"

namespace torusflow {

nlohmann::json weight_to_json(const Weight& m);
Weight weight_from_json(const nlohmann::json& j);
/// Array of "p/q" strings.
nlohmann::json generator_to_json(const GeneratorVector& a0);
GeneratorVector generator_from_json(const nlohmann::json& j);

Fan fan_from_json(const nlohmann::json& j);
nlohmann::json fan_to_json(const Fan& fan);

/// Throws ModelError (invalid model) or std::invalid_argument (malformed descriptor).
std::unique_ptr<TorusManifold> model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const TorusManifold& model);

/// cpN, s2N, fan:cpN, fan:hirzebruchA (cp1, cp2, cp3, s2, s4, fan:cp2, fan:hirzebruch1, ...).
std::unique_ptr<TorusManifold> model_from_preset(std::string_view name);

/// A preset name, or a path to a JSON descriptor / fan file.
std::unique_ptr<TorusManifold> load_model(std::string_view spec);

/// (1/3, 1/7, 1/11, 1/13, ...): generic for the default projective and sphere actions.
GeneratorVector default_generator(std::size_t rank);

}  // namespace torusflow
