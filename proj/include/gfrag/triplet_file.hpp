#pragma once

#include <string>

#include "gfrag/key_value.hpp"
#include "gfrag/levy_model.hpp"

namespace gfrag {

// Triplet schema (all keys live at the top level of a KeyValueDocument):
//   sigma2             Gaussian coefficient, >= 0
//   drift              linear coefficient d
//   alpha              self-similarity index
//   jumps.family       "power" or "none"
//   jumps.theta        power family: intensity θ > 0
//   jumps.rho          power family: exponent ρ < 1, ρ != -1
//   jumps.closed_form  power family: use θ/(q-1-ρ) for jump moments (default true)
LevyTriplet triplet_from_document(const KeyValueDocument& doc);
LevyTriplet load_triplet(const std::string& path);
std::string triplet_to_text(const LevyTriplet& triplet);

}  // namespace gfrag
