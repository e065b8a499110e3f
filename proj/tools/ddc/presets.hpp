#pragma once

#include <string>
#include <vector>

#include "ddc/model.hpp"

namespace ddc::experiment {

/// Built-in systems:
///   tank4   4-state stable tank cascade (time in minutes), no inputs
///   heli8   8-state, 4-input helicopter-like model, open-loop unstable
///   plant42 4-state, 2-input lightly damped coupled oscillators
/// Throws ValidationError for an unknown name.
LtiSystem preset_system(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace ddc::experiment
