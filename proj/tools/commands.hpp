#pragma once

#include <functional>
#include <string>
#include <vector>

#include "run_context.hpp"

namespace gfrag::cli {

struct Command {
    std::string name;
    std::string description;
    // Keys accepted in the [name.] section of the config.
    std::vector<std::string> keys;
    std::function<void(RunContext&)> run;
};

const std::vector<Command>& commands();

}  // namespace gfrag::cli
