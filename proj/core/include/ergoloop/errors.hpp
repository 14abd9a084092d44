#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergoloop {

// Shape mismatch in linear-algebra or wiring code.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A run hit a non-finite signal; carries the first offending component and step.
struct SimulationError : std::runtime_error {
    SimulationError(std::string component_, std::size_t step_, const std::string& what_)
        : std::runtime_error(what_), component(std::move(component_)), step(step_) {}
    std::string component;
    std::size_t step;
};

// Scenario configuration rejected; `pointer` is a JSON-pointer-style path.
struct ConfigError : std::runtime_error {
    ConfigError(std::string pointer_, const std::string& message)
        : std::runtime_error(pointer_ + ": " + message), pointer(std::move(pointer_)) {}
    std::string pointer;
};

}  // namespace ergoloop
