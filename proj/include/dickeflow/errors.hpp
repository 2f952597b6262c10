// errors.hpp - exception types shared across the library
#pragma once

#include <stdexcept>

namespace dickeflow {

// Parameter regime where the quadratic model has no bounded spectrum.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The transition graph splits into disconnected level groups, so the
// stationary distribution of the rate equation is not unique.
struct NonUniqueSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration file failed to parse or violated the schema.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Output file could not be opened or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dickeflow
