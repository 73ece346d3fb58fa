#pragma once

#include <string>

#include <json.hpp>

namespace probeflow {

using Json = nlohmann::json;

// Canonical serialization: object keys sorted, two-space indentation, floats
// printed with 17 significant digits (always carrying a '.' or exponent so
// they re-parse as floats). Non-finite floats become null.
std::string dump_canonical(const Json& value);

// Shortest exact text for a double, used in messages and file names.
std::string format_double(double value, int significant_digits = 17);

}  // namespace probeflow
