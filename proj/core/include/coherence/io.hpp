#pragma once

#include <string>

namespace coherence {

/// Shortest round-trip decimal representation ("inf"/"nan" for non-finite).
std::string format_double(double value);

}  // namespace coherence
