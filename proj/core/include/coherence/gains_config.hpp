#pragma once

#include <string>
#include <string_view>

#include "coherence/closed_loop.hpp"

namespace coherence {

/// Parses a gains file of `key = value` lines.
///
///   controller = p | dapi | fdpd
///   f, g, f0, g0, ki, c, kd, tau   (unset gains default to 0)
///
/// An optional `[power_preset]` section with keys m, d, b, l (l defaults to 1)
/// derives f and g0 from swing-equation parameters: DAPI through
/// power_preset(), P through power_droop(). Setting f, g, f0 or g0 alongside
/// the preset is rejected. Lines starting with '#' are comments. Errors are
/// reported as ParseError with the 1-based line number; the parsed gains are
/// validated before returning.
Gains parse_gains_config(std::string_view text);

/// Writes gains in the format accepted by parse_gains_config.
std::string to_gains_config(const Gains& gains);

}  // namespace coherence
