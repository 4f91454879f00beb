#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aggr/characteristics/characteristic.hpp"

namespace aggr {

/// Plain-text form:
///
///     label = RTM
///     components = Y, P2
///     a = -2 * Y^3 + 3 * Y * P2
///     b.Y = 6 * Y^2 - 3 * P2
///     b.P2 = -3 * Y
///
/// Blank lines and '#' comments are ignored. Missing b entries are zero.
std::string format_characteristic(const Characteristic& c);
Characteristic parse_characteristic(std::string_view text);

Characteristic load_characteristic(const std::filesystem::path& file);
void save_characteristic(const Characteristic& c, const std::filesystem::path& file);

} // namespace aggr
