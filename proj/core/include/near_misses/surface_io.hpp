#pragma once

#include <string>
#include <string_view>

#include "near_misses/surfaces.hpp"

namespace near_misses {

/// Builds a chart from a JSON document:
///   {"name", "ambient_dim", "kind": "builtin"|"polynomial",
///    "coefficients": [{"exponents": [..], "coef": [num, den]}], "root",
///    "domain": {"lo": [..], "hi": [..], "closed": bool}, "margin"}
MongeChart surface_from_json_text(std::string_view text);
MongeChart load_surface_file(const std::string& path);

/// A catalog name or a path to a JSON surface file.
MongeChart resolve_surface(const std::string& name_or_path);

/// Stable hex fingerprint of a surface argument: file contents for paths,
/// the name itself for catalog entries.
std::string surface_fingerprint(const std::string& name_or_path);

}  // namespace near_misses
