#pragma once

#include <optional>
#include <string_view>

namespace rbflow {

/// Hamilton's classes of maximal solutions by curvature growth.
enum class HamiltonType { TypeI, TypeIIa, TypeIIb, TypeIII, Undetermined };

std::string_view to_string(HamiltonType type);
std::optional<HamiltonType> hamilton_type_from_string(std::string_view text);

}  // namespace rbflow
