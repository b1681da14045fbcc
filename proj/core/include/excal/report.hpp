#pragma once

// JSON text for the result structs. Output is canonical: keys sorted,
// numbers printed by round-trip shortest form, no timing or host data, so
// identical inputs serialize to identical bytes.

#include <string>

#include "excal/diver.hpp"
#include "excal/surface.hpp"

namespace excal {

std::string to_json_text(const IdentityReport& r);
std::string to_json_text(const WeakDivResult& r);
std::string to_json_text(const SurfaceMeasureReport& r);
std::string to_json_text(const TubeAverageReport& r);
std::string to_json_text(const Theorem2Report& r);

}  // namespace excal
