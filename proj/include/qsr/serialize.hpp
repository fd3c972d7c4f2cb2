#pragma once

#include "json.hpp"

#include "qsr/registers.hpp"

namespace qsr {

// Layout: [[label, dim], ...]. Matrices: {"re": [[...]], "im": [[...]]} by row.
// Doubles round-trip exactly through the shortest-representation printer.

nlohmann::json layout_to_json(const SystemLayout& layout);
SystemLayout layout_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const QuantumState& s);
QuantumState state_from_json(const nlohmann::json& j);

nlohmann::json pure_to_json(const PureState& s);
PureState pure_from_json(const nlohmann::json& j);

nlohmann::json map_to_json(const IsometryMap& v);
IsometryMap map_from_json(const nlohmann::json& j);

}  // namespace qsr
