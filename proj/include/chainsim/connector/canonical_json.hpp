#pragma once

#include <string>

#include <json.hpp>

namespace chainsim::connector {

/// Deterministic serialization used before hashing a payload:
///   - object keys sorted by byte order, no insignificant whitespace, UTF-8
///   - integers in plain decimal; integral floats below 2^53 written as integers
///   - other floats in shortest round-trip form
/// Throws ConnectorError(NonCanonicalizable) for NaN or infinite numbers.
std::string canonicalize_payload(const nlohmann::json& document);

}  // namespace chainsim::connector
