#include "chainsim/connector/canonical_json.hpp"

#include <cmath>
#include <cstdint>

#include "chainsim/connector/connector.hpp"

namespace chainsim::connector {

namespace {

void write_value(const nlohmann::json& v, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::object: {
      // nlohmann's default object is a std::map, so iteration is already key-sorted.
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += nlohmann::json(it.key()).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
        out.push_back(':');
        write_value(it.value(), out);
      }
      out.push_back('}');
      return;
    }
    case value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(',');
        write_value(v[i], out);
      }
      out.push_back(']');
      return;
    }
    case value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        throw ConnectorError(ConnectorErrc::NonCanonicalizable, "NaN or infinite number in payload");
      }
      if (d == std::trunc(d) && std::fabs(d) < 9007199254740992.0) {
        out += std::to_string(static_cast<std::int64_t>(d));
        return;
      }
      out += v.dump();
      return;
    }
    case value_t::discarded:
      throw ConnectorError(ConnectorErrc::NonCanonicalizable, "discarded JSON value");
    default:
      out += v.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
      return;
  }
}

}  // namespace

std::string canonicalize_payload(const nlohmann::json& document) {
  std::string out;
  write_value(document, out);
  return out;
}

}  // namespace chainsim::connector
