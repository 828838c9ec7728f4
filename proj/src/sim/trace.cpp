#include "chainsim/sim/trace.hpp"

#include <ostream>

namespace chainsim::sim {

TraceSink jsonl_sink(std::ostream& out) {
  return [&out](const nlohmann::json& record) { out << record.dump() << '\n'; };
}

}  // namespace chainsim::sim
