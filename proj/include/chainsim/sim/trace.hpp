#pragma once

#include <functional>
#include <iosfwd>

#include <json.hpp>

namespace chainsim::sim {

// Event trace, one JSON object per line:
//   {"t", "seq", "kind", "node", "item", "qty", ...}
// Kinds: sale, po_emitted, po_fulfilled, mfg_order, receipt, eod, mine.
using TraceSink = std::function<void(const nlohmann::json&)>;

/// Writes each record as one line to the stream.
TraceSink jsonl_sink(std::ostream& out);

}  // namespace chainsim::sim
