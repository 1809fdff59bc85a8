#pragma once

// Arbitration trace events and their line-delimited text form
// (`time kind index`, decimal, space separated, one event per line).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "qsearch/qsim.hpp"

namespace qsearch {

enum class EventKind { Request, Grant, WriteStart, WriteEnd, Release, Fail };

struct TraceEvent {
  EventKind kind;
  Index process;
  std::uint64_t time;

  bool operator==(const TraceEvent&) const = default;
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

void write_trace(std::ostream& out, const std::vector<TraceEvent>& trace);

// Blank lines and lines starting with '#' are skipped. Throws TraceError on
// anything else that is not a well-formed record.
std::vector<TraceEvent> read_trace(std::istream& in);

}  // namespace qsearch
