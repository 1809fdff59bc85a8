#include "qsearch/trace.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qsearch/errors.hpp"

namespace qsearch {
namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"Request",  "Grant",   "WriteStart",
                                                        "WriteEnd", "Release", "Fail"};

}  // namespace

std::string_view to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& trace) {
  for (const auto& e : trace) out << e.time << ' ' << to_string(e.kind) << ' ' << e.process << '\n';
}

std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    std::istringstream fields(line);
    std::uint64_t time = 0;
    std::string kind_name;
    Index process = 0;
    std::string extra;
    if (!(fields >> time >> kind_name >> process) || (fields >> extra)) {
      throw TraceError("line " + std::to_string(line_no) + ": expected `time kind index`");
    }
    const auto kind = parse_event_kind(kind_name);
    if (!kind) throw TraceError("line " + std::to_string(line_no) + ": unknown event kind " + kind_name);
    trace.push_back({*kind, process, time});
  }
  return trace;
}

}  // namespace qsearch
