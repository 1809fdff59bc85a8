#pragma once

// Step accounting. Two books are kept side by side: the paper-model count
// (n units for register preparation plus one unit per granted write) and
// the operations the simulator really performs.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "qsearch/qsim.hpp"
#include "qsearch/trace.hpp"

namespace qsearch {

struct StepLedger {
  std::uint64_t paper_steps = 0;
  std::uint64_t predicate_evals = 0;
  std::uint64_t amplitude_ops = 0;
  std::uint64_t grover_iterations = 0;
  std::uint64_t grants_issued = 0;
  std::uint64_t token_hops = 0;

  bool operator==(const StepLedger&) const = default;
};

// Full passes over the amplitude vector charged per Grover iteration (one
// fused oracle+sum pass, one reflection pass). Preparation plus the final
// measurement are charged the same two passes, so a k-iteration run costs
// (k + 1) * N * kAmplitudePassesPerIteration.
inline constexpr std::uint64_t kAmplitudePassesPerIteration = 2;

// The marking pass is charged zero paper-model units. Every output that
// shows paper-model numbers carries this note.
inline constexpr std::string_view kMarkingFootnote =
    "# note: the marking pass is priced at 0 paper-model units; "
    "predicate_evals is the classical work actually done";

// n + M, or n + min(M, 1) with early stop. Throws DomainError if M > 2^n.
std::uint64_t paper_step_count(unsigned n, Index m, bool early_stop);

enum class RunKind { Grover, Modified };

struct RunMetadata {
  RunKind kind = RunKind::Modified;
  unsigned n = 1;
  std::uint64_t grover_iterations = 0;
  std::uint64_t token_hops = 0;
};

// Rebuilds a ledger from a finished run's trace. For modified runs the
// paper-model count is n plus one unit per completed write (WriteEnd).
StepLedger actual_cost(std::span<const TraceEvent> trace, const RunMetadata& meta);

struct ComparisonRow {
  Index n_items = 0;
  Index m = 0;
  std::optional<std::uint64_t> grover_iters;  // empty when M = 0
  std::uint64_t paper_steps_full = 0;
  std::uint64_t paper_steps_early = 0;
  std::uint64_t predicate_evals = 0;

  bool operator==(const ComparisonRow&) const = default;
};

// N must be a power of two (N >= 2); M <= N.
ComparisonRow compare_models(Index n_items, Index m);

std::string comparison_csv_header();
std::string to_csv(const ComparisonRow& row);

}  // namespace qsearch
