#include "qsearch/ledger.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "qsearch/errors.hpp"
#include "qsearch/grover.hpp"

namespace qsearch {

std::uint64_t paper_step_count(unsigned n, Index m, bool early_stop) {
  if (n < 1 || n >= 64) throw DomainError("qubit count " + std::to_string(n) + " out of range");
  if (m > (Index{1} << n)) throw DomainError("M = " + std::to_string(m) + " exceeds 2^" + std::to_string(n));
  return n + (early_stop ? std::min<Index>(m, 1) : m);
}

StepLedger actual_cost(std::span<const TraceEvent> trace, const RunMetadata& meta) {
  const Index size = Index{1} << meta.n;
  StepLedger ledger;
  ledger.grants_issued = static_cast<std::uint64_t>(
      std::count_if(trace.begin(), trace.end(), [](const TraceEvent& e) { return e.kind == EventKind::Grant; }));
  switch (meta.kind) {
    case RunKind::Modified: {
      const auto writes = std::count_if(trace.begin(), trace.end(),
                                        [](const TraceEvent& e) { return e.kind == EventKind::WriteEnd; });
      ledger.paper_steps = meta.n + static_cast<std::uint64_t>(writes);
      ledger.predicate_evals = size;
      ledger.token_hops = meta.token_hops;
      break;
    }
    case RunKind::Grover:
      ledger.grover_iterations = meta.grover_iterations;
      ledger.predicate_evals = meta.grover_iterations * size;
      ledger.amplitude_ops = (meta.grover_iterations + 1) * size * kAmplitudePassesPerIteration;
      break;
  }
  return ledger;
}

ComparisonRow compare_models(Index n_items, Index m) {
  if (n_items < 2 || !std::has_single_bit(n_items)) {
    throw DomainError("N = " + std::to_string(n_items) + " is not a power of two >= 2");
  }
  if (m > n_items) throw DomainError("M = " + std::to_string(m) + " exceeds N = " + std::to_string(n_items));
  const auto n = static_cast<unsigned>(std::countr_zero(n_items));
  ComparisonRow row;
  row.n_items = n_items;
  row.m = m;
  if (m > 0) row.grover_iters = optimal_iterations(n_items, m);
  row.paper_steps_full = paper_step_count(n, m, false);
  row.paper_steps_early = paper_step_count(n, m, true);
  row.predicate_evals = n_items;
  return row;
}

std::string comparison_csv_header() {
  return "N,M,grover_iters,paper_steps_full,paper_steps_early,predicate_evals";
}

std::string to_csv(const ComparisonRow& row) {
  std::string out = std::to_string(row.n_items) + ',' + std::to_string(row.m) + ',';
  out += row.grover_iters ? std::to_string(*row.grover_iters) : "NA";
  out += ',' + std::to_string(row.paper_steps_full) + ',' + std::to_string(row.paper_steps_early) + ',' +
         std::to_string(row.predicate_evals);
  return out;
}

}  // namespace qsearch
