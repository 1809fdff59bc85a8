#pragma once

// Search by marking: evaluate f into a register T of N flags, spawn one
// writer per marked cell, and let the arbiter serialize their writes into
// ANS/COUNT.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qsearch/arbiter.hpp"
#include "qsearch/ledger.hpp"
#include "qsearch/qsim.hpp"
#include "qsearch/rng.hpp"
#include "qsearch/trace.hpp"

namespace qsearch {

// The T register.
class MarkRegister {
 public:
  explicit MarkRegister(Index size) : marks_(size, false) {}

  Index size() const { return marks_.size(); }
  bool is_marked(Index j) const { return marks_.at(j); }
  void mark(Index j) { marks_.at(j) = true; }
  Index marked_count() const;

 private:
  std::vector<bool> marks_;
};

// Evaluates f at every index. The ledger, if given, is charged N predicate
// evaluations and no paper-model steps.
MarkRegister mark_solutions(const SearchProblem& problem, StepLedger* ledger = nullptr);

// One request per marked index, submit_order ascending by index.
std::vector<WriteRequest> spawn_writers(const MarkRegister& marks);

// Each write attempt fails independently with `probability` while
// attempt <= faulty_attempts. A failed attempt aborts before writing.
struct FaultConfig {
  double probability = 0.0;
  std::uint32_t max_reruns = 0;
  std::uint32_t faulty_attempts = UINT32_MAX;
  // Restart every writer (and clear ANS/COUNT) instead of respawning only
  // the failed one.
  bool full_restart = false;
};

enum class Execution {
  Simulated,  // deterministic single-threaded event sequence
  Stress,     // one thread per writer
};

struct ModifiedSearchConfig {
  SelectionPolicy policy;
  AnsMode ans_mode = AnsMode::Array;
  FaultConfig faults;
  Execution execution = Execution::Simulated;
  bool early_stop = false;
  // Permute writer submission order with this seed (makes Fifo differ from
  // ascending index).
  std::optional<std::uint64_t> shuffle_submit;
  // Called after every completed write with (ANS value, COUNT). Simulated
  // execution only.
  std::function<void(Index, std::uint64_t)> on_write;
};

struct ModifiedResult {
  std::uint64_t seed = 0;
  std::vector<Index> answers;  // values in the order they were written
  std::uint64_t count = 0;
  std::optional<Index> single_register;  // final ANS in single mode
  std::vector<TraceEvent> trace;
  StepLedger ledger;
  std::uint32_t attempts = 0;
  bool completed = false;

  bool operator==(const ModifiedResult&) const = default;
};

ModifiedResult run_modified_search(const SearchProblem& problem, const ModifiedSearchConfig& config, Rng& rng);

ModifiedResult run_modified_search(const SearchProblem& problem, const SelectionPolicy& policy, AnsMode mode,
                                   const FaultConfig& faults, Rng& rng);

struct EarlyStopResult {
  Index index = 0;
  StepLedger ledger;
};

// Stops after the first granted write. Throws NoSolutionError when M = 0.
EarlyStopResult early_stop_search(const SearchProblem& problem, const SelectionPolicy& policy, Rng& rng);

}  // namespace qsearch
