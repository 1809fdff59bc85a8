#include "qsearch/marksearch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <latch>
#include <mutex>
#include <string>
#include <thread>

#include "qsearch/errors.hpp"

namespace qsearch {
namespace {

class FaultSchedule {
 public:
  FaultSchedule(const FaultConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {}

  // Keyed on (index, attempt) so the outcome does not depend on which
  // thread asks first.
  bool fails(Index j, std::uint32_t attempt) const {
    if (config_.probability <= 0.0 || attempt > config_.faulty_attempts) return false;
    return keyed_uniform01(seed_, j, attempt) < config_.probability;
  }

  std::uint64_t max_attempts() const { return std::uint64_t{config_.max_reruns} + 1; }

 private:
  FaultConfig config_;
  std::uint64_t seed_;
};

void validate(const ModifiedSearchConfig& config) {
  const auto& f = config.faults;
  if (!(f.probability >= 0.0 && f.probability <= 1.0)) throw DomainError("fault probability outside [0, 1]");
  if (config.execution == Execution::Stress) {
    if (f.full_restart) throw DomainError("stress execution does not support full restart");
    if (config.early_stop) throw DomainError("stress execution does not support early stop");
    if (config.on_write) throw DomainError("stress execution does not support write callbacks");
  }
}

std::vector<WriteRequest> shuffled(std::vector<WriteRequest> requests, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = requests.size(); i > 1; --i) {
    std::swap(requests[i - 1], requests[rng.below(i)]);
  }
  for (std::size_t i = 0; i < requests.size(); ++i) requests[i].submit_order = i;
  return requests;
}

std::vector<WriteRequest> with_attempt(std::vector<WriteRequest> requests, std::uint32_t attempt) {
  for (auto& r : requests) r.attempt = attempt;
  return requests;
}

// Returns the highest attempt number granted.
std::uint32_t simulate_partial(Arbiter& arbiter, std::span<const WriteRequest> requests, const FaultSchedule& faults,
                               const ModifiedSearchConfig& config, StepLedger& ledger) {
  std::uint32_t attempts = 1;
  arbiter.submit_all(requests);
  while (auto grant = arbiter.current_grant()) {
    attempts = std::max(attempts, grant->attempt);
    if (faults.fails(grant->index, grant->attempt)) {
      if (grant->attempt < faults.max_attempts()) {
        arbiter.fail(*grant, WriteRequest{grant->index, 0, grant->attempt + 1});
      } else {
        arbiter.fail(*grant);
      }
      continue;
    }
    arbiter.write_and_increment(*grant);
    ledger.paper_steps += 1;
    if (config.on_write) config.on_write(grant->index, arbiter.count().value());
    if (config.early_stop) arbiter.halt();
    arbiter.release(*grant);
    if (config.early_stop) break;
  }
  return attempts;
}

// Returns the number of passes made.
std::uint32_t simulate_full_restart(Arbiter& arbiter, const std::vector<WriteRequest>& requests,
                                    const FaultSchedule& faults, const ModifiedSearchConfig& config,
                                    StepLedger& ledger) {
  std::uint32_t pass = 0;
  for (;;) {
    ++pass;
    arbiter.submit_all(with_attempt(requests, pass));
    bool failed = false;
    while (auto grant = arbiter.current_grant()) {
      if (faults.fails(grant->index, pass)) {
        arbiter.cancel_waiting();
        arbiter.fail(*grant);
        failed = true;
        break;
      }
      arbiter.write_and_increment(*grant);
      ledger.paper_steps += 1;
      if (config.on_write) config.on_write(grant->index, arbiter.count().value());
      if (config.early_stop) arbiter.halt();
      arbiter.release(*grant);
      if (config.early_stop) break;
    }
    if (!failed || pass >= faults.max_attempts()) return pass;
    arbiter.reset_registers();
  }
}

std::uint32_t run_stress(Arbiter& arbiter, std::span<const WriteRequest> requests, const FaultSchedule& faults,
                         StepLedger& ledger) {
  std::latch start(static_cast<std::ptrdiff_t>(requests.size()));
  std::atomic<std::uint32_t> attempts{1};
  std::mutex error_mu;
  std::exception_ptr error;

  std::vector<std::thread> writers;
  writers.reserve(requests.size());
  for (const auto& spawned : requests) {
    writers.emplace_back([&, spawned] {
      start.arrive_and_wait();
      try {
        WriteRequest request = spawned;
        arbiter.submit(request);
        // Yield points let writers interleave even on a single core.
        std::this_thread::yield();
        for (;;) {
          const Grant grant = arbiter.await_grant(request);
          std::uint32_t seen = attempts.load();
          while (seen < grant.attempt && !attempts.compare_exchange_weak(seen, grant.attempt)) {
          }
          if (faults.fails(grant.index, grant.attempt)) {
            if (grant.attempt < faults.max_attempts()) {
              ++request.attempt;
              arbiter.fail(grant, request);
              continue;
            }
            arbiter.fail(grant);
            return;
          }
          arbiter.write_and_increment(grant);
          std::this_thread::yield();
          arbiter.release(grant);
          return;
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        arbiter.halt();
      }
    });
  }
  for (auto& w : writers) w.join();
  if (error) std::rethrow_exception(error);
  ledger.paper_steps += arbiter.written().size();
  return attempts.load();
}

}  // namespace

Index MarkRegister::marked_count() const {
  return static_cast<Index>(std::count(marks_.begin(), marks_.end(), true));
}

MarkRegister mark_solutions(const SearchProblem& problem, StepLedger* ledger) {
  MarkRegister marks(problem.size());
  for (Index x = 0; x < problem.size(); ++x) {
    if (problem(x)) marks.mark(x);
  }
  if (ledger) ledger->predicate_evals += problem.size();
  return marks;
}

std::vector<WriteRequest> spawn_writers(const MarkRegister& marks) {
  std::vector<WriteRequest> requests;
  for (Index j = 0; j < marks.size(); ++j) {
    if (marks.is_marked(j)) requests.push_back({j, requests.size(), 1});
  }
  return requests;
}

ModifiedResult run_modified_search(const SearchProblem& problem, const ModifiedSearchConfig& config, Rng& rng) {
  validate(config);
  const FaultSchedule faults(config.faults, rng.next());

  ModifiedResult result;
  result.seed = rng.seed();
  StepLedger ledger;
  // Register preparation and the Hadamard layer: one unit per qubit.
  ledger.paper_steps += problem.qubits();

  const MarkRegister marks = mark_solutions(problem, &ledger);
  std::vector<WriteRequest> requests = spawn_writers(marks);
  if (config.shuffle_submit) requests = shuffled(std::move(requests), *config.shuffle_submit);

  Arbiter arbiter(config.policy, config.ans_mode, problem.size());
  if (config.execution == Execution::Stress) {
    result.attempts = run_stress(arbiter, requests, faults, ledger);
  } else if (config.faults.full_restart) {
    result.attempts = simulate_full_restart(arbiter, requests, faults, config, ledger);
  } else {
    result.attempts = simulate_partial(arbiter, requests, faults, config, ledger);
  }

  result.trace = arbiter.trace();
  result.answers = arbiter.written();
  result.count = arbiter.count().value();
  if (config.ans_mode == AnsMode::Single) result.single_register = arbiter.ans().single();
  ledger.grants_issued = arbiter.grants_issued();
  ledger.token_hops = arbiter.token_hops();
  result.ledger = ledger;
  result.completed = config.early_stop ? (requests.empty() || result.count >= 1) : result.count == requests.size();
  return result;
}

ModifiedResult run_modified_search(const SearchProblem& problem, const SelectionPolicy& policy, AnsMode mode,
                                   const FaultConfig& faults, Rng& rng) {
  ModifiedSearchConfig config;
  config.policy = policy;
  config.ans_mode = mode;
  config.faults = faults;
  return run_modified_search(problem, config, rng);
}

EarlyStopResult early_stop_search(const SearchProblem& problem, const SelectionPolicy& policy, Rng& rng) {
  if (problem.solution_count() == 0) throw NoSolutionError("early stop needs at least one solution");
  ModifiedSearchConfig config;
  config.policy = policy;
  config.early_stop = true;
  const ModifiedResult result = run_modified_search(problem, config, rng);
  return {result.answers.front(), result.ledger};
}

}  // namespace qsearch
