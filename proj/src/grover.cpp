#include "qsearch/grover.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qsearch/errors.hpp"

namespace qsearch {

std::uint64_t optimal_iterations(Index n_items, Index m) {
  if (!std::has_single_bit(n_items)) throw DomainError("N = " + std::to_string(n_items) + " is not a power of two");
  if (m == 0) throw NoSolutionError("no solutions: rotation angle undefined");
  if (m > n_items) throw DomainError("M = " + std::to_string(m) + " exceeds N = " + std::to_string(n_items));
  if (m == n_items) return 0;
  const double ratio = static_cast<double>(n_items) / static_cast<double>(m);
  const auto k = static_cast<std::uint64_t>(std::floor(std::numbers::pi / 4.0 * std::sqrt(ratio)));
  return k == 0 ? 1 : k;
}

GroverResult run_grover(const SearchProblem& problem, std::optional<std::uint64_t> iterations, Rng& rng) {
  const Index size = problem.size();
  const std::uint64_t k = iterations ? *iterations : optimal_iterations(size, problem.solution_count());

  GroverResult result;
  result.seed = rng.seed();
  result.iterations_used = k;

  QState state = uniform_superposition(problem.qubits());
  result.ledger.amplitude_ops += size;
  for (std::uint64_t i = 0; i < k; ++i) {
    state = grover_iteration(std::move(state), problem);
    result.ledger.grover_iterations += 1;
    result.ledger.predicate_evals += size;
    result.ledger.amplitude_ops += kAmplitudePassesPerIteration * size;
  }

  result.success_probability = success_probability(state, problem);
  result.sampled_index = measure(state, rng);
  result.ledger.amplitude_ops += size;
  result.is_solution = problem(result.sampled_index);
  return result;
}

}  // namespace qsearch
