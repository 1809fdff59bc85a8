#pragma once

#include <cstdint>
#include <optional>

#include "qsearch/ledger.hpp"
#include "qsearch/qsim.hpp"
#include "qsearch/rng.hpp"

namespace qsearch {

struct GroverResult {
  std::uint64_t seed = 0;
  Index sampled_index = 0;
  bool is_solution = false;
  double success_probability = 0.0;
  std::uint64_t iterations_used = 0;
  StepLedger ledger;

  bool operator==(const GroverResult&) const = default;
};

// floor((pi/4) * sqrt(N/M)), raised to 1 when that floor is 0 and M < N;
// 0 when M == N. Throws NoSolutionError for M == 0 and DomainError when
// M > N or N is not a power of two.
std::uint64_t optimal_iterations(Index n_items, Index m);

// Prepares the uniform state, applies `iterations` Grover iterations
// (std::nullopt picks optimal_iterations) and measures once.
GroverResult run_grover(const SearchProblem& problem, std::optional<std::uint64_t> iterations, Rng& rng);

}  // namespace qsearch
