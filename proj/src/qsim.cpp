#include "qsearch/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "qsearch/errors.hpp"

namespace qsearch {
namespace {

void require_same_shape(const QState& state, const SearchProblem& problem) {
  if (state.qubits() != problem.qubits()) {
    throw ShapeError("state has " + std::to_string(state.qubits()) + " qubits, problem has " +
                     std::to_string(problem.qubits()));
  }
}

}  // namespace

Index register_size(unsigned n) {
  if (n < 1 || n > kMaxQubits) {
    throw SizeError("qubit count " + std::to_string(n) + " outside [1, " +
                    std::to_string(kMaxQubits) + "]");
  }
  return Index{1} << n;
}

QState QState::basis(unsigned n, Index x) {
  const Index size = register_size(n);
  if (x >= size) throw DomainError("basis index " + std::to_string(x) + " >= " + std::to_string(size));
  std::vector<Amplitude> amplitudes(size);
  amplitudes[x] = 1.0;
  return QState(n, std::move(amplitudes));
}

QState QState::from_amplitudes(unsigned n, std::vector<Amplitude> amplitudes) {
  const Index size = register_size(n);
  if (amplitudes.size() != size) {
    throw ShapeError("expected " + std::to_string(size) + " amplitudes, got " +
                     std::to_string(amplitudes.size()));
  }
  QState state(n, std::move(amplitudes));
  if (std::abs(state.norm_squared() - 1.0) > 1e-9) throw DomainError("amplitudes are not normalized");
  return state;
}

double QState::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return total;
}

SearchProblem::SearchProblem(unsigned n, std::vector<Index> solutions) : n_(n) {
  const Index size = register_size(n);
  std::sort(solutions.begin(), solutions.end());
  solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());
  if (!solutions.empty() && solutions.back() >= size) {
    throw DomainError("solution " + std::to_string(solutions.back()) + " outside [0, " +
                      std::to_string(size) + ")");
  }
  auto marked = std::make_shared<std::vector<bool>>(size, false);
  for (Index x : solutions) (*marked)[x] = true;
  predicate_ = [marked](Index x) { return x < marked->size() && (*marked)[x]; };
  solutions_ = std::move(solutions);
}

SearchProblem SearchProblem::from_predicate(unsigned n, std::function<bool(Index)> predicate) {
  const Index size = register_size(n);
  std::vector<Index> solutions;
  for (Index x = 0; x < size; ++x) {
    if (predicate(x)) solutions.push_back(x);
  }
  return SearchProblem(n, std::move(predicate), std::move(solutions));
}

SearchProblem SearchProblem::random(unsigned n, Index m, Rng& rng) {
  const Index size = register_size(n);
  if (m > size) throw DomainError("cannot draw " + std::to_string(m) + " solutions from " + std::to_string(size));
  // Floyd's sampling: m draws, no rejection loop.
  std::unordered_set<Index> chosen;
  std::vector<Index> picks;
  picks.reserve(m);
  for (Index j = size - m; j < size; ++j) {
    const Index t = rng.below(j + 1);
    const Index pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    picks.push_back(pick);
  }
  return SearchProblem(n, std::move(picks));
}

QState uniform_superposition(unsigned n) {
  const Index size = register_size(n);
  return QState(n, std::vector<Amplitude>(size, Amplitude{1.0 / std::sqrt(static_cast<double>(size)), 0.0}));
}

QState apply_oracle_phase(QState state, const SearchProblem& problem) {
  require_same_shape(state, problem);
  auto& a = state.amplitudes_;
  for (Index x = 0; x < a.size(); ++x) {
    if (problem(x)) a[x] = -a[x];
  }
  return state;
}

QState apply_diffusion(QState state) {
  auto& a = state.amplitudes_;
  Amplitude sum{};
  for (const auto& v : a) sum += v;
  const Amplitude twice_mean = 2.0 * sum / static_cast<double>(a.size());
  for (auto& v : a) v = twice_mean - v;
  return state;
}

QState grover_iteration(QState state, const SearchProblem& problem) {
  require_same_shape(state, problem);
  auto& a = state.amplitudes_;
  Amplitude sum{};
  for (Index x = 0; x < a.size(); ++x) {
    if (problem(x)) a[x] = -a[x];
    sum += a[x];
  }
  const Amplitude twice_mean = 2.0 * sum / static_cast<double>(a.size());
  for (auto& v : a) v = twice_mean - v;
  return state;
}

double success_probability(const QState& state, const SearchProblem& problem) {
  require_same_shape(state, problem);
  double p = 0.0;
  for (Index x : problem.solutions()) p += std::norm(state[x]);
  return std::clamp(p, 0.0, 1.0);
}

Index measure(const QState& state, Rng& rng) {
  const double r = rng.uniform01();
  double cumulative = 0.0;
  Index last_nonzero = 0;
  for (Index x = 0; x < state.size(); ++x) {
    const double p = std::norm(state[x]);
    if (p == 0.0) continue;
    cumulative += p;
    last_nonzero = x;
    if (r < cumulative) return x;
  }
  // Rounding left the cumulative sum just under r.
  return last_nonzero;
}

}  // namespace qsearch
