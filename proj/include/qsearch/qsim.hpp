#pragma once

// Dense state-vector simulation of the search register.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qsearch/rng.hpp"

namespace qsearch {

using Amplitude = std::complex<double>;
using Index = std::uint64_t;

inline constexpr unsigned kMaxQubits = 24;

// Register dimension 2^n. Throws SizeError unless 1 <= n <= kMaxQubits.
Index register_size(unsigned n);

class SearchProblem;

// Amplitude vector over the 2^n computational basis states.
//
// Treated as an immutable value: the operations below take a state by value
// and hand back the transformed one, so moving a state through a pipeline
// never copies.
class QState {
 public:
  static QState basis(unsigned n, Index x);
  // Validates the length and that the norm is 1 within 1e-9.
  static QState from_amplitudes(unsigned n, std::vector<Amplitude> amplitudes);

  unsigned qubits() const { return n_; }
  Index size() const { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  const Amplitude& operator[](Index x) const { return amplitudes_[x]; }
  double norm_squared() const;

 private:
  QState(unsigned n, std::vector<Amplitude> amplitudes)
      : n_(n), amplitudes_(std::move(amplitudes)) {}

  unsigned n_;
  std::vector<Amplitude> amplitudes_;

  friend QState uniform_superposition(unsigned n);
  friend QState apply_diffusion(QState state);
  friend QState apply_oracle_phase(QState state, const SearchProblem& problem);
  friend QState grover_iteration(QState state, const SearchProblem& problem);
};

// A search instance: the membership predicate f over [0, 2^n) together with
// its explicit sorted solution set.
class SearchProblem {
 public:
  // Solutions are sorted and deduplicated. Throws DomainError for an index
  // outside [0, 2^n).
  SearchProblem(unsigned n, std::vector<Index> solutions);

  // Enumerates f over the whole domain to build the solution set.
  static SearchProblem from_predicate(unsigned n, std::function<bool(Index)> predicate);

  // m distinct solutions drawn uniformly without replacement.
  static SearchProblem random(unsigned n, Index m, Rng& rng);

  unsigned qubits() const { return n_; }
  Index size() const { return Index{1} << n_; }
  Index solution_count() const { return solutions_.size(); }
  std::span<const Index> solutions() const { return solutions_; }

  bool operator()(Index x) const { return predicate_(x); }

 private:
  SearchProblem(unsigned n, std::function<bool(Index)> predicate, std::vector<Index> solutions)
      : n_(n), predicate_(std::move(predicate)), solutions_(std::move(solutions)) {}

  unsigned n_;
  std::function<bool(Index)> predicate_;
  std::vector<Index> solutions_;
};

// H^n |0...0>: every amplitude 1/sqrt(2^n).
QState uniform_superposition(unsigned n);

// Negates the amplitude of every x with f(x) = 1.
QState apply_oracle_phase(QState state, const SearchProblem& problem);

// Reflection about the uniform state, 2|u><u| - I. Equal to the
// Hadamard / conditional phase / Hadamard sandwich, done as a_x <- 2*mean - a_x.
QState apply_diffusion(QState state);

// apply_diffusion(apply_oracle_phase(state)), fused into two passes.
QState grover_iteration(QState state, const SearchProblem& problem);

// Total probability on solution states.
double success_probability(const QState& state, const SearchProblem& problem);

// Samples x with probability |a_x|^2. Consumes one draw from rng.
Index measure(const QState& state, Rng& rng);

}  // namespace qsearch
