#pragma once

#include <stdexcept>
#include <string>

namespace qsearch {

// Base of every error raised by the library. Callers that only care about
// "something went wrong in qsearch" can catch this.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Register size outside the supported qubit range.
class SizeError : public SearchError {
 public:
  using SearchError::SearchError;
};

// State and problem disagree on dimension.
class ShapeError : public SearchError {
 public:
  using SearchError::SearchError;
};

// An operation that needs at least one solution was given M = 0.
class NoSolutionError : public SearchError {
 public:
  using SearchError::SearchError;
};

// Argument outside its mathematical domain (M > N, index >= N, ...).
class DomainError : public SearchError {
 public:
  using SearchError::SearchError;
};

// Arbitration protocol misuse, e.g. duplicate writer indices.
class ProtocolError : public SearchError {
 public:
  using SearchError::SearchError;
};

// A register write was attempted without holding the grant.
class ExclusionViolation : public SearchError {
 public:
  using SearchError::SearchError;
};

// A trace breaks the per-process event ordering.
class TraceError : public SearchError {
 public:
  using SearchError::SearchError;
};

// Bad command-line input. Maps to exit status 2.
class UsageError : public SearchError {
 public:
  using SearchError::SearchError;
};

}  // namespace qsearch
