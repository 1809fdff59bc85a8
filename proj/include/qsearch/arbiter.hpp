#pragma once

// Mutual exclusion over the ANS/COUNT registers: selection policies, the
// central controller, a token-ring alternative, and trace verification.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qsearch/qsim.hpp"
#include "qsearch/rng.hpp"
#include "qsearch/trace.hpp"

namespace qsearch {

enum class PolicyKind { AscendingIndex, DescendingIndex, Fifo, Random, TokenRing };

struct SelectionPolicy {
  PolicyKind kind = PolicyKind::AscendingIndex;
  std::uint64_t seed = 0;   // Random only
  Index token_start = 0;    // TokenRing only

  static SelectionPolicy ascending() { return {PolicyKind::AscendingIndex}; }
  static SelectionPolicy descending() { return {PolicyKind::DescendingIndex}; }
  static SelectionPolicy fifo() { return {PolicyKind::Fifo}; }
  static SelectionPolicy random(std::uint64_t seed) { return {PolicyKind::Random, seed}; }
  static SelectionPolicy token_ring(Index start) { return {PolicyKind::TokenRing, 0, start}; }

  bool operator==(const SelectionPolicy&) const = default;
};

std::string_view to_string(PolicyKind kind);
// Accepts ascending | descending | fifo | random | token-ring.
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

enum class AnsMode { Single, Array };

std::string_view to_string(AnsMode mode);
std::optional<AnsMode> parse_ans_mode(std::string_view name);

// Writer process P(j): asks for exclusive access to write j.
struct WriteRequest {
  Index index = 0;
  std::uint64_t submit_order = 0;
  std::uint32_t attempt = 1;

  bool operator==(const WriteRequest&) const = default;
};

class CountRegister {
 public:
  std::uint64_t value() const { return value_; }
  void increment() { ++value_; }

 private:
  std::uint64_t value_ = 0;
};

// ANS: either one cell overwritten by every write, or N cells addressed by
// COUNT.
class AnsStore {
 public:
  AnsStore(AnsMode mode, Index capacity) : mode_(mode), capacity_(capacity) {}

  AnsMode mode() const { return mode_; }
  Index capacity() const { return capacity_; }
  std::optional<Index> single() const { return single_; }
  // Array mode: cell i holds the i-th written index.
  std::span<const Index> cells() const { return cells_; }

  // Writes j at cell `slot` (array mode) or into the single cell.
  void write(Index j, std::uint64_t slot);

 private:
  AnsMode mode_;
  Index capacity_;
  std::optional<Index> single_;
  std::vector<Index> cells_;
};

// One critical section: write j at COUNT, then COUNT += 1.
void write_and_increment(Index j, AnsStore& ans, CountRegister& count);

// Picks the next request to grant from a waiting list. Holds the policy's
// mutable state (Random's generator, the token position).
class GrantSelector {
 public:
  GrantSelector(SelectionPolicy policy, Index ring_size);

  // Position in `waiting` of the request to grant. `waiting` must be
  // non-empty and in arrival order.
  std::size_t select(std::span<const WriteRequest> waiting);

  // Token moves so far, completed to a full lap back to the start position.
  // Zero for the central policies.
  std::uint64_t token_hops() const;

 private:
  SelectionPolicy policy_;
  Index ring_size_;
  Rng rng_;
  Index token_ = 0;
  std::uint64_t hops_ = 0;
};

// Grant order the central controller produces when flooded with all
// requests at once. Throws ProtocolError on duplicate indices or for the
// TokenRing policy (use token_ring_arbitrate).
std::vector<Index> ccc_arbitrate(std::span<const WriteRequest> requests, const SelectionPolicy& policy);

// Grant order of a token circulating start, start+1, ... mod ring_size.
std::vector<Index> token_ring_arbitrate(std::span<const WriteRequest> requests, Index start, Index ring_size);

struct Grant {
  Index index = 0;
  std::uint32_t attempt = 1;
  std::uint64_t serial = 0;
};

// The controller guarding ANS and COUNT as one shared resource.
//
// Thread-safe. Grants are issued one at a time, in the order the policy
// picks among the requests waiting at that moment. Register mutation happens
// outside the internal lock; only the grant protects it. Every event is
// stamped with a logical time at admission, so trace() is ordered.
//
// Single-threaded callers flood with submit_all() and then drive the loop via
// current_grant(); worker threads call submit() and block in await_grant().
class Arbiter {
 public:
  Arbiter(SelectionPolicy policy, AnsMode mode, Index ring_size);

  Arbiter(const Arbiter&) = delete;
  Arbiter& operator=(const Arbiter&) = delete;

  void submit(const WriteRequest& request);
  // Admits every request (in submit_order) before granting any of them.
  void submit_all(std::span<const WriteRequest> requests);

  Grant await_grant(const WriteRequest& request);
  std::optional<Grant> current_grant() const;

  // Throws ExclusionViolation unless `grant` is the outstanding grant.
  void write_and_increment(const Grant& grant);
  void release(const Grant& grant);
  // Gives the grant up without writing. A respawned request, if given, is
  // admitted before the next grant is chosen.
  void fail(const Grant& grant, std::optional<WriteRequest> respawn = std::nullopt);

  // Records Fail for every waiting request and drops them.
  void cancel_waiting();
  // cancel_waiting(), and no further grants are issued.
  void halt();
  // Fresh ANS and COUNT (full restart).
  void reset_registers();

  AnsStore ans() const;
  CountRegister count() const;
  std::vector<Index> written() const;
  std::vector<TraceEvent> trace() const;
  std::uint64_t grants_issued() const;
  std::uint64_t token_hops() const;
  // Writers observed inside the critical section at the same time.
  std::uint64_t exclusion_violations() const { return violations_.load(); }

 private:
  void admit_locked(const WriteRequest& request);
  void record_locked(EventKind kind, Index process);
  void dispatch_locked();
  void require_holder_locked(const Grant& grant, const char* action) const;

  mutable std::mutex mu_;
  std::condition_variable granted_cv_;
  GrantSelector selector_;
  std::vector<WriteRequest> waiting_;
  std::optional<Grant> holder_;
  bool halted_ = false;
  std::uint64_t clock_ = 0;
  std::uint64_t next_serial_ = 0;
  std::uint64_t admissions_ = 0;
  std::vector<TraceEvent> trace_;
  std::vector<Index> written_;

  AnsStore ans_;
  CountRegister count_;
  std::atomic<int> occupancy_{0};
  std::atomic<std::uint64_t> violations_{0};
};

struct VerificationReport {
  bool mutual_exclusion_ok = true;  // no overlapping WriteStart..WriteEnd
  bool single_grant_ok = true;      // never two grants outstanding
  bool starvation_ok = true;        // every expected index granted, position <= M
  bool deadlock_ok = true;          // every Request ends in Release or Fail
  std::uint64_t max_wait_position = 0;  // most processes granted ahead of any one
  std::uint64_t processes_granted = 0;

  bool all_ok() const { return mutual_exclusion_ok && single_grant_ok && starvation_ok && deadlock_ok; }
  bool operator==(const VerificationReport&) const = default;
};

// Checks a complete trace. Throws TraceError if a process's events break
// Request < Grant < WriteStart < WriteEnd < Release (with Fail allowed after
// Request or Grant) or if two events share a logical time.
VerificationReport verify_trace(std::span<const TraceEvent> trace, std::span<const Index> expected, Index m);

}  // namespace qsearch
