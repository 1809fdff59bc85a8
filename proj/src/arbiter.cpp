#include "qsearch/arbiter.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>

#include "qsearch/errors.hpp"

namespace qsearch {
namespace {

constexpr std::array<std::string_view, 5> kPolicyNames = {"ascending", "descending", "fifo", "random",
                                                          "token-ring"};

void require_distinct(std::span<const WriteRequest> requests) {
  std::set<Index> seen;
  for (const auto& r : requests) {
    if (!seen.insert(r.index).second) throw ProtocolError("duplicate request for index " + std::to_string(r.index));
  }
}

std::vector<WriteRequest> in_submit_order(std::span<const WriteRequest> requests) {
  std::vector<WriteRequest> sorted(requests.begin(), requests.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const WriteRequest& a, const WriteRequest& b) { return a.submit_order < b.submit_order; });
  return sorted;
}

std::vector<Index> drain(std::vector<WriteRequest> waiting, GrantSelector& selector) {
  std::vector<Index> order;
  order.reserve(waiting.size());
  while (!waiting.empty()) {
    const std::size_t pos = selector.select(waiting);
    order.push_back(waiting[pos].index);
    waiting.erase(waiting.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return order;
}

}  // namespace

std::string_view to_string(PolicyKind kind) { return kPolicyNames[static_cast<std::size_t>(kind)]; }

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
    if (kPolicyNames[i] == name) return static_cast<PolicyKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(AnsMode mode) { return mode == AnsMode::Single ? "single" : "array"; }

std::optional<AnsMode> parse_ans_mode(std::string_view name) {
  if (name == "single") return AnsMode::Single;
  if (name == "array") return AnsMode::Array;
  return std::nullopt;
}

void AnsStore::write(Index j, std::uint64_t slot) {
  if (mode_ == AnsMode::Single) {
    single_ = j;
    return;
  }
  if (slot >= capacity_) throw DomainError("ANS slot " + std::to_string(slot) + " beyond capacity");
  if (slot != cells_.size()) throw ProtocolError("ANS slot " + std::to_string(slot) + " does not match COUNT");
  cells_.push_back(j);
}

void write_and_increment(Index j, AnsStore& ans, CountRegister& count) {
  ans.write(j, count.value());
  count.increment();
}

GrantSelector::GrantSelector(SelectionPolicy policy, Index ring_size)
    : policy_(policy), ring_size_(ring_size), rng_(policy.seed), token_(policy.token_start) {
  if (policy_.kind == PolicyKind::TokenRing && (ring_size_ == 0 || policy_.token_start >= ring_size_)) {
    throw DomainError("token start " + std::to_string(policy_.token_start) + " outside ring of size " +
                      std::to_string(ring_size_));
  }
}

std::size_t GrantSelector::select(std::span<const WriteRequest> waiting) {
  auto by_index = [](const WriteRequest& a, const WriteRequest& b) { return a.index < b.index; };
  auto position = [&](auto it) { return static_cast<std::size_t>(it - waiting.begin()); };
  switch (policy_.kind) {
    case PolicyKind::AscendingIndex:
      return position(std::min_element(waiting.begin(), waiting.end(), by_index));
    case PolicyKind::DescendingIndex:
      return position(std::max_element(waiting.begin(), waiting.end(), by_index));
    case PolicyKind::Fifo:
      return position(std::min_element(waiting.begin(), waiting.end(), [](const auto& a, const auto& b) {
        return a.submit_order < b.submit_order;
      }));
    case PolicyKind::Random:
      return static_cast<std::size_t>(rng_.below(waiting.size()));
    case PolicyKind::TokenRing: {
      std::size_t best = 0;
      Index best_distance = ring_size_;
      for (std::size_t i = 0; i < waiting.size(); ++i) {
        if (waiting[i].index >= ring_size_) throw DomainError("index outside the token ring");
        const Index distance = (waiting[i].index + ring_size_ - token_) % ring_size_;
        if (distance < best_distance) {
          best_distance = distance;
          best = i;
        }
      }
      // The token stops at the granted node, then moves on to its successor.
      hops_ += best_distance + 1;
      token_ = (waiting[best].index + 1) % ring_size_;
      return best;
    }
  }
  return 0;
}

std::uint64_t GrantSelector::token_hops() const {
  if (policy_.kind != PolicyKind::TokenRing) return 0;
  if (hops_ == 0) return ring_size_;
  return hops_ + (policy_.token_start + ring_size_ - token_) % ring_size_;
}

std::vector<Index> ccc_arbitrate(std::span<const WriteRequest> requests, const SelectionPolicy& policy) {
  if (policy.kind == PolicyKind::TokenRing) throw ProtocolError("token ring is not a central policy");
  require_distinct(requests);
  GrantSelector selector(policy, 0);
  return drain(in_submit_order(requests), selector);
}

std::vector<Index> token_ring_arbitrate(std::span<const WriteRequest> requests, Index start, Index ring_size) {
  require_distinct(requests);
  GrantSelector selector(SelectionPolicy::token_ring(start), ring_size);
  return drain(in_submit_order(requests), selector);
}

Arbiter::Arbiter(SelectionPolicy policy, AnsMode mode, Index ring_size)
    : selector_(policy, ring_size), ans_(mode, ring_size) {}

void Arbiter::record_locked(EventKind kind, Index process) { trace_.push_back({kind, process, clock_++}); }

void Arbiter::admit_locked(const WriteRequest& request) {
  for (const auto& w : waiting_) {
    if (w.index == request.index) throw ProtocolError("index " + std::to_string(request.index) + " already waiting");
  }
  WriteRequest admitted = request;
  admitted.submit_order = admissions_++;
  waiting_.push_back(admitted);
  record_locked(EventKind::Request, request.index);
}

void Arbiter::dispatch_locked() {
  if (halted_ || holder_ || waiting_.empty()) return;
  const std::size_t pos = selector_.select(waiting_);
  const WriteRequest chosen = waiting_[pos];
  waiting_.erase(waiting_.begin() + static_cast<std::ptrdiff_t>(pos));
  holder_ = Grant{chosen.index, chosen.attempt, next_serial_++};
  record_locked(EventKind::Grant, chosen.index);
  granted_cv_.notify_all();
}

void Arbiter::require_holder_locked(const Grant& grant, const char* action) const {
  if (!holder_ || holder_->serial != grant.serial || holder_->index != grant.index) {
    throw ExclusionViolation(std::string(action) + " by process " + std::to_string(grant.index) +
                             " without holding the grant");
  }
}

void Arbiter::submit(const WriteRequest& request) {
  std::lock_guard lock(mu_);
  admit_locked(request);
  dispatch_locked();
}

void Arbiter::submit_all(std::span<const WriteRequest> requests) {
  require_distinct(requests);
  const auto ordered = in_submit_order(requests);
  std::lock_guard lock(mu_);
  for (const auto& r : ordered) admit_locked(r);
  dispatch_locked();
}

Grant Arbiter::await_grant(const WriteRequest& request) {
  std::unique_lock lock(mu_);
  auto is_mine = [&] { return holder_ && holder_->index == request.index && holder_->attempt == request.attempt; };
  auto still_waiting = [&] {
    return std::any_of(waiting_.begin(), waiting_.end(), [&](const WriteRequest& w) {
      return w.index == request.index && w.attempt == request.attempt;
    });
  };
  granted_cv_.wait(lock, [&] { return is_mine() || !still_waiting(); });
  if (!is_mine()) throw ProtocolError("request for index " + std::to_string(request.index) + " was cancelled");
  return *holder_;
}

std::optional<Grant> Arbiter::current_grant() const {
  std::lock_guard lock(mu_);
  return holder_;
}

void Arbiter::write_and_increment(const Grant& grant) {
  {
    std::lock_guard lock(mu_);
    require_holder_locked(grant, "write");
    record_locked(EventKind::WriteStart, grant.index);
  }
  // The registers are guarded by the grant alone. occupancy_ catches any
  // second writer that gets in anyway.
  if (occupancy_.fetch_add(1) != 0) violations_.fetch_add(1);
  qsearch::write_and_increment(grant.index, ans_, count_);
  occupancy_.fetch_sub(1);
  {
    std::lock_guard lock(mu_);
    written_.push_back(grant.index);
    record_locked(EventKind::WriteEnd, grant.index);
  }
}

void Arbiter::release(const Grant& grant) {
  std::lock_guard lock(mu_);
  require_holder_locked(grant, "release");
  record_locked(EventKind::Release, grant.index);
  holder_.reset();
  dispatch_locked();
}

void Arbiter::fail(const Grant& grant, std::optional<WriteRequest> respawn) {
  std::lock_guard lock(mu_);
  require_holder_locked(grant, "fail");
  record_locked(EventKind::Fail, grant.index);
  holder_.reset();
  if (respawn) admit_locked(*respawn);
  dispatch_locked();
}

void Arbiter::cancel_waiting() {
  std::lock_guard lock(mu_);
  for (const auto& w : waiting_) record_locked(EventKind::Fail, w.index);
  waiting_.clear();
  granted_cv_.notify_all();
}

void Arbiter::halt() {
  {
    std::lock_guard lock(mu_);
    halted_ = true;
  }
  cancel_waiting();
}

void Arbiter::reset_registers() {
  std::lock_guard lock(mu_);
  ans_ = AnsStore(ans_.mode(), ans_.capacity());
  count_ = CountRegister{};
  written_.clear();
}

AnsStore Arbiter::ans() const {
  std::lock_guard lock(mu_);
  return ans_;
}

CountRegister Arbiter::count() const {
  std::lock_guard lock(mu_);
  return count_;
}

std::vector<Index> Arbiter::written() const {
  std::lock_guard lock(mu_);
  return written_;
}

std::vector<TraceEvent> Arbiter::trace() const {
  std::lock_guard lock(mu_);
  return trace_;
}

std::uint64_t Arbiter::grants_issued() const {
  std::lock_guard lock(mu_);
  return next_serial_;
}

std::uint64_t Arbiter::token_hops() const {
  std::lock_guard lock(mu_);
  return selector_.token_hops();
}

VerificationReport verify_trace(std::span<const TraceEvent> trace, std::span<const Index> expected, Index m) {
  enum class State { Idle, Requested, Granted, Writing, Written };

  std::vector<TraceEvent> events(trace.begin(), trace.end());
  std::stable_sort(events.begin(), events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time == events[i - 1].time) {
      throw TraceError("two events at logical time " + std::to_string(events[i].time));
    }
  }

  VerificationReport report;
  std::map<Index, State> state;
  std::map<Index, std::uint64_t> position;
  std::uint64_t outstanding = 0;
  std::uint64_t writers_inside = 0;

  for (const auto& e : events) {
    State& s = state.try_emplace(e.process, State::Idle).first->second;
    auto broken = [&] {
      return TraceError("process " + std::to_string(e.process) + ": unexpected " + std::string(to_string(e.kind)) +
                        " at time " + std::to_string(e.time));
    };
    switch (e.kind) {
      case EventKind::Request:
        if (s != State::Idle) throw broken();
        s = State::Requested;
        break;
      case EventKind::Grant:
        if (s != State::Requested) throw broken();
        if (outstanding > 0) report.single_grant_ok = false;
        ++outstanding;
        s = State::Granted;
        if (!position.contains(e.process)) {
          const std::uint64_t predecessors = position.size();
          position.emplace(e.process, predecessors);
          report.max_wait_position = std::max(report.max_wait_position, predecessors);
          if (predecessors + 1 > m) report.starvation_ok = false;
        }
        break;
      case EventKind::WriteStart:
        if (s != State::Granted) throw broken();
        if (writers_inside > 0) report.mutual_exclusion_ok = false;
        ++writers_inside;
        s = State::Writing;
        break;
      case EventKind::WriteEnd:
        if (s != State::Writing) throw broken();
        --writers_inside;
        s = State::Written;
        break;
      case EventKind::Release:
        if (s != State::Written) throw broken();
        --outstanding;
        s = State::Idle;
        break;
      case EventKind::Fail:
        if (s == State::Granted) {
          --outstanding;
        } else if (s != State::Requested) {
          throw broken();
        }
        s = State::Idle;
        break;
    }
  }

  report.processes_granted = position.size();
  for (Index j : expected) {
    if (!position.contains(j)) report.starvation_ok = false;
  }
  for (const auto& [process, s] : state) {
    if (s != State::Idle) report.deadlock_ok = false;
  }
  return report;
}

}  // namespace qsearch
