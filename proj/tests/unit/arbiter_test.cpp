#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "qsearch/arbiter.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/trace.hpp"

using namespace qsearch;

namespace {

std::vector<WriteRequest> requests(std::initializer_list<Index> indices) {
  std::vector<WriteRequest> out;
  for (Index j : indices) out.push_back({j, out.size(), 1});
  return out;
}

// Sequential, fault-free trace for the given grant order.
std::vector<TraceEvent> clean_trace(const std::vector<Index>& order) {
  std::vector<TraceEvent> trace;
  std::uint64_t t = 0;
  for (Index j : order) trace.push_back({EventKind::Request, j, t++});
  for (Index j : order) {
    for (auto kind : {EventKind::Grant, EventKind::WriteStart, EventKind::WriteEnd, EventKind::Release}) {
      trace.push_back({kind, j, t++});
    }
  }
  return trace;
}

}  // namespace

TEST(CccArbitrate, Ascending) {
  EXPECT_EQ(ccc_arbitrate(requests({5, 3, 7}), SelectionPolicy::ascending()), (std::vector<Index>{3, 5, 7}));
  EXPECT_EQ(ccc_arbitrate(requests({5, 3, 7}), SelectionPolicy::descending()), (std::vector<Index>{7, 5, 3}));
  EXPECT_EQ(ccc_arbitrate(requests({5, 3, 7}), SelectionPolicy::fifo()), (std::vector<Index>{5, 3, 7}));
  EXPECT_EQ(ccc_arbitrate(requests({4}), SelectionPolicy::ascending()), (std::vector<Index>{4}));
}

TEST(CccArbitrate, RandomIsSeeded) {
  const auto a = ccc_arbitrate(requests({1, 2, 3}), SelectionPolicy::random(42));
  const auto b = ccc_arbitrate(requests({1, 2, 3}), SelectionPolicy::random(42));
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<Index>{1, 2, 3}));
}

TEST(CccArbitrate, Errors) {
  EXPECT_THROW(ccc_arbitrate(requests({1, 1}), SelectionPolicy::ascending()), ProtocolError);
  EXPECT_THROW(ccc_arbitrate(requests({1}), SelectionPolicy::token_ring(0)), ProtocolError);
}

TEST(TokenRing, RingOrder) {
  EXPECT_EQ(token_ring_arbitrate(requests({5, 3, 7}), 0, 8), (std::vector<Index>{3, 5, 7}));
  EXPECT_EQ(token_ring_arbitrate(requests({5, 3, 7}), 4, 8), (std::vector<Index>{5, 7, 3}));
  EXPECT_TRUE(token_ring_arbitrate({}, 0, 8).empty());
  EXPECT_THROW(token_ring_arbitrate(requests({1}), 8, 8), DomainError);
}

TEST(TokenRing, HopsCoverWholeRing) {
  GrantSelector idle(SelectionPolicy::token_ring(3), 16);
  EXPECT_EQ(idle.token_hops(), 16u);

  GrantSelector selector(SelectionPolicy::token_ring(4), 8);
  std::vector<WriteRequest> waiting = requests({5, 3, 7});
  while (!waiting.empty()) waiting.erase(waiting.begin() + static_cast<long>(selector.select(waiting)));
  EXPECT_EQ(selector.token_hops(), 8u);
}

TEST(Registers, ArrayMode) {
  AnsStore ans(AnsMode::Array, 8);
  CountRegister count;
  write_and_increment(3, ans, count);
  ASSERT_EQ(ans.cells().size(), 1u);
  EXPECT_EQ(ans.cells()[0], 3u);
  EXPECT_EQ(count.value(), 1u);
}

TEST(Registers, SingleModeOverwrites) {
  AnsStore ans(AnsMode::Single, 8);
  CountRegister count;
  write_and_increment(3, ans, count);
  write_and_increment(5, ans, count);
  EXPECT_EQ(ans.single(), 5u);
  EXPECT_EQ(count.value(), 2u);
}

TEST(Registers, CountEqualsGrants) {
  AnsStore ans(AnsMode::Array, 64);
  CountRegister count;
  for (Index j = 0; j < 40; ++j) write_and_increment(j * 7 % 64, ans, count);
  EXPECT_EQ(count.value(), 40u);
  AnsStore tiny(AnsMode::Array, 1);
  CountRegister c2;
  write_and_increment(0, tiny, c2);
  EXPECT_THROW(write_and_increment(0, tiny, c2), DomainError);
}

TEST(ArbiterTest, WriteWithoutGrantIsRejected) {
  Arbiter arbiter(SelectionPolicy::ascending(), AnsMode::Array, 8);
  arbiter.submit_all(requests({2, 6}));
  const Grant held = *arbiter.current_grant();
  EXPECT_EQ(held.index, 2u);
  const Grant forged{6, 1, held.serial + 1};
  EXPECT_THROW(arbiter.write_and_increment(forged), ExclusionViolation);
  EXPECT_THROW(arbiter.release(forged), ExclusionViolation);
  arbiter.write_and_increment(held);
  arbiter.release(held);
  EXPECT_THROW(arbiter.write_and_increment(held), ExclusionViolation);
  EXPECT_EQ(arbiter.current_grant()->index, 6u);
}

TEST(ArbiterTest, RespawnIsAdmittedBeforeNextGrant) {
  Arbiter arbiter(SelectionPolicy::ascending(), AnsMode::Array, 8);
  arbiter.submit_all(requests({1, 4}));
  const Grant first = *arbiter.current_grant();
  arbiter.fail(first, WriteRequest{1, 0, 2});
  const Grant retry = *arbiter.current_grant();
  EXPECT_EQ(retry.index, 1u);
  EXPECT_EQ(retry.attempt, 2u);
}

TEST(ArbiterTest, HaltCancelsWaiters) {
  Arbiter arbiter(SelectionPolicy::ascending(), AnsMode::Array, 8);
  arbiter.submit_all(requests({1, 4, 6}));
  const Grant g = *arbiter.current_grant();
  arbiter.write_and_increment(g);
  arbiter.halt();
  arbiter.release(g);
  EXPECT_FALSE(arbiter.current_grant().has_value());
  const auto trace = arbiter.trace();
  const auto report = verify_trace(trace, std::vector<Index>{1}, 3);
  EXPECT_TRUE(report.deadlock_ok);
  EXPECT_EQ(report.processes_granted, 1u);
}

TEST(VerifyTrace, CleanSequentialTrace) {
  const std::vector<Index> order = {1, 3, 5, 7, 9};
  const auto report = verify_trace(clean_trace(order), order, 5);
  EXPECT_TRUE(report.all_ok());
  EXPECT_LE(report.max_wait_position, 4u);
  EXPECT_EQ(report.processes_granted, 5u);
}

TEST(VerifyTrace, OverlappingWritesDetected) {
  const std::vector<TraceEvent> trace = {
      {EventKind::Request, 3, 0},    {EventKind::Request, 5, 1},  {EventKind::Grant, 3, 2},
      {EventKind::Grant, 5, 3},      {EventKind::WriteStart, 3, 4}, {EventKind::WriteStart, 5, 5},
      {EventKind::WriteEnd, 3, 6},   {EventKind::WriteEnd, 5, 7}, {EventKind::Release, 3, 8},
      {EventKind::Release, 5, 9},
  };
  const auto report = verify_trace(trace, std::vector<Index>{3, 5}, 2);
  EXPECT_FALSE(report.mutual_exclusion_ok);
  EXPECT_FALSE(report.single_grant_ok);
  EXPECT_TRUE(report.deadlock_ok);
}

TEST(VerifyTrace, MissingGrantIsStarvation) {
  const auto report = verify_trace(clean_trace({3}), std::vector<Index>{3, 5}, 2);
  EXPECT_FALSE(report.starvation_ok);
  EXPECT_TRUE(report.mutual_exclusion_ok);
}

TEST(VerifyTrace, UnresolvedRequestIsDeadlock) {
  auto trace = clean_trace({3});
  trace.push_back({EventKind::Request, 5, 100});
  EXPECT_FALSE(verify_trace(trace, std::vector<Index>{3}, 2).deadlock_ok);
}

TEST(VerifyTrace, GrantBeyondMIsStarvation) {
  EXPECT_FALSE(verify_trace(clean_trace({1, 2, 3}), std::vector<Index>{1, 2, 3}, 2).starvation_ok);
}

TEST(VerifyTrace, MalformedTraces) {
  const std::vector<TraceEvent> grant_first = {{EventKind::Grant, 1, 0}};
  EXPECT_THROW(verify_trace(grant_first, {}, 1), TraceError);
  const std::vector<TraceEvent> same_time = {{EventKind::Request, 1, 0}, {EventKind::Request, 2, 0}};
  EXPECT_THROW(verify_trace(same_time, {}, 2), TraceError);
  const std::vector<TraceEvent> fail_mid_write = {
      {EventKind::Request, 1, 0}, {EventKind::Grant, 1, 1}, {EventKind::WriteStart, 1, 2}, {EventKind::Fail, 1, 3}};
  EXPECT_THROW(verify_trace(fail_mid_write, {}, 1), TraceError);
}

TEST(TraceText, RoundTrip) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TraceEvent> trace;
    for (std::uint64_t t = 0; t < 50; ++t) trace.push_back({static_cast<EventKind>(gen() % 6), gen() % 4096, t});
    std::stringstream text;
    write_trace(text, trace);
    EXPECT_EQ(read_trace(text), trace);
  }
}

TEST(TraceText, Format) {
  std::ostringstream out;
  write_trace(out, {{EventKind::WriteStart, 7, 12}});
  EXPECT_EQ(out.str(), "12 WriteStart 7\n");
  std::istringstream bad("1 Grant\n");
  EXPECT_THROW(read_trace(bad), TraceError);
  std::istringstream unknown("1 Hold 3\n");
  EXPECT_THROW(read_trace(unknown), TraceError);
  std::istringstream comments("# header\n\n0 Request 3\n");
  EXPECT_EQ(read_trace(comments).size(), 1u);
}

TEST(PolicyNames, ParseRoundTrip) {
  for (auto kind : {PolicyKind::AscendingIndex, PolicyKind::DescendingIndex, PolicyKind::Fifo, PolicyKind::Random,
                    PolicyKind::TokenRing}) {
    EXPECT_EQ(parse_policy_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_policy_kind("lifo").has_value());
  EXPECT_EQ(parse_ans_mode("single"), AnsMode::Single);
}
