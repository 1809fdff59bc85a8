#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsearch/arbiter.hpp"
#include "qsearch/qsim.hpp"

namespace qsearch::cli {

enum class Command { Grover, Modified, Compare, Sweep, Verify };
enum class OutputFormat { Table, Csv, Json };

struct RunConfig {
  Command command = Command::Grover;
  unsigned n = 0;
  // Either an explicit list or a random fixture of `random_m` solutions.
  std::optional<std::vector<Index>> solutions;
  std::optional<Index> random_m;
  std::optional<std::uint64_t> iterations;  // grover; empty means auto
  PolicyKind policy = PolicyKind::AscendingIndex;
  Index token_start = 0;
  AnsMode ans_mode = AnsMode::Array;
  double fault_prob = 0.0;
  std::uint32_t max_reruns = 0;
  bool full_restart = false;
  bool early_stop = false;
  bool paged = false;
  bool stress = false;
  std::optional<std::uint64_t> shuffle_submit;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Table;
  std::vector<Index> m_values;  // compare, sweep
  unsigned n_min = 3;           // sweep
  unsigned n_max = 16;          // sweep
  std::string trace_in = "-";   // verify
  std::vector<Index> expected;  // verify
  std::optional<Index> expected_m;  // verify
  std::string trace_out;        // modified
};

// Environment variable holding the default --seed.
inline constexpr const char* kSeedEnv = "QSEARCH_SEED";

// args excludes the program name. Throws UsageError. Returns std::nullopt
// after printing help to `out`.
std::optional<RunConfig> parse_command_line(std::span<const std::string> args, std::uint64_t default_seed,
                                            std::ostream& out);

// Exit status: 0 ok, 1 runtime error or failed verification, 2 usage error.
int run_command(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

// Parse + run, mapping exceptions to exit codes and diagnostics to `err`.
int main_entry(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err);

// Single-register display pacing: prints each new ANS value and waits for a
// newline on `in` before the run continues.
class PagedDisplay {
 public:
  PagedDisplay(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

  void show(Index ans, std::uint64_t count);
  bool exhausted() const { return exhausted_; }

 private:
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  bool exhausted_ = false;
};

}  // namespace qsearch::cli
