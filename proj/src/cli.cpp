#include "qsearch/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/grover.hpp"
#include "qsearch/ledger.hpp"
#include "qsearch/marksearch.hpp"
#include "qsearch/serialize.hpp"

namespace qsearch::cli {
namespace {

using nlohmann::json;

std::vector<Index> parse_index_list(const std::string& text, const char* flag) {
  std::vector<Index> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view item(text.data() + pos, end - pos);
    Index value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw UsageError(std::string(flag) + ": `" + std::string(item) + "` is not a non-negative integer");
    }
    values.push_back(value);
    pos = end + 1;
  }
  return values;
}

std::string join(std::span<const Index> values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

std::string fixed12(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(12) << v;
  return s.str();
}

const char* ok(bool flag) { return flag ? "ok" : "FAIL"; }

Index solution_count(const RunConfig& c) { return c.solutions ? c.solutions->size() : c.random_m.value_or(0); }

void validate(const RunConfig& c) {
  auto require_qubits = [&](unsigned n) {
    if (n < 1 || n > kMaxQubits) throw UsageError("--n must be in [1, " + std::to_string(kMaxQubits) + "]");
  };
  switch (c.command) {
    case Command::Grover:
    case Command::Modified: {
      require_qubits(c.n);
      if (c.solutions.has_value() == c.random_m.has_value()) throw UsageError("give exactly one of --solutions or --m");
      const Index size = Index{1} << c.n;
      if (c.solutions) {
        for (Index x : *c.solutions) {
          if (x >= size) throw UsageError("solution " + std::to_string(x) + " outside [0, " + std::to_string(size) + ")");
        }
      }
      if (c.random_m && *c.random_m > size) throw UsageError("--m exceeds 2^n");
      if (c.command == Command::Grover) {
        if (!c.iterations && solution_count(c) == 0) throw UsageError("--iterations auto needs at least one solution");
        break;
      }
      if (!(c.fault_prob >= 0.0 && c.fault_prob < 1.0)) throw UsageError("--fault-prob must be in [0, 1)");
      if (c.early_stop && solution_count(c) == 0) throw UsageError("--early-stop needs at least one solution");
      if (c.policy == PolicyKind::TokenRing && c.token_start >= size) throw UsageError("--token-start outside [0, 2^n)");
      if (c.stress && (c.paged || c.early_stop || c.full_restart)) {
        throw UsageError("--stress cannot be combined with --paged, --early-stop or --full-restart");
      }
      break;
    }
    case Command::Compare:
      if (c.n < 1 || c.n > 62) throw UsageError("--n must be in [1, 62]");
      if (c.m_values.empty()) throw UsageError("--m is required");
      for (Index m : c.m_values) {
        if (m > (Index{1} << c.n)) throw UsageError("--m " + std::to_string(m) + " exceeds 2^n");
      }
      break;
    case Command::Sweep:
      require_qubits(c.n_min);
      require_qubits(c.n_max);
      if (c.n_min > c.n_max) throw UsageError("--n-min exceeds --n-max");
      break;
    case Command::Verify:
      break;
  }
}

SearchProblem build_problem(const RunConfig& c, Rng& rng) {
  if (c.solutions) return SearchProblem(c.n, *c.solutions);
  return SearchProblem::random(c.n, *c.random_m, rng);
}

json problem_json(const RunConfig& c, const SearchProblem& problem) {
  return json{{"n", c.n}, {"N", problem.size()}, {"solutions", std::vector<Index>(problem.solutions().begin(), problem.solutions().end())}};
}

int run_grover_command(const RunConfig& c, std::ostream& out) {
  Rng rng(c.seed);
  const SearchProblem problem = build_problem(c, rng);
  const GroverResult r = run_grover(problem, c.iterations, rng);
  switch (c.format) {
    case OutputFormat::Table:
      out << "command grover\n"
          << "seed " << r.seed << '\n'
          << "n " << c.n << '\n'
          << "solutions " << join(problem.solutions(), ' ') << '\n'
          << "iterations " << r.iterations_used << '\n'
          << "sampled_index " << r.sampled_index << '\n'
          << "is_solution " << (r.is_solution ? "true" : "false") << '\n'
          << "success_probability " << fixed12(r.success_probability) << '\n'
          << "amplitude_ops " << r.ledger.amplitude_ops << '\n'
          << "predicate_evals " << r.ledger.predicate_evals << '\n';
      break;
    case OutputFormat::Csv:
      out << "seed,n,N,M,iterations,sampled_index,is_solution,success_probability,amplitude_ops,predicate_evals\n"
          << r.seed << ',' << c.n << ',' << problem.size() << ',' << problem.solution_count() << ','
          << r.iterations_used << ',' << r.sampled_index << ',' << (r.is_solution ? "true" : "false") << ','
          << fixed12(r.success_probability) << ',' << r.ledger.amplitude_ops << ',' << r.ledger.predicate_evals
          << '\n';
      break;
    case OutputFormat::Json:
      out << json{{"command", "grover"}, {"problem", problem_json(c, problem)}, {"result", r}}.dump(2) << '\n';
      break;
  }
  return 0;
}

int run_modified_command(const RunConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
  Rng rng(c.seed);
  const SearchProblem problem = build_problem(c, rng);

  ModifiedSearchConfig config;
  config.policy = {c.policy, c.seed, c.token_start};
  config.ans_mode = c.ans_mode;
  config.faults = {c.fault_prob, c.max_reruns, UINT32_MAX, c.full_restart};
  config.execution = c.stress ? Execution::Stress : Execution::Simulated;
  config.early_stop = c.early_stop;
  config.shuffle_submit = c.shuffle_submit;

  // Paged lines go to stdout only when stdout is not carrying csv/json.
  std::ostream& page_out = c.format == OutputFormat::Table ? out : err;
  PagedDisplay pager(in, page_out, err);
  if (c.paged) {
    if (c.ans_mode == AnsMode::Array) {
      err << "warning: --paged applies to single-register mode only; ignored\n";
    } else {
      config.on_write = [&pager](Index ans, std::uint64_t count) { pager.show(ans, count); };
    }
  }

  const ModifiedResult r = run_modified_search(problem, config, rng);
  const std::vector<Index> expected(problem.solutions().begin(), problem.solutions().end());
  std::optional<VerificationReport> report;
  if (!c.early_stop) report = verify_trace(r.trace, expected, problem.solution_count());

  if (!c.trace_out.empty()) {
    std::ofstream trace_file(c.trace_out);
    if (!trace_file) throw SearchError("cannot open " + c.trace_out + " for writing");
    write_trace(trace_file, r.trace);
  }

  switch (c.format) {
    case OutputFormat::Table:
      out << "command modified\n"
          << "seed " << r.seed << '\n'
          << "n " << c.n << '\n'
          << "policy " << to_string(c.policy) << '\n'
          << "ans_mode " << to_string(c.ans_mode) << '\n'
          << "answers " << join(r.answers, ' ') << '\n'
          << "count " << r.count << '\n';
      if (r.single_register) out << "ans_register " << *r.single_register << '\n';
      out << "attempts " << r.attempts << '\n'
          << "completed " << (r.completed ? "true" : "false") << '\n'
          << "paper_steps " << r.ledger.paper_steps << '\n'
          << "predicate_evals " << r.ledger.predicate_evals << '\n'
          << "grants_issued " << r.ledger.grants_issued << '\n';
      if (c.policy == PolicyKind::TokenRing) out << "token_hops " << r.ledger.token_hops << '\n';
      if (report) {
        out << "verification mutual_exclusion=" << ok(report->mutual_exclusion_ok)
            << " single_grant=" << ok(report->single_grant_ok) << " starvation=" << ok(report->starvation_ok)
            << " deadlock=" << ok(report->deadlock_ok) << " max_wait_position=" << report->max_wait_position
            << '\n';
      }
      out << kMarkingFootnote << '\n';
      break;
    case OutputFormat::Csv:
      out << "seed,n,N,M,policy,ans_mode,answers,count,attempts,completed,paper_steps,predicate_evals,grants_issued\n"
          << r.seed << ',' << c.n << ',' << problem.size() << ',' << problem.solution_count() << ','
          << to_string(c.policy) << ',' << to_string(c.ans_mode) << ',' << join(r.answers, ' ') << ',' << r.count
          << ',' << r.attempts << ',' << (r.completed ? "true" : "false") << ',' << r.ledger.paper_steps << ','
          << r.ledger.predicate_evals << ',' << r.ledger.grants_issued << '\n'
          << kMarkingFootnote << '\n';
      break;
    case OutputFormat::Json: {
      json doc{{"command", "modified"},
               {"problem", problem_json(c, problem)},
               {"policy", std::string(to_string(c.policy))},
               {"ans_mode", std::string(to_string(c.ans_mode))},
               {"result", r},
               {"verification", report ? json(*report) : json(nullptr)},
               {"note", std::string(kMarkingFootnote.substr(2))}};
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return 0;
}

int run_compare_command(const RunConfig& c, std::ostream& out) {
  std::vector<ComparisonRow> rows;
  for (Index m : c.m_values) rows.push_back(compare_models(Index{1} << c.n, m));
  switch (c.format) {
    case OutputFormat::Table:
      out << std::left << std::setw(10) << "N" << std::setw(8) << "M" << std::setw(14) << "grover_iters"
          << std::setw(18) << "paper_steps_full" << std::setw(19) << "paper_steps_early"
          << "predicate_evals\n";
      for (const auto& row : rows) {
        out << std::setw(10) << row.n_items << std::setw(8) << row.m << std::setw(14)
            << (row.grover_iters ? std::to_string(*row.grover_iters) : "NA") << std::setw(18)
            << row.paper_steps_full << std::setw(19) << row.paper_steps_early << row.predicate_evals << '\n';
      }
      out << kMarkingFootnote << '\n';
      break;
    case OutputFormat::Csv:
      out << comparison_csv_header() << '\n';
      for (const auto& row : rows) out << to_csv(row) << '\n';
      out << kMarkingFootnote << '\n';
      break;
    case OutputFormat::Json:
      out << json{{"command", "compare"}, {"rows", rows}, {"note", std::string(kMarkingFootnote.substr(2))}}.dump(2)
          << '\n';
      break;
  }
  return 0;
}

struct SweepRow {
  unsigned n;
  Index m;
  bool early_stop;
  std::uint64_t live_steps;
  std::uint64_t model_steps;
  std::uint64_t predicate_evals;
  std::optional<std::uint64_t> grover_iters;
};

int run_sweep_command(const RunConfig& c, std::ostream& out) {
  const std::vector<Index> ms = c.m_values.empty() ? std::vector<Index>{0, 1, 2, 4, 8} : c.m_values;
  Rng rng(c.seed);
  std::vector<SweepRow> rows;
  for (unsigned n = c.n_min; n <= c.n_max; ++n) {
    const Index size = Index{1} << n;
    for (Index m : ms) {
      if (m > size) continue;
      const SearchProblem problem = SearchProblem::random(n, m, rng);
      for (bool early : {false, true}) {
        ModifiedSearchConfig config;
        config.early_stop = early;
        const ModifiedResult r = run_modified_search(problem, config, rng);
        rows.push_back({n, m, early, r.ledger.paper_steps, paper_step_count(n, m, early), r.ledger.predicate_evals,
                        m > 0 ? std::optional(optimal_iterations(size, m)) : std::nullopt});
      }
    }
  }

  auto grover = [](const SweepRow& row) { return row.grover_iters ? std::to_string(*row.grover_iters) : "NA"; };
  switch (c.format) {
    case OutputFormat::Table:
    case OutputFormat::Csv: {
      const char sep = c.format == OutputFormat::Csv ? ',' : ' ';
      out << "n" << sep << "N" << sep << "M" << sep << "early_stop" << sep << "paper_steps_live" << sep
          << "paper_steps_model" << sep << "predicate_evals" << sep << "grover_iters" << sep << "match\n";
      for (const auto& row : rows) {
        out << row.n << sep << (Index{1} << row.n) << sep << row.m << sep << (row.early_stop ? "true" : "false")
            << sep << row.live_steps << sep << row.model_steps << sep << row.predicate_evals << sep << grover(row)
            << sep << (row.live_steps == row.model_steps ? "true" : "false") << '\n';
      }
      out << "# seed " << c.seed << '\n' << kMarkingFootnote << '\n';
      break;
    }
    case OutputFormat::Json: {
      json items = json::array();
      for (const auto& row : rows) {
        items.push_back({{"n", row.n},
                         {"N", Index{1} << row.n},
                         {"M", row.m},
                         {"early_stop", row.early_stop},
                         {"paper_steps_live", row.live_steps},
                         {"paper_steps_model", row.model_steps},
                         {"predicate_evals", row.predicate_evals},
                         {"grover_iters", row.grover_iters ? json(*row.grover_iters) : json(nullptr)}});
      }
      out << json{{"command", "sweep"}, {"seed", c.seed}, {"rows", items},
                  {"note", std::string(kMarkingFootnote.substr(2))}}
                 .dump(2)
          << '\n';
      break;
    }
  }
  for (const auto& row : rows) {
    if (row.live_steps != row.model_steps) return 1;
  }
  return 0;
}

int run_verify_command(const RunConfig& c, std::istream& in, std::ostream& out) {
  std::vector<TraceEvent> trace;
  if (c.trace_in == "-") {
    trace = read_trace(in);
  } else {
    std::ifstream file(c.trace_in);
    if (!file) throw SearchError("cannot open " + c.trace_in);
    trace = read_trace(file);
  }
  const Index m = c.expected_m.value_or(c.expected.size());
  const VerificationReport report = verify_trace(trace, c.expected, m);
  switch (c.format) {
    case OutputFormat::Table:
      out << "events " << trace.size() << '\n'
          << "mutual_exclusion " << ok(report.mutual_exclusion_ok) << '\n'
          << "single_grant " << ok(report.single_grant_ok) << '\n'
          << "starvation " << ok(report.starvation_ok) << '\n'
          << "deadlock " << ok(report.deadlock_ok) << '\n'
          << "max_wait_position " << report.max_wait_position << '\n'
          << "processes_granted " << report.processes_granted << '\n'
          << "verdict " << (report.all_ok() ? "pass" : "fail") << '\n';
      break;
    case OutputFormat::Csv:
      out << "events,mutual_exclusion_ok,single_grant_ok,starvation_ok,deadlock_ok,max_wait_position,"
             "processes_granted\n"
          << trace.size() << ',' << report.mutual_exclusion_ok << ',' << report.single_grant_ok << ','
          << report.starvation_ok << ',' << report.deadlock_ok << ',' << report.max_wait_position << ','
          << report.processes_granted << '\n';
      break;
    case OutputFormat::Json:
      out << json{{"command", "verify"}, {"events", trace.size()}, {"report", report}}.dump(2) << '\n';
      break;
  }
  return report.all_ok() ? 0 : 1;
}

}  // namespace

void PagedDisplay::show(Index ans, std::uint64_t count) {
  out_ << "ANS " << ans << " COUNT " << count << '\n' << std::flush;
  if (exhausted_) return;
  std::string line;
  if (!std::getline(in_, line)) {
    exhausted_ = true;
    err_ << "warning: input closed; finishing remaining grants unpaged\n";
  }
}

std::optional<RunConfig> parse_command_line(std::span<const std::string> args, std::uint64_t default_seed,
                                            std::ostream& out) {
  CLI::App app{"Grover search and marking-register search simulator", "qsearch"};
  app.require_subcommand(1, 1);

  RunConfig c;
  c.seed = default_seed;
  std::string format;
  std::string policy = "ascending";
  std::string ans_mode = "array";
  std::string solutions;
  std::string iterations = "auto";
  std::string m_list;
  std::string expected;
  std::optional<Index> m_count;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "64-bit seed (default from $" + std::string(kSeedEnv) + " or 0)");
    sub->add_option("--format", format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
  };
  auto fixture = [&](CLI::App* sub) {
    sub->add_option("--n", c.n, "qubit count")->required();
    sub->add_option("--solutions", solutions, "comma-separated solution indices");
    sub->add_option("--m", m_count, "number of random solutions (drawn with the run seed)");
  };

  auto* grover = app.add_subcommand("grover", "run Grover search once");
  fixture(grover);
  grover->add_option("--iterations", iterations, "iteration count or `auto`");
  common(grover);

  auto* modified = app.add_subcommand("modified", "run the marking-register search");
  fixture(modified);
  modified->add_option("--policy", policy, "ascending | descending | fifo | random | token-ring")
      ->check(CLI::IsMember({"ascending", "descending", "fifo", "random", "token-ring"}));
  modified->add_option("--token-start", c.token_start, "token-ring start position");
  modified->add_option("--ans-mode", ans_mode, "single | array")->check(CLI::IsMember({"single", "array"}));
  modified->add_option("--fault-prob", c.fault_prob, "per-attempt writer failure probability in [0, 1)");
  modified->add_option("--max-reruns", c.max_reruns, "reruns allowed per failed writer");
  modified->add_flag("--full-restart", c.full_restart, "rerun every writer after a failure");
  modified->add_flag("--early-stop", c.early_stop, "stop after the first granted write");
  modified->add_flag("--paged", c.paged, "single-register mode: wait for a newline after each write");
  modified->add_flag("--stress", c.stress, "run writers as parallel threads");
  modified->add_option("--shuffle-submit", c.shuffle_submit, "permute writer submission order with this seed");
  modified->add_option("--trace-out", c.trace_out, "write the arbitration trace to this file");
  common(modified);

  auto* compare = app.add_subcommand("compare", "compare Grover iterations with paper-model step counts");
  compare->add_option("--n", c.n, "qubit count")->required();
  compare->add_option("--m", m_list, "comma-separated solution counts")->required();
  common(compare);

  auto* sweep = app.add_subcommand("sweep", "live modified-search runs against the step-count model");
  sweep->add_option("--n-min", c.n_min, "smallest qubit count");
  sweep->add_option("--n-max", c.n_max, "largest qubit count");
  sweep->add_option("--m", m_list, "comma-separated solution counts (default 0,1,2,4,8)");
  common(sweep);

  auto* verify = app.add_subcommand("verify", "check a `time kind index` trace");
  verify->add_option("--trace", c.trace_in, "trace file, or - for stdin");
  verify->add_option("--expected", expected, "comma-separated indices that must be granted");
  verify->add_option("--m", c.expected_m, "solution count bound (default: size of --expected)");
  common(verify);

  std::vector<std::string> argv_storage{"qsearch"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (grover->parsed()) c.command = Command::Grover;
  if (modified->parsed()) c.command = Command::Modified;
  if (compare->parsed()) c.command = Command::Compare;
  if (sweep->parsed()) c.command = Command::Sweep;
  if (verify->parsed()) c.command = Command::Verify;

  if (format.empty()) format = c.command == Command::Compare || c.command == Command::Sweep ? "csv" : "table";
  c.format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Table;
  c.policy = *parse_policy_kind(policy);
  c.ans_mode = *parse_ans_mode(ans_mode);

  if (c.command == Command::Grover || c.command == Command::Modified) {
    const bool explicit_list = (c.command == Command::Grover ? grover : modified)->count("--solutions") > 0;
    if (explicit_list) c.solutions = parse_index_list(solutions, "--solutions");
    c.random_m = m_count;
  }
  if (c.command == Command::Grover && iterations != "auto") {
    const auto parsed = parse_index_list(iterations, "--iterations");
    if (parsed.size() != 1) throw UsageError("--iterations takes one count or `auto`");
    c.iterations = parsed.front();
  }
  if (c.command == Command::Compare || c.command == Command::Sweep) c.m_values = parse_index_list(m_list, "--m");
  if (c.command == Command::Verify) c.expected = parse_index_list(expected, "--expected");

  validate(c);
  return c;
}

int run_command(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    switch (config.command) {
      case Command::Grover:
        return run_grover_command(config, out);
      case Command::Modified:
        return run_modified_command(config, in, out, err);
      case Command::Compare:
        return run_compare_command(config, out);
      case Command::Sweep:
        return run_sweep_command(config, out);
      case Command::Verify:
        return run_verify_command(config, in, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int main_entry(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  std::uint64_t default_seed = 0;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), default_seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      err << "usage error: $" << kSeedEnv << " is not a 64-bit unsigned integer\n";
      return 2;
    }
  }
  std::optional<RunConfig> config;
  try {
    config = parse_command_line(args, default_seed, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  if (!config) return 0;
  return run_command(*config, in, out, err);
}

}  // namespace qsearch::cli
