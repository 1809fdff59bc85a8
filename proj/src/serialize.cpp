#include "qsearch/serialize.hpp"

#include <string>

#include "qsearch/errors.hpp"

namespace qsearch {

using nlohmann::json;

void to_json(json& j, const TraceEvent& e) { j = json::array({e.time, std::string(to_string(e.kind)), e.process}); }

void from_json(const json& j, TraceEvent& e) {
  const auto kind = parse_event_kind(j.at(1).get<std::string>());
  if (!kind) throw TraceError("unknown event kind " + j.at(1).get<std::string>());
  e = {*kind, j.at(2).get<Index>(), j.at(0).get<std::uint64_t>()};
}

void to_json(json& j, const StepLedger& l) {
  j = json{{"paper_steps", l.paper_steps},         {"predicate_evals", l.predicate_evals},
           {"amplitude_ops", l.amplitude_ops},     {"grover_iterations", l.grover_iterations},
           {"grants_issued", l.grants_issued},     {"token_hops", l.token_hops}};
}

void from_json(const json& j, StepLedger& l) {
  j.at("paper_steps").get_to(l.paper_steps);
  j.at("predicate_evals").get_to(l.predicate_evals);
  j.at("amplitude_ops").get_to(l.amplitude_ops);
  j.at("grover_iterations").get_to(l.grover_iterations);
  j.at("grants_issued").get_to(l.grants_issued);
  j.at("token_hops").get_to(l.token_hops);
}

void to_json(json& j, const GroverResult& r) {
  j = json{{"seed", r.seed},
           {"sampled_index", r.sampled_index},
           {"is_solution", r.is_solution},
           {"success_probability", r.success_probability},
           {"iterations_used", r.iterations_used},
           {"ledger", r.ledger}};
}

void from_json(const json& j, GroverResult& r) {
  j.at("seed").get_to(r.seed);
  j.at("sampled_index").get_to(r.sampled_index);
  j.at("is_solution").get_to(r.is_solution);
  j.at("success_probability").get_to(r.success_probability);
  j.at("iterations_used").get_to(r.iterations_used);
  j.at("ledger").get_to(r.ledger);
}

void to_json(json& j, const ModifiedResult& r) {
  j = json{{"seed", r.seed},
           {"answers", r.answers},
           {"count", r.count},
           {"single_register", r.single_register ? json(*r.single_register) : json(nullptr)},
           {"trace", r.trace},
           {"ledger", r.ledger},
           {"attempts", r.attempts},
           {"completed", r.completed}};
}

void from_json(const json& j, ModifiedResult& r) {
  j.at("seed").get_to(r.seed);
  j.at("answers").get_to(r.answers);
  j.at("count").get_to(r.count);
  const auto& single = j.at("single_register");
  r.single_register = single.is_null() ? std::nullopt : std::optional<Index>(single.get<Index>());
  j.at("trace").get_to(r.trace);
  j.at("ledger").get_to(r.ledger);
  j.at("attempts").get_to(r.attempts);
  j.at("completed").get_to(r.completed);
}

void to_json(json& j, const ComparisonRow& r) {
  j = json{{"N", r.n_items},
           {"M", r.m},
           {"grover_iters", r.grover_iters ? json(*r.grover_iters) : json(nullptr)},
           {"paper_steps_full", r.paper_steps_full},
           {"paper_steps_early", r.paper_steps_early},
           {"predicate_evals", r.predicate_evals}};
}

void from_json(const json& j, ComparisonRow& r) {
  j.at("N").get_to(r.n_items);
  j.at("M").get_to(r.m);
  const auto& g = j.at("grover_iters");
  r.grover_iters = g.is_null() ? std::nullopt : std::optional<std::uint64_t>(g.get<std::uint64_t>());
  j.at("paper_steps_full").get_to(r.paper_steps_full);
  j.at("paper_steps_early").get_to(r.paper_steps_early);
  j.at("predicate_evals").get_to(r.predicate_evals);
}

void to_json(json& j, const VerificationReport& r) {
  j = json{{"mutual_exclusion_ok", r.mutual_exclusion_ok}, {"single_grant_ok", r.single_grant_ok},
           {"starvation_ok", r.starvation_ok},             {"deadlock_ok", r.deadlock_ok},
           {"max_wait_position", r.max_wait_position},     {"processes_granted", r.processes_granted}};
}

void from_json(const json& j, VerificationReport& r) {
  j.at("mutual_exclusion_ok").get_to(r.mutual_exclusion_ok);
  j.at("single_grant_ok").get_to(r.single_grant_ok);
  j.at("starvation_ok").get_to(r.starvation_ok);
  j.at("deadlock_ok").get_to(r.deadlock_ok);
  j.at("max_wait_position").get_to(r.max_wait_position);
  j.at("processes_granted").get_to(r.processes_granted);
}

}  // namespace qsearch
