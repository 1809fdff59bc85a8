#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qsearch/arbiter.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/grover.hpp"
#include "qsearch/ledger.hpp"
#include "qsearch/marksearch.hpp"
#include "qsearch/qsim.hpp"
#include "qsearch/serialize.hpp"
#include "qsearch/trace.hpp"

namespace py = pybind11;
using namespace qsearch;

namespace {

std::vector<WriteRequest> requests_for(const std::vector<Index>& indices) {
  std::vector<WriteRequest> requests;
  for (std::size_t i = 0; i < indices.size(); ++i) requests.push_back({indices[i], i, 1});
  return requests;
}

SelectionPolicy make_policy(const std::string& name, std::uint64_t seed, Index token_start) {
  const auto kind = parse_policy_kind(name);
  if (!kind) throw py::value_error("unknown policy: " + name);
  return {*kind, seed, token_start};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grover search and marking-register search simulator";

  auto base = py::register_exception<SearchError>(m, "SearchError", PyExc_RuntimeError);
  py::register_exception<SizeError>(m, "SizeError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<NoSolutionError>(m, "NoSolutionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<ExclusionViolation>(m, "ExclusionViolation", base.ptr());
  py::register_exception<TraceError>(m, "TraceError", base.ptr());

  py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed")).def_property_readonly("seed", &Rng::seed);

  py::class_<QState>(m, "QState")
      .def_static("basis", &QState::basis, py::arg("n"), py::arg("index"))
      .def_static("from_amplitudes", &QState::from_amplitudes, py::arg("n"), py::arg("amplitudes"))
      .def_property_readonly("qubits", &QState::qubits)
      .def_property_readonly("amplitudes",
                             [](const QState& s) { return std::vector<Amplitude>(s.amplitudes().begin(), s.amplitudes().end()); })
      .def("norm_squared", &QState::norm_squared)
      .def("__len__", &QState::size);

  py::class_<SearchProblem>(m, "SearchProblem")
      .def(py::init<unsigned, std::vector<Index>>(), py::arg("n"), py::arg("solutions"))
      .def_static("from_predicate", &SearchProblem::from_predicate, py::arg("n"), py::arg("predicate"))
      .def_static("random", &SearchProblem::random, py::arg("n"), py::arg("m"), py::arg("rng"))
      .def_property_readonly("qubits", &SearchProblem::qubits)
      .def_property_readonly("size", &SearchProblem::size)
      .def_property_readonly("solutions", [](const SearchProblem& p) {
        return std::vector<Index>(p.solutions().begin(), p.solutions().end());
      })
      .def("__call__", &SearchProblem::operator());

  m.def("uniform_superposition", &uniform_superposition, py::arg("n"));
  m.def("apply_oracle_phase", &apply_oracle_phase, py::arg("state"), py::arg("problem"));
  m.def("apply_diffusion", &apply_diffusion, py::arg("state"));
  m.def("grover_iteration", &grover_iteration, py::arg("state"), py::arg("problem"));
  m.def("success_probability", &success_probability, py::arg("state"), py::arg("problem"));
  m.def("measure", &measure, py::arg("state"), py::arg("rng"));

  py::class_<StepLedger>(m, "StepLedger")
      .def_readonly("paper_steps", &StepLedger::paper_steps)
      .def_readonly("predicate_evals", &StepLedger::predicate_evals)
      .def_readonly("amplitude_ops", &StepLedger::amplitude_ops)
      .def_readonly("grover_iterations", &StepLedger::grover_iterations)
      .def_readonly("grants_issued", &StepLedger::grants_issued)
      .def_readonly("token_hops", &StepLedger::token_hops);

  py::class_<GroverResult>(m, "GroverResult")
      .def_readonly("seed", &GroverResult::seed)
      .def_readonly("sampled_index", &GroverResult::sampled_index)
      .def_readonly("is_solution", &GroverResult::is_solution)
      .def_readonly("success_probability", &GroverResult::success_probability)
      .def_readonly("iterations_used", &GroverResult::iterations_used)
      .def_readonly("ledger", &GroverResult::ledger)
      .def("to_json", [](const GroverResult& r) { return nlohmann::json(r).dump(); });

  m.def("optimal_iterations", &optimal_iterations, py::arg("n_items"), py::arg("m"));
  m.def("run_grover", &run_grover, py::arg("problem"), py::arg("iterations") = py::none(), py::arg("rng"));

  py::class_<TraceEvent>(m, "TraceEvent")
      .def_property_readonly("kind", [](const TraceEvent& e) { return std::string(to_string(e.kind)); })
      .def_readonly("process", &TraceEvent::process)
      .def_readonly("time", &TraceEvent::time)
      .def("__repr__", [](const TraceEvent& e) {
        std::ostringstream s;
        s << e.time << ' ' << to_string(e.kind) << ' ' << e.process;
        return s.str();
      });

  py::class_<ModifiedResult>(m, "ModifiedResult")
      .def_readonly("seed", &ModifiedResult::seed)
      .def_readonly("answers", &ModifiedResult::answers)
      .def_readonly("count", &ModifiedResult::count)
      .def_readonly("single_register", &ModifiedResult::single_register)
      .def_readonly("trace", &ModifiedResult::trace)
      .def_readonly("ledger", &ModifiedResult::ledger)
      .def_readonly("attempts", &ModifiedResult::attempts)
      .def_readonly("completed", &ModifiedResult::completed)
      .def("to_json", [](const ModifiedResult& r) { return nlohmann::json(r).dump(); });

  m.def(
      "run_modified_search",
      [](const SearchProblem& problem, const std::string& policy, const std::string& ans_mode, double fault_prob,
         std::uint32_t max_reruns, bool full_restart, bool early_stop, bool stress, Rng& rng, Index token_start) {
        const auto mode = parse_ans_mode(ans_mode);
        if (!mode) throw py::value_error("unknown ans_mode: " + ans_mode);
        ModifiedSearchConfig config;
        config.policy = make_policy(policy, rng.seed(), token_start);
        config.ans_mode = *mode;
        config.faults = {fault_prob, max_reruns, UINT32_MAX, full_restart};
        config.early_stop = early_stop;
        config.execution = stress ? Execution::Stress : Execution::Simulated;
        return run_modified_search(problem, config, rng);
      },
      py::arg("problem"), py::arg("policy") = "ascending", py::arg("ans_mode") = "array", py::arg("fault_prob") = 0.0,
      py::arg("max_reruns") = 0, py::arg("full_restart") = false, py::arg("early_stop") = false,
      py::arg("stress") = false, py::arg("rng"), py::arg("token_start") = 0);

  m.def(
      "early_stop_search",
      [](const SearchProblem& problem, const std::string& policy, Rng& rng) {
        const auto r = early_stop_search(problem, make_policy(policy, rng.seed(), 0), rng);
        return py::make_tuple(r.index, r.ledger);
      },
      py::arg("problem"), py::arg("policy") = "ascending", py::arg("rng"));

  m.def(
      "ccc_arbitrate",
      [](const std::vector<Index>& indices, const std::string& policy, std::uint64_t seed) {
        return ccc_arbitrate(requests_for(indices), make_policy(policy, seed, 0));
      },
      py::arg("indices"), py::arg("policy") = "ascending", py::arg("seed") = 0);
  m.def(
      "token_ring_arbitrate",
      [](const std::vector<Index>& indices, Index start, Index ring_size) {
        return token_ring_arbitrate(requests_for(indices), start, ring_size);
      },
      py::arg("indices"), py::arg("start"), py::arg("ring_size"));

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("mutual_exclusion_ok", &VerificationReport::mutual_exclusion_ok)
      .def_readonly("single_grant_ok", &VerificationReport::single_grant_ok)
      .def_readonly("starvation_ok", &VerificationReport::starvation_ok)
      .def_readonly("deadlock_ok", &VerificationReport::deadlock_ok)
      .def_readonly("max_wait_position", &VerificationReport::max_wait_position)
      .def_readonly("processes_granted", &VerificationReport::processes_granted)
      .def("all_ok", &VerificationReport::all_ok);

  m.def(
      "verify_trace",
      [](const std::vector<TraceEvent>& trace, const std::vector<Index>& expected, Index m) {
        return verify_trace(trace, expected, m);
      },
      py::arg("trace"), py::arg("expected"), py::arg("m"));
  m.def(
      "parse_trace",
      [](const std::string& text) {
        std::istringstream in(text);
        return read_trace(in);
      },
      py::arg("text"));
  m.def(
      "format_trace",
      [](const std::vector<TraceEvent>& trace) {
        std::ostringstream out;
        write_trace(out, trace);
        return out.str();
      },
      py::arg("trace"));

  py::class_<ComparisonRow>(m, "ComparisonRow")
      .def_readonly("n_items", &ComparisonRow::n_items)
      .def_readonly("m", &ComparisonRow::m)
      .def_readonly("grover_iters", &ComparisonRow::grover_iters)
      .def_readonly("paper_steps_full", &ComparisonRow::paper_steps_full)
      .def_readonly("paper_steps_early", &ComparisonRow::paper_steps_early)
      .def_readonly("predicate_evals", &ComparisonRow::predicate_evals)
      .def("to_csv", [](const ComparisonRow& r) { return to_csv(r); });

  m.def("paper_step_count", &paper_step_count, py::arg("n"), py::arg("m"), py::arg("early_stop") = false);
  m.def("compare_models", &compare_models, py::arg("n_items"), py::arg("m"));
  m.def("comparison_csv_header", &comparison_csv_header);
  m.attr("MARKING_FOOTNOTE") = std::string(kMarkingFootnote);
}
