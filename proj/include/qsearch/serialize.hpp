#pragma once

// JSON forms of the result types. Field names follow the C++ members.

#include <nlohmann/json.hpp>

#include "qsearch/arbiter.hpp"
#include "qsearch/grover.hpp"
#include "qsearch/ledger.hpp"
#include "qsearch/marksearch.hpp"
#include "qsearch/trace.hpp"

namespace qsearch {

void to_json(nlohmann::json& j, const TraceEvent& e);
void from_json(const nlohmann::json& j, TraceEvent& e);

void to_json(nlohmann::json& j, const StepLedger& l);
void from_json(const nlohmann::json& j, StepLedger& l);

void to_json(nlohmann::json& j, const GroverResult& r);
void from_json(const nlohmann::json& j, GroverResult& r);

void to_json(nlohmann::json& j, const ModifiedResult& r);
void from_json(const nlohmann::json& j, ModifiedResult& r);

void to_json(nlohmann::json& j, const ComparisonRow& r);
void from_json(const nlohmann::json& j, ComparisonRow& r);

void to_json(nlohmann::json& j, const VerificationReport& r);
void from_json(const nlohmann::json& j, VerificationReport& r);

}  // namespace qsearch
