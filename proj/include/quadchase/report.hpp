#pragma once

#include <string>

#include "json.hpp"
#include "quadchase/analysis.hpp"
#include "quadchase/chase.hpp"
#include "quadchase/query.hpp"
#include "quadchase/safety.hpp"

namespace quadchase {

// All reports use nlohmann's map-backed json, so keys serialize in sorted
// order and outputs are byte-stable across runs.
using Json = nlohmann::json;

Json chaseReport(const ChaseState& state);
Json classificationReport(const Classification& c);
Json witnessReport(const ViolationWitness& w);
Json answerReport(const AnswerSet& answers);
Json analysisReport(const WaResult& wa, const JaResult& ja, Verdict mfa);

std::string answersToTsv(const AnswerSet& answers);

}  // namespace quadchase
