#pragma once

#include <optional>
#include <set>
#include <vector>

#include "quadchase/chase.hpp"
#include "quadchase/model.hpp"
#include "quadchase/safety.hpp"
#include "quadchase/textio.hpp"

namespace quadchase {

struct AnswerSet {
    std::vector<Term> freeVars;
    std::set<ConstantVector> bindings;
    bool complete = true;  // false when the chase stopped on fuel
};

struct QueryOptions {
    // Certain-answer bindings exclude Skolem blank nodes in free positions
    // unless this is set.
    bool allowSkolemAnswers = false;
};

// Boolean entailment: a homomorphism from the atoms into the chase quads.
bool evalBoolean(const QueryDocument& ccq, const ChaseState& state);

AnswerSet evalSelect(const QueryDocument& ccq, const ChaseState& state,
                     const QueryOptions& opts = {});

// Quad-graph entailment as a boolean query: blank nodes become quantified
// variables. Unknown when the chase ran out of fuel without a witness.
Verdict entailsQuadGraph(const QuadSystem& qs, const QuadGraph& g, const Fuel& fuel = {});

}  // namespace quadchase
