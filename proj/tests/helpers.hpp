#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "quadchase/analysis.hpp"
#include "quadchase/chase.hpp"
#include "quadchase/model.hpp"
#include "quadchase/query.hpp"
#include "quadchase/safety.hpp"
#include "quadchase/textio.hpp"

namespace testutil {

using namespace quadchase;

std::string fixturePath(const std::string& name);
QuadSystem loadFixture(const std::string& stem);  // stem.nq + stem.rules

// Lemma-1 style oracle: bind all body variables against all constants in the
// state, filter containment and head satisfaction, sort by the selection
// order. Exponential; for desk-scale cross-checks only.
std::vector<Match> naiveEnumerateMatches(const ChaseState& state,
                                         const std::vector<BridgeRule>& rules);

// Query oracle: try every total map from the query variables into the chase
// constants.
bool bruteForceBoolean(const QueryDocument& q, const ChaseState& state);
std::set<ConstantVector> bruteForceSelect(const QueryDocument& q, const ChaseState& state,
                                          bool allowSkolem);

// Graph isomorphism up to a bijective renaming of blank nodes (small inputs).
bool graphsIsomorphic(const QuadGraph& a, const QuadGraph& b);

// Unit propagation for pure 3-Horn clauses; true iff unsatisfiable.
bool hornUnsat(const std::vector<std::array<std::string, 3>>& clauses);

// Brute-force 3-colorability.
bool threeColorable(const std::vector<std::pair<std::string, std::string>>& edges);

// Classification oracle: run the plain dChase and test the safe/msafe/csafe
// definitions directly over the recorded provenance. Unknown when the chase
// does not finish within fuel and no violating pair has appeared yet.
struct OracleClassification {
    Verdict safe, msafe, csafe;
};
OracleClassification bruteForceClassify(const QuadSystem& qs, const Fuel& fuel);

// Deterministic pseudo-random quad-system for corpus-style properties.
QuadSystem randomSystem(std::mt19937_64& rng, int maxContexts = 3, int maxRules = 4,
                        int maxExistentialsPerRule = 2);

QuadGraph randomGraph(std::mt19937_64& rng, int maxQuads, int constantPool);
QueryDocument randomQuery(std::mt19937_64& rng, const ChaseState& st, int maxVars,
                          int maxAtoms);

// Test-only restricted chase over arbitrary-arity predicate atoms, used as
// the independent side of the arity-padding check.
struct FeFact {
    std::string pred;
    std::vector<Term> args;
    bool operator<(const FeFact& o) const {
        if (pred != o.pred) return pred < o.pred;
        return args < o.args;
    }
    bool operator==(const FeFact& o) const { return pred == o.pred && args == o.args; }
};
std::set<FeFact> naiveFeChase(const std::vector<FeRule>& rules, long maxSteps,
                              bool* finished = nullptr);
bool naiveFeEntails(const std::set<FeFact>& chase, const std::vector<FeAtom>& query);

}  // namespace testutil
