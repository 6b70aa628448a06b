#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quadchase/chase.hpp"
#include "quadchase/model.hpp"
#include "quadchase/safety.hpp"
#include "quadchase/textio.hpp"

namespace quadchase {

// A predicate position <p, i>, 1-based.
using Position = std::pair<std::string, int>;

struct PositionGraph {
    std::vector<Position> nodes;
    std::set<std::pair<int, int>> normalEdges;
    std::set<std::pair<int, int>> specialEdges;

    int nodeId(const Position& p) const;
};

struct WaResult {
    bool result = false;
    PositionGraph graph;
    std::optional<std::vector<Position>> witnessCycle;  // closed path through a special edge
};

// An existential variable of a renamed-apart rule set.
struct ExistentialRef {
    int ruleId = 0;
    std::string var;
    bool operator<(const ExistentialRef& o) const {
        return ruleId != o.ruleId ? ruleId < o.ruleId : var < o.var;
    }
    bool operator==(const ExistentialRef& o) const {
        return ruleId == o.ruleId && var == o.var;
    }
};

struct JaResult {
    bool result = false;
    std::vector<ExistentialRef> nodes;
    std::set<std::pair<int, int>> edges;
    std::map<ExistentialRef, std::set<Position>> movSets;
};

// tau: contexts become ternary predicates; the quad-graph becomes a
// body-empty rule whose blank nodes turn into existential variables.
std::vector<FeRule> translateToRules(const QuadSystem& qs);

// chi: pads unary and binary atoms to ternary with the reserved box URI.
std::vector<FeRule> chiPad(const std::vector<FeRule>& rules);
FeAtom chiPad(const FeAtom& atom);

// nu: the inverse direction, onto a rule-only quad-system.
QuadSystem translateFromRules(const std::vector<FeRule>& rules);

WaResult weaklyAcyclic(const std::vector<FeRule>& rules);
JaResult jointlyAcyclic(const std::vector<FeRule>& rules);

// Model-faithful acyclicity via the instrumented rule set: the shared chase
// engine runs the translation and watches for the contradiction quad.
Verdict mfaCheck(const std::vector<FeRule>& rules, const Fuel& fuel = {});

// The instrumented rule set itself, exposed for inspection and tests.
std::vector<FeRule> mfaTransform(const std::vector<FeRule>& rules);

std::string positionGraphToDot(const PositionGraph& g);
std::string edgToDot(const JaResult& r);

namespace mfa {
inline const char* sPredicate = "urn:quadchase:mfa:S";
inline const char* yPredicatePrefix = "urn:quadchase:mfa:Y_";
}  // namespace mfa

}  // namespace quadchase
