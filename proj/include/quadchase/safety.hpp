#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quadchase/chase.hpp"
#include "quadchase/model.hpp"

namespace quadchase {

enum class SafetyMode { Safe, MSafe, CSafe };

const char* modeName(SafetyMode m);

enum class Verdict { Yes, No, Unknown };

const char* verdictName(Verdict v);

struct ModeResult {
    Verdict verdict = Verdict::Unknown;
    long chaseSize = 0;  // quads in the augmented chase when it stopped
    long iterations = 0;
    std::optional<ViolationWitness> witness;
};

struct Classification {
    ModeResult safe, msafe, csafe;
    bool rr = false;
    bool restrictedRR = false;
    int maxBodySize = 0;
    long augmentedChaseSize() const;  // largest of the three runs

    const ModeResult& mode(SafetyMode m) const;
};

// Head augmentation: per existential y_j the rule head gains descendantOf
// quads from every frontier variable, the reflexive descendantOf quad, and
// the mode's attribute quads. Rules without existentials pass through; the
// descendantOf transitivity rule (id 0) is appended once.
std::vector<BridgeRule> augmentRules(const std::vector<BridgeRule>& rules, SafetyMode mode);

// The per-application test of the paper's detection procedure: true iff the
// fresh blank the application would create has, through the accounting quads
// of the state, a descendant clashing under the mode's criterion.
bool violationTest(const BridgeRule& rule, const Assignment& mu, const ChaseState& state,
                   SafetyMode mode, ViolationWitness* witness = nullptr);

struct ClassifyOptions {
    int restrictedBodyBound = 3;
    bool collectLog = false;
};

Classification classify(const QuadSystem& qs, const Fuel& fuel = {},
                        const ClassifyOptions& opts = {});

// Runs a single mode's augmented chase and returns both the verdict and the
// final state (the safe/msafe/csafe dChase).
std::pair<ModeResult, ChaseState> runAugmentedChase(const QuadSystem& qs, SafetyMode mode,
                                                    const Fuel& fuel = {},
                                                    bool collectLog = false);

struct RRInfo {
    bool rr = false;
    bool restrictedRR = false;
    int maxBodySize = 0;
};

RRInfo checkRR(const std::vector<BridgeRule>& rules, int bodyBound = 3);

struct DescendanceGraph {
    Term root;
    std::vector<Term> nodes;                       // node terms; unravel may duplicate
    std::vector<std::pair<int, int>> edges;        // (from, to): to is a descendant of from
    std::map<int, int> ruleLabel;                  // node -> originRuleId (absent = n.d.)
    std::map<int, ConstantVector> vectorLabel;
    std::map<int, std::set<Term>> contextLabel;

    std::set<int> targetsOf(int node) const;
    int indegree(int node) const;
};

// Full descendance graph of a Skolem blank node: an edge per (ancestor,
// descendant) pair, labels from the recorded provenance.
DescendanceGraph buildDescendance(const ChaseState& state, const Term& root);

// Transitive reduction followed by indegree splitting: the result is a tree
// rooted at the original root. Throws on cyclic input.
DescendanceGraph unravel(const DescendanceGraph& g);

bool isTree(const DescendanceGraph& g);
int treeOrder(const DescendanceGraph& g);  // maximal outdegree

std::string descendanceToDot(const DescendanceGraph& g);

// All quads over the rule contexts and the URIs of the rules' triple
// patterns plus the ad hoc blank node.
QuadGraph criticalQuadGraph(const std::vector<BridgeRule>& rules);

Verdict checkUniversal(const std::vector<BridgeRule>& rules, SafetyMode mode,
                       const Fuel& fuel = {});

// Post-fixpoint check over the recorded provenance: finds a violating
// descendant pair, if any. A positive workBudget caps the traversal; on an
// exhausted budget the scan gives up without a finding.
std::optional<ViolationWitness> scanForViolation(const ChaseState& state, SafetyMode mode,
                                                 long workBudget = 0);

Quad violationQuadFor(SafetyMode mode);

}  // namespace quadchase
