#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quadchase/model.hpp"

namespace quadchase {

enum class ChaseStatus { Running, Fixpoint, FuelExhausted, Aborted };

struct SkolemMeta {
    Term blank;
    int originRuleId = 0;
    int existentialIndex = 0;  // position of y_j in the rule's existential vector
    ConstantVector originVector;
    std::set<Term> originContexts;
    std::set<Term> children;  // frontier constants, the childOf targets
};

struct ViolationWitness {
    std::string mode;  // "safe" | "msafe" | "csafe"
    int ruleId = 0;
    Term frontierBlank;            // blank in the frontier image of the blocked application
    Term descendant;               // the blank whose attributes clash
    ConstantVector attemptVector;  // frontier image of the blocked application
    ConstantVector descendantVector;
    std::set<Term> descendantContexts;
};

struct ChaseStep {
    long iteration = 0;
    int ruleId = 0;
    QuadGraph bodyImage;
    std::vector<Quad> added;
};

struct Fuel {
    long maxIterations = 100000;
    long maxQuads = 5000000;
};

// Per-field position index over the quad store.
class QuadIndex {
public:
    void add(const Quad& q, int seq);
    const std::vector<int>* bucket(int field, const Term& t) const;  // 0=ctx 1=s 2=p 3=o

private:
    std::array<std::map<Term, std::vector<int>>, 4> byField_;
};

struct ChaseState {
    std::vector<Quad> bySeq;  // insertion order
    QuadGraph quads;
    std::map<Quad, int> levels;
    std::map<Term, SkolemMeta> skolems;
    long iterations = 0;
    ChaseStatus status = ChaseStatus::Running;
    std::vector<ChaseStep> log;
    std::optional<ViolationWitness> violation;
    QuadIndex index;

    bool contains(const Quad& q) const { return quads.count(q) > 0; }
    int levelOf(const Quad& q) const;
    // Returns true when the quad is new; the level sticks at first derivation.
    bool insert(const Quad& q, int level);
    bool isSkolem(const Term& t) const { return t.isBlank() && skolems.count(t) > 0; }
};

struct Match {
    const BridgeRule* rule = nullptr;
    Assignment assignment;  // over the body variables
    QuadGraph bodyImage;
    int level = -1;  // max quad level of the body image, -1 for an empty body
};

using ViolationHook = std::function<std::optional<ViolationWitness>(
    const BridgeRule&, const Assignment&, const ChaseState&)>;

struct ChaseOptions {
    bool collectLog = true;
    // Head atoms in these contexts are bookkeeping; they are excluded from
    // the origin-context provenance of fresh blank nodes.
    std::set<Term> accountingContexts;
    // Invoked on the selected match before application (rules with
    // existentials only). A witness aborts the run with the given quad.
    ViolationHook violationHook;
    std::optional<Quad> violationQuad;
    // Cross-checks each selection against the from-scratch enumeration.
    bool validateSelection = false;
};

// All (rule, assignment) pairs satisfying condition (a) of applicability,
// ordered by the selection order: body-image level, then the quad-graph
// order on body images, then rule id.
std::vector<Match> enumerateMatches(const ChaseState& state,
                                    const std::vector<BridgeRule>& rules);

// True iff some extension of mu over the existentials maps the full head
// (accounting atoms included) into the state.
bool headSatisfied(const ChaseState& state, const BridgeRule& rule, const Assignment& mu);

// Applies the rule under mu: instantiates the head with content-addressed
// Skolem blank nodes, inserts the new quads one level above the body image,
// records provenance, bumps the iteration count.
void applyRule(const BridgeRule& rule, const Assignment& mu, ChaseState& state,
               const ChaseOptions& opts = {});

ChaseState runDChase(const QuadSystem& qs, const Fuel& fuel = {},
                     const ChaseOptions& opts = {});

// Local inference rule: a range-restricted triple-pattern template that gets
// one bridge rule per context.
struct LirRule {
    std::vector<std::array<Term, 3>> body;
    std::array<Term, 3> head;
};

std::vector<LirRule> lclosurePack(const std::string& name);  // "simple" | "rdfs-min"
std::vector<BridgeRule> instantiateLir(const std::vector<LirRule>& pack,
                                       const std::set<Term>& contexts, int firstId);

std::string skolemLabel(int ruleId, const std::string& varName, const ConstantVector& origin);

// JSON-lines export of the iteration log.
std::string serializeChaseLog(const ChaseState& state);

namespace rdf {
inline const char* type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline const char* subClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline const char* subPropertyOf = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
inline const char* domain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline const char* range = "http://www.w3.org/2000/01/rdf-schema#range";
}  // namespace rdf

}  // namespace quadchase
