#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "quadchase/model.hpp"

namespace quadchase {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct NQuadsOptions {
    // When set, literals are accepted in subject/predicate position and blank
    // nodes in predicate position (generalized quads).
    bool generalized = false;
};

QuadGraph parseNQuads(const std::string& text, const NQuadsOptions& opts = {});
QuadGraph parseNQuadsFile(const std::string& path, const NQuadsOptions& opts = {});

// Canonical serialization: quads sorted by the quad order, one per line.
std::string serializeNQuads(const QuadGraph& g);

struct RuleDocument {
    std::map<std::string, std::string> prefixes;
    std::vector<BridgeRule> rules;
};

// Bridge-rule grammar, one rule per statement:
//   [id] ctx(t, t, t) {, ctx(t, t, t)} => ctx(t, t, t) {, ...} .
// ctx is a bare name, <uri> or prefixed name; terms are <uri>, prefixed
// names, "literals" or ?variables. An absent body ("=> head .") gives an
// instance rule. Ids default to document order starting at 1.
RuleDocument parseRules(const std::string& text);
RuleDocument parseRulesFile(const std::string& path);

std::string serializeRules(const std::vector<BridgeRule>& rules);

struct QueryDocument {
    std::vector<Term> freeVars;        // empty for a boolean query
    std::vector<QuadPattern> atoms;
};

// `ASK atom {, atom} .` or `SELECT ?v {?v} WHERE atom {, atom} .`
QueryDocument parseQuery(const std::string& text);
QueryDocument parseQueryFile(const std::string& path);

std::string serializeQuery(const QueryDocument& q);

// Forall-existential rule documents reuse the rule grammar with 1- to 3-ary
// atoms; see analysis.hpp for the arity-padding into quad form.
struct FeAtom {
    Term predicate;  // URI
    std::vector<Term> args;  // 1..3 terms
    bool operator==(const FeAtom& o) const {
        return predicate == o.predicate && args == o.args;
    }
};

struct FeRule {
    int id = 0;
    std::vector<FeAtom> body;
    std::vector<FeAtom> head;
};

struct FeRuleDocument {
    std::map<std::string, std::string> prefixes;
    std::vector<FeRule> rules;
};

FeRuleDocument parseFeRules(const std::string& text);
FeRuleDocument parseFeRulesFile(const std::string& path);
std::string serializeFeRules(const std::vector<FeRule>& rules);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& content);

}  // namespace quadchase
