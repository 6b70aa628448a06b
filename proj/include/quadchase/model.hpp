#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadchase {

// Kind rank fixes the total order on constants: URI < blank node < literal.
// Variables sort last; they never occur in stored quads.
enum class TermKind { Uri, Blank, Literal, Var };

struct Term {
    TermKind kind = TermKind::Uri;
    std::string lexical;
    std::string datatype;  // literals only: "^^<uri>" or "@lang" suffix, verbatim

    static Term uri(std::string lex);
    static Term blank(std::string lex);
    static Term literal(std::string lex, std::string datatype = "");
    static Term var(std::string name);

    bool isUri() const { return kind == TermKind::Uri; }
    bool isBlank() const { return kind == TermKind::Blank; }
    bool isLiteral() const { return kind == TermKind::Literal; }
    bool isVar() const { return kind == TermKind::Var; }
    bool isConstant() const { return kind != TermKind::Var; }

    bool operator==(const Term& o) const {
        return kind == o.kind && lexical == o.lexical && datatype == o.datatype;
    }
    bool operator!=(const Term& o) const { return !(*this == o); }
    bool operator<(const Term& o) const;
};

// Strict total order: kind rank, then code-point order of the lexical form,
// then the datatype suffix. Returns -1/0/+1.
int compareTerms(const Term& a, const Term& b);

struct Quad {
    Term context;  // always a URI
    Term subject, predicate, object;

    bool operator==(const Quad& o) const {
        return context == o.context && subject == o.subject &&
               predicate == o.predicate && object == o.object;
    }
    bool operator!=(const Quad& o) const { return !(*this == o); }
    bool operator<(const Quad& o) const { return compare(o) < 0; }
    int compare(const Quad& o) const;
};

// Lexicographic lift of the constant order over (context, subject, predicate, object).
int compareQuads(const Quad& a, const Quad& b);

using QuadGraph = std::set<Quad>;

// The two-clause order on finite quad-graphs: proper subset first, otherwise
// the greatest quads of the set differences decide. Total on distinct graphs.
int compareQuadGraphs(const QuadGraph& a, const QuadGraph& b);

// Triple projection of one context.
std::set<std::vector<Term>> projectGraph(const QuadGraph& g, const Term& context);

std::set<Term> graphContexts(const QuadGraph& g);

struct QuadPattern {
    Term context;  // URI
    Term subject, predicate, object;

    bool operator==(const QuadPattern& o) const {
        return context == o.context && subject == o.subject &&
               predicate == o.predicate && object == o.object;
    }
    bool operator<(const QuadPattern& o) const;

    std::vector<const Term*> terms() const { return {&context, &subject, &predicate, &object}; }
};

// {c | c:(s,p,o) in q, t occurs in s, p or o}.
std::set<Term> contextScope(const Term& t, const std::vector<QuadPattern>& q);

using ConstantVector = std::vector<Term>;
using Assignment = std::map<std::string, Term>;  // variable name -> constant

// True iff the vectors agree on non-blank positions and the blank positions
// admit a position-consistent bijection.
bool vectorIsomorphic(const ConstantVector& v, const ConstantVector& w);

struct RuleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BridgeRule {
    int id = 0;
    std::optional<int> parentId;  // set when the rule is a head piece of another
    std::vector<QuadPattern> body;
    std::vector<QuadPattern> head;

    // Derived by finalize(): frontier/existential ordered by first occurrence
    // in the head, bodyOnly is the rest of the body variables.
    std::vector<Term> frontier;
    std::vector<Term> existential;
    std::set<Term> bodyOnly;

    // Accounting marker used by the safety augmentation: each listed head
    // variable carries an originVector quad whose object is computed per
    // application. Empty for ordinary rules.
    std::vector<Term> vectorAccounting;

    void finalize();  // computes the variable partition, throws RuleError on bad input
    bool rangeRestricted() const { return existential.empty(); }
};

void validateRule(const BridgeRule& r);

struct QuadSystem {
    QuadGraph graph;
    std::vector<BridgeRule> rules;
};

// Context identifiers of the quad-graph plus those mentioned in rules.
std::set<Term> systemContexts(const QuadSystem& qs);
std::set<Term> ruleContexts(const std::vector<BridgeRule>& rules);

// Constants (non-variables) occurring anywhere in the system.
std::set<Term> systemConstants(const QuadSystem& qs);

// Splits the head of r into its existential-variable-connected components,
// one rule per piece, each keeping the full body. Fresh ids are taken from
// nextId (incremented); a single-piece head returns r unchanged.
std::vector<BridgeRule> splitHeadPieces(const BridgeRule& r, int& nextId);

// Applies splitHeadPieces over a rule set; fresh ids start above the maximum
// existing id.
std::vector<BridgeRule> normalizeHeadPieces(const std::vector<BridgeRule>& rules);

// Canonical serializations (N-Quads style) used for hashing and reports.
std::string termToString(const Term& t);
std::string quadToString(const Quad& q);
std::string patternToString(const QuadPattern& p);
std::string vectorToString(const ConstantVector& v);

std::uint64_t fnv1a64(const std::string& s);

// Reserved vocabulary.
namespace reserved {
inline const char* ccContext = "urn:quadchase:cc";
inline const char* box = "urn:quadchase:box";
inline const char* mfaC = "urn:quadchase:C";
inline const char* bottom = "urn:quadchase:bottom";
inline const char* descendantOf = "descendantOf";
inline const char* originRuleId = "originRuleId";
inline const char* originContext = "originContext";
inline const char* originVector = "originVector";
inline const char* unsafeMark = "unsafe";
inline const char* unmsafeMark = "unmsafe";
inline const char* uncsafeMark = "uncsafe";
inline const char* skolemPrefix = "sk_";
}  // namespace reserved

}  // namespace quadchase
