#include "quadchase/model.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace quadchase {

Term Term::uri(std::string lex) { return Term{TermKind::Uri, std::move(lex), ""}; }
Term Term::blank(std::string lex) { return Term{TermKind::Blank, std::move(lex), ""}; }
Term Term::literal(std::string lex, std::string datatype) {
    return Term{TermKind::Literal, std::move(lex), std::move(datatype)};
}
Term Term::var(std::string name) { return Term{TermKind::Var, std::move(name), ""}; }

static int kindRank(TermKind k) {
    switch (k) {
        case TermKind::Uri: return 0;
        case TermKind::Blank: return 1;
        case TermKind::Literal: return 2;
        case TermKind::Var: return 3;
    }
    return 4;
}

int compareTerms(const Term& a, const Term& b) {
    int ra = kindRank(a.kind), rb = kindRank(b.kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (int c = a.lexical.compare(b.lexical); c != 0) return c < 0 ? -1 : 1;
    if (int c = a.datatype.compare(b.datatype); c != 0) return c < 0 ? -1 : 1;
    return 0;
}

bool Term::operator<(const Term& o) const { return compareTerms(*this, o) < 0; }

int Quad::compare(const Quad& o) const {
    if (int c = compareTerms(context, o.context); c != 0) return c;
    if (int c = compareTerms(subject, o.subject); c != 0) return c;
    if (int c = compareTerms(predicate, o.predicate); c != 0) return c;
    return compareTerms(object, o.object);
}

int compareQuads(const Quad& a, const Quad& b) { return a.compare(b); }

int compareQuadGraphs(const QuadGraph& a, const QuadGraph& b) {
    if (a == b) return 0;
    QuadGraph aOnly, bOnly;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(aOnly, aOnly.end()));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                        std::inserter(bOnly, bOnly.end()));
    if (aOnly.empty()) return -1;  // a is a proper subset of b
    if (bOnly.empty()) return 1;
    // Clause (ii): compare the greatest quads of the differences.
    const Quad& ga = *aOnly.rbegin();
    const Quad& gb = *bOnly.rbegin();
    return compareQuads(ga, gb);
}

std::set<std::vector<Term>> projectGraph(const QuadGraph& g, const Term& context) {
    std::set<std::vector<Term>> out;
    for (const Quad& q : g)
        if (q.context == context) out.insert({q.subject, q.predicate, q.object});
    return out;
}

std::set<Term> graphContexts(const QuadGraph& g) {
    std::set<Term> out;
    for (const Quad& q : g) out.insert(q.context);
    return out;
}

bool QuadPattern::operator<(const QuadPattern& o) const {
    if (int c = compareTerms(context, o.context); c != 0) return c < 0;
    if (int c = compareTerms(subject, o.subject); c != 0) return c < 0;
    if (int c = compareTerms(predicate, o.predicate); c != 0) return c < 0;
    return compareTerms(object, o.object) < 0;
}

std::set<Term> contextScope(const Term& t, const std::vector<QuadPattern>& q) {
    std::set<Term> out;
    for (const QuadPattern& p : q)
        if (p.subject == t || p.predicate == t || p.object == t) out.insert(p.context);
    return out;
}

bool vectorIsomorphic(const ConstantVector& v, const ConstantVector& w) {
    if (v.size() != w.size()) return false;
    std::map<Term, Term> fwd, bwd;
    for (size_t i = 0; i < v.size(); ++i) {
        const Term& a = v[i];
        const Term& b = w[i];
        if (a.isBlank() != b.isBlank()) return false;
        if (!a.isBlank()) {
            if (a != b) return false;
            continue;
        }
        auto [itF, insF] = fwd.emplace(a, b);
        if (!insF && itF->second != b) return false;
        auto [itB, insB] = bwd.emplace(b, a);
        if (!insB && itB->second != a) return false;
    }
    return true;
}

static void collectVars(const QuadPattern& p, std::vector<Term>& order, std::set<Term>& seen) {
    for (const Term* t : p.terms()) {
        if (t->isVar() && seen.insert(*t).second) order.push_back(*t);
    }
}

void BridgeRule::finalize() {
    validateRule(*this);
    std::vector<Term> headOrder, bodyOrder;
    std::set<Term> headSeen, bodySeen;
    for (const QuadPattern& p : head) collectVars(p, headOrder, headSeen);
    for (const QuadPattern& p : body) collectVars(p, bodyOrder, bodySeen);

    frontier.clear();
    existential.clear();
    bodyOnly.clear();
    for (const Term& v : headOrder) {
        if (bodySeen.count(v))
            frontier.push_back(v);
        else
            existential.push_back(v);
    }
    for (const Term& v : bodyOrder)
        if (!headSeen.count(v)) bodyOnly.insert(v);
}

void validateRule(const BridgeRule& r) {
    auto checkAtom = [&](const QuadPattern& p, const char* where) {
        if (!p.context.isUri())
            throw RuleError("rule " + std::to_string(r.id) + ": " + where +
                            " atom has a non-URI context");
        for (const Term* t : p.terms()) {
            if (t->isBlank())
                throw RuleError("rule " + std::to_string(r.id) + ": blank node _:" +
                                t->lexical + " in " + where);
            if (t->lexical.empty()) throw RuleError("empty term in rule");
        }
    };
    for (const QuadPattern& p : r.body) checkAtom(p, "body");
    for (const QuadPattern& p : r.head) checkAtom(p, "head");
    if (r.head.empty())
        throw RuleError("rule " + std::to_string(r.id) + ": empty head");
}

std::set<Term> ruleContexts(const std::vector<BridgeRule>& rules) {
    std::set<Term> out;
    for (const BridgeRule& r : rules) {
        for (const QuadPattern& p : r.body) out.insert(p.context);
        for (const QuadPattern& p : r.head) out.insert(p.context);
    }
    return out;
}

std::set<Term> systemContexts(const QuadSystem& qs) {
    std::set<Term> out = graphContexts(qs.graph);
    std::set<Term> rc = ruleContexts(qs.rules);
    out.insert(rc.begin(), rc.end());
    return out;
}

std::set<Term> systemConstants(const QuadSystem& qs) {
    std::set<Term> out;
    for (const Quad& q : qs.graph) {
        out.insert(q.context);
        out.insert(q.subject);
        out.insert(q.predicate);
        out.insert(q.object);
    }
    for (const BridgeRule& r : qs.rules) {
        auto take = [&](const std::vector<QuadPattern>& ps) {
            for (const QuadPattern& p : ps)
                for (const Term* t : p.terms())
                    if (t->isConstant()) out.insert(*t);
        };
        take(r.body);
        take(r.head);
    }
    return out;
}

// Union-find over head atoms keyed by shared existential variables.
std::vector<BridgeRule> splitHeadPieces(const BridgeRule& r, int& nextId) {
    const size_t n = r.head.size();
    std::vector<size_t> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](size_t a, size_t b) { parent[find(a)] = find(b); };

    std::set<Term> exVars(r.existential.begin(), r.existential.end());
    std::map<Term, size_t> firstAtomOf;
    for (size_t i = 0; i < n; ++i) {
        for (const Term* t : r.head[i].terms()) {
            if (!exVars.count(*t)) continue;
            auto [it, fresh] = firstAtomOf.emplace(*t, i);
            if (!fresh) unite(i, it->second);
        }
    }

    std::map<size_t, std::vector<QuadPattern>> pieces;
    for (size_t i = 0; i < n; ++i) pieces[find(i)].push_back(r.head[i]);
    if (pieces.size() <= 1) return {r};

    // Deterministic piece order: smallest atom under the pattern order.
    std::vector<std::vector<QuadPattern>> ordered;
    for (auto& [root, atoms] : pieces) {
        std::sort(atoms.begin(), atoms.end());
        ordered.push_back(atoms);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    std::vector<BridgeRule> out;
    for (auto& atoms : ordered) {
        BridgeRule piece;
        piece.id = nextId++;
        piece.parentId = r.id;
        piece.body = r.body;
        piece.head = atoms;
        piece.finalize();
        out.push_back(std::move(piece));
    }
    return out;
}

std::vector<BridgeRule> normalizeHeadPieces(const std::vector<BridgeRule>& rules) {
    int nextId = 0;
    for (const BridgeRule& r : rules) nextId = std::max(nextId, r.id);
    ++nextId;
    std::vector<BridgeRule> out;
    for (const BridgeRule& r : rules) {
        auto pieces = splitHeadPieces(r, nextId);
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return out;
}

static void escapeLiteralInto(const std::string& s, std::string& out) {
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
}

std::string termToString(const Term& t) {
    std::string out;
    switch (t.kind) {
        case TermKind::Uri:
            out = "<" + t.lexical + ">";
            break;
        case TermKind::Blank:
            out = "_:" + t.lexical;
            break;
        case TermKind::Literal:
            out = "\"";
            escapeLiteralInto(t.lexical, out);
            out += "\"";
            out += t.datatype;
            break;
        case TermKind::Var:
            out = "?" + t.lexical;
            break;
    }
    return out;
}

std::string quadToString(const Quad& q) {
    return termToString(q.subject) + " " + termToString(q.predicate) + " " +
           termToString(q.object) + " " + termToString(q.context) + " .";
}

std::string patternToString(const QuadPattern& p) {
    return termToString(p.context) + "(" + termToString(p.subject) + ", " +
           termToString(p.predicate) + ", " + termToString(p.object) + ")";
}

std::string vectorToString(const ConstantVector& v) {
    std::string out = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += termToString(v[i]);
    }
    out += ")";
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace quadchase
