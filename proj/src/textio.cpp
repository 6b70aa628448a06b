#include "quadchase/textio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace quadchase {

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

namespace {

void appendUtf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Shared character-level scanner for all the text formats.
struct Scanner {
    const std::string& text;
    size_t pos = 0;
    int line = 1;

    explicit Scanner(const std::string& t) : text(t) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }
    char get() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, msg); }

    void skipWsAndComments() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    bool consume(char c) {
        if (peek() == c) {
            get();
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!consume(c)) fail(std::string("expected '") + c + "' " + what);
    }

    unsigned long hexEscape(int digits) {
        unsigned long cp = 0;
        for (int i = 0; i < digits; ++i) {
            if (eof()) fail("truncated \\u escape");
            char c = get();
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<unsigned long>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<unsigned long>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<unsigned long>(c - 'A' + 10);
            else fail("bad hex digit in escape");
        }
        return cp;
    }

    std::string iriRef() {
        expect('<', "to open IRI");
        std::string out;
        while (true) {
            if (eof()) fail("unterminated IRI");
            char c = get();
            if (c == '>') break;
            if (c == '\\') {
                if (eof()) fail("truncated escape in IRI");
                char e = get();
                if (e == 'u') appendUtf8(out, hexEscape(4));
                else if (e == 'U') appendUtf8(out, hexEscape(8));
                else fail("bad escape in IRI");
            } else {
                out += c;
            }
        }
        if (out.empty()) fail("empty IRI");
        return out;
    }

    std::string quotedString() {
        expect('"', "to open literal");
        std::string out;
        while (true) {
            if (eof()) fail("unterminated literal");
            char c = get();
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("truncated escape in literal");
                char e = get();
                switch (e) {
                    case 't': out += '\t'; break;
                    case 'b': out += '\b'; break;
                    case 'n': out += '\n'; break;
                    case 'r': out += '\r'; break;
                    case 'f': out += '\f'; break;
                    case '"': out += '"'; break;
                    case '\'': out += '\''; break;
                    case '\\': out += '\\'; break;
                    case 'u': appendUtf8(out, hexEscape(4)); break;
                    case 'U': appendUtf8(out, hexEscape(8)); break;
                    default: fail("bad escape in literal");
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    static bool nameStart(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool nameChar(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
               c == '.' || c == ':';
    }

    std::string bareName() {
        std::string out;
        if (eof() || !nameStart(peek())) fail("expected a name");
        while (!eof() && nameChar(peek())) out += get();
        while (!out.empty() && out.back() == '.') {  // trailing dot ends the statement
            out.pop_back();
            --pos;
        }
        if (out.empty()) fail("expected a name");
        return out;
    }

    Term literalTerm() {
        std::string lex = quotedString();
        std::string suffix;
        if (peek() == '^') {
            get();
            expect('^', "in datatype marker");
            suffix = "^^<" + iriRef() + ">";
        } else if (peek() == '@') {
            get();
            suffix = "@";
            while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
                suffix += get();
            if (suffix.size() == 1) fail("empty language tag");
        }
        if (lex.empty()) fail("empty literal");
        return Term::literal(lex, suffix);
    }
};

Term resolvePrefixed(const std::map<std::string, std::string>& prefixes,
                     const std::string& name) {
    auto colon = name.find(':');
    if (colon == std::string::npos) return Term::uri(name);
    std::string prefix = name.substr(0, colon);
    auto it = prefixes.find(prefix);
    if (it == prefixes.end()) return Term::uri(name);  // opaque name with a colon
    return Term::uri(it->second + name.substr(colon + 1));
}

}  // namespace

QuadGraph parseNQuads(const std::string& text, const NQuadsOptions& opts) {
    QuadGraph out;
    Scanner sc(text);
    auto term = [&](const char* position) -> Term {
        char c = sc.peek();
        if (c == '<') return Term::uri(sc.iriRef());
        if (c == '_') {
            sc.get();
            sc.expect(':', "after '_' in blank node");
            return Term::blank(sc.bareName());
        }
        if (c == '"') return sc.literalTerm();
        if (c == '?') sc.fail("variables are not allowed in data");
        sc.fail(std::string("expected a term as ") + position);
    };

    while (true) {
        sc.skipWsAndComments();
        if (sc.eof()) break;
        int startLine = sc.line;
        Term s = term("subject");
        sc.skipWsAndComments();
        Term p = term("predicate");
        sc.skipWsAndComments();
        if (sc.peek() == '.') throw ParseError(startLine, "quad has only two terms");
        Term o = term("object");
        sc.skipWsAndComments();
        if (sc.peek() == '.')
            throw ParseError(startLine, "missing context term (triples are rejected)");
        Term c = term("context");
        sc.skipWsAndComments();
        sc.expect('.', "to end quad");
        if (!c.isUri()) throw ParseError(startLine, "context must be a URI");
        if (!opts.generalized) {
            if (s.isLiteral()) throw ParseError(startLine, "literal subject (use --generalized)");
            if (!p.isUri()) throw ParseError(startLine, "non-URI predicate (use --generalized)");
        }
        out.insert(Quad{c, s, p, o});
    }
    return out;
}

QuadGraph parseNQuadsFile(const std::string& path, const NQuadsOptions& opts) {
    return parseNQuads(readFile(path), opts);
}

std::string serializeNQuads(const QuadGraph& g) {
    std::string out;
    for (const Quad& q : g) {
        out += quadToString(q);
        out += "\n";
    }
    return out;
}

namespace {

// Common statement parser for BR and forall-existential rule documents.
template <typename Atom, typename AtomParser>
void parseRuleStatements(const std::string& text,
                         std::map<std::string, std::string>& prefixes,
                         AtomParser&& parseAtom,
                         const std::function<void(int, int, std::vector<Atom>&, std::vector<Atom>&)>& emit) {
    Scanner sc(text);
    int nextImplicitId = 1;
    std::set<int> usedIds;

    while (true) {
        sc.skipWsAndComments();
        if (sc.eof()) break;
        int startLine = sc.line;

        if (sc.peek() == '@') {
            sc.get();
            std::string kw = sc.bareName();
            if (kw != "prefix") sc.fail("unknown directive @" + kw);
            sc.skipWsAndComments();
            std::string label = sc.bareName();
            if (label.empty() || label.back() != ':') sc.fail("prefix label must end with ':'");
            label.pop_back();
            sc.skipWsAndComments();
            std::string iri = sc.iriRef();
            sc.skipWsAndComments();
            sc.expect('.', "to end @prefix");
            prefixes[label] = iri;
            continue;
        }

        int id = 0;
        bool explicitId = false;
        if (sc.consume('[')) {
            sc.skipWsAndComments();
            std::string digits;
            while (std::isdigit(static_cast<unsigned char>(sc.peek()))) digits += sc.get();
            if (digits.empty()) sc.fail("expected rule id");
            id = std::stoi(digits);
            explicitId = true;
            sc.skipWsAndComments();
            sc.expect(']', "to close rule id");
            sc.skipWsAndComments();
        }

        std::vector<Atom> body, head;
        auto atomList = [&](std::vector<Atom>& into) {
            while (true) {
                sc.skipWsAndComments();
                into.push_back(parseAtom(sc));
                sc.skipWsAndComments();
                if (!sc.consume(',')) break;
            }
        };

        if (!(sc.peek() == '=')) atomList(body);
        sc.skipWsAndComments();
        sc.expect('=', "before '>' of rule arrow");
        sc.expect('>', "in rule arrow");
        atomList(head);
        sc.skipWsAndComments();
        sc.expect('.', "to end rule");

        if (!explicitId) {
            while (usedIds.count(nextImplicitId)) ++nextImplicitId;
            id = nextImplicitId++;
        }
        if (!usedIds.insert(id).second)
            throw ParseError(startLine, "duplicate rule id " + std::to_string(id));
        if (explicitId) nextImplicitId = std::max(nextImplicitId, id + 1);

        emit(id, startLine, body, head);
    }
}

Term parseContextTerm(Scanner& sc, const std::map<std::string, std::string>& prefixes) {
    char c = sc.peek();
    if (c == '<') return Term::uri(sc.iriRef());
    if (c == '_') sc.fail("blank node used as context");
    if (c == '"') sc.fail("literal used as context");
    return resolvePrefixed(prefixes, sc.bareName());
}

Term parseRuleTerm(Scanner& sc, const std::map<std::string, std::string>& prefixes) {
    char c = sc.peek();
    if (c == '<') return Term::uri(sc.iriRef());
    if (c == '"') return sc.literalTerm();
    if (c == '?') {
        sc.get();
        return Term::var(sc.bareName());
    }
    if (c == '_') {
        sc.get();
        if (sc.peek() == ':') sc.fail("blank nodes are not allowed in rules");
        --sc.pos;  // plain name starting with '_'
    }
    if (Scanner::nameStart(c)) return resolvePrefixed(prefixes, sc.bareName());
    sc.fail("expected a term");
}

}  // namespace

RuleDocument parseRules(const std::string& text) {
    RuleDocument doc;
    auto atom = [&](Scanner& sc) {
        QuadPattern p;
        p.context = parseContextTerm(sc, doc.prefixes);
        sc.skipWsAndComments();
        sc.expect('(', "to open atom");
        sc.skipWsAndComments();
        p.subject = parseRuleTerm(sc, doc.prefixes);
        sc.skipWsAndComments();
        sc.expect(',', "between atom terms");
        sc.skipWsAndComments();
        p.predicate = parseRuleTerm(sc, doc.prefixes);
        sc.skipWsAndComments();
        sc.expect(',', "between atom terms");
        sc.skipWsAndComments();
        p.object = parseRuleTerm(sc, doc.prefixes);
        sc.skipWsAndComments();
        sc.expect(')', "to close atom");
        return p;
    };
    std::function<void(int, int, std::vector<QuadPattern>&, std::vector<QuadPattern>&)> emit =
        [&](int id, int line, std::vector<QuadPattern>& body, std::vector<QuadPattern>& head) {
            BridgeRule r;
            r.id = id;
            r.body = std::move(body);
            r.head = std::move(head);
            try {
                r.finalize();
            } catch (const RuleError& e) {
                throw ParseError(line, e.what());
            }
            doc.rules.push_back(std::move(r));
        };
    parseRuleStatements<QuadPattern>(text, doc.prefixes, atom, emit);
    return doc;
}

RuleDocument parseRulesFile(const std::string& path) { return parseRules(readFile(path)); }

namespace {

std::string contextToSource(const Term& t) {
    bool simple = !t.lexical.empty() &&
                  Scanner::nameStart(t.lexical.front()) &&
                  t.lexical.find(':') == std::string::npos &&
                  std::all_of(t.lexical.begin(), t.lexical.end(), Scanner::nameChar);
    return simple ? t.lexical : "<" + t.lexical + ">";
}

}  // namespace

std::string serializeRules(const std::vector<BridgeRule>& rules) {
    std::string out;
    for (const BridgeRule& r : rules) {
        out += "[" + std::to_string(r.id) + "] ";
        auto atoms = [&](const std::vector<QuadPattern>& ps) {
            for (size_t i = 0; i < ps.size(); ++i) {
                if (i) out += ", ";
                out += contextToSource(ps[i].context) + "(" + termToString(ps[i].subject) +
                       ", " + termToString(ps[i].predicate) + ", " +
                       termToString(ps[i].object) + ")";
            }
        };
        atoms(r.body);
        out += r.body.empty() ? "=> " : " => ";
        atoms(r.head);
        out += " .\n";
    }
    return out;
}

QueryDocument parseQuery(const std::string& text) {
    QueryDocument doc;
    std::map<std::string, std::string> prefixes;
    Scanner sc(text);
    sc.skipWsAndComments();
    while (sc.peek() == '@') {
        sc.get();
        std::string kw = sc.bareName();
        if (kw != "prefix") sc.fail("unknown directive @" + kw);
        sc.skipWsAndComments();
        std::string label = sc.bareName();
        if (label.empty() || label.back() != ':') sc.fail("prefix label must end with ':'");
        label.pop_back();
        sc.skipWsAndComments();
        std::string iri = sc.iriRef();
        sc.skipWsAndComments();
        sc.expect('.', "to end @prefix");
        sc.skipWsAndComments();
        prefixes[label] = iri;
    }

    std::string kw = sc.bareName();
    std::transform(kw.begin(), kw.end(), kw.begin(), ::toupper);
    if (kw == "SELECT") {
        sc.skipWsAndComments();
        while (sc.peek() == '?') {
            sc.get();
            doc.freeVars.push_back(Term::var(sc.bareName()));
            sc.skipWsAndComments();
        }
        if (doc.freeVars.empty()) sc.fail("SELECT needs at least one variable");
        std::string where = sc.bareName();
        std::transform(where.begin(), where.end(), where.begin(), ::toupper);
        if (where != "WHERE") sc.fail("expected WHERE");
    } else if (kw != "ASK") {
        sc.fail("query must start with ASK or SELECT");
    }

    while (true) {
        sc.skipWsAndComments();
        if (sc.peek() == '.') break;
        QuadPattern p;
        p.context = parseContextTerm(sc, prefixes);
        sc.skipWsAndComments();
        sc.expect('(', "to open atom");
        sc.skipWsAndComments();
        p.subject = parseRuleTerm(sc, prefixes);
        sc.skipWsAndComments();
        sc.expect(',', "between atom terms");
        sc.skipWsAndComments();
        p.predicate = parseRuleTerm(sc, prefixes);
        sc.skipWsAndComments();
        sc.expect(',', "between atom terms");
        sc.skipWsAndComments();
        p.object = parseRuleTerm(sc, prefixes);
        sc.skipWsAndComments();
        sc.expect(')', "to close atom");
        doc.atoms.push_back(p);
        sc.skipWsAndComments();
        if (!sc.consume(',')) break;
    }
    sc.skipWsAndComments();
    sc.expect('.', "to end query");

    if (doc.atoms.empty()) throw ParseError(sc.line, "query has no atoms");
    std::set<Term> atomVars;
    for (const QuadPattern& p : doc.atoms)
        for (const Term* t : p.terms())
            if (t->isVar()) atomVars.insert(*t);
    for (const Term& v : doc.freeVars)
        if (!atomVars.count(v))
            throw ParseError(sc.line, "free variable ?" + v.lexical + " occurs in no atom");
    return doc;
}

QueryDocument parseQueryFile(const std::string& path) { return parseQuery(readFile(path)); }

std::string serializeQuery(const QueryDocument& q) {
    std::string out;
    if (q.freeVars.empty()) {
        out = "ASK ";
    } else {
        out = "SELECT";
        for (const Term& v : q.freeVars) out += " ?" + v.lexical;
        out += " WHERE ";
    }
    for (size_t i = 0; i < q.atoms.size(); ++i) {
        if (i) out += ", ";
        out += contextToSource(q.atoms[i].context) + "(" + termToString(q.atoms[i].subject) +
               ", " + termToString(q.atoms[i].predicate) + ", " +
               termToString(q.atoms[i].object) + ")";
    }
    out += " .\n";
    return out;
}

FeRuleDocument parseFeRules(const std::string& text) {
    FeRuleDocument doc;
    auto atom = [&](Scanner& sc) {
        FeAtom a;
        a.predicate = parseContextTerm(sc, doc.prefixes);
        sc.skipWsAndComments();
        sc.expect('(', "to open atom");
        while (true) {
            sc.skipWsAndComments();
            a.args.push_back(parseRuleTerm(sc, doc.prefixes));
            sc.skipWsAndComments();
            if (!sc.consume(',')) break;
        }
        sc.expect(')', "to close atom");
        if (a.args.empty() || a.args.size() > 3)
            sc.fail("atom arity must be between 1 and 3");
        return a;
    };
    std::function<void(int, int, std::vector<FeAtom>&, std::vector<FeAtom>&)> emit =
        [&](int id, int line, std::vector<FeAtom>& body, std::vector<FeAtom>& head) {
            if (head.empty()) throw ParseError(line, "rule has an empty head");
            doc.rules.push_back(FeRule{id, std::move(body), std::move(head)});
        };
    parseRuleStatements<FeAtom>(text, doc.prefixes, atom, emit);
    return doc;
}

FeRuleDocument parseFeRulesFile(const std::string& path) {
    return parseFeRules(readFile(path));
}

std::string serializeFeRules(const std::vector<FeRule>& rules) {
    std::string out;
    for (const FeRule& r : rules) {
        out += "[" + std::to_string(r.id) + "] ";
        auto atoms = [&](const std::vector<FeAtom>& as) {
            for (size_t i = 0; i < as.size(); ++i) {
                if (i) out += ", ";
                out += contextToSource(as[i].predicate) + "(";
                for (size_t j = 0; j < as[i].args.size(); ++j) {
                    if (j) out += ", ";
                    out += termToString(as[i].args[j]);
                }
                out += ")";
            }
        };
        atoms(r.body);
        out += r.body.empty() ? "=> " : " => ";
        atoms(r.head);
        out += " .\n";
    }
    return out;
}

}  // namespace quadchase
