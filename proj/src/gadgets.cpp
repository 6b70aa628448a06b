#include "quadchase/gadgets.hpp"

#include <algorithm>

#include "quadchase/chase.hpp"

namespace quadchase {

namespace {

Term u(const std::string& s) { return Term::uri(s); }
Term v(const std::string& s) { return Term::var(s); }
Term rdfType() { return Term::uri(rdf::type); }

QuadPattern atom(Term c, Term s, Term p, Term o) { return QuadPattern{c, s, p, o}; }

BridgeRule makeRule(int id, std::vector<QuadPattern> body, std::vector<QuadPattern> head) {
    BridgeRule r;
    r.id = id;
    r.body = std::move(body);
    r.head = std::move(head);
    r.finalize();
    return r;
}

}  // namespace

std::set<std::string> Cfg::variables() const {
    std::set<std::string> out;
    for (const auto& [lhs, rhs] : productions) {
        (void)rhs;
        out.insert(lhs);
    }
    out.insert(start);
    return out;
}

GadgetOutput genCFGIntersection(const Cfg& g1, const Cfg& g2) {
    std::set<std::string> v1 = g1.variables(), v2 = g2.variables();
    for (const std::string& x : v1)
        if (v2.count(x)) throw GadgetError("grammar variable sets are not disjoint: " + x);

    std::set<std::string> terminals;
    auto collect = [&](const Cfg& g) {
        for (const auto& [lhs, rhs] : g.productions) {
            (void)lhs;
            if (rhs.empty()) throw GadgetError("malformed grammar: empty production body");
            for (const std::string& s : rhs)
                if (!v1.count(s) && !v2.count(s)) terminals.insert(s);
        }
    };
    collect(g1);
    collect(g2);

    Term c = u("c"), a = u("a"), klass = u("C");
    GadgetOutput out;
    out.system.graph.insert(Quad{c, a, rdfType(), klass});

    int id = 1;
    auto encodeProductions = [&](const Cfg& g) {
        for (const auto& [lhs, rhs] : g.productions) {
            std::vector<QuadPattern> body;
            for (size_t i = 0; i < rhs.size(); ++i)
                body.push_back(atom(c, v("x" + std::to_string(i + 1)), u(rhs[i]),
                                    v("x" + std::to_string(i + 2))));
            out.system.rules.push_back(makeRule(
                id++, std::move(body),
                {atom(c, v("x1"), u(lhs), v("x" + std::to_string(rhs.size() + 1)))}));
        }
    };
    encodeProductions(g1);
    encodeProductions(g2);

    for (const std::string& t : terminals) {
        out.system.rules.push_back(makeRule(
            id++, {atom(c, v("x"), rdfType(), klass)},
            {atom(c, v("x"), u(t), v("y")), atom(c, v("y"), rdfType(), klass)}));
    }

    out.query.atoms.push_back(atom(c, a, u(g1.start), v("y")));
    out.query.atoms.push_back(atom(c, a, u(g2.start), v("y")));
    return out;
}

GadgetOutput genHornSat(const std::vector<std::array<std::string, 3>>& clauses) {
    Term ct = u("ct"), cf = u("cf"), truth = u("T");
    GadgetOutput out;
    out.system.graph.insert(Quad{ct, u("t"), rdfType(), truth});
    for (const auto& clause : clauses) {
        for (const std::string& p : clause)
            if (p.empty()) throw GadgetError("non-pure clause: empty proposition");
        out.system.graph.insert(Quad{cf, u(clause[0]), u(clause[1]), u(clause[2])});
    }
    out.system.rules.push_back(makeRule(
        1,
        {atom(ct, v("x1"), rdfType(), truth), atom(ct, v("x2"), rdfType(), truth),
         atom(cf, v("x1"), v("x2"), v("x3"))},
        {atom(ct, v("x3"), rdfType(), truth)}));
    out.query.atoms.push_back(atom(ct, u("f"), rdfType(), truth));
    return out;
}

GadgetOutput genThreeColor(const std::vector<std::pair<std::string, std::string>>& edges) {
    Term c = u("c"), edge = u("edge");
    Term r = u("r"), b = u("b"), g = u("g");
    GadgetOutput out;
    for (auto [x, y] : std::vector<std::pair<Term, Term>>{
             {r, b}, {r, g}, {b, g}, {b, r}, {g, r}, {g, b}})
        out.system.graph.insert(Quad{c, x, edge, y});

    if (edges.empty()) {
        // The query form needs at least one edge; an edgeless graph is
        // trivially colorable, so ask for one fixed color-edge triple.
        out.query.atoms.push_back(atom(c, r, edge, b));
        return out;
    }
    for (const auto& [from, to] : edges) {
        Term vf = v("v_" + from), vt = v("v_" + to);
        out.query.atoms.push_back(atom(c, vf, edge, vt));
        out.query.atoms.push_back(atom(c, vt, edge, vf));
    }
    return out;
}

namespace {

std::string stateUri(const std::string& s) { return "st_" + s; }
std::string symUri(const std::string& s) { return "sym_" + s; }

}  // namespace

GadgetOutput genDTM(const DtmSpec& m, const std::string& input, int n) {
    if (n < 1 || n > 2) throw GadgetError("cell-exponent parameter n must be 1 or 2");
    std::set<std::string> states(m.states.begin(), m.states.end());
    std::set<std::string> alphabet(m.alphabet.begin(), m.alphabet.end());
    if (!states.count(m.initial)) throw GadgetError("initial state not in state set");
    if (!states.count(m.accept)) throw GadgetError("accepting state not in state set");
    if (!alphabet.count(m.blank)) throw GadgetError("blank symbol not in alphabet");
    std::set<std::pair<std::string, std::string>> seen;
    for (const DtmTransition& t : m.transitions) {
        if (!states.count(t.from) || !states.count(t.to))
            throw GadgetError("transition uses an unknown state");
        if (!alphabet.count(t.read) || !alphabet.count(t.write))
            throw GadgetError("transition uses an unknown symbol");
        if (t.move != 1 && t.move != -1) throw GadgetError("transition move must be +1 or -1");
        if (t.from == m.accept) throw GadgetError("accepting state must be halting");
        if (!seen.insert({t.from, t.read}).second)
            throw GadgetError("nondeterministic machine: duplicate transition for (" +
                              t.from + ", " + t.read + ")");
    }
    long tapeCells = 2;  // r(0)=2, r(j+1)=r(j)^2
    for (int i = 0; i < n; ++i) tapeCells *= tapeCells;
    if (static_cast<long>(input.size()) + 1 > tapeCells)
        throw GadgetError("input does not fit on the 2^(2^n) tape");
    for (char ch : input)
        if (!alphabet.count(std::string(1, ch)) || std::string(1, ch) == m.blank)
            throw GadgetError("input symbol not in alphabet: " + std::string(1, ch));

    auto ctx = [&](int i) { return u("c" + std::to_string(i)); };
    auto minOf = [&](int i) { return u("min" + std::to_string(i)); };
    auto maxOf = [&](int i) { return u("max" + std::to_string(i)); };
    auto succOf = [&](int i) { return u("succ" + std::to_string(i)); };
    Term R = u("R"), succ = u("succ"), succt = u("succt");
    Term con = u("Con"), conPairL = u("conPairL"), conPairR = u("conPairR");
    Term conSucc = u("conSucc"), conInit = u("conInit");
    Term headRel = u("head"), stateRel = u("state"), accept = u("Accept");
    Term bottom = u(reserved::bottom);

    GadgetOutput out;
    QuadGraph& q = out.system.graph;
    q.insert(Quad{ctx(0), u("k0"), rdfType(), R});
    q.insert(Quad{ctx(0), u("k1"), rdfType(), R});
    q.insert(Quad{ctx(0), u("k0"), rdfType(), minOf(0)});
    q.insert(Quad{ctx(0), u("k1"), rdfType(), maxOf(0)});
    q.insert(Quad{ctx(0), u("k0"), succOf(0), u("k1")});

    int id = 1;
    auto add = [&](std::vector<QuadPattern> body, std::vector<QuadPattern> head) {
        out.system.rules.push_back(makeRule(id++, std::move(body), std::move(head)));
    };

    for (int i = 0; i < n; ++i) {
        Term ci = ctx(i), cj = ctx(i + 1);
        add({atom(ci, v("x0"), rdfType(), R), atom(ci, v("x1"), rdfType(), R)},
            {atom(cj, v("x0"), v("x1"), v("y")), atom(cj, v("y"), rdfType(), R)});
        add({atom(cj, v("x0"), v("x0"), v("x1")), atom(ci, v("x0"), rdfType(), minOf(i))},
            {atom(cj, v("x1"), rdfType(), minOf(i + 1))});
        add({atom(cj, v("x0"), v("x0"), v("x1")), atom(ci, v("x0"), rdfType(), maxOf(i))},
            {atom(cj, v("x1"), rdfType(), maxOf(i + 1))});
        add({atom(ci, v("x1"), succOf(i), v("x2")), atom(cj, v("x0"), v("x1"), v("x3")),
             atom(cj, v("x0"), v("x2"), v("x4"))},
            {atom(cj, v("x3"), succOf(i + 1), v("x4"))});
        add({atom(ci, v("x1"), succOf(i), v("x2")), atom(cj, v("x1"), v("x3"), v("x5")),
             atom(cj, v("x2"), v("x4"), v("x6")), atom(ci, v("x3"), rdfType(), maxOf(i)),
             atom(ci, v("x4"), rdfType(), minOf(i))},
            {atom(cj, v("x5"), succOf(i + 1), v("x6"))});
    }

    Term cn = ctx(n), cp = ctx(n - 1);
    add({atom(cn, v("x0"), succOf(n), v("x1"))}, {atom(cn, v("x0"), succ, v("x1"))});
    add({atom(cn, v("x0"), succ, v("x1"))}, {atom(cn, v("x0"), succt, v("x1"))});
    add({atom(cn, v("x0"), succt, v("x1")), atom(cn, v("x1"), succt, v("x2"))},
        {atom(cn, v("x0"), succt, v("x2"))});

    // Configuration chain, reusing the level n-1 elements pairwise.
    add({atom(cp, v("x0"), rdfType(), R), atom(cp, v("x1"), rdfType(), R)},
        {atom(cn, v("y"), conPairL, v("x0")), atom(cn, v("y"), conPairR, v("x1")),
         atom(cn, v("y"), rdfType(), con)});
    add({atom(cn, v("y"), conPairL, v("x0")), atom(cn, v("y"), conPairR, v("x0")),
         atom(cp, v("x0"), rdfType(), minOf(n - 1))},
        {atom(cn, v("y"), rdfType(), conInit)});
    add({atom(cp, v("x1"), succOf(n - 1), v("x2")), atom(cn, v("y1"), conPairL, v("x0")),
         atom(cn, v("y1"), conPairR, v("x1")), atom(cn, v("y2"), conPairL, v("x0")),
         atom(cn, v("y2"), conPairR, v("x2"))},
        {atom(cn, v("y1"), conSucc, v("y2"))});
    add({atom(cp, v("x1"), succOf(n - 1), v("x2")), atom(cn, v("y1"), conPairL, v("x1")),
         atom(cn, v("y1"), conPairR, v("x3")), atom(cn, v("y2"), conPairL, v("x2")),
         atom(cn, v("y2"), conPairR, v("x4")), atom(cp, v("x3"), rdfType(), maxOf(n - 1)),
         atom(cp, v("x4"), rdfType(), minOf(n - 1))},
        {atom(cn, v("y1"), conSucc, v("y2"))});

    // Initial configuration: head position, state, tape word, trailing blanks.
    Term q0 = u(stateUri(m.initial)), qa = u(stateUri(m.accept));
    Term blankSym = u(symUri(m.blank));
    add({atom(cn, v("xj"), rdfType(), conInit), atom(cn, v("x0"), rdfType(), minOf(n))},
        {atom(cn, v("xj"), headRel, v("x0")), atom(cn, v("xj"), stateRel, q0)});
    {
        std::vector<QuadPattern> body{atom(cn, v("xj"), rdfType(), conInit),
                                      atom(cn, v("x0"), rdfType(), minOf(n))};
        std::vector<QuadPattern> head;
        size_t mlen = input.size();
        for (size_t i = 0; i < mlen; ++i)
            body.push_back(atom(cn, v("x" + std::to_string(i)), succ,
                                v("x" + std::to_string(i + 1))));
        for (size_t i = 0; i < mlen; ++i)
            head.push_back(atom(cn, v("xj"), u(symUri(std::string(1, input[i]))),
                                v("x" + std::to_string(i))));
        head.push_back(atom(cn, v("xj"), blankSym, v("x" + std::to_string(mlen))));
        add(std::move(body), std::move(head));
    }
    add({atom(cn, v("xj"), rdfType(), conInit), atom(cn, v("xj"), blankSym, v("x0")),
         atom(cn, v("x0"), succt, v("x1"))},
        {atom(cn, v("xj"), blankSym, v("x1"))});

    for (const DtmTransition& t : m.transitions) {
        Term sigma = u(symUri(t.read)), sigmaW = u(symUri(t.write));
        Term from = u(stateUri(t.from)), to = u(stateUri(t.to));
        std::vector<QuadPattern> body{
            atom(cn, v("x0"), headRel, v("xi")), atom(cn, v("x0"), sigma, v("xi")),
            atom(cn, v("x0"), stateRel, from)};
        if (t.move == 1)
            body.push_back(atom(cn, v("xi"), succ, v("xj")));
        else
            body.push_back(atom(cn, v("xj"), succ, v("xi")));
        body.push_back(atom(cn, v("x0"), conSucc, v("x1")));
        add(std::move(body),
            {atom(cn, v("x1"), headRel, v("xj")), atom(cn, v("x1"), sigmaW, v("xi")),
             atom(cn, v("x1"), stateRel, to)});
    }

    for (const std::string& s : m.alphabet) {
        Term sigma = u(symUri(s));
        add({atom(cn, v("x0"), headRel, v("xi")), atom(cn, v("x0"), conSucc, v("x1")),
             atom(cn, v("xj"), succt, v("xi")), atom(cn, v("x0"), sigma, v("xj"))},
            {atom(cn, v("x1"), sigma, v("xj"))});
        add({atom(cn, v("x0"), headRel, v("xi")), atom(cn, v("x0"), conSucc, v("x1")),
             atom(cn, v("xi"), succt, v("xj")), atom(cn, v("x0"), sigma, v("xj"))},
            {atom(cn, v("x1"), sigma, v("xj"))});
    }

    add({atom(cn, v("x0"), stateRel, qa)}, {atom(cn, v("x0"), rdfType(), accept)});
    add({atom(cn, v("x0"), conSucc, v("x1")), atom(cn, v("x1"), rdfType(), accept)},
        {atom(cn, v("x0"), rdfType(), accept)});

    for (auto it = m.alphabet.begin(); it != m.alphabet.end(); ++it)
        for (auto jt = std::next(it); jt != m.alphabet.end(); ++jt) {
            if (*it == *jt) continue;
            add({atom(cn, v("z1"), u(symUri(*it)), v("z2")),
                 atom(cn, v("z1"), u(symUri(*jt)), v("z2"))},
                {atom(bottom, bottom, bottom, bottom)});
        }

    out.query.atoms.push_back(atom(cn, v("y"), rdfType(), conInit));
    out.query.atoms.push_back(atom(cn, v("y"), rdfType(), accept));
    return out;
}

Cfg cfgFromJson(const nlohmann::json& j) {
    Cfg g;
    g.start = j.at("start").get<std::string>();
    for (const auto& p : j.at("productions")) {
        std::vector<std::string> rhs;
        for (const auto& s : p.at("rhs")) rhs.push_back(s.get<std::string>());
        g.productions.emplace_back(p.at("lhs").get<std::string>(), std::move(rhs));
    }
    return g;
}

DtmSpec dtmFromJson(const nlohmann::json& j) {
    DtmSpec m;
    for (const auto& s : j.at("states")) m.states.push_back(s.get<std::string>());
    for (const auto& s : j.at("alphabet")) m.alphabet.push_back(s.get<std::string>());
    m.blank = j.at("blank").get<std::string>();
    m.initial = j.at("initial").get<std::string>();
    m.accept = j.at("accept").get<std::string>();
    for (const auto& t : j.at("transitions")) {
        DtmTransition tr;
        tr.from = t.at("from").get<std::string>();
        tr.read = t.at("read").get<std::string>();
        tr.to = t.at("to").get<std::string>();
        tr.write = t.at("write").get<std::string>();
        tr.move = t.at("move").get<int>();
        m.transitions.push_back(std::move(tr));
    }
    return m;
}

std::vector<std::array<std::string, 3>> clausesFromJson(const nlohmann::json& j) {
    std::vector<std::array<std::string, 3>> out;
    for (const auto& c : j.at("clauses")) {
        if (!c.is_array() || c.size() != 3)
            throw GadgetError("non-pure clause: expected [P1, P2, P3]");
        out.push_back({c[0].get<std::string>(), c[1].get<std::string>(),
                       c[2].get<std::string>()});
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> edgesFromJson(const nlohmann::json& j) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw GadgetError("edge must be [from, to]");
        out.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> completeGraph(int k) {
    std::vector<std::pair<std::string, std::string>> out;
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j)
            out.emplace_back("v" + std::to_string(i), "v" + std::to_string(j));
    return out;
}

}  // namespace quadchase
