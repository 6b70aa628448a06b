#include "quadchase/analysis.hpp"

#include <algorithm>
#include <functional>

namespace quadchase {

namespace {

std::set<std::string> varsOf(const std::vector<FeAtom>& atoms) {
    std::set<std::string> out;
    for (const FeAtom& a : atoms)
        for (const Term& t : a.args)
            if (t.isVar()) out.insert(t.lexical);
    return out;
}

}  // namespace

std::vector<FeRule> translateToRules(const QuadSystem& qs) {
    std::vector<FeRule> out;
    int maxId = 0;
    for (const BridgeRule& r : qs.rules) {
        FeRule fe;
        fe.id = r.id;
        maxId = std::max(maxId, r.id);
        for (const QuadPattern& p : r.body)
            fe.body.push_back(FeAtom{p.context, {p.subject, p.predicate, p.object}});
        for (const QuadPattern& p : r.head)
            fe.head.push_back(FeAtom{p.context, {p.subject, p.predicate, p.object}});
        out.push_back(std::move(fe));
    }
    if (!qs.graph.empty()) {
        FeRule instance;
        instance.id = maxId + 1;
        std::map<Term, Term> blankVar;
        auto lift = [&](const Term& t) -> Term {
            if (!t.isBlank()) return t;
            auto it = blankVar.find(t);
            if (it != blankVar.end()) return it->second;
            Term v = Term::var("yb_" + t.lexical);
            blankVar.emplace(t, v);
            return v;
        };
        for (const Quad& q : qs.graph)
            instance.head.push_back(
                FeAtom{q.context, {lift(q.subject), lift(q.predicate), lift(q.object)}});
        out.push_back(std::move(instance));
    }
    return out;
}

FeAtom chiPad(const FeAtom& atom) {
    FeAtom out = atom;
    while (out.args.size() < 3) out.args.push_back(Term::uri(reserved::box));
    return out;
}

std::vector<FeRule> chiPad(const std::vector<FeRule>& rules) {
    std::vector<FeRule> out;
    for (const FeRule& r : rules) {
        FeRule padded;
        padded.id = r.id;
        for (const FeAtom& a : r.body) padded.body.push_back(chiPad(a));
        for (const FeAtom& a : r.head) padded.head.push_back(chiPad(a));
        out.push_back(std::move(padded));
    }
    return out;
}

QuadSystem translateFromRules(const std::vector<FeRule>& rules) {
    QuadSystem qs;
    for (const FeRule& fe : chiPad(rules)) {
        BridgeRule r;
        r.id = fe.id;
        auto toPattern = [](const FeAtom& a) {
            if (!a.predicate.isUri())
                throw RuleError("predicate must be a URI: " + termToString(a.predicate));
            return QuadPattern{a.predicate, a.args[0], a.args[1], a.args[2]};
        };
        for (const FeAtom& a : fe.body) r.body.push_back(toPattern(a));
        for (const FeAtom& a : fe.head) r.head.push_back(toPattern(a));
        r.finalize();
        qs.rules.push_back(std::move(r));
    }
    return qs;
}

int PositionGraph::nodeId(const Position& p) const {
    auto it = std::find(nodes.begin(), nodes.end(), p);
    return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

namespace {

// Tarjan SCC over a graph given as adjacency sets.
std::vector<int> sccOf(int n, const std::map<int, std::set<int>>& adj) {
    std::vector<int> comp(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0),
        num(static_cast<size_t>(n), -1);
    std::vector<int> stack;
    std::vector<bool> onStack(static_cast<size_t>(n), false);
    int counter = 0, comps = 0;
    std::function<void(int)> dfs = [&](int v) {
        num[static_cast<size_t>(v)] = low[static_cast<size_t>(v)] = counter++;
        stack.push_back(v);
        onStack[static_cast<size_t>(v)] = true;
        auto it = adj.find(v);
        if (it != adj.end()) {
            for (int w : it->second) {
                if (num[static_cast<size_t>(w)] == -1) {
                    dfs(w);
                    low[static_cast<size_t>(v)] =
                        std::min(low[static_cast<size_t>(v)], low[static_cast<size_t>(w)]);
                } else if (onStack[static_cast<size_t>(w)]) {
                    low[static_cast<size_t>(v)] =
                        std::min(low[static_cast<size_t>(v)], num[static_cast<size_t>(w)]);
                }
            }
        }
        if (low[static_cast<size_t>(v)] == num[static_cast<size_t>(v)]) {
            while (true) {
                int w = stack.back();
                stack.pop_back();
                onStack[static_cast<size_t>(w)] = false;
                comp[static_cast<size_t>(w)] = comps;
                if (w == v) break;
            }
            ++comps;
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[static_cast<size_t>(v)] == -1) dfs(v);
    return comp;
}

}  // namespace

WaResult weaklyAcyclic(const std::vector<FeRule>& rules) {
    WaResult res;
    PositionGraph& g = res.graph;
    std::map<Position, int> idOf;
    auto node = [&](const std::string& pred, int i) {
        Position p{pred, i};
        auto it = idOf.find(p);
        if (it != idOf.end()) return it->second;
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(p);
        idOf.emplace(p, id);
        return id;
    };
    for (const FeRule& r : rules) {
        for (const FeAtom& a : r.body)
            for (size_t i = 0; i < a.args.size(); ++i)
                node(a.predicate.lexical, static_cast<int>(i) + 1);
        for (const FeAtom& a : r.head)
            for (size_t i = 0; i < a.args.size(); ++i)
                node(a.predicate.lexical, static_cast<int>(i) + 1);
    }

    for (const FeRule& r : rules) {
        std::set<std::string> bodyVars = varsOf(r.body);
        // Body positions per universal variable.
        std::map<std::string, std::set<int>> bodyPos;
        for (const FeAtom& a : r.body)
            for (size_t i = 0; i < a.args.size(); ++i)
                if (a.args[i].isVar())
                    bodyPos[a.args[i].lexical].insert(
                        node(a.predicate.lexical, static_cast<int>(i) + 1));
        // Universal variables that occur in the head.
        std::set<std::string> headUniversals;
        for (const FeAtom& a : r.head)
            for (const Term& t : a.args)
                if (t.isVar() && bodyVars.count(t.lexical)) headUniversals.insert(t.lexical);

        for (const FeAtom& a : r.head) {
            for (size_t i = 0; i < a.args.size(); ++i) {
                const Term& t = a.args[i];
                if (!t.isVar()) continue;
                int headNode = node(a.predicate.lexical, static_cast<int>(i) + 1);
                if (bodyVars.count(t.lexical)) {
                    for (int from : bodyPos[t.lexical])
                        g.normalEdges.emplace(from, headNode);
                } else {
                    for (const std::string& x : headUniversals)
                        for (int from : bodyPos[x])
                            g.specialEdges.emplace(from, headNode);
                }
            }
        }
    }

    std::map<int, std::set<int>> adj;
    for (const auto& [u, v] : g.normalEdges) adj[u].insert(v);
    for (const auto& [u, v] : g.specialEdges) adj[u].insert(v);
    std::vector<int> comp = sccOf(static_cast<int>(g.nodes.size()), adj);

    res.result = true;
    for (const auto& [u, v] : g.specialEdges) {
        if (comp[static_cast<size_t>(u)] != comp[static_cast<size_t>(v)]) continue;
        res.result = false;
        // Close the cycle: shortest path v -> u inside the component.
        std::map<int, int> parent;
        std::vector<int> frontier{v};
        parent[v] = v;
        while (!frontier.empty() && !parent.count(u)) {
            std::vector<int> next;
            for (int x : frontier)
                for (int y : adj[x])
                    if (comp[static_cast<size_t>(y)] == comp[static_cast<size_t>(u)] &&
                        !parent.count(y)) {
                        parent[y] = x;
                        next.push_back(y);
                    }
            frontier = std::move(next);
        }
        std::vector<Position> cycle;
        cycle.push_back(g.nodes[static_cast<size_t>(u)]);
        cycle.push_back(g.nodes[static_cast<size_t>(v)]);
        if (u != v && parent.count(u)) {
            std::vector<int> back;
            for (int x = u; x != v; x = parent[x]) back.push_back(x);
            for (auto it = back.rbegin() + 1; it != back.rend(); ++it)
                cycle.push_back(g.nodes[static_cast<size_t>(*it)]);
            cycle.push_back(g.nodes[static_cast<size_t>(u)]);
        }
        res.witnessCycle = cycle;
        break;
    }
    return res;
}

namespace {

// Renamed-apart variable key.
struct VarRef {
    int ruleId;
    std::string var;
    bool operator<(const VarRef& o) const {
        return ruleId != o.ruleId ? ruleId < o.ruleId : var < o.var;
    }
};

}  // namespace

JaResult jointlyAcyclic(const std::vector<FeRule>& rules) {
    JaResult res;

    std::map<VarRef, std::set<Position>> posB, posH;
    std::map<int, std::set<std::string>> bodyVarsOf, headVarsOf;
    for (const FeRule& r : rules) {
        bodyVarsOf[r.id] = varsOf(r.body);
        headVarsOf[r.id] = varsOf(r.head);
        for (const FeAtom& a : r.body)
            for (size_t i = 0; i < a.args.size(); ++i)
                if (a.args[i].isVar())
                    posB[{r.id, a.args[i].lexical}].insert(
                        {a.predicate.lexical, static_cast<int>(i) + 1});
        for (const FeAtom& a : r.head)
            for (size_t i = 0; i < a.args.size(); ++i)
                if (a.args[i].isVar())
                    posH[{r.id, a.args[i].lexical}].insert(
                        {a.predicate.lexical, static_cast<int>(i) + 1});
    }

    for (const FeRule& r : rules)
        for (const std::string& v : headVarsOf[r.id])
            if (!bodyVarsOf[r.id].count(v)) res.nodes.push_back({r.id, v});
    std::sort(res.nodes.begin(), res.nodes.end());

    // Mov fixpoint per existential variable.
    for (const ExistentialRef& y : res.nodes) {
        std::set<Position>& mov = res.movSets[y];
        mov = posH[{y.ruleId, y.var}];
        bool changed = true;
        while (changed) {
            changed = false;
            for (const FeRule& r : rules) {
                for (const std::string& x : headVarsOf[r.id]) {
                    if (!bodyVarsOf[r.id].count(x)) continue;  // universal only
                    const auto& bp = posB[{r.id, x}];
                    bool contained = !bp.empty() &&
                                     std::all_of(bp.begin(), bp.end(),
                                                 [&](const Position& p) { return mov.count(p); });
                    if (!contained) continue;
                    for (const Position& p : posH[{r.id, x}])
                        if (mov.insert(p).second) changed = true;
                }
            }
        }
    }

    // Edge y -> y' iff some rule containing y' has a universal head variable
    // whose body positions all lie in Mov(y).
    std::map<ExistentialRef, int> idOf;
    for (size_t i = 0; i < res.nodes.size(); ++i) idOf[res.nodes[i]] = static_cast<int>(i);
    for (const auto& [y, mov] : res.movSets) {
        for (const FeRule& r : rules) {
            bool enables = false;
            for (const std::string& x : headVarsOf[r.id]) {
                if (!bodyVarsOf[r.id].count(x)) continue;
                const auto& bp = posB[{r.id, x}];
                if (!bp.empty() && std::all_of(bp.begin(), bp.end(), [&](const Position& p) {
                        return mov.count(p);
                    })) {
                    enables = true;
                    break;
                }
            }
            if (!enables) continue;
            for (const std::string& v : headVarsOf[r.id])
                if (!bodyVarsOf[r.id].count(v))
                    res.edges.emplace(idOf[y], idOf[ExistentialRef{r.id, v}]);
        }
    }

    std::map<int, std::set<int>> adj;
    for (const auto& [u, v] : res.edges) adj[u].insert(v);
    std::vector<int> comp = sccOf(static_cast<int>(res.nodes.size()), adj);
    res.result = true;
    for (const auto& [u, v] : res.edges)
        if (comp[static_cast<size_t>(u)] == comp[static_cast<size_t>(v)]) {
            res.result = false;
            break;
        }
    return res;
}

std::vector<FeRule> mfaTransform(const std::vector<FeRule>& rules) {
    std::vector<FeRule> out;
    int maxId = 0;
    for (const FeRule& r : rules) maxId = std::max(maxId, r.id);
    Term s = Term::uri(mfa::sPredicate);
    Term contradiction = Term::uri(reserved::mfaC);
    Term box = Term::uri(reserved::box);

    std::vector<std::pair<int, std::string>> detect;  // (ruleId, existential)
    for (const FeRule& r : rules) {
        FeRule m = r;
        std::set<std::string> bodyVars = varsOf(r.body);
        std::set<std::string> headVars = varsOf(r.head);
        std::vector<std::string> frontier, existentials;
        for (const std::string& v : headVars)
            (bodyVars.count(v) ? frontier : existentials).push_back(v);
        int j = 0;
        for (const std::string& y : existentials) {
            Term yPred = Term::uri(mfa::yPredicatePrefix + std::to_string(r.id) + "_" +
                                   std::to_string(j));
            m.head.push_back(FeAtom{yPred, {Term::var(y)}});
            for (const std::string& x : frontier)
                m.head.push_back(FeAtom{s, {Term::var(x), Term::var(y)}});
            detect.emplace_back(r.id, yPred.lexical);
            ++j;
        }
        out.push_back(std::move(m));
    }

    FeRule trans;
    trans.id = ++maxId;
    trans.body.push_back(FeAtom{s, {Term::var("x1"), Term::var("z")}});
    trans.body.push_back(FeAtom{s, {Term::var("z"), Term::var("x2")}});
    trans.head.push_back(FeAtom{s, {Term::var("x1"), Term::var("x2")}});
    out.push_back(std::move(trans));

    for (const auto& [ruleId, yPred] : detect) {
        (void)ruleId;
        FeRule r2;
        r2.id = ++maxId;
        r2.body.push_back(FeAtom{Term::uri(yPred), {Term::var("x1")}});
        r2.body.push_back(FeAtom{s, {Term::var("x1"), Term::var("x2")}});
        r2.body.push_back(FeAtom{Term::uri(yPred), {Term::var("x2")}});
        r2.head.push_back(FeAtom{contradiction, {box, box, box}});
        out.push_back(std::move(r2));
    }
    return out;
}

Verdict mfaCheck(const std::vector<FeRule>& rules, const Fuel& fuel) {
    std::vector<FeRule> instrumented = mfaTransform(rules);
    QuadSystem qs = translateFromRules(instrumented);

    ChaseOptions opts;
    opts.collectLog = false;
    opts.accountingContexts.insert(Term::uri(mfa::sPredicate));
    opts.accountingContexts.insert(Term::uri(reserved::mfaC));
    for (const FeRule& r : instrumented)
        for (const FeAtom& a : r.head)
            if (a.predicate.lexical.rfind(mfa::yPredicatePrefix, 0) == 0)
                opts.accountingContexts.insert(a.predicate);

    ChaseState st = runDChase(qs, fuel, opts);
    Term box = Term::uri(reserved::box);
    Quad contradiction{Term::uri(reserved::mfaC), box, box, box};
    if (st.contains(contradiction)) return Verdict::No;
    return st.status == ChaseStatus::Fixpoint ? Verdict::Yes : Verdict::Unknown;
}

std::string positionGraphToDot(const PositionGraph& g) {
    std::string out = "digraph positions {\n";
    for (size_t i = 0; i < g.nodes.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=\"<" + g.nodes[i].first + "," +
               std::to_string(g.nodes[i].second) + ">\"];\n";
    for (const auto& [u, v] : g.normalEdges)
        out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
    for (const auto& [u, v] : g.specialEdges)
        out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) +
               " [style=dashed, label=\"*\"];\n";
    out += "}\n";
    return out;
}

std::string edgToDot(const JaResult& r) {
    std::string out = "digraph existentials {\n";
    for (size_t i = 0; i < r.nodes.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=\"" + r.nodes[i].var + "@r" +
               std::to_string(r.nodes[i].ruleId) + "\"];\n";
    for (const auto& [u, v] : r.edges)
        out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace quadchase
