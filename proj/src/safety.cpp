#include "quadchase/safety.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace quadchase {

const char* modeName(SafetyMode m) {
    switch (m) {
        case SafetyMode::Safe: return "safe";
        case SafetyMode::MSafe: return "msafe";
        case SafetyMode::CSafe: return "csafe";
    }
    return "?";
}

const char* verdictName(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

long Classification::augmentedChaseSize() const {
    return std::max(safe.chaseSize, std::max(msafe.chaseSize, csafe.chaseSize));
}

const ModeResult& Classification::mode(SafetyMode m) const {
    switch (m) {
        case SafetyMode::Safe: return safe;
        case SafetyMode::MSafe: return msafe;
        case SafetyMode::CSafe: return csafe;
    }
    return safe;
}

Quad violationQuadFor(SafetyMode mode) {
    const char* mark = mode == SafetyMode::Safe    ? reserved::unsafeMark
                       : mode == SafetyMode::MSafe ? reserved::unmsafeMark
                                                   : reserved::uncsafeMark;
    Term t = Term::uri(mark);
    return Quad{Term::uri(reserved::ccContext), t, t, t};
}

std::vector<BridgeRule> augmentRules(const std::vector<BridgeRule>& rules, SafetyMode mode) {
    for (const BridgeRule& r : rules)
        if (r.id == 0) throw RuleError("rule id 0 is reserved for the transitivity rule");

    Term cc = Term::uri(reserved::ccContext);
    Term descendantOf = Term::uri(reserved::descendantOf);
    Term originRuleId = Term::uri(reserved::originRuleId);
    Term originContext = Term::uri(reserved::originContext);

    std::vector<BridgeRule> out;
    for (const BridgeRule& r : rules) {
        if (r.existential.empty()) {
            out.push_back(r);
            continue;
        }
        BridgeRule a = r;
        for (const Term& y : r.existential) {
            for (const Term& x : r.frontier)
                a.head.push_back(QuadPattern{cc, x, descendantOf, y});
            a.head.push_back(QuadPattern{cc, y, descendantOf, y});
            switch (mode) {
                case SafetyMode::Safe:
                    a.head.push_back(
                        QuadPattern{cc, y, originRuleId, Term::literal(std::to_string(r.id))});
                    a.vectorAccounting.push_back(y);
                    break;
                case SafetyMode::MSafe:
                    a.head.push_back(
                        QuadPattern{cc, y, originRuleId, Term::literal(std::to_string(r.id))});
                    break;
                case SafetyMode::CSafe:
                    for (const Term& c : contextScope(y, r.head))
                        a.head.push_back(QuadPattern{cc, y, originContext, c});
                    break;
            }
        }
        a.finalize();
        out.push_back(std::move(a));
    }

    BridgeRule trans;
    trans.id = 0;
    trans.body.push_back(QuadPattern{cc, Term::var("x1"), descendantOf, Term::var("z1")});
    trans.body.push_back(QuadPattern{cc, Term::var("z1"), descendantOf, Term::var("x2")});
    trans.head.push_back(QuadPattern{cc, Term::var("x1"), descendantOf, Term::var("x2")});
    trans.finalize();
    out.push_back(std::move(trans));
    return out;
}

bool violationTest(const BridgeRule& rule, const Assignment& mu, const ChaseState& state,
                   SafetyMode mode, ViolationWitness* witness) {
    if (rule.existential.empty()) return false;
    Term cc = Term::uri(reserved::ccContext);
    Term descendantOf = Term::uri(reserved::descendantOf);

    ConstantVector frontierImage;
    for (const Term& v : rule.frontier) frontierImage.push_back(mu.at(v.lexical));

    // Context scopes of the rule's existentials, without the accounting context.
    std::vector<std::set<Term>> scopes;
    if (mode == SafetyMode::CSafe) {
        for (const Term& y : rule.existential) {
            std::set<Term> s = contextScope(y, rule.head);
            s.erase(cc);
            scopes.push_back(std::move(s));
        }
    }

    std::set<Term> frontierSeen;
    for (const Term& b : frontierImage) {
        if (!b.isBlank() || !frontierSeen.insert(b).second) continue;
        const std::vector<int>* edges = state.index.bucket(3, b);
        if (!edges) continue;
        for (int seq : *edges) {
            const Quad& q = state.bySeq[static_cast<size_t>(seq)];
            if (q.context != cc || q.predicate != descendantOf || q.object != b) continue;
            const Term& candidate = q.subject;
            auto meta = state.skolems.find(candidate);
            if (meta == state.skolems.end()) continue;
            bool hit = false;
            switch (mode) {
                case SafetyMode::Safe:
                    hit = meta->second.originRuleId == rule.id &&
                          vectorIsomorphic(meta->second.originVector, frontierImage);
                    break;
                case SafetyMode::MSafe:
                    hit = meta->second.originRuleId == rule.id;
                    break;
                case SafetyMode::CSafe:
                    for (const auto& scope : scopes)
                        if (meta->second.originContexts == scope) {
                            hit = true;
                            break;
                        }
                    break;
            }
            if (hit) {
                if (witness) {
                    witness->mode = modeName(mode);
                    witness->ruleId = rule.id;
                    witness->frontierBlank = b;
                    witness->descendant = candidate;
                    witness->attemptVector = frontierImage;
                    witness->descendantVector = meta->second.originVector;
                    witness->descendantContexts = meta->second.originContexts;
                }
                return true;
            }
        }
    }
    return false;
}

std::optional<ViolationWitness> scanForViolation(const ChaseState& state, SafetyMode mode,
                                                 long workBudget) {
    // Depth-first over the blank-child records, stopping at the first pair;
    // nothing is materialized, so long chains stay cheap.
    long work = 0;
    for (const auto& [ancestor, meta] : state.skolems) {
        std::vector<Term> stack(meta.children.begin(), meta.children.end());
        std::set<Term> visited;
        while (!stack.empty()) {
            if (workBudget > 0 && ++work > workBudget) return std::nullopt;
            Term d = stack.back();
            stack.pop_back();
            if (!d.isBlank() || !visited.insert(d).second) continue;
            auto dm = state.skolems.find(d);
            if (dm == state.skolems.end()) continue;
            for (const Term& c : dm->second.children) stack.push_back(c);
            if (d == ancestor) continue;
            bool hit = false;
            switch (mode) {
                case SafetyMode::Safe:
                    hit = dm->second.originRuleId == meta.originRuleId &&
                          vectorIsomorphic(dm->second.originVector, meta.originVector);
                    break;
                case SafetyMode::MSafe:
                    hit = dm->second.originRuleId == meta.originRuleId;
                    break;
                case SafetyMode::CSafe:
                    hit = dm->second.originContexts == meta.originContexts;
                    break;
            }
            if (hit) {
                ViolationWitness w;
                w.mode = modeName(mode);
                w.ruleId = meta.originRuleId;
                w.frontierBlank = ancestor;
                w.descendant = d;
                w.attemptVector = meta.originVector;
                w.descendantVector = dm->second.originVector;
                w.descendantContexts = dm->second.originContexts;
                return w;
            }
        }
    }
    return std::nullopt;
}

std::pair<ModeResult, ChaseState> runAugmentedChase(const QuadSystem& qs, SafetyMode mode,
                                                    const Fuel& fuel, bool collectLog) {
    QuadSystem augmented{qs.graph, augmentRules(qs.rules, mode)};
    ChaseOptions opts;
    opts.collectLog = collectLog;
    opts.accountingContexts.insert(Term::uri(reserved::ccContext));
    opts.violationQuad = violationQuadFor(mode);
    opts.violationHook = [mode](const BridgeRule& r, const Assignment& mu,
                                const ChaseState& st) -> std::optional<ViolationWitness> {
        ViolationWitness w;
        if (violationTest(r, mu, st, mode, &w)) return w;
        return std::nullopt;
    };

    ChaseState st = runDChase(augmented, fuel, opts);
    ModeResult res;
    res.iterations = st.iterations;

    if (st.status == ChaseStatus::Aborted) {
        res.verdict = Verdict::No;
        res.witness = st.violation;
    } else {
        // The per-application test reads materialized descendantOf quads and
        // can lag behind the transitivity rule; a final pass over the
        // provenance records closes that window. On a fuel-bound run the
        // pass is budgeted and only opportunistically upgrades the verdict.
        long budget = st.status == ChaseStatus::Fixpoint ? 0 : 20'000'000;
        auto swept = scanForViolation(st, mode, budget);
        if (swept) {
            res.verdict = Verdict::No;
            res.witness = swept;
            st.violation = swept;
            st.insert(violationQuadFor(mode), 0);
            st.status = ChaseStatus::Aborted;
        } else if (st.status == ChaseStatus::Fixpoint) {
            res.verdict = Verdict::Yes;
        } else {
            res.verdict = Verdict::Unknown;
        }
    }
    res.chaseSize = static_cast<long>(st.quads.size());
    return {res, std::move(st)};
}

RRInfo checkRR(const std::vector<BridgeRule>& rules, int bodyBound) {
    RRInfo info;
    info.rr = true;
    for (const BridgeRule& r : rules) {
        if (!r.existential.empty()) info.rr = false;
        info.maxBodySize = std::max(info.maxBodySize, static_cast<int>(r.body.size()));
    }
    info.restrictedRR = info.rr && info.maxBodySize <= bodyBound;
    return info;
}

Classification classify(const QuadSystem& qs, const Fuel& fuel, const ClassifyOptions& opts) {
    Classification c;
    RRInfo rr = checkRR(qs.rules, opts.restrictedBodyBound);
    c.rr = rr.rr;
    c.restrictedRR = rr.restrictedRR;
    c.maxBodySize = rr.maxBodySize;

    c.safe = runAugmentedChase(qs, SafetyMode::Safe, fuel, opts.collectLog).first;
    c.msafe = runAugmentedChase(qs, SafetyMode::MSafe, fuel, opts.collectLog).first;
    c.csafe = runAugmentedChase(qs, SafetyMode::CSafe, fuel, opts.collectLog).first;

    // Containment closure over indefinite verdicts: csafe < msafe < safe.
    auto fillNo = [](ModeResult& weaker, const ModeResult& stronger) {
        if (weaker.verdict == Verdict::Unknown && stronger.verdict == Verdict::No) {
            weaker.verdict = Verdict::No;
            weaker.witness = stronger.witness;
        }
    };
    auto fillYes = [](ModeResult& stronger, const ModeResult& weaker) {
        if (stronger.verdict == Verdict::Unknown && weaker.verdict == Verdict::Yes)
            stronger.verdict = Verdict::Yes;
    };
    fillNo(c.msafe, c.safe);
    fillNo(c.csafe, c.msafe);
    fillYes(c.msafe, c.csafe);
    fillYes(c.safe, c.msafe);
    if (c.rr) {
        // No existentials: nothing can violate any of the conditions.
        for (ModeResult* m : {&c.safe, &c.msafe, &c.csafe})
            if (m->verdict == Verdict::Unknown) m->verdict = Verdict::Yes;
    }
    return c;
}

std::set<int> DescendanceGraph::targetsOf(int node) const {
    std::set<int> out;
    for (const auto& [from, to] : edges)
        if (from == node) out.insert(to);
    return out;
}

int DescendanceGraph::indegree(int node) const {
    int n = 0;
    for (const auto& [from, to] : edges)
        if (to == node) ++n;
    return n;
}

DescendanceGraph buildDescendance(const ChaseState& state, const Term& root) {
    if (!state.skolems.count(root))
        throw std::invalid_argument("buildDescendance: unknown root " + termToString(root));

    std::map<Term, std::set<Term>> descCache;
    std::function<const std::set<Term>&(const Term&)> descendants =
        [&](const Term& b) -> const std::set<Term>& {
        auto it = descCache.find(b);
        if (it != descCache.end()) return it->second;
        auto& out = descCache[b];
        auto meta = state.skolems.find(b);
        if (meta == state.skolems.end()) return out;
        for (const Term& child : meta->second.children) {
            out.insert(child);
            const auto& deeper = descendants(child);
            out.insert(deeper.begin(), deeper.end());
        }
        return out;
    };

    DescendanceGraph g;
    g.root = root;
    std::set<Term> nodeSet = descendants(root);
    g.nodes.push_back(root);
    for (const Term& t : nodeSet)
        if (t != root) g.nodes.push_back(t);

    std::map<Term, int> idOf;
    for (size_t i = 0; i < g.nodes.size(); ++i) idOf[g.nodes[i]] = static_cast<int>(i);

    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const Term& t = g.nodes[i];
        auto meta = state.skolems.find(t);
        if (meta != state.skolems.end()) {
            g.ruleLabel[static_cast<int>(i)] = meta->second.originRuleId;
            g.vectorLabel[static_cast<int>(i)] = meta->second.originVector;
            g.contextLabel[static_cast<int>(i)] = meta->second.originContexts;
        }
        for (const Term& d : descendants(t))
            if (idOf.count(d)) g.edges.emplace_back(static_cast<int>(i), idOf[d]);
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

namespace {

std::map<int, std::set<int>> adjacency(const DescendanceGraph& g) {
    std::map<int, std::set<int>> adj;
    for (const auto& [from, to] : g.edges) adj[from].insert(to);
    return adj;
}

bool hasCycle(const DescendanceGraph& g) {
    auto adj = adjacency(g);
    std::map<int, int> color;  // 0 new, 1 active, 2 done
    std::function<bool(int)> dfs = [&](int v) {
        color[v] = 1;
        for (int w : adj[v]) {
            if (color[w] == 1) return true;
            if (color[w] == 0 && dfs(w)) return true;
        }
        color[v] = 2;
        return false;
    };
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (color[static_cast<int>(i)] == 0 && dfs(static_cast<int>(i))) return true;
    return false;
}

}  // namespace

DescendanceGraph unravel(const DescendanceGraph& g) {
    if (hasCycle(g)) throw std::invalid_argument("unravel: input graph has a cycle");

    // Transitive reduction: drop (u,v) when a longer path u -> ... -> v exists.
    auto adj = adjacency(g);
    std::map<int, std::set<int>> reach;
    std::function<const std::set<int>&(int)> reachable = [&](int v) -> const std::set<int>& {
        auto it = reach.find(v);
        if (it != reach.end()) return it->second;
        auto& out = reach[v];
        for (int w : adj[v]) {
            out.insert(w);
            const auto& deeper = reachable(w);
            out.insert(deeper.begin(), deeper.end());
        }
        return out;
    };

    DescendanceGraph t;
    t.root = g.root;
    t.nodes = g.nodes;
    t.ruleLabel = g.ruleLabel;
    t.vectorLabel = g.vectorLabel;
    t.contextLabel = g.contextLabel;
    for (const auto& [u, v] : g.edges) {
        bool redundant = false;
        for (int w : adj[u]) {
            if (w == v) continue;
            if (reachable(w).count(v)) {
                redundant = true;
                break;
            }
        }
        if (!redundant) t.edges.emplace_back(u, v);
    }

    // Preorder over the reduced graph.
    std::vector<int> order;
    {
        auto tadj = adjacency(t);
        std::set<int> visited;
        std::function<void(int)> dfs = [&](int v) {
            if (!visited.insert(v).second) return;
            order.push_back(v);
            for (int w : tadj[v]) dfs(w);
        };
        dfs(0);
    }

    for (int v : order) {
        std::vector<size_t> incoming, outgoing;
        for (size_t e = 0; e < t.edges.size(); ++e) {
            if (t.edges[e].second == v) incoming.push_back(e);
            if (t.edges[e].first == v) outgoing.push_back(e);
        }
        if (incoming.size() <= 1) continue;

        std::vector<int> copies;
        for (size_t i = 0; i < incoming.size(); ++i) {
            int fresh = static_cast<int>(t.nodes.size());
            t.nodes.push_back(t.nodes[static_cast<size_t>(v)]);
            if (t.ruleLabel.count(v)) t.ruleLabel[fresh] = t.ruleLabel[v];
            if (t.vectorLabel.count(v)) t.vectorLabel[fresh] = t.vectorLabel[v];
            if (t.contextLabel.count(v)) t.contextLabel[fresh] = t.contextLabel[v];
            copies.push_back(fresh);
        }
        // Each incoming edge lands on its own copy; outgoing edges are copied.
        for (size_t i = 0; i < incoming.size(); ++i) t.edges[incoming[i]].second = copies[i];
        std::vector<std::pair<int, int>> extra;
        for (size_t e : outgoing) {
            int target = t.edges[e].second;
            t.edges[e].first = copies[0];
            for (size_t i = 1; i < copies.size(); ++i) extra.emplace_back(copies[i], target);
        }
        t.edges.insert(t.edges.end(), extra.begin(), extra.end());
        t.ruleLabel.erase(v);
        t.vectorLabel.erase(v);
        t.contextLabel.erase(v);
        // The replaced node keeps its slot but drops out of the edge set; mark
        // it so consumers can skip it.
        t.nodes[static_cast<size_t>(v)] = Term::uri("urn:quadchase:removed");
    }

    // Compact: drop removed slots and remap ids.
    DescendanceGraph out;
    out.root = t.root;
    Term removed = Term::uri("urn:quadchase:removed");
    std::map<int, int> remap;
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i] == removed) continue;
        remap[static_cast<int>(i)] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(t.nodes[i]);
    }
    for (const auto& [u, v] : t.edges) {
        if (!remap.count(u) || !remap.count(v)) continue;
        out.edges.emplace_back(remap[u], remap[v]);
    }
    for (const auto& [n, l] : t.ruleLabel)
        if (remap.count(n)) out.ruleLabel[remap[n]] = l;
    for (const auto& [n, l] : t.vectorLabel)
        if (remap.count(n)) out.vectorLabel[remap[n]] = l;
    for (const auto& [n, l] : t.contextLabel)
        if (remap.count(n)) out.contextLabel[remap[n]] = l;
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

bool isTree(const DescendanceGraph& g) {
    if (g.nodes.empty()) return false;
    if (g.edges.size() != g.nodes.size() - 1) return false;
    std::vector<int> indeg(g.nodes.size(), 0);
    for (const auto& [from, to] : g.edges) {
        (void)from;
        ++indeg[static_cast<size_t>(to)];
    }
    if (indeg[0] != 0) return false;
    for (size_t i = 1; i < g.nodes.size(); ++i)
        if (indeg[i] != 1) return false;
    // Connectivity from the root.
    auto adj = adjacency(g);
    std::set<int> visited;
    std::function<void(int)> dfs = [&](int v) {
        if (!visited.insert(v).second) return;
        for (int w : adj[v]) dfs(w);
    };
    dfs(0);
    return visited.size() == g.nodes.size();
}

int treeOrder(const DescendanceGraph& g) {
    std::map<int, int> outdeg;
    for (const auto& [from, to] : g.edges) {
        (void)to;
        ++outdeg[from];
    }
    int best = 0;
    for (const auto& [n, d] : outdeg) best = std::max(best, d);
    return best;
}

std::string descendanceToDot(const DescendanceGraph& g) {
    std::string out = "digraph descendance {\n";
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        int id = static_cast<int>(i);
        std::string label = termToString(g.nodes[i]);
        if (g.ruleLabel.count(id)) {
            label += "\\nr" + std::to_string(g.ruleLabel.at(id));
            label += " " + vectorToString(g.vectorLabel.at(id));
            label += " {";
            bool first = true;
            for (const Term& c : g.contextLabel.at(id)) {
                if (!first) label += ",";
                label += c.lexical;
                first = false;
            }
            label += "}";
        }
        std::string escaped;
        for (char ch : label) {
            if (ch == '"') escaped += "\\\"";
            else escaped += ch;
        }
        out += "  n" + std::to_string(id) + " [label=\"" + escaped + "\"];\n";
    }
    for (const auto& [from, to] : g.edges)
        out += "  n" + std::to_string(from) + " -> n" + std::to_string(to) + ";\n";
    out += "}\n";
    return out;
}

QuadGraph criticalQuadGraph(const std::vector<BridgeRule>& rules) {
    std::set<Term> contexts = ruleContexts(rules);
    std::set<Term> terms;
    for (const BridgeRule& r : rules) {
        auto take = [&](const std::vector<QuadPattern>& ps) {
            for (const QuadPattern& p : ps)
                for (const Term* t : {&p.subject, &p.predicate, &p.object})
                    if (t->isUri()) terms.insert(*t);
        };
        take(r.body);
        take(r.head);
    }
    terms.insert(Term::blank("bcrit"));

    QuadGraph out;
    for (const Term& c : contexts)
        for (const Term& s : terms)
            for (const Term& p : terms)
                for (const Term& o : terms) out.insert(Quad{c, s, p, o});
    return out;
}

Verdict checkUniversal(const std::vector<BridgeRule>& rules, SafetyMode mode, const Fuel& fuel) {
    QuadSystem qs{criticalQuadGraph(rules), rules};
    return runAugmentedChase(qs, mode, fuel, false).first.verdict;
}

}  // namespace quadchase
