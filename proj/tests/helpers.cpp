#include "helpers.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace testutil {

std::string fixturePath(const std::string& name) {
    return std::string(TESTS_DATA_DIR) + "/" + name;
}

QuadSystem loadFixture(const std::string& stem) {
    QuadSystem qs;
    qs.graph = parseNQuadsFile(fixturePath(stem + ".nq"));
    qs.rules = parseRulesFile(fixturePath(stem + ".rules")).rules;
    return qs;
}

namespace {

std::set<Term> stateConstants(const ChaseState& st) {
    std::set<Term> out;
    for (const Quad& q : st.quads) {
        out.insert(q.context);
        out.insert(q.subject);
        out.insert(q.predicate);
        out.insert(q.object);
    }
    return out;
}

// All total maps from vars into the candidate terms.
void forEachTotalMap(const std::vector<std::string>& vars, const std::vector<Term>& pool,
                     Assignment& mu, size_t i, const std::function<bool(const Assignment&)>& f,
                     bool& stop) {
    if (stop) return;
    if (i == vars.size()) {
        if (!f(mu)) stop = true;
        return;
    }
    for (const Term& t : pool) {
        mu[vars[i]] = t;
        forEachTotalMap(vars, pool, mu, i + 1, f, stop);
        if (stop) break;
    }
    mu.erase(vars[i]);
}

Quad substQuad(const QuadPattern& p, const Assignment& mu) {
    auto s = [&](const Term& t) { return t.isVar() ? mu.at(t.lexical) : t; };
    return Quad{s(p.context), s(p.subject), s(p.predicate), s(p.object)};
}

}  // namespace

std::vector<Match> naiveEnumerateMatches(const ChaseState& state,
                                         const std::vector<BridgeRule>& rules) {
    std::vector<Term> pool(stateConstants(state).begin(), stateConstants(state).end());
    std::vector<Match> found;
    for (const BridgeRule& r : rules) {
        std::set<std::string> bodyVarSet;
        for (const QuadPattern& p : r.body)
            for (const Term* t : p.terms())
                if (t->isVar()) bodyVarSet.insert(t->lexical);
        std::vector<std::string> bodyVars(bodyVarSet.begin(), bodyVarSet.end());

        Assignment mu;
        bool stop = false;
        forEachTotalMap(bodyVars, pool, mu, 0, [&](const Assignment& total) {
            bool contained = true;
            for (const QuadPattern& p : r.body)
                if (!state.contains(substQuad(p, total))) {
                    contained = false;
                    break;
                }
            if (contained && !headSatisfied(state, r, total)) {
                Match m;
                m.rule = &r;
                m.assignment = total;
                for (const QuadPattern& p : r.body) m.bodyImage.insert(substQuad(p, total));
                m.level = -1;
                for (const Quad& q : m.bodyImage) m.level = std::max(m.level, state.levelOf(q));
                found.push_back(std::move(m));
            }
            return true;
        }, stop);
        if (r.body.empty() && !headSatisfied(state, r, Assignment{})) {
            Match m;
            m.rule = &r;
            m.level = -1;
            found.push_back(std::move(m));
        }
    }
    std::sort(found.begin(), found.end(), [](const Match& a, const Match& b) {
        if (a.level != b.level) return a.level < b.level;
        int c = compareQuadGraphs(a.bodyImage, b.bodyImage);
        if (c != 0) return c < 0;
        if (a.rule->id != b.rule->id) return a.rule->id < b.rule->id;
        std::string ka, kb;
        for (const auto& [n, t] : a.assignment) ka += n + termToString(t);
        for (const auto& [n, t] : b.assignment) kb += n + termToString(t);
        return ka < kb;
    });
    return found;
}

bool bruteForceBoolean(const QueryDocument& q, const ChaseState& state) {
    std::set<std::string> varSet;
    for (const QuadPattern& p : q.atoms)
        for (const Term* t : p.terms())
            if (t->isVar()) varSet.insert(t->lexical);
    std::vector<std::string> vars(varSet.begin(), varSet.end());
    std::vector<Term> pool(stateConstants(state).begin(), stateConstants(state).end());

    bool found = false;
    Assignment mu;
    bool stop = false;
    forEachTotalMap(vars, pool, mu, 0, [&](const Assignment& total) {
        for (const QuadPattern& p : q.atoms)
            if (!state.contains(substQuad(p, total))) return true;
        found = true;
        return false;
    }, stop);
    return found;
}

std::set<ConstantVector> bruteForceSelect(const QueryDocument& q, const ChaseState& state,
                                          bool allowSkolem) {
    std::set<std::string> varSet;
    for (const QuadPattern& p : q.atoms)
        for (const Term* t : p.terms())
            if (t->isVar()) varSet.insert(t->lexical);
    std::vector<std::string> vars(varSet.begin(), varSet.end());
    std::vector<Term> pool(stateConstants(state).begin(), stateConstants(state).end());

    std::set<ConstantVector> rows;
    Assignment mu;
    bool stop = false;
    forEachTotalMap(vars, pool, mu, 0, [&](const Assignment& total) {
        for (const QuadPattern& p : q.atoms)
            if (!state.contains(substQuad(p, total))) return true;
        ConstantVector row;
        for (const Term& v : q.freeVars) {
            const Term& t = total.at(v.lexical);
            if (!allowSkolem && state.isSkolem(t)) return true;
            row.push_back(t);
        }
        rows.insert(row);
        return true;
    }, stop);
    return rows;
}

namespace {

std::vector<Term> graphBlanks(const QuadGraph& g) {
    std::set<Term> blanks;
    for (const Quad& q : g)
        for (const Term* t : {&q.subject, &q.predicate, &q.object})
            if (t->isBlank()) blanks.insert(*t);
    return {blanks.begin(), blanks.end()};
}

QuadGraph renameBlanks(const QuadGraph& g, const std::map<Term, Term>& f) {
    QuadGraph out;
    for (const Quad& q : g) {
        auto s = [&](const Term& t) {
            auto it = f.find(t);
            return it == f.end() ? t : it->second;
        };
        out.insert(Quad{q.context, s(q.subject), s(q.predicate), s(q.object)});
    }
    return out;
}

}  // namespace

bool graphsIsomorphic(const QuadGraph& a, const QuadGraph& b) {
    if (a.size() != b.size()) return false;
    std::vector<Term> ba = graphBlanks(a), bb = graphBlanks(b);
    if (ba.size() != bb.size()) return false;
    std::sort(bb.begin(), bb.end());
    do {
        std::map<Term, Term> f;
        for (size_t i = 0; i < ba.size(); ++i) f[ba[i]] = bb[i];
        if (renameBlanks(a, f) == b) return true;
    } while (std::next_permutation(bb.begin(), bb.end()));
    return false;
}

bool hornUnsat(const std::vector<std::array<std::string, 3>>& clauses) {
    std::set<std::string> truths{"t"};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : clauses) {
            if (truths.count(c[0]) && truths.count(c[1]) && truths.insert(c[2]).second)
                changed = true;
        }
    }
    return truths.count("f") > 0;
}

bool threeColorable(const std::vector<std::pair<std::string, std::string>>& edges) {
    std::set<std::string> vertexSet;
    for (const auto& [a, b] : edges) {
        vertexSet.insert(a);
        vertexSet.insert(b);
    }
    std::vector<std::string> vertices(vertexSet.begin(), vertexSet.end());
    std::map<std::string, int> color;
    std::function<bool(size_t)> go = [&](size_t i) {
        if (i == vertices.size()) {
            for (const auto& [a, b] : edges)
                if (color[a] == color[b]) return false;
            return true;
        }
        for (int c = 0; c < 3; ++c) {
            color[vertices[i]] = c;
            if (go(i + 1)) return true;
        }
        return false;
    };
    return go(0);
}

OracleClassification bruteForceClassify(const QuadSystem& qs, const Fuel& fuel) {
    ChaseState st = runDChase(qs, fuel);
    OracleClassification out{Verdict::Unknown, Verdict::Unknown, Verdict::Unknown};

    bool unsafe = false, unmsafe = false, uncsafe = false;
    long work = 0;
    const long budget = st.status == ChaseStatus::Fixpoint ? 0 : 20'000'000;
    for (const auto& [b, meta] : st.skolems) {
        std::vector<Term> stack(meta.children.begin(), meta.children.end());
        std::set<Term> visited;
        while (!stack.empty()) {
            if (budget > 0 && ++work > budget) break;
            Term d = stack.back();
            stack.pop_back();
            if (!d.isBlank() || !visited.insert(d).second) continue;
            auto dm = st.skolems.find(d);
            if (dm == st.skolems.end()) continue;
            for (const Term& c : dm->second.children) stack.push_back(c);
            if (d == b) continue;
            if (dm->second.originRuleId == meta.originRuleId) {
                unmsafe = true;
                if (vectorIsomorphic(dm->second.originVector, meta.originVector)) unsafe = true;
            }
            if (dm->second.originContexts == meta.originContexts) uncsafe = true;
        }
        if (unsafe && unmsafe && uncsafe) break;
    }
    // A violating pair is definitive even on a partial chase; clean verdicts
    // need a finished one.
    if (unsafe) out.safe = Verdict::No;
    if (unmsafe) out.msafe = Verdict::No;
    if (uncsafe) out.csafe = Verdict::No;
    if (st.status == ChaseStatus::Fixpoint) {
        if (!unsafe) out.safe = Verdict::Yes;
        if (!unmsafe) out.msafe = Verdict::Yes;
        if (!uncsafe) out.csafe = Verdict::Yes;
    }
    return out;
}

QuadSystem randomSystem(std::mt19937_64& rng, int maxContexts, int maxRules,
                        int maxExistentialsPerRule) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    int nContexts = 1 + pick(maxContexts);
    std::vector<Term> contexts;
    for (int i = 0; i < nContexts; ++i) contexts.push_back(Term::uri("c" + std::to_string(i + 1)));
    std::vector<Term> constants{Term::uri("a"), Term::uri("b"), Term::uri("ca"), Term::uri("d")};

    QuadSystem qs;
    int nQuads = 1 + pick(4);
    for (int i = 0; i < nQuads; ++i) {
        qs.graph.insert(Quad{contexts[static_cast<size_t>(pick(nContexts))],
                             constants[static_cast<size_t>(pick(4))],
                             constants[static_cast<size_t>(pick(4))],
                             constants[static_cast<size_t>(pick(4))]});
    }

    int nRules = 1 + pick(maxRules);
    for (int r = 1; r <= nRules; ++r) {
        BridgeRule rule;
        rule.id = r;
        int nBody = 1 + pick(2);
        int nHead = 1 + pick(2);
        // A small shared variable pool encourages joins and frontier reuse.
        std::vector<Term> vars{Term::var("v1"), Term::var("v2"), Term::var("v3"),
                               Term::var("v4")};
        auto term = [&](bool allowFreshExistential, int existentialBudget) -> Term {
            int die = pick(10);
            if (allowFreshExistential && existentialBudget > 0 && die < 3)
                return Term::var("y" + std::to_string(existentialBudget));
            if (die < 7) return vars[static_cast<size_t>(pick(4))];
            return constants[static_cast<size_t>(pick(4))];
        };
        for (int i = 0; i < nBody; ++i)
            rule.body.push_back(QuadPattern{contexts[static_cast<size_t>(pick(nContexts))],
                                            term(false, 0), term(false, 0), term(false, 0)});
        int budget = maxExistentialsPerRule;
        std::set<std::string> bodyVars;
        for (const QuadPattern& p : rule.body)
            for (const Term* t : p.terms())
                if (t->isVar()) bodyVars.insert(t->lexical);
        for (int i = 0; i < nHead; ++i) {
            Term parts[3];
            for (auto& part : parts) {
                Term t = term(true, budget);
                // Head universals must come from the body.
                if (t.isVar() && !bodyVars.count(t.lexical)) {
                    if (t.lexical[0] == 'y' && budget > 0) {
                        --budget;
                    } else if (!bodyVars.empty()) {
                        auto it = bodyVars.begin();
                        std::advance(it, pick(static_cast<int>(bodyVars.size())));
                        t = Term::var(*it);
                    } else {
                        t = constants[static_cast<size_t>(pick(4))];
                    }
                }
                part = t;
            }
            rule.head.push_back(QuadPattern{contexts[static_cast<size_t>(pick(nContexts))],
                                            parts[0], parts[1], parts[2]});
        }
        rule.finalize();
        qs.rules.push_back(std::move(rule));
    }
    return qs;
}

QuadGraph randomGraph(std::mt19937_64& rng, int maxQuads, int constantPool) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    std::vector<Term> constants;
    for (int i = 0; i < constantPool; ++i) constants.push_back(Term::uri("k" + std::to_string(i)));
    std::vector<Term> contexts{Term::uri("c1"), Term::uri("c2")};
    QuadGraph g;
    int n = 1 + pick(maxQuads);
    for (int i = 0; i < n; ++i)
        g.insert(Quad{contexts[static_cast<size_t>(pick(2))],
                      constants[static_cast<size_t>(pick(constantPool))],
                      constants[static_cast<size_t>(pick(constantPool))],
                      constants[static_cast<size_t>(pick(constantPool))]});
    return g;
}

QueryDocument randomQuery(std::mt19937_64& rng, const ChaseState& st, int maxVars,
                          int maxAtoms) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    std::vector<Quad> quads(st.bySeq);
    QueryDocument q;
    int nVars = 1 + pick(maxVars);
    int nAtoms = 1 + pick(maxAtoms);
    for (int i = 0; i < nAtoms && !quads.empty(); ++i) {
        const Quad& base = quads[static_cast<size_t>(pick(static_cast<int>(quads.size())))];
        auto maybeVar = [&](const Term& t) -> Term {
            if (pick(3) == 0) return t;
            return Term::var("v" + std::to_string(pick(nVars)));
        };
        q.atoms.push_back(
            QuadPattern{base.context, maybeVar(base.subject), maybeVar(base.predicate),
                        maybeVar(base.object)});
    }
    if (q.atoms.empty())
        q.atoms.push_back(QuadPattern{Term::uri("c1"), Term::var("v0"), Term::var("v1"),
                                      Term::var("v2")});
    std::set<Term> seen;
    for (const QuadPattern& p : q.atoms)
        for (const Term* t : p.terms())
            if (t->isVar()) seen.insert(*t);
    int take = 1 + pick(2);
    for (const Term& v : seen) {
        if (take-- == 0) break;
        q.freeVars.push_back(v);
    }
    return q;
}

namespace {

void feTotalMaps(const std::vector<std::string>& vars, const std::vector<Term>& pool,
                 Assignment& mu, size_t i, const std::function<void(const Assignment&)>& f) {
    if (i == vars.size()) {
        f(mu);
        return;
    }
    for (const Term& t : pool) {
        mu[vars[i]] = t;
        feTotalMaps(vars, pool, mu, i + 1, f);
    }
    mu.erase(vars[i]);
}

FeFact substFact(const FeAtom& a, const Assignment& mu) {
    FeFact f;
    f.pred = a.predicate.lexical;
    for (const Term& t : a.args) f.args.push_back(t.isVar() ? mu.at(t.lexical) : t);
    return f;
}

}  // namespace

std::set<FeFact> naiveFeChase(const std::vector<FeRule>& rules, long maxSteps, bool* finished) {
    std::set<FeFact> facts;
    long blankCounter = 0;
    if (finished) *finished = false;

    for (long step = 0; step < maxSteps; ++step) {
        std::set<Term> pool;
        for (const FeFact& f : facts)
            for (const Term& t : f.args) pool.insert(t);
        for (const FeRule& r : rules)
            for (const FeAtom& a : r.body)
                for (const Term& t : a.args)
                    if (!t.isVar()) pool.insert(t);
        if (pool.empty()) pool.insert(Term::uri("seed"));
        std::vector<Term> poolVec(pool.begin(), pool.end());

        bool fired = false;
        for (const FeRule& r : rules) {
            std::set<std::string> bodyVarSet, headVarSet;
            for (const FeAtom& a : r.body)
                for (const Term& t : a.args)
                    if (t.isVar()) bodyVarSet.insert(t.lexical);
            for (const FeAtom& a : r.head)
                for (const Term& t : a.args)
                    if (t.isVar()) headVarSet.insert(t.lexical);
            std::vector<std::string> bodyVars(bodyVarSet.begin(), bodyVarSet.end());
            std::vector<std::string> existentials;
            for (const std::string& v : headVarSet)
                if (!bodyVarSet.count(v)) existentials.push_back(v);

            Assignment mu;
            feTotalMaps(bodyVars, poolVec, mu, 0, [&](const Assignment& total) {
                if (fired) return;
                for (const FeAtom& a : r.body)
                    if (!facts.count(substFact(a, total))) return;
                // Restricted check: some witness already satisfies the head.
                std::vector<std::string> evs = existentials;
                bool satisfied = false;
                Assignment ext = total;
                std::function<void(size_t)> tryWitness = [&](size_t i) {
                    if (satisfied) return;
                    if (i == evs.size()) {
                        for (const FeAtom& a : r.head)
                            if (!facts.count(substFact(a, ext))) return;
                        satisfied = true;
                        return;
                    }
                    for (const Term& t : poolVec) {
                        ext[evs[i]] = t;
                        tryWitness(i + 1);
                        if (satisfied) break;
                    }
                    ext.erase(evs[i]);
                };
                tryWitness(0);
                if (satisfied) return;
                Assignment full = total;
                for (const std::string& y : existentials)
                    full[y] = Term::blank("nb" + std::to_string(blankCounter++));
                for (const FeAtom& a : r.head) facts.insert(substFact(a, full));
                fired = true;
            });
            if (fired) break;
        }
        if (!fired) {
            if (finished) *finished = true;
            return facts;
        }
    }
    return facts;
}

bool naiveFeEntails(const std::set<FeFact>& chase, const std::vector<FeAtom>& query) {
    std::set<Term> pool;
    for (const FeFact& f : chase)
        for (const Term& t : f.args) pool.insert(t);
    std::vector<Term> poolVec(pool.begin(), pool.end());
    std::set<std::string> varSet;
    for (const FeAtom& a : query)
        for (const Term& t : a.args)
            if (t.isVar()) varSet.insert(t.lexical);
    std::vector<std::string> vars(varSet.begin(), varSet.end());
    bool found = false;
    Assignment mu;
    feTotalMaps(vars, poolVec, mu, 0, [&](const Assignment& total) {
        if (found) return;
        for (const FeAtom& a : query)
            if (!chase.count(substFact(a, total))) return;
        found = true;
    });
    return found;
}

}  // namespace testutil
