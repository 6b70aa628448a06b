#include "quadchase/chase.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "json.hpp"

namespace quadchase {

namespace {

[[noreturn]] void logicFault(const std::string& msg) { throw std::logic_error(msg); }

#define QCH_CHECK(cond, msg) \
    do {                     \
        if (!(cond)) logicFault(msg); \
    } while (0)

}  // namespace

void QuadIndex::add(const Quad& q, int seq) {
    byField_[0][q.context].push_back(seq);
    byField_[1][q.subject].push_back(seq);
    byField_[2][q.predicate].push_back(seq);
    byField_[3][q.object].push_back(seq);
}

const std::vector<int>* QuadIndex::bucket(int field, const Term& t) const {
    const auto& m = byField_[static_cast<size_t>(field)];
    auto found = m.find(t);
    if (found == m.end()) return nullptr;
    return &found->second;
}

int ChaseState::levelOf(const Quad& q) const {
    auto it = levels.find(q);
    QCH_CHECK(it != levels.end(), "levelOf: quad not in state");
    return it->second;
}

bool ChaseState::insert(const Quad& q, int level) {
    if (!quads.insert(q).second) return false;
    levels.emplace(q, level);
    index.add(q, static_cast<int>(bySeq.size()));
    bySeq.push_back(q);
    return true;
}

namespace {

const Term* fieldOf(const Quad& q, int f) {
    switch (f) {
        case 0: return &q.context;
        case 1: return &q.subject;
        case 2: return &q.predicate;
        default: return &q.object;
    }
}

const Term* fieldOf(const QuadPattern& p, int f) {
    switch (f) {
        case 0: return &p.context;
        case 1: return &p.subject;
        case 2: return &p.predicate;
        default: return &p.object;
    }
}

// Extends mu so that the pattern matches the quad; bindings are appended to
// the trail for rollback.
bool unify(const QuadPattern& p, const Quad& q, Assignment& mu,
           std::vector<std::string>& trail) {
    for (int f = 0; f < 4; ++f) {
        const Term* pt = fieldOf(p, f);
        const Term* qt = fieldOf(q, f);
        if (pt->isVar()) {
            auto it = mu.find(pt->lexical);
            if (it == mu.end()) {
                mu.emplace(pt->lexical, *qt);
                trail.push_back(pt->lexical);
            } else if (it->second != *qt) {
                return false;
            }
        } else if (*pt != *qt) {
            return false;
        }
    }
    return true;
}

void undo(Assignment& mu, std::vector<std::string>& trail, size_t mark) {
    while (trail.size() > mark) {
        mu.erase(trail.back());
        trail.pop_back();
    }
}

// Candidate quads for a pattern under mu: the smallest index bucket over the
// ground fields. The context is always ground, so a bucket always exists.
const std::vector<int>* candidates(const ChaseState& st, const QuadPattern& p,
                                   const Assignment& mu, bool& noMatch) {
    const std::vector<int>* best = nullptr;
    noMatch = false;
    for (int f = 0; f < 4; ++f) {
        const Term* t = fieldOf(p, f);
        Term ground;
        if (t->isVar()) {
            auto it = mu.find(t->lexical);
            if (it == mu.end()) continue;
            ground = it->second;
        } else {
            ground = *t;
        }
        const std::vector<int>* b = st.index.bucket(f, ground);
        if (!b) {
            noMatch = true;
            return nullptr;
        }
        if (!best || b->size() < best->size()) best = b;
    }
    return best;
}

void joinAtoms(const ChaseState& st, const std::vector<QuadPattern>& atoms,
               std::vector<bool>& done, size_t remaining, Assignment& mu,
               std::vector<std::string>& trail,
               const std::function<bool(const Assignment&)>& yield, bool& stop) {
    if (stop) return;
    if (remaining == 0) {
        if (!yield(mu)) stop = true;
        return;
    }
    // Most selective undone atom first.
    size_t pick = atoms.size();
    const std::vector<int>* pickBucket = nullptr;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (done[i]) continue;
        bool noMatch = false;
        const std::vector<int>* b = candidates(st, atoms[i], mu, noMatch);
        if (noMatch) return;
        if (pick == atoms.size() || b->size() < pickBucket->size()) {
            pick = i;
            pickBucket = b;
        }
    }
    done[pick] = true;
    for (int seq : *pickBucket) {
        size_t mark = trail.size();
        if (unify(atoms[pick], st.bySeq[static_cast<size_t>(seq)], mu, trail)) {
            joinAtoms(st, atoms, done, remaining - 1, mu, trail, yield, stop);
            if (stop) break;
        }
        undo(mu, trail, mark);
    }
    done[pick] = false;
}

// Enumerates every total assignment of the atoms' variables extending mu0.
// yield returning false stops the enumeration.
void forEachJoin(const ChaseState& st, const std::vector<QuadPattern>& atoms,
                 const Assignment& mu0, const std::function<bool(const Assignment&)>& yield) {
    Assignment mu = mu0;
    std::vector<std::string> trail;
    std::vector<bool> done(atoms.size(), false);
    bool stop = false;
    joinAtoms(st, atoms, done, atoms.size(), mu, trail, yield, stop);
}

Quad instantiate(const QuadPattern& p, const Assignment& mu) {
    auto subst = [&](const Term& t) -> Term {
        if (!t.isVar()) return t;
        auto it = mu.find(t.lexical);
        QCH_CHECK(it != mu.end(), "unbound variable ?" + t.lexical);
        return it->second;
    };
    return Quad{subst(p.context), subst(p.subject), subst(p.predicate), subst(p.object)};
}

std::string assignmentKey(const Assignment& mu) {
    std::string out;
    for (const auto& [name, term] : mu) {
        out += "?" + name + "=" + termToString(term) + ";";
    }
    return out;
}

std::string headKeyOf(const BridgeRule& r, const Assignment& mu) {
    std::vector<std::string> parts;
    for (const QuadPattern& p : r.head) {
        auto subst = [&](const Term& t) -> Term {
            if (!t.isVar()) return t;
            auto it = mu.find(t.lexical);
            return it == mu.end() ? t : it->second;
        };
        QuadPattern inst{subst(p.context), subst(p.subject), subst(p.predicate),
                         subst(p.object)};
        parts.push_back(patternToString(inst));
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const std::string& s : parts) out += s + " ";
    return out;
}

struct PendingMatch {
    int ruleIdx = 0;
    int ruleId = 0;
    int level = -1;
    std::vector<Quad> bodyDesc;  // body image, sorted descending
    std::string headKey;
    std::string assignKey;
    Assignment mu;
};

// Selection order: level, then the quad-graph order on body images (equal to
// lexicographic comparison of the descending-sorted quad sequences), then
// rule id, then the instantiated head, then the assignment.
struct MatchLess {
    bool operator()(const PendingMatch& a, const PendingMatch& b) const {
        if (a.level != b.level) return a.level < b.level;
        size_t n = std::min(a.bodyDesc.size(), b.bodyDesc.size());
        for (size_t i = 0; i < n; ++i) {
            int c = compareQuads(a.bodyDesc[i], b.bodyDesc[i]);
            if (c != 0) return c < 0;
        }
        if (a.bodyDesc.size() != b.bodyDesc.size())
            return a.bodyDesc.size() < b.bodyDesc.size();
        if (a.ruleId != b.ruleId) return a.ruleId < b.ruleId;
        if (a.headKey != b.headKey) return a.headKey < b.headKey;
        return a.assignKey < b.assignKey;
    }
};

PendingMatch makePending(const ChaseState& st, const std::vector<BridgeRule>& rules,
                         int ruleIdx, const Assignment& mu) {
    const BridgeRule& r = rules[static_cast<size_t>(ruleIdx)];
    PendingMatch m;
    m.ruleIdx = ruleIdx;
    m.ruleId = r.id;
    m.mu = mu;
    for (const QuadPattern& p : r.body) {
        Quad q = instantiate(p, mu);
        m.bodyDesc.push_back(q);
        m.level = std::max(m.level, st.levelOf(q));
    }
    std::sort(m.bodyDesc.begin(), m.bodyDesc.end(),
              [](const Quad& x, const Quad& y) { return compareQuads(x, y) > 0; });
    m.bodyDesc.erase(std::unique(m.bodyDesc.begin(), m.bodyDesc.end()), m.bodyDesc.end());
    m.headKey = headKeyOf(r, mu);
    m.assignKey = assignmentKey(mu);
    return m;
}

}  // namespace

bool headSatisfied(const ChaseState& state, const BridgeRule& rule, const Assignment& mu) {
    // Restrict mu to the variables relevant to the head to keep the join clean.
    Assignment bound;
    for (const QuadPattern& p : rule.head)
        for (const Term* t : p.terms())
            if (t->isVar()) {
                auto it = mu.find(t->lexical);
                if (it != mu.end()) bound.emplace(t->lexical, it->second);
            }
    // The origin-vector literal of an augmented rule is a function of the
    // frontier image, so it is checkable per witness.
    std::optional<Quad> vectorTemplate;
    if (!rule.vectorAccounting.empty()) {
        ConstantVector frontierImage;
        for (const Term& v : rule.frontier) frontierImage.push_back(mu.at(v.lexical));
        vectorTemplate = Quad{Term::uri(reserved::ccContext), Term::uri(""),
                              Term::uri(reserved::originVector),
                              Term::literal(vectorToString(frontierImage))};
    }
    bool found = false;
    forEachJoin(state, rule.head, bound, [&](const Assignment& witness) {
        if (vectorTemplate) {
            for (const Term& y : rule.vectorAccounting) {
                Quad q = *vectorTemplate;
                q.subject = witness.at(y.lexical);
                if (!state.contains(q)) return true;  // keep searching
            }
        }
        found = true;
        return false;
    });
    return found;
}

std::vector<Match> enumerateMatches(const ChaseState& state,
                                    const std::vector<BridgeRule>& rules) {
    std::vector<PendingMatch> found;
    for (size_t i = 0; i < rules.size(); ++i) {
        const BridgeRule& r = rules[i];
        auto consider = [&](const Assignment& mu) {
            if (!headSatisfied(state, r, mu))
                found.push_back(makePending(state, rules, static_cast<int>(i), mu));
            return true;
        };
        if (r.body.empty()) {
            consider(Assignment{});
        } else {
            forEachJoin(state, r.body, Assignment{}, consider);
        }
    }
    std::sort(found.begin(), found.end(), MatchLess{});
    std::vector<Match> out;
    out.reserve(found.size());
    for (const PendingMatch& m : found) {
        Match pub;
        pub.rule = &rules[static_cast<size_t>(m.ruleIdx)];
        pub.assignment = m.mu;
        pub.bodyImage = QuadGraph(m.bodyDesc.begin(), m.bodyDesc.end());
        pub.level = m.level;
        out.push_back(std::move(pub));
    }
    return out;
}

std::string skolemLabel(int ruleId, const std::string& varName, const ConstantVector& origin) {
    std::uint64_t h = fnv1a64(vectorToString(origin));
    std::ostringstream ss;
    ss << reserved::skolemPrefix << ruleId << "_" << varName << "_" << std::hex << h;
    return ss.str();
}

void applyRule(const BridgeRule& rule, const Assignment& mu, ChaseState& state,
               const ChaseOptions& opts) {
    QuadGraph bodyImage;
    int level = -1;
    for (const QuadPattern& p : rule.body) {
        Quad q = instantiate(p, mu);
        QCH_CHECK(state.contains(q), "applyRule: body image not contained in state");
        bodyImage.insert(q);
        level = std::max(level, state.levelOf(q));
    }
    QCH_CHECK(!headSatisfied(state, rule, mu),
              "applyRule: head already satisfied (condition (a) violated)");

    Assignment ext = mu;
    ConstantVector frontierImage;
    for (const Term& v : rule.frontier) frontierImage.push_back(mu.at(v.lexical));

    for (size_t j = 0; j < rule.existential.size(); ++j) {
        Term blank = Term::blank(skolemLabel(rule.id, rule.existential[j].lexical, frontierImage));
        QCH_CHECK(!state.skolems.count(blank), "applyRule: Skolem key reuse");
        ext[rule.existential[j].lexical] = blank;
    }

    std::vector<Quad> added;
    auto emit = [&](const Quad& q) {
        if (state.insert(q, level + 1)) added.push_back(q);
    };
    std::vector<Quad> headImage;
    for (const QuadPattern& p : rule.head) {
        Quad q = instantiate(p, ext);
        headImage.push_back(q);
        emit(q);
    }
    if (!rule.vectorAccounting.empty()) {
        Term cc = Term::uri(reserved::ccContext);
        Term pred = Term::uri(reserved::originVector);
        Term obj = Term::literal(vectorToString(frontierImage));
        for (const Term& y : rule.vectorAccounting)
            emit(Quad{cc, ext.at(y.lexical), pred, obj});
    }

    for (size_t j = 0; j < rule.existential.size(); ++j) {
        const Term& blank = ext.at(rule.existential[j].lexical);
        SkolemMeta meta;
        meta.blank = blank;
        meta.originRuleId = rule.id;
        meta.existentialIndex = static_cast<int>(j);
        meta.originVector = frontierImage;
        meta.children.insert(frontierImage.begin(), frontierImage.end());
        for (size_t k = 0; k < rule.head.size(); ++k) {
            if (opts.accountingContexts.count(rule.head[k].context)) continue;
            const Quad& q = headImage[k];
            if (q.subject == blank || q.predicate == blank || q.object == blank)
                meta.originContexts.insert(q.context);
        }
        state.skolems.emplace(blank, std::move(meta));
    }

    QCH_CHECK(!added.empty(), "applyRule: application added no quads");
    ++state.iterations;
    if (opts.collectLog)
        state.log.push_back(ChaseStep{state.iterations, rule.id, bodyImage, added});
}

namespace {

void validateInput(const QuadSystem& qs) {
    std::set<int> ids;
    for (const BridgeRule& r : qs.rules) {
        if (!ids.insert(r.id).second)
            throw RuleError("duplicate rule id " + std::to_string(r.id));
    }
    for (const Quad& q : qs.graph) {
        for (const Term* t : {&q.context, &q.subject, &q.predicate, &q.object}) {
            if (t->isVar()) throw RuleError("variable in quad-graph");
            if (t->isBlank() && t->lexical.rfind(reserved::skolemPrefix, 0) == 0)
                throw RuleError("input blank node label uses the reserved prefix '_:sk_'");
        }
        if (!q.context.isUri()) throw RuleError("quad context must be a URI");
    }
}

}  // namespace

ChaseState runDChase(const QuadSystem& qs, const Fuel& fuel, const ChaseOptions& opts) {
    validateInput(qs);
    ChaseState state;
    for (const Quad& q : qs.graph) state.insert(q, 0);

    std::set<PendingMatch, MatchLess> pending;
    std::set<std::pair<int, std::string>> seen;

    auto addMatch = [&](int ruleIdx, const Assignment& mu) {
        auto key = std::make_pair(ruleIdx, assignmentKey(mu));
        if (!seen.insert(key).second) return;
        pending.insert(makePending(state, qs.rules, ruleIdx, mu));
    };

    // Discovers matches whose body uses at least one quad with seq >= from.
    auto discover = [&](size_t from) {
        for (size_t i = 0; i < qs.rules.size(); ++i) {
            const BridgeRule& r = qs.rules[i];
            for (size_t k = 0; k < r.body.size(); ++k) {
                for (size_t seq = from; seq < state.bySeq.size(); ++seq) {
                    Assignment mu;
                    std::vector<std::string> trail;
                    if (!unify(r.body[k], state.bySeq[seq], mu, trail)) continue;
                    std::vector<QuadPattern> rest;
                    for (size_t k2 = 0; k2 < r.body.size(); ++k2)
                        if (k2 != k) rest.push_back(r.body[k2]);
                    forEachJoin(state, rest, mu, [&](const Assignment& total) {
                        addMatch(static_cast<int>(i), total);
                        return true;
                    });
                }
            }
        }
    };

    for (size_t i = 0; i < qs.rules.size(); ++i)
        if (qs.rules[i].body.empty()) addMatch(static_cast<int>(i), Assignment{});
    discover(0);

    while (true) {
        const PendingMatch* next = nullptr;
        while (!pending.empty()) {
            auto it = pending.begin();
            const BridgeRule& r = qs.rules[static_cast<size_t>(it->ruleIdx)];
            if (headSatisfied(state, r, it->mu)) {
                pending.erase(it);
            } else {
                next = &*it;
                break;
            }
        }
        if (!next) {
            state.status = ChaseStatus::Fixpoint;
            break;
        }
        if (state.iterations >= fuel.maxIterations ||
            static_cast<long>(state.bySeq.size()) >= fuel.maxQuads) {
            state.status = ChaseStatus::FuelExhausted;
            break;
        }

        const BridgeRule& rule = qs.rules[static_cast<size_t>(next->ruleIdx)];
        if (opts.validateSelection) {
            auto all = enumerateMatches(state, qs.rules);
            QCH_CHECK(!all.empty() && all.front().rule->id == rule.id &&
                          all.front().assignment == next->mu,
                      "incremental selection disagrees with enumerateMatches");
        }

        if (opts.violationHook && !rule.existential.empty()) {
            auto witness = opts.violationHook(rule, next->mu, state);
            if (witness) {
                state.violation = witness;
                if (opts.violationQuad) state.insert(*opts.violationQuad, next->level + 1);
                state.status = ChaseStatus::Aborted;
                break;
            }
        }

        size_t before = state.bySeq.size();
        Assignment mu = next->mu;
        pending.erase(pending.begin());
        applyRule(rule, mu, state, opts);
        discover(before);
    }
    return state;
}

std::vector<LirRule> lclosurePack(const std::string& name) {
    if (name == "simple") return {};
    if (name != "rdfs-min") throw std::invalid_argument("unknown lclosure pack: " + name);

    Term type = Term::uri(rdf::type);
    Term sco = Term::uri(rdf::subClassOf);
    Term spo = Term::uri(rdf::subPropertyOf);
    Term dom = Term::uri(rdf::domain);
    Term rng = Term::uri(rdf::range);
    auto v = [](const char* n) { return Term::var(n); };

    std::vector<LirRule> pack;
    pack.push_back({{{v("c1"), sco, v("c2")}, {v("c2"), sco, v("c3")}}, {v("c1"), sco, v("c3")}});
    pack.push_back({{{v("x"), type, v("c1")}, {v("c1"), sco, v("c2")}}, {v("x"), type, v("c2")}});
    pack.push_back({{{v("p1"), spo, v("p2")}, {v("p2"), spo, v("p3")}}, {v("p1"), spo, v("p3")}});
    pack.push_back({{{v("s"), v("p"), v("o")}, {v("p"), spo, v("q")}}, {v("s"), v("q"), v("o")}});
    pack.push_back({{{v("p"), dom, v("c")}, {v("s"), v("p"), v("o")}}, {v("s"), type, v("c")}});
    pack.push_back({{{v("p"), rng, v("c")}, {v("s"), v("p"), v("o")}}, {v("o"), type, v("c")}});
    return pack;
}

std::vector<BridgeRule> instantiateLir(const std::vector<LirRule>& pack,
                                       const std::set<Term>& contexts, int firstId) {
    std::vector<BridgeRule> out;
    int id = firstId;
    for (const Term& c : contexts) {
        for (const LirRule& lir : pack) {
            BridgeRule r;
            r.id = id++;
            for (const auto& t : lir.body)
                r.body.push_back(QuadPattern{c, t[0], t[1], t[2]});
            r.head.push_back(QuadPattern{c, lir.head[0], lir.head[1], lir.head[2]});
            r.finalize();
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::string serializeChaseLog(const ChaseState& state) {
    std::string out;
    for (const ChaseStep& step : state.log) {
        nlohmann::json j;
        j["iteration"] = step.iteration;
        j["ruleId"] = step.ruleId;
        std::vector<std::string> body, added;
        for (const Quad& q : step.bodyImage) body.push_back(quadToString(q));
        for (const Quad& q : step.added) added.push_back(quadToString(q));
        j["body"] = body;
        j["added"] = added;
        out += j.dump();
        out += "\n";
    }
    return out;
}

}  // namespace quadchase
