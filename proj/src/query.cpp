#include "quadchase/query.hpp"

#include <algorithm>
#include <functional>

namespace quadchase {

namespace {

// Backtracking homomorphism search over the state's index, greedy atom order.
// yield returning false stops the search.
void forEachHomomorphism(const ChaseState& st, const std::vector<QuadPattern>& atoms,
                         const std::function<bool(const Assignment&)>& yield) {
    Assignment mu;
    std::vector<bool> done(atoms.size(), false);
    bool stop = false;

    std::function<void(size_t)> go = [&](size_t remaining) {
        if (stop) return;
        if (remaining == 0) {
            if (!yield(mu)) stop = true;
            return;
        }
        size_t pick = atoms.size();
        const std::vector<int>* bucket = nullptr;
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (done[i]) continue;
            const std::vector<int>* best = nullptr;
            for (int f = 0; f < 4; ++f) {
                const Term* t = f == 0   ? &atoms[i].context
                                : f == 1 ? &atoms[i].subject
                                : f == 2 ? &atoms[i].predicate
                                         : &atoms[i].object;
                Term ground;
                if (t->isVar()) {
                    auto it = mu.find(t->lexical);
                    if (it == mu.end()) continue;
                    ground = it->second;
                } else {
                    ground = *t;
                }
                const std::vector<int>* b = st.index.bucket(f, ground);
                if (!b) return;  // no candidates at all for this atom
                if (!best || b->size() < best->size()) best = b;
            }
            if (!best) continue;  // fully unbound atom; defer
            if (pick == atoms.size() || best->size() < bucket->size()) {
                pick = i;
                bucket = best;
            }
        }
        if (pick == atoms.size()) {
            // Every remaining atom is fully unbound (context is ground in
            // quad patterns, so this cannot happen); guard anyway.
            for (size_t i = 0; i < atoms.size(); ++i)
                if (!done[i]) {
                    pick = i;
                    break;
                }
            bucket = nullptr;
        }
        done[pick] = true;
        auto tryQuad = [&](const Quad& q) {
            std::vector<std::pair<std::string, bool>> bound;
            bool ok = true;
            auto bind = [&](const Term& pt, const Term& qt) {
                if (!ok) return;
                if (pt.isVar()) {
                    auto it = mu.find(pt.lexical);
                    if (it == mu.end()) {
                        mu.emplace(pt.lexical, qt);
                        bound.emplace_back(pt.lexical, true);
                    } else if (it->second != qt) {
                        ok = false;
                    }
                } else if (pt != qt) {
                    ok = false;
                }
            };
            bind(atoms[pick].context, q.context);
            bind(atoms[pick].subject, q.subject);
            bind(atoms[pick].predicate, q.predicate);
            bind(atoms[pick].object, q.object);
            if (ok) go(remaining - 1);
            for (auto& [name, fresh] : bound)
                if (fresh) mu.erase(name);
        };
        if (bucket) {
            for (int seq : *bucket) {
                tryQuad(st.bySeq[static_cast<size_t>(seq)]);
                if (stop) break;
            }
        } else {
            for (const Quad& q : st.bySeq) {
                tryQuad(q);
                if (stop) break;
            }
        }
        done[pick] = false;
    };
    go(atoms.size());
}

}  // namespace

bool evalBoolean(const QueryDocument& ccq, const ChaseState& state) {
    bool found = false;
    forEachHomomorphism(state, ccq.atoms, [&](const Assignment&) {
        found = true;
        return false;
    });
    return found;
}

AnswerSet evalSelect(const QueryDocument& ccq, const ChaseState& state,
                     const QueryOptions& opts) {
    AnswerSet out;
    out.freeVars = ccq.freeVars;
    out.complete = state.status == ChaseStatus::Fixpoint;

    if (ccq.freeVars.empty()) {
        // Degenerate select: one empty binding iff the boolean query holds.
        if (evalBoolean(ccq, state)) out.bindings.insert(ConstantVector{});
        return out;
    }

    forEachHomomorphism(state, ccq.atoms, [&](const Assignment& mu) {
        ConstantVector row;
        for (const Term& v : ccq.freeVars) {
            const Term& bound = mu.at(v.lexical);
            if (!opts.allowSkolemAnswers && state.isSkolem(bound)) return true;
            row.push_back(bound);
        }
        out.bindings.insert(std::move(row));
        return true;
    });
    return out;
}

Verdict entailsQuadGraph(const QuadSystem& qs, const QuadGraph& g, const Fuel& fuel) {
    QueryDocument ccq;
    std::map<Term, Term> blankVar;
    int counter = 0;
    for (const Quad& q : g) {
        auto lift = [&](const Term& t) -> Term {
            if (!t.isBlank()) return t;
            auto it = blankVar.find(t);
            if (it != blankVar.end()) return it->second;
            Term v = Term::var("b" + std::to_string(counter++) + "_" + t.lexical);
            blankVar.emplace(t, v);
            return v;
        };
        ccq.atoms.push_back(QuadPattern{q.context, lift(q.subject), lift(q.predicate),
                                        lift(q.object)});
    }
    if (ccq.atoms.empty()) return Verdict::Yes;  // the empty graph is entailed

    ChaseState st = runDChase(qs, fuel);
    if (evalBoolean(ccq, st)) return Verdict::Yes;
    return st.status == ChaseStatus::Fixpoint ? Verdict::No : Verdict::Unknown;
}

}  // namespace quadchase
