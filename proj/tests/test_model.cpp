#include <algorithm>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "quadchase/model.hpp"

using namespace quadchase;
using testutil::loadFixture;

namespace {

Quad q(const char* c, const char* s, const char* p, const char* o) {
    return Quad{Term::uri(c), Term::uri(s), Term::uri(p), Term::uri(o)};
}

}  // namespace

TEST_CASE("term order: identity, lexicographic, kind rank") {
    CHECK(compareTerms(Term::uri("a"), Term::uri("a")) == 0);
    CHECK(compareTerms(Term::uri("a"), Term::uri("b")) < 0);
    // Fixed kind rank: URI < blank < literal, regardless of equal lexicals.
    CHECK(compareTerms(Term::blank("x"), Term::uri("x")) > 0);
    CHECK(compareTerms(Term::blank("x"), Term::literal("x")) < 0);
    // Datatype suffix is part of the key.
    CHECK(compareTerms(Term::literal("1"), Term::literal("1", "^^<int>")) < 0);
}

TEST_CASE("quad order is the lexicographic lift") {
    CHECK(compareQuads(q("c1", "a", "b", "c"), q("c2", "a", "b", "c")) < 0);
    CHECK(compareQuads(q("c1", "a", "b", "c"), q("c1", "a", "b", "c")) == 0);
    CHECK(compareQuads(q("c1", "a", "b", "c"), q("c1", "a", "b", "d")) < 0);
    CHECK(compareQuads(q("c1", "a", "b", "d"), q("c1", "a", "c", "a")) < 0);
}

TEST_CASE("quad-graph order: subset clause and greatest-difference clause") {
    QuadGraph g1{q("c", "a", "b", "c")};
    QuadGraph g2{q("c", "a", "b", "c"), q("c", "a", "b", "d")};
    CHECK(compareQuadGraphs(g1, g2) < 0);  // proper subset
    CHECK(compareQuadGraphs(g1, g1) == 0);
    QuadGraph g3{q("c", "a", "b", "d")};
    QuadGraph g4{q("c", "a", "b", "c")};
    CHECK(compareQuadGraphs(g3, g4) > 0);  // clause (ii) on singleton differences
}

TEST_CASE("quad-graph order is a strict linear order on small graphs") {
    // All graphs over 2 contexts x 2 constants with up to 3 quads.
    std::vector<Quad> universe;
    const char* cs[] = {"c1", "c2"};
    const char* ks[] = {"a", "b"};
    for (const char* c : cs)
        for (const char* s : ks)
            for (const char* p : ks)
                for (const char* o : ks) universe.push_back(q(c, s, p, o));
    std::vector<QuadGraph> graphs;
    graphs.push_back({});
    size_t n = universe.size();
    for (size_t i = 0; i < n; ++i) {
        graphs.push_back({universe[i]});
        for (size_t j = i + 1; j < n; ++j) {
            graphs.push_back({universe[i], universe[j]});
            for (size_t k = j + 1; k < n; ++k)
                graphs.push_back({universe[i], universe[j], universe[k]});
        }
    }
    // Irreflexivity and totality.
    for (size_t i = 0; i < graphs.size(); ++i) {
        CHECK(compareQuadGraphs(graphs[i], graphs[i]) == 0);
        for (size_t j = i + 1; j < graphs.size(); ++j) {
            int ab = compareQuadGraphs(graphs[i], graphs[j]);
            int ba = compareQuadGraphs(graphs[j], graphs[i]);
            CHECK(ab != 0);
            CHECK(ab == -ba);
        }
    }
    // Transitivity on sampled triples.
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200000; ++t) {
        const QuadGraph& a = graphs[rng() % graphs.size()];
        const QuadGraph& b = graphs[rng() % graphs.size()];
        const QuadGraph& c = graphs[rng() % graphs.size()];
        if (compareQuadGraphs(a, b) < 0 && compareQuadGraphs(b, c) < 0)
            CHECK(compareQuadGraphs(a, c) < 0);
    }
}

TEST_CASE("vector isomorphism examples") {
    ConstantVector ab{Term::uri("a"), Term::uri("b")};
    CHECK(vectorIsomorphic(ab, ab));
    CHECK(vectorIsomorphic({Term::blank("b1")}, {Term::blank("b2")}));
    // Example 2's non-isomorphic pair.
    ConstantVector v1{Term::uri("a"), Term::uri("b"), Term::uri("c"), Term::uri("d")};
    ConstantVector v2{Term::blank("b1"), Term::uri("a"), Term::uri("b"), Term::uri("c")};
    CHECK_FALSE(vectorIsomorphic(v1, v2));
    // Bijection must be consistent in both directions.
    CHECK_FALSE(vectorIsomorphic({Term::blank("x"), Term::blank("x")},
                                 {Term::blank("u"), Term::blank("v")}));
    CHECK_FALSE(vectorIsomorphic({Term::blank("u"), Term::blank("v")},
                                 {Term::blank("x"), Term::blank("x")}));
}

TEST_CASE("vector isomorphism is an equivalence relation on random vectors") {
    std::mt19937_64 rng(11);
    auto randomVector = [&]() {
        ConstantVector v;
        size_t len = rng() % 6;
        for (size_t i = 0; i < len; ++i) {
            if (rng() % 2)
                v.push_back(Term::blank("b" + std::to_string(rng() % 3)));
            else
                v.push_back(Term::uri(std::string(1, static_cast<char>('a' + rng() % 3))));
        }
        return v;
    };
    for (int t = 0; t < 2000; ++t) {
        ConstantVector a = randomVector(), b = randomVector(), c = randomVector();
        CHECK(vectorIsomorphic(a, a));
        CHECK(vectorIsomorphic(a, b) == vectorIsomorphic(b, a));
        if (vectorIsomorphic(a, b) && vectorIsomorphic(b, c)) CHECK(vectorIsomorphic(a, c));
    }
}

namespace {

BridgeRule ruleWithHead(std::vector<QuadPattern> head, std::vector<QuadPattern> body) {
    BridgeRule r;
    r.id = 1;
    r.body = std::move(body);
    r.head = std::move(head);
    r.finalize();
    return r;
}

}  // namespace

TEST_CASE("splitHeadPieces: single component is unchanged") {
    Term c = Term::uri("c");
    BridgeRule r = ruleWithHead({{c, Term::var("x"), Term::uri("p"), Term::var("y1")}},
                                {{c, Term::var("x"), Term::uri("q"), Term::var("z")}});
    int next = 2;
    auto pieces = splitHeadPieces(r, next);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].id == 1);
    CHECK_FALSE(pieces[0].parentId.has_value());
}

TEST_CASE("splitHeadPieces: shared existentials glue atoms") {
    Term c = Term::uri("c");
    auto x = Term::var("x");
    BridgeRule r = ruleWithHead({{c, x, Term::uri("p"), Term::var("y1")},
                                 {c, Term::var("y1"), Term::uri("q"), Term::var("y2")},
                                 {c, x, Term::uri("r"), Term::var("y3")}},
                                {{c, x, Term::uri("s"), Term::var("z")}});
    int next = 10;
    auto pieces = splitHeadPieces(r, next);
    REQUIRE(pieces.size() == 2);
    CHECK(next == 12);
    for (const auto& p : pieces) {
        CHECK(p.parentId == 1);
        CHECK(p.body == r.body);
    }
    CHECK(pieces[0].head.size() + pieces[1].head.size() == 3);
}

TEST_CASE("splitHeadPieces: no existentials makes every atom its own piece") {
    Term c = Term::uri("c");
    BridgeRule r = ruleWithHead({{c, Term::var("x"), Term::uri("p"), Term::uri("a")},
                                 {c, Term::var("w"), Term::uri("q"), Term::uri("b")}},
                                {{c, Term::var("x"), Term::uri("s"), Term::var("w")}});
    int next = 2;
    auto pieces = splitHeadPieces(r, next);
    CHECK(pieces.size() == 2);
}

TEST_CASE("splitHeadPieces properties: partition, bodies, disjoint existentials") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 300; ++t) {
        QuadSystem qs = testutil::randomSystem(rng);
        for (const BridgeRule& r : qs.rules) {
            int next = 100;
            auto pieces = splitHeadPieces(r, next);
            std::multiset<std::string> original, pieced;
            for (const QuadPattern& p : r.head) original.insert(patternToString(p));
            std::set<Term> seenExistentials;
            for (const BridgeRule& piece : pieces) {
                CHECK(piece.body == r.body);
                for (const QuadPattern& p : piece.head) pieced.insert(patternToString(p));
                for (const Term& y : piece.existential) {
                    CHECK(seenExistentials.insert(y).second);
                }
            }
            CHECK(original == pieced);
        }
    }
}

TEST_CASE("contextScope") {
    Term y1 = Term::var("y1");
    std::vector<QuadPattern> head{{Term::uri("c2"), Term::var("x"), Term::uri("p"), y1}};
    CHECK(contextScope(y1, head) == std::set<Term>{Term::uri("c2")});
    CHECK(contextScope(Term::var("z"), {}) == std::set<Term>{});

    // Example 1, r4: cScope(y4, head(r4)) = {c2}.
    QuadSystem ex1 = loadFixture("example1");
    const BridgeRule& r4 = ex1.rules[3];
    REQUIRE(r4.id == 4);
    REQUIRE(r4.existential.size() == 1);
    CHECK(contextScope(r4.existential[0], r4.head) == std::set<Term>{Term::uri("c2")});
}

TEST_CASE("projectGraph") {
    QuadGraph g{q("c1", "a", "b", "c")};
    CHECK(projectGraph(g, Term::uri("c1")).size() == 1);
    CHECK(projectGraph(g, Term::uri("c2")).empty());
}

TEST_CASE("projectGraph on the Example 1 dChase") {
    QuadSystem ex1 = loadFixture("example1");
    ChaseState st = runDChase(ex1);
    auto triples = projectGraph(st.quads, Term::uri("c3"));
    REQUIRE(triples.size() == 2);
    // {(a,_:b1,_:b2), (b,_:b1,_:b3)} up to blank naming: subjects a and b,
    // one shared blank predicate, two distinct blank objects.
    std::set<Term> subjects, predicates, objects;
    for (const auto& t : triples) {
        subjects.insert(t[0]);
        predicates.insert(t[1]);
        CHECK(t[2].isBlank());
        objects.insert(t[2]);
    }
    CHECK(subjects == std::set<Term>{Term::uri("a"), Term::uri("b")});
    CHECK(predicates.size() == 1);
    CHECK(predicates.begin()->isBlank());
    CHECK(objects.size() == 2);
}

TEST_CASE("sorting quads is deterministic") {
    std::vector<Quad> quads{q("c2", "a", "b", "c"), q("c1", "z", "b", "c"),
                            q("c1", "a", "b", "c"), q("c1", "a", "b", "c")};
    auto byOrder = [](const Quad& a, const Quad& b) { return compareQuads(a, b) < 0; };
    std::vector<Quad> s1 = quads, s2 = quads;
    std::stable_sort(s1.begin(), s1.end(), byOrder);
    std::stable_sort(s2.begin(), s2.end(), byOrder);
    CHECK(s1 == s2);
    CHECK(compareQuads(s1.front(), q("c1", "a", "b", "c")) == 0);
    CHECK(compareQuads(s1.back(), q("c2", "a", "b", "c")) == 0);
}

TEST_CASE("rule validation rejects blank nodes and empty heads") {
    Term c = Term::uri("c");
    BridgeRule bad;
    bad.id = 7;
    bad.body = {{c, Term::blank("x"), Term::uri("p"), Term::var("z")}};
    bad.head = {{c, Term::var("z"), Term::uri("p"), Term::uri("a")}};
    CHECK_THROWS_AS(bad.finalize(), RuleError);

    BridgeRule noHead;
    noHead.id = 8;
    noHead.body = {{c, Term::var("x"), Term::uri("p"), Term::var("z")}};
    CHECK_THROWS_AS(noHead.finalize(), RuleError);

    // The variable partition is derived from occurrences, so the frontier,
    // existential and body-only sets are pairwise disjoint by construction.
    QuadSystem ex2 = loadFixture("example2");
    for (const BridgeRule& r : ex2.rules) {
        std::set<Term> fr(r.frontier.begin(), r.frontier.end());
        std::set<Term> ex(r.existential.begin(), r.existential.end());
        for (const Term& t : fr) CHECK_FALSE(ex.count(t));
        for (const Term& t : r.bodyOnly) {
            CHECK_FALSE(fr.count(t));
            CHECK_FALSE(ex.count(t));
        }
    }
}

TEST_CASE("frontier order follows first occurrence in the head") {
    QuadSystem ex2 = loadFixture("example2");
    const BridgeRule& r1 = ex2.rules[0];
    std::vector<Term> expected{Term::var("x11"), Term::var("x12"), Term::var("x13"),
                               Term::var("x14")};
    CHECK(r1.frontier == expected);
    CHECK(r1.existential == std::vector<Term>{Term::var("y1")});
    CHECK(r1.bodyOnly == std::set<Term>{Term::var("z1")});
}
