#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "maxrefactor/logic.hpp"

using namespace maxref;

namespace {

Program parse(const char* text) { return parse_program(text); }

// Splits a refactored program into (rest, aux rules) by head-predicate
// prefix "aux".
std::pair<Program, std::vector<Rule>> split_aux(const Program& p) {
    Program rest;
    rest.predicate_table = p.predicate_table;
    std::vector<Rule> aux;
    for (const auto& r : p.rules) {
        if (r.head.pred.rfind("aux", 0) == 0)
            aux.push_back(r);
        else
            rest.rules.push_back(r);
    }
    return {rest, aux};
}

Rule parse_rule(const char* text) {
    Program p = parse_program(text);
    REQUIRE(p.rules.size() == 1);
    return p.rules[0];
}

}  // namespace

TEST_CASE("parse: four-rule fixture") {
    Program p = parse(fixtures::kFourRule);
    CHECK(p.rules.size() == 4);
    CHECK(program_size(p) == 20);
    auto preds = body_predicates(p);
    std::map<std::string, int> want{{"p", 1}, {"q", 2}, {"r", 1}, {"s", 2},
                                    {"t", 2}, {"w", 2}, {"z", 2}};
    CHECK(preds == want);
    // g only occurs in heads.
    CHECK(preds.count("g") == 0);
    CHECK(p.predicate_table.at("g") == 1);
}

TEST_CASE("parse: empty input") {
    Program p = parse("");
    CHECK(p.rules.empty());
    CHECK(program_size(p) == 0);
    CHECK(body_predicates(p).empty());
    CHECK(parse(" % just a comment\n").rules.empty());
}

TEST_CASE("parse: arity mismatch") {
    CHECK_THROWS_AS(parse("g(A) :- p(A,B).\nq(B) :- p(B)."), ParseError);
    try {
        parse("g(A) :- p(A,B).\nq(B) :- p(B).");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("arity mismatch") != std::string::npos);
    }
}

TEST_CASE("parse: errors carry positions") {
    try {
        parse("g(A) :- p(A)\ng(B).");
        FAIL("expected error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parse("g(a)."), ParseError);          // constant argument
    CHECK_THROWS_AS(parse("g(f(A))."), ParseError);       // function term
    CHECK_THROWS_AS(parse("G(A) :- p(A)."), ParseError);  // uppercase predicate
}

TEST_CASE("parse: zero-arity literals and facts") {
    Program p = parse("p :- q1, q2.\nr(A).\n");
    CHECK(p.rules.size() == 2);
    CHECK(p.rules[0].head.args.empty());
    CHECK(p.rules[0].body.size() == 2);
    CHECK(p.rules[1].body.empty());
    CHECK(program_size(p) == 4);  // facts have size 1
}

TEST_CASE("parse: duplicate body literals collapse with a warning") {
    std::vector<std::string> warnings;
    Program p = parse_program("g(A) :- p(A), p(A), q(A).", &warnings);
    CHECK(p.rules[0].body.size() == 2);
    CHECK(warnings.size() == 1);
    CHECK(warnings[0].find("duplicate") != std::string::npos);
}

TEST_CASE("print/parse round trip preserves size and structure") {
    for (const char* text : {fixtures::kFourRule, fixtures::kSixRule, fixtures::kFourRuleAux2,
                             fixtures::kSixRuleAux3, fixtures::kUnfoldInput}) {
        Program p = parse(text);
        Program q = parse(to_string(p).c_str());
        CHECK(program_size(p) == program_size(q));
        CHECK(alpha_equal(p, q));
        CHECK(to_string(p) == to_string(q));
    }
    CHECK(to_string(parse("g(X) :- p(X,Y).")) == "g(V0) :- p(V0,V1).\n");
}

TEST_CASE("program_size on fixture refactorings") {
    CHECK(program_size(parse(fixtures::kFourRuleAux1)) == 18);
    CHECK(program_size(parse(fixtures::kFourRuleAux2)) == 16);
    CHECK(program_size(parse(fixtures::kSixRule)) == 30);
    CHECK(program_size(parse(fixtures::kSixRuleAux3)) == 22);
}

TEST_CASE("alpha_equal basics") {
    Program p = parse(fixtures::kFourRule);
    // Rename variables per rule.
    Program q = parse(R"(
        g(X) :- p(X), q(X,Y), r(Y), s(X,Y).
        g(Q) :- p(Q), q(Q,P), r(P), t(Q,P).
        g(Z) :- p(B), q(B,C), r(C), w(Z,B).
        g(U) :- p(U), q(V,U), r(U), z(U,V).
    )");
    CHECK(alpha_equal(p, q));
    CHECK_FALSE(alpha_equal(p, parse(fixtures::kFourRuleAux1)));
    // Body order is irrelevant.
    CHECK(alpha_equal(parse("g(A) :- p(A), q(A,B)."), parse("g(A) :- q(A,B), p(A).")));
    // Different binding patterns are distinguished.
    CHECK_FALSE(alpha_equal(parse("g(A) :- q(A,A)."), parse("g(A) :- q(A,B).")));
    CHECK_FALSE(rules_alpha_equal(parse_rule("g(A) :- q(A,B), q(B,A)."),
                                  parse_rule("g(A) :- q(A,B), q(A,B), q(B,B).")));
}

TEST_CASE("alpha_equal is an equivalence relation on shuffled renamings") {
    std::mt19937_64 rng(7);
    Program p = parse(fixtures::kSixRule);
    auto shuffled = [&]() {
        Program q = p;
        std::shuffle(q.rules.begin(), q.rules.end(), rng);
        for (auto& r : q.rules) {
            std::vector<int> perm(r.var_count);
            for (int i = 0; i < r.var_count; ++i) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), rng);
            for (int& v : r.head.args) v = perm[v];
            for (auto& lit : r.body)
                for (int& v : lit.args) v = perm[v];
            std::shuffle(r.body.begin(), r.body.end(), rng);
            r = make_rule(r.head, r.body);
        }
        return q;
    };
    Program a = shuffled(), b = shuffled(), c = shuffled();
    CHECK(alpha_equal(a, a));
    CHECK(alpha_equal(a, b));
    CHECK(alpha_equal(b, a));
    CHECK((alpha_equal(a, b) && alpha_equal(b, c) ? alpha_equal(a, c) : true));
}

TEST_CASE("unfold: two occurrences resolved in one pass") {
    Program p = parse(fixtures::kUnfoldInput);
    Rule r = parse_rule(fixtures::kUnfoldRule);
    Program q = unfold(p, r);
    CHECK(q.rules.size() == p.rules.size());
    CHECK(alpha_equal(q, parse(fixtures::kUnfoldExpected)));
}

TEST_CASE("unfold: no matching occurrence leaves program unchanged") {
    Program p = parse(fixtures::kFourRule);
    Rule r = parse_rule("aux9(A,B) :- p(A), q(A,B).");
    CHECK(alpha_equal(unfold(p, r), p));
}

TEST_CASE("unfold: body-only variable is rejected") {
    Program p = parse(fixtures::kFourRule);
    CHECK_THROWS_AS(unfold(p, parse_rule("aux(A) :- q(A,B).")), std::invalid_argument);
}

TEST_CASE("unfold: rule count is always preserved") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 20; ++iter) {
        // Random 3-rule program over h/p/aux with small bodies.
        std::string text;
        for (int i = 0; i < 3; ++i) {
            text += "h(A) :- ";
            int n = 1 + static_cast<int>(rng() % 3);
            for (int j = 0; j < n; ++j) {
                if (j) text += ", ";
                text += (rng() % 2 ? "p(" : "aux(");
                text += static_cast<char>('A' + rng() % 3);
                text += ")";
            }
            text += ".\n";
        }
        Program p = parse(text.c_str());
        Program q = unfold(p, parse_rule("aux(A) :- p(A)."));
        CHECK(q.rules.size() == p.rules.size());
    }
}

TEST_CASE("unfold_all: fixture refactorings unfold back") {
    auto check_roundtrip = [](const char* refactored, const char* original) {
        auto [rest, aux] = split_aux(parse(refactored));
        Program back = unfold_all(rest, aux);
        CHECK(alpha_equal(back, parse(original)));
    };
    check_roundtrip(fixtures::kFourRuleAux1, fixtures::kFourRule);
    check_roundtrip(fixtures::kFourRuleAux2, fixtures::kFourRule);
    check_roundtrip(fixtures::kSixRuleAux3, fixtures::kSixRule);
    check_roundtrip(fixtures::kTwoRuleRefactored, fixtures::kTwoRule);
}

TEST_CASE("unfold_all: empty set is the identity") {
    Program p = parse(fixtures::kFourRule);
    CHECK(alpha_equal(unfold_all(p, {}), p));
}

TEST_CASE("unfold_all: disjoint aux rules commute") {
    Program p = parse(R"(
        g(A) :- aux1(A,B), w(A,B).
        g(A) :- aux2(A,B), z(B).
        g(A) :- aux1(A,B), aux2(B,C), w(A,C).
    )");
    Rule a1 = parse_rule("aux1(A,B) :- p(A), q(A,B).");
    Rule a2 = parse_rule("aux2(A,B) :- r(A,B).");
    Program q1 = unfold_all(p, {a1, a2});
    Program q2 = unfold_all(p, {a2, a1});
    CHECK(alpha_equal(q1, q2));
    CHECK(program_size(q1) == program_size(q2));
}

TEST_CASE("unfold_all: mutually referencing rules are rejected") {
    Program p = parse("g(A) :- aux1(A).");
    Rule a1 = parse_rule("aux1(A) :- aux2(A).");
    Rule a2 = parse_rule("aux2(A) :- aux1(A).");
    CHECK_THROWS_AS(unfold_all(p, {a1, a2}), std::invalid_argument);
}

TEST_CASE("unfold: duplicates in the resolvent collapse") {
    Program p = parse("g(A) :- p(A), aux(A,A).");
    Rule r = parse_rule("aux(A,B) :- p(A), p(B).");
    Program q = unfold(p, r);
    REQUIRE(q.rules.size() == 1);
    CHECK(q.rules[0].body.size() == 1);  // p(A) three times over
    CHECK(alpha_equal(q, parse("g(A) :- p(A).")));
}

TEST_CASE("linearize: shared variables become fresh slots") {
    Rule r = parse_rule("aux1(A,B,C) :- p(A,B), q(B,C).");
    LinearAuxRule lin = linearize(r);
    CHECK(lin.counts == std::map<std::string, int>{{"p", 1}, {"q", 1}});
    std::map<std::string, int> arities{{"p", 2}, {"q", 2}};
    CHECK(lin.head_arity(arities) == 4);
    Rule out = lin.to_rule(arities);
    CHECK(rules_alpha_equal(out, parse_rule("aux1(A,B,C,D) :- p(A,B), q(C,D).")));
    // Idempotent: linearising the linear form gives the same counts.
    CHECK(linearize(out).counts == lin.counts);
}

TEST_CASE("linearize: repeated predicates") {
    Rule r = parse_rule("aux(A,B,C) :- p(A,B), p(B,C).");
    LinearAuxRule lin = linearize(r);
    CHECK(lin.counts == std::map<std::string, int>{{"p", 2}});
    CHECK(lin.head_arity({{"p", 2}}) == 4);
    CHECK(lin.slot_order() ==
          std::vector<std::pair<std::string, int>>{{"p", 0}, {"p", 1}});
}

TEST_CASE("linearize: head arity equals sum of counts times arity") {
    std::mt19937_64 rng(3);
    std::map<std::string, int> arities{{"p", 1}, {"q", 2}, {"r", 3}};
    for (int iter = 0; iter < 30; ++iter) {
        LinearAuxRule lin;
        lin.name = "aux";
        for (const auto& [pred, arity] : arities)
            if (rng() % 2) lin.counts[pred] = 1 + static_cast<int>(rng() % 3);
        if (lin.counts.empty()) continue;
        int expect = 0;
        for (const auto& [pred, count] : lin.counts) expect += count * arities.at(pred);
        CHECK(lin.head_arity(arities) == expect);
        Rule r = lin.to_rule(arities);
        CHECK(static_cast<int>(r.head.args.size()) == expect);
        CHECK(r.var_count == expect);
    }
}
