#pragma once

// Shared desk-scale fixture programs used across the test suites.

namespace fixtures {

// Four rules sharing a p/q/r motif. Size 20; one invented rule brings it
// down to 16.
inline const char* kFourRule = R"(
g(A) :- p(A), q(A,B), r(B), s(A,B).
g(A) :- p(A), q(A,B), r(B), t(A,B).
g(A) :- p(B), q(B,C), r(C), w(A,B).
g(A) :- p(A), q(B,A), r(A), z(A,B).
)";

// Refactoring of kFourRule with a subset-style aux rule (size 18). The last
// rule cannot be covered because the aux body shares variables.
inline const char* kFourRuleAux1 = R"(
aux1(A,B) :- p(A), q(A,B), r(B).
g(A) :- aux1(A,B), s(A,B).
g(A) :- aux1(A,B), t(A,B).
g(A) :- aux1(B,C), w(A,B).
g(A) :- p(A), q(B,A), r(A), z(A,B).
)";

// Refactoring of kFourRule with a more general aux rule (size 16).
inline const char* kFourRuleAux2 = R"(
aux2(A,B,C) :- p(A), q(B,C), r(C).
g(A) :- aux2(A,A,B), s(A,B).
g(A) :- aux2(A,A,B), t(A,B).
g(A) :- aux2(B,B,C), w(A,B).
g(A) :- aux2(A,B,A), z(A,B).
)";

// kFourRule plus two rules with repeated predicates. Size 30.
inline const char* kSixRule = R"(
g(A) :- p(A), q(A,B), r(B), s(A,B).
g(A) :- p(A), q(A,B), r(B), t(A,B).
g(A) :- p(B), q(B,C), r(C), w(A,B).
g(A) :- p(A), q(B,A), r(A), z(A,B).
g(A) :- p(A), p(B), q(A,B), r(B).
g(A) :- p(A), q(A,B), q(B,C), r(C).
)";

// Refactoring of kSixRule with one linear aux rule (size 22).
inline const char* kSixRuleAux3 = R"(
aux3(A,B,C,D,E,F,G) :- p(A), p(B), q(C,D), q(E,F), r(G).
g(A) :- aux3(A,A,A,B,A,B,B), s(A,B).
g(A) :- aux3(A,A,A,B,A,B,B), t(A,B).
g(A) :- aux3(B,B,B,C,B,C,C), w(A,B).
g(A) :- aux3(A,A,B,A,B,A,A), z(A,B).
g(A) :- aux3(A,B,A,B,A,B,B).
g(A) :- aux3(A,A,A,B,B,C,C).
)";

// Unfolding fixture: a program with aux calls, the aux definition, and the
// expected unfolded result.
inline const char* kUnfoldInput = R"(
g(A) :- p(A), aux(A,B).
g(A) :- p(B), p(C), aux(A,B), aux(A,C).
g(A) :- p(B), q(A,B), r(B).
)";

inline const char* kUnfoldRule = "aux(A,B) :- p(B), q(A,B).";

inline const char* kUnfoldExpected = R"(
g(A) :- p(A), p(B), q(A,B).
g(A) :- p(B), p(C), q(A,B), q(A,C).
g(A) :- p(B), q(A,B), r(B).
)";

// Two-rule fixture with repeated predicate symbols; used for the encoding
// walkthrough tests. Size 10; the optimum with one aux rule is also 10.
inline const char* kTwoRule = R"(
g(A) :- p(B), p(C), q(A,B), q(B,C).
g(A) :- p(B), q(A,B), q(A,C), s(C).
)";

// A refactoring of kTwoRule using aux1(A,B,C) :- p(A), q(B,C) twice in the
// first rule and once in the second.
inline const char* kTwoRuleRefactored = R"(
aux1(A,B,C) :- p(A), q(B,C).
g(A) :- aux1(B,A,B), aux1(C,B,C).
g(A) :- aux1(B,A,B), q(A,C), s(C).
)";

}  // namespace fixtures
