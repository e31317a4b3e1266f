#pragma once

#include "priml/elaborate.hpp"
#include "priml/eval.hpp"
#include "priml/parser.hpp"

namespace priml::testgen {

// Random well-scoped surface program. Biased toward well-typed output but
// deliberately not guaranteed to elaborate; callers that need a typed
// program should skip elaboration failures.
SProgram gen_program(uint64_t seed);

// Random closed core expression of a first-order type, fix-free (always
// terminating). Used against the environment-evaluator oracle.
ExprPtr gen_pure_expr(uint64_t seed, int depth = 4);

// Random closed core value of the given simple type (Unit/Nat/Prod/Sum/Arrow
// over those).
ExprPtr gen_core_value(Rng &rng, const TypePtr &type, int depth = 3);

// Random core expression of the given type over the supplied typed
// variables (pure fragment, fix-free).
ExprPtr gen_core_expr(Rng &rng, const TypePtr &type,
                      const std::vector<std::pair<Ident, TypePtr>> &vars,
                      int depth = 3);

// Environment-based big-step evaluator for the pure fix-free fragment;
// returns the result as a core value (closures are returned opaque and
// compare only when reduced away).
ExprPtr env_eval(const ExprPtr &e);

}  // namespace priml::testgen
