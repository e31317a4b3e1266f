#pragma once

#include <string_view>

#include "priml/surface.hpp"

namespace priml {

// Parses a whole .priml program. Throws DiagnosticError (E-PARSE) with the
// offending span and the expected-token set in the message.
SProgram parse(std::string_view source);

// Entry point for expression fragments (tests).
SExprPtr parse_expr_fragment(std::string_view source);

}  // namespace priml
