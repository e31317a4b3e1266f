#include "priml/source.hpp"

#include <fmt/core.h>

namespace priml {

std::string SourceSpan::render() const {
  return fmt::format("{}.{}-{}.{}", start_line, start_col, end_line, end_col);
}

SourceSpan join_spans(const SourceSpan &a, const SourceSpan &b) {
  if (!a.known()) return b;
  if (!b.known()) return a;
  SourceSpan s = a;
  if (b.start_line < s.start_line ||
      (b.start_line == s.start_line && b.start_col < s.start_col)) {
    s.start_line = b.start_line;
    s.start_col = b.start_col;
  }
  if (b.end_line > s.end_line ||
      (b.end_line == s.end_line && b.end_col > s.end_col)) {
    s.end_line = b.end_line;
    s.end_col = b.end_col;
  }
  return s;
}

void fail(std::string code, SourceSpan span, std::string message) {
  throw DiagnosticError(
      Diagnostic{Severity::Error, span, std::move(code), std::move(message)});
}

void fail(std::string code, std::string message) {
  fail(std::move(code), SourceSpan{}, std::move(message));
}

}  // namespace priml
