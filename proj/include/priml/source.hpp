#pragma once

#include <stdexcept>
#include <string>

namespace priml {

// 1-based, end-inclusive source range. Rendered as "l1.c1-l2.c2".
struct SourceSpan {
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool known() const { return start_line > 0; }
  std::string render() const;
  bool operator==(const SourceSpan &) const = default;
};

SourceSpan join_spans(const SourceSpan &a, const SourceSpan &b);

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string code;  // E-TYPE, E-PRIO-INV, E-CYCLE, ...
  std::string message;
};

struct DiagnosticError : std::runtime_error {
  Diagnostic diag;
  explicit DiagnosticError(Diagnostic d)
      : std::runtime_error(d.message), diag(std::move(d)) {}
};

[[noreturn]] void fail(std::string code, SourceSpan span, std::string message);
[[noreturn]] void fail(std::string code, std::string message);

namespace errcode {
inline constexpr const char *Parse = "E-PARSE";
inline constexpr const char *Type = "E-TYPE";
inline constexpr const char *PrioInversion = "E-PRIO-INV";
inline constexpr const char *Cycle = "E-CYCLE";
inline constexpr const char *DupPriority = "E-DUP-PRIO";
inline constexpr const char *UnknownPriority = "E-UNKNOWN-PRIO";
inline constexpr const char *Unbound = "E-UNBOUND";
inline constexpr const char *UnknownThread = "E-UNKNOWN-THREAD";
inline constexpr const char *DupThread = "E-DUP-THREAD";
inline constexpr const char *Stuck = "E-STUCK";
inline constexpr const char *Deadlock = "E-DEADLOCK";
inline constexpr const char *Fuel = "E-FUEL";
inline constexpr const char *NameClash = "E-NAME-CLASH";
inline constexpr const char *BadDag = "E-BAD-DAG";
inline constexpr const char *TooLarge = "E-TOO-LARGE";
inline constexpr const char *ZeroMass = "E-ZERO-MASS";
inline constexpr const char *Audit = "E-AUDIT";
inline constexpr const char *Io = "E-IO";
}  // namespace errcode

}  // namespace priml
