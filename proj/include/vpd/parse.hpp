#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "vpd/ast.hpp"

namespace vpd {

/// Raised when program text falls outside the supported mini-language.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int column, std::string expected);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// Description of what the parser wanted at the failure point.
  const std::string& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::string expected_;
};

/// Parses a visual program.
///
/// The accepted language is a strict Python subset: assignment (including
/// chained and tuple targets), `for`/`while` with optional `else`, `with`,
/// and expression statements. Blocks are indentation-delimited with spaces
/// only. Function definitions, imports, `if` statements, `return`, f-strings
/// and other constructs are rejected with a SyntaxError.
Program parse(std::string_view source);

/// Parses a single expression (no trailing tokens allowed).
Expr parse_expression(std::string_view source);

}  // namespace vpd
