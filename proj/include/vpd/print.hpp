#pragma once

#include <string>

#include "vpd/ast.hpp"

namespace vpd {

/// Canonical program text.
///
/// Statements are one per line with 4-space block indentation and no
/// trailing newline. A single-line assignment whose first target is a plain
/// name is written without spaces around the first `=` (`var1=f(x)`); every
/// other construct keeps standard Python spacing. Same AST, same bytes.
std::string print_canonical(const Program& program);

/// Canonical text of one expression, parenthesized only where required.
std::string print_expression(const Expr& expr);

/// Python-style quoted string literal for `value`.
std::string quote_string(const std::string& value);

}  // namespace vpd
