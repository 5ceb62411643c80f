#pragma once

#include <string>
#include <vector>

#include "vpd/ast.hpp"

namespace vpd {

/// A string literal in argument position. `path` addresses the node, e.g.
/// `[1].value.receiver.args[0]`.
struct SlotRef {
  std::string path;
  std::string value;
  bool operator==(const SlotRef&) const = default;
};

/// Every string literal passed as a call or method argument, including
/// strings nested in list-literal arguments, in left-to-right source order.
std::vector<SlotRef> string_literal_slots(const Program& program);

/// Rewrites the slot strings, in `string_literal_slots` order, to `values`.
/// Throws std::invalid_argument when the count differs.
Program substitute_slots(Program program, const std::vector<std::string>& values);

/// Names of all called functions and methods in source order.
std::vector<std::string> call_signature(const Program& program);

}  // namespace vpd
