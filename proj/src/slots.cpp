#include "vpd/slots.hpp"

#include <functional>
#include <stdexcept>
#include <type_traits>

namespace vpd {

namespace {

// Source-order walk shared by slot collection, substitution and signature
// extraction.
template <bool Const>
class Walker {
 public:
  template <class T>
  using Ref = std::conditional_t<Const, const T&, T&>;

  template <class OnSlot, class OnCall>
  Walker(OnSlot on_slot, OnCall on_call) : on_slot_(std::move(on_slot)), on_call_(std::move(on_call)) {}

  void program(Ref<Program> p) {
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
      stmt(p.statements[i], "[" + std::to_string(i) + "]");
    }
  }

 private:
  using SlotFn = std::function<void(std::conditional_t<Const, const Str&, Str&>, const std::string&)>;
  using CallFn = std::function<void(const std::string&)>;

  void body(Ref<std::vector<Stmt>> stmts, const std::string& path) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      stmt(stmts[i], path + "[" + std::to_string(i) + "]");
    }
  }

  void stmt(Ref<Stmt> s, const std::string& path) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            expr(n.value, path + ".value");
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.value, path + ".value");
          } else if constexpr (std::is_same_v<T, For>) {
            expr(n.iter, path + ".iter");
            body(n.body, path + ".body");
            body(n.orelse, path + ".orelse");
          } else if constexpr (std::is_same_v<T, While>) {
            expr(n.test, path + ".test");
            body(n.body, path + ".body");
            body(n.orelse, path + ".orelse");
          } else if constexpr (std::is_same_v<T, With>) {
            for (std::size_t i = 0; i < n.items.size(); ++i) {
              expr(n.items[i].context, path + ".items[" + std::to_string(i) + "]");
            }
            body(n.body, path + ".body");
          }
        },
        s.node);
  }

  // An argument: strings become slots, lists are searched recursively.
  void argument(Ref<Expr> e, const std::string& path) {
    if (auto* s = e.template get_if<Str>()) {
      on_slot_(*s, path);
      return;
    }
    if (auto* l = e.template get_if<ListLit>()) {
      for (std::size_t i = 0; i < l->elements.size(); ++i) {
        argument(l->elements[i], path + ".elements[" + std::to_string(i) + "]");
      }
      return;
    }
    expr(e, path);
  }

  void args(Ref<std::vector<Expr>> a, const std::string& path) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      argument(a[i], path + ".args[" + std::to_string(i) + "]");
    }
  }

  void expr(Ref<Expr> e, const std::string& path) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ListLit>) {
            for (std::size_t i = 0; i < n.elements.size(); ++i) {
              expr(n.elements[i], path + ".elements[" + std::to_string(i) + "]");
            }
          } else if constexpr (std::is_same_v<T, Call>) {
            on_call_(n.callee);
            args(n.args, path);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            expr(*n.receiver, path + ".receiver");
            on_call_(n.method);
            args(n.args, path);
          } else if constexpr (std::is_same_v<T, Attribute>) {
            expr(*n.receiver, path + ".receiver");
          } else if constexpr (std::is_same_v<T, Index>) {
            expr(*n.receiver, path + ".receiver");
            expr(*n.index, path + ".index");
          } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, BinOp>) {
            expr(*n.left, path + ".left");
            expr(*n.right, path + ".right");
          } else if constexpr (std::is_same_v<T, BoolOp>) {
            for (std::size_t i = 0; i < n.operands.size(); ++i) {
              expr(n.operands[i], path + ".operands[" + std::to_string(i) + "]");
            }
          } else if constexpr (std::is_same_v<T, Not>) {
            expr(*n.operand, path + ".operand");
          } else if constexpr (std::is_same_v<T, Conditional>) {
            expr(*n.then, path + ".then");
            expr(*n.test, path + ".test");
            expr(*n.otherwise, path + ".otherwise");
          } else if constexpr (std::is_same_v<T, Comprehension>) {
            expr(*n.element, path + ".element");
            for (std::size_t g = 0; g < n.generators.size(); ++g) {
              const std::string gp = path + ".generators[" + std::to_string(g) + "]";
              expr(*n.generators[g].iter, gp + ".iter");
              for (std::size_t c = 0; c < n.generators[g].conditions.size(); ++c) {
                expr(n.generators[g].conditions[c], gp + ".conditions[" + std::to_string(c) + "]");
              }
            }
          }
        },
        e.node);
  }

  SlotFn on_slot_;
  CallFn on_call_;
};

}  // namespace

std::vector<SlotRef> string_literal_slots(const Program& program) {
  std::vector<SlotRef> slots;
  Walker<true> walker([&](const Str& s, const std::string& path) { slots.push_back({path, s.value}); },
                      [](const std::string&) {});
  walker.program(program);
  return slots;
}

Program substitute_slots(Program program, const std::vector<std::string>& values) {
  std::size_t next = 0;
  Walker<false> walker(
      [&](Str& s, const std::string&) {
        if (next < values.size()) s.value = values[next];
        ++next;
      },
      [](const std::string&) {});
  walker.program(program);
  if (next != values.size()) {
    throw std::invalid_argument("slot count " + std::to_string(next) + " does not match " +
                                std::to_string(values.size()) + " values");
  }
  return program;
}

std::vector<std::string> call_signature(const Program& program) {
  std::vector<std::string> names;
  Walker<true> walker([](const Str&, const std::string&) {},
                      [&](const std::string& name) { names.push_back(name); });
  walker.program(program);
  return names;
}

}  // namespace vpd
