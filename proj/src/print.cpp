#include "vpd/print.hpp"

#include <cstdio>
#include <string_view>

namespace vpd {

namespace {

// Binding strength, loosest first.
enum Prec : int {
  kCond = 1,
  kOr,
  kAnd,
  kNot,
  kCmp,
  kArith,
  kTerm,
  kUnary,
  kPostfix,
  kAtom,
};

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Conditional>) return kCond;
        else if constexpr (std::is_same_v<T, BoolOp>) return n.op == LogicOp::Or ? kOr : kAnd;
        else if constexpr (std::is_same_v<T, Not>) return kNot;
        else if constexpr (std::is_same_v<T, Compare>) return kCmp;
        else if constexpr (std::is_same_v<T, BinOp>) return n.op == ArithOp::Mul ? kTerm : kArith;
        else if constexpr (std::is_same_v<T, Int>) return n.value < 0 ? kUnary : kAtom;
        else if constexpr (std::is_same_v<T, MethodCall> || std::is_same_v<T, Attribute> ||
                           std::is_same_v<T, Index> || std::is_same_v<T, Call>)
          return kPostfix;
        else return kAtom;
      },
      e.node);
}

void write_target(std::string& out, const AssignTarget& t, bool nested) {
  if (const auto* n = std::get_if<NameTarget>(&t.node)) {
    out += n->id;
    return;
  }
  const auto& tup = std::get<TupleTarget>(t.node);
  if (nested) out += '(';
  for (std::size_t i = 0; i < tup.elements.size(); ++i) {
    if (i) out += ", ";
    write_target(out, tup.elements[i], true);
  }
  if (nested) out += ')';
}

void write(std::string& out, const Expr& e, int min_prec);

void write_args(std::string& out, const std::vector<Expr>& args) {
  out += '(';
  if (args.size() == 1) {
    if (const auto* c = args.front().get_if<Comprehension>(); c && c->kind == CompKind::Generator) {
      // A lone generator argument borrows the call's parentheses.
      write(out, *c->element, kCond);
      for (const auto& g : c->generators) {
        out += " for ";
        write_target(out, g.target, false);
        out += " in ";
        write(out, *g.iter, kOr);
        for (const auto& cond : g.conditions) {
          out += " if ";
          write(out, cond, kOr);
        }
      }
      out += ')';
      return;
    }
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    write(out, args[i], kCond);
  }
  out += ')';
}

void write_receiver(std::string& out, const Expr& receiver) {
  if (receiver.is<Int>()) {
    out += '(';
    write(out, receiver, kCond);
    out += ')';
    return;
  }
  write(out, receiver, kPostfix);
}

void write_node(std::string& out, const Expr& e) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Name>) {
          out += n.id;
        } else if constexpr (std::is_same_v<T, Str>) {
          out += quote_string(n.value);
        } else if constexpr (std::is_same_v<T, Int>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += n.value ? "True" : "False";
        } else if constexpr (std::is_same_v<T, ListLit>) {
          out += '[';
          for (std::size_t i = 0; i < n.elements.size(); ++i) {
            if (i) out += ", ";
            write(out, n.elements[i], kCond);
          }
          out += ']';
        } else if constexpr (std::is_same_v<T, Call>) {
          out += n.callee;
          write_args(out, n.args);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          write_receiver(out, *n.receiver);
          out += '.';
          out += n.method;
          write_args(out, n.args);
        } else if constexpr (std::is_same_v<T, Attribute>) {
          write_receiver(out, *n.receiver);
          out += '.';
          out += n.name;
        } else if constexpr (std::is_same_v<T, Index>) {
          write_receiver(out, *n.receiver);
          out += '[';
          write(out, *n.index, kCond);
          out += ']';
        } else if constexpr (std::is_same_v<T, Compare>) {
          write(out, *n.left, kArith);
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          write(out, *n.right, kArith);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          const int own = n.op == ArithOp::Mul ? kTerm : kArith;
          write(out, *n.left, own);
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          write(out, *n.right, own + 1);
        } else if constexpr (std::is_same_v<T, BoolOp>) {
          const int operand_prec = (n.op == LogicOp::Or ? kOr : kAnd) + 1;
          for (std::size_t i = 0; i < n.operands.size(); ++i) {
            if (i) {
              out += ' ';
              out += to_string(n.op);
              out += ' ';
            }
            write(out, n.operands[i], operand_prec);
          }
        } else if constexpr (std::is_same_v<T, Not>) {
          out += "not ";
          write(out, *n.operand, kNot);
        } else if constexpr (std::is_same_v<T, Conditional>) {
          write(out, *n.then, kOr);
          out += " if ";
          write(out, *n.test, kOr);
          out += " else ";
          write(out, *n.otherwise, kCond);
        } else if constexpr (std::is_same_v<T, Comprehension>) {
          out += n.kind == CompKind::List ? '[' : '(';
          write(out, *n.element, kCond);
          for (const auto& g : n.generators) {
            out += " for ";
            write_target(out, g.target, false);
            out += " in ";
            write(out, *g.iter, kOr);
            for (const auto& cond : g.conditions) {
              out += " if ";
              write(out, cond, kOr);
            }
          }
          out += n.kind == CompKind::List ? ']' : ')';
        }
      },
      e.node);
}

void write(std::string& out, const Expr& e, int min_prec) {
  const bool wrap = precedence(e) < min_prec;
  if (wrap) out += '(';
  write_node(out, e);
  if (wrap) out += ')';
}

void write_block(std::vector<std::string>& lines, const std::vector<Stmt>& body, int depth);

void write_stmt(std::vector<std::string>& lines, const Stmt& s, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        std::string line = indent;
        if constexpr (std::is_same_v<T, Assign>) {
          for (std::size_t i = 0; i < n.targets.size(); ++i) {
            write_target(line, n.targets[i], false);
            const bool tight = i == 0 && std::holds_alternative<NameTarget>(n.targets[i].node);
            line += tight ? "=" : " = ";
          }
          write(line, n.value, kCond);
          lines.push_back(std::move(line));
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          write(line, n.value, kCond);
          lines.push_back(std::move(line));
        } else if constexpr (std::is_same_v<T, For>) {
          line += "for ";
          write_target(line, n.target, false);
          line += " in ";
          write(line, n.iter, kCond);
          line += ':';
          lines.push_back(std::move(line));
          write_block(lines, n.body, depth + 1);
          if (!n.orelse.empty()) {
            lines.push_back(indent + "else:");
            write_block(lines, n.orelse, depth + 1);
          }
        } else if constexpr (std::is_same_v<T, While>) {
          line += "while ";
          write(line, n.test, kCond);
          line += ':';
          lines.push_back(std::move(line));
          write_block(lines, n.body, depth + 1);
          if (!n.orelse.empty()) {
            lines.push_back(indent + "else:");
            write_block(lines, n.orelse, depth + 1);
          }
        } else if constexpr (std::is_same_v<T, With>) {
          line += "with ";
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) line += ", ";
            write(line, n.items[i].context, kCond);
            if (n.items[i].bound) {
              line += " as ";
              write_target(line, *n.items[i].bound, true);
            }
          }
          line += ':';
          lines.push_back(std::move(line));
          write_block(lines, n.body, depth + 1);
        }
      },
      s.node);
}

void write_block(std::vector<std::string>& lines, const std::vector<Stmt>& body, int depth) {
  for (const auto& s : body) write_stmt(lines, s, depth);
}

}  // namespace

std::string quote_string(const std::string& value) {
  const bool has_single = value.find('\'') != std::string::npos;
  const bool has_double = value.find('"') != std::string::npos;
  const char quote = (has_single && !has_double) ? '"' : '\'';
  std::string out(1, quote);
  for (char ch : value) {
    const auto c = static_cast<unsigned char>(ch);
    if (ch == '\\') out += "\\\\";
    else if (ch == quote) { out += '\\'; out += quote; }
    else if (ch == '\n') out += "\\n";
    else if (ch == '\t') out += "\\t";
    else if (ch == '\r') out += "\\r";
    else if (c < 0x20 || c == 0x7F) {
      char buf[5];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
    } else {
      out += ch;
    }
  }
  out += quote;
  return out;
}

std::string print_expression(const Expr& expr) {
  std::string out;
  write(out, expr, kCond);
  return out;
}

std::string print_canonical(const Program& program) {
  std::vector<std::string> lines;
  write_block(lines, program.statements, 0);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace vpd
