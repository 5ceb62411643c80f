#include "vpd/ast.hpp"

namespace vpd {

bool TupleTarget::operator==(const TupleTarget&) const = default;
bool ListLit::operator==(const ListLit&) const = default;
bool Call::operator==(const Call&) const = default;
bool MethodCall::operator==(const MethodCall&) const = default;
bool Attribute::operator==(const Attribute&) const = default;
bool Index::operator==(const Index&) const = default;
bool Compare::operator==(const Compare&) const = default;
bool BinOp::operator==(const BinOp&) const = default;
bool BoolOp::operator==(const BoolOp&) const = default;
bool Not::operator==(const Not&) const = default;
bool Conditional::operator==(const Conditional&) const = default;
bool Generator::operator==(const Generator&) const = default;
bool Comprehension::operator==(const Comprehension&) const = default;
bool Expr::operator==(const Expr&) const = default;
bool Assign::operator==(const Assign&) const = default;
bool For::operator==(const For&) const = default;
bool While::operator==(const While&) const = default;
bool WithItem::operator==(const WithItem&) const = default;
bool With::operator==(const With&) const = default;
bool ExprStmt::operator==(const ExprStmt&) const = default;
bool Stmt::operator==(const Stmt&) const = default;
bool Program::operator==(const Program&) const = default;

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::NotEq: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::LtE: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::GtE: return ">=";
  }
  return "?";
}

const char* to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
  }
  return "?";
}

const char* to_string(LogicOp op) { return op == LogicOp::And ? "and" : "or"; }

namespace build {

Expr name(std::string id) { return Expr{Name{std::move(id)}}; }
Expr str(std::string value) { return Expr{Str{std::move(value)}}; }
Expr integer(std::int64_t value) { return Expr{Int{value}}; }
Expr boolean(bool value) { return Expr{BoolLit{value}}; }
Expr list(std::vector<Expr> elements) { return Expr{ListLit{std::move(elements)}}; }
Expr call(std::string callee, std::vector<Expr> args) {
  return Expr{Call{std::move(callee), std::move(args)}};
}
Expr method(Expr receiver, std::string method, std::vector<Expr> args) {
  return Expr{MethodCall{std::move(receiver), std::move(method), std::move(args)}};
}
Expr attr(Expr receiver, std::string name) {
  return Expr{Attribute{std::move(receiver), std::move(name)}};
}
Expr index(Expr receiver, Expr index) { return Expr{Index{std::move(receiver), std::move(index)}}; }
Expr compare(Expr left, CmpOp op, Expr right) {
  return Expr{Compare{std::move(left), op, std::move(right)}};
}
Expr arith(Expr left, ArithOp op, Expr right) {
  return Expr{BinOp{std::move(left), op, std::move(right)}};
}
Expr logic(LogicOp op, std::vector<Expr> operands) { return Expr{BoolOp{op, std::move(operands)}}; }
Expr negate(Expr operand) { return Expr{Not{std::move(operand)}}; }
Expr conditional(Expr then, Expr test, Expr otherwise) {
  return Expr{Conditional{std::move(then), std::move(test), std::move(otherwise)}};
}
Expr comprehension(CompKind kind, Expr element, std::vector<Generator> generators) {
  return Expr{Comprehension{kind, std::move(element), std::move(generators)}};
}
Generator generator(AssignTarget target, Expr iter, std::vector<Expr> conditions) {
  return Generator{std::move(target), std::move(iter), std::move(conditions)};
}

AssignTarget target(std::string id) { return AssignTarget{NameTarget{std::move(id)}}; }
AssignTarget tuple(std::vector<AssignTarget> elements) {
  return AssignTarget{TupleTarget{std::move(elements)}};
}

Stmt assign(std::string target_id, Expr value) {
  return Stmt{Assign{{target(std::move(target_id))}, std::move(value)}};
}
Stmt assign(std::vector<AssignTarget> targets, Expr value) {
  return Stmt{Assign{std::move(targets), std::move(value)}};
}
Stmt for_loop(AssignTarget target, Expr iter, std::vector<Stmt> body, std::vector<Stmt> orelse) {
  return Stmt{For{std::move(target), std::move(iter), std::move(body), std::move(orelse)}};
}
Stmt while_loop(Expr test, std::vector<Stmt> body, std::vector<Stmt> orelse) {
  return Stmt{While{std::move(test), std::move(body), std::move(orelse)}};
}
Stmt with(std::vector<WithItem> items, std::vector<Stmt> body) {
  return Stmt{With{std::move(items), std::move(body)}};
}
Stmt expr(Expr value) { return Stmt{ExprStmt{std::move(value)}}; }

}  // namespace build

}  // namespace vpd
