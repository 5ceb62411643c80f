#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace vpd {

/// Owning, deep-copying pointer so recursive AST nodes keep value semantics.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

// ---------------------------------------------------------------------------
// Assignment targets

struct AssignTarget;

struct NameTarget {
  std::string id;
  bool operator==(const NameTarget&) const = default;
};

struct TupleTarget {
  std::vector<AssignTarget> elements;  // >= 2
  bool operator==(const TupleTarget&) const;
};

struct AssignTarget {
  std::variant<NameTarget, TupleTarget> node;
  bool operator==(const AssignTarget&) const = default;
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;

enum class CmpOp { Eq, NotEq, Lt, LtE, Gt, GtE };
enum class ArithOp { Add, Sub, Mul };
enum class LogicOp { And, Or };
enum class CompKind { List, Generator };

struct Name {
  std::string id;
  bool operator==(const Name&) const = default;
};

struct Str {
  std::string value;
  bool operator==(const Str&) const = default;
};

struct Int {
  std::int64_t value = 0;
  bool operator==(const Int&) const = default;
};

struct BoolLit {
  bool value = false;
  bool operator==(const BoolLit&) const = default;
};

struct ListLit {
  std::vector<Expr> elements;
  bool operator==(const ListLit&) const;
};

struct Call {
  std::string callee;
  std::vector<Expr> args;
  bool operator==(const Call&) const;
};

struct MethodCall {
  Box<Expr> receiver;
  std::string method;
  std::vector<Expr> args;
  bool operator==(const MethodCall&) const;
};

struct Attribute {
  Box<Expr> receiver;
  std::string name;
  bool operator==(const Attribute&) const;
};

struct Index {
  Box<Expr> receiver;
  Box<Expr> index;
  bool operator==(const Index&) const;
};

struct Compare {
  Box<Expr> left;
  CmpOp op = CmpOp::Eq;
  Box<Expr> right;
  bool operator==(const Compare&) const;
};

struct BinOp {
  Box<Expr> left;
  ArithOp op = ArithOp::Add;
  Box<Expr> right;
  bool operator==(const BinOp&) const;
};

struct BoolOp {
  LogicOp op = LogicOp::And;
  std::vector<Expr> operands;  // >= 2
  bool operator==(const BoolOp&) const;
};

struct Not {
  Box<Expr> operand;
  bool operator==(const Not&) const;
};

struct Conditional {
  Box<Expr> then;
  Box<Expr> test;
  Box<Expr> otherwise;
  bool operator==(const Conditional&) const;
};

struct Generator {
  AssignTarget target;
  Box<Expr> iter;
  std::vector<Expr> conditions;
  bool operator==(const Generator&) const;
};

struct Comprehension {
  CompKind kind = CompKind::List;
  Box<Expr> element;
  std::vector<Generator> generators;  // >= 1
  bool operator==(const Comprehension&) const;
};

struct Expr {
  using Node = std::variant<Name, Str, Int, BoolLit, ListLit, Call, MethodCall, Attribute, Index,
                            Compare, BinOp, BoolOp, Not, Conditional, Comprehension>;
  Node node;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(node);
  }
  template <class T>
  T& as() {
    return std::get<T>(node);
  }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  T* get_if() {
    return std::get_if<T>(&node);
  }

  bool operator==(const Expr&) const;
};

// ---------------------------------------------------------------------------
// Statements

struct Stmt;

struct Assign {
  std::vector<AssignTarget> targets;  // >= 1
  Expr value;
  bool operator==(const Assign&) const;
};

struct For {
  AssignTarget target;
  Expr iter;
  std::vector<Stmt> body;  // non-empty
  std::vector<Stmt> orelse;
  bool operator==(const For&) const;
};

struct While {
  Expr test;
  std::vector<Stmt> body;  // non-empty
  std::vector<Stmt> orelse;
  bool operator==(const While&) const;
};

struct WithItem {
  Expr context;
  std::optional<AssignTarget> bound;
  bool operator==(const WithItem&) const;
};

struct With {
  std::vector<WithItem> items;
  std::vector<Stmt> body;
  bool operator==(const With&) const;
};

struct ExprStmt {
  Expr value;
  bool operator==(const ExprStmt&) const;
};

struct Stmt {
  using Node = std::variant<Assign, For, While, With, ExprStmt>;
  Node node;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(node);
  }
  template <class T>
  T& as() {
    return std::get<T>(node);
  }

  bool operator==(const Stmt&) const;
};

struct Program {
  std::vector<Stmt> statements;
  bool operator==(const Program&) const;
};

const char* to_string(CmpOp op);
const char* to_string(ArithOp op);
const char* to_string(LogicOp op);

/// Compact constructors for building trees in code and tests.
namespace build {

Expr name(std::string id);
Expr str(std::string value);
Expr integer(std::int64_t value);
Expr boolean(bool value);
Expr list(std::vector<Expr> elements);
Expr call(std::string callee, std::vector<Expr> args);
Expr method(Expr receiver, std::string method, std::vector<Expr> args);
Expr attr(Expr receiver, std::string name);
Expr index(Expr receiver, Expr index);
Expr compare(Expr left, CmpOp op, Expr right);
Expr arith(Expr left, ArithOp op, Expr right);
Expr logic(LogicOp op, std::vector<Expr> operands);
Expr negate(Expr operand);
Expr conditional(Expr then, Expr test, Expr otherwise);
Expr comprehension(CompKind kind, Expr element, std::vector<Generator> generators);
Generator generator(AssignTarget target, Expr iter, std::vector<Expr> conditions = {});

AssignTarget target(std::string id);
AssignTarget tuple(std::vector<AssignTarget> elements);

Stmt assign(std::string target, Expr value);
Stmt assign(std::vector<AssignTarget> targets, Expr value);
Stmt for_loop(AssignTarget target, Expr iter, std::vector<Stmt> body, std::vector<Stmt> orelse = {});
Stmt while_loop(Expr test, std::vector<Stmt> body, std::vector<Stmt> orelse = {});
Stmt with(std::vector<WithItem> items, std::vector<Stmt> body);
Stmt expr(Expr value);

}  // namespace build

}  // namespace vpd
