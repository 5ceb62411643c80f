#include "vpd/parse.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <utility>
#include <vector>

namespace vpd {

SyntaxError::SyntaxError(int line, int column, std::string expected)
    : std::runtime_error("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": expected " + expected),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Name, Keyword, Int, String, Op, Newline, Indent, Dedent, End };

struct Token {
  Tok kind;
  std::string text;  // identifier, keyword, operator, decoded string, or digits
  int line;
  int column;
};

constexpr std::array kKeywords = {"for", "in",  "while", "with", "as",   "if",
                                  "else", "and", "or",    "not",  "True", "False"};

constexpr std::array kUnsupported = {"def",    "class",  "import", "from",  "try",   "except",
                                     "finally", "return", "lambda", "yield", "global", "nonlocal",
                                     "del",    "pass",   "break",  "continue", "raise", "assert",
                                     "async",  "await",  "elif",   "is",    "None"};

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_unsupported(std::string_view word) {
  return std::find(kUnsupported.begin(), kUnsupported.end(), word) != kUnsupported.end();
}

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (handle_line_start()) continue;
      }
      char c = src_[pos_];
      if (c == '\n') {
        if (depth_ == 0 && !tokens_.empty() && tokens_.back().kind != Tok::Newline &&
            tokens_.back().kind != Tok::Indent && tokens_.back().kind != Tok::Dedent) {
          push(Tok::Newline, "\\n", line_, col());
        }
        advance_line();
        continue;
      }
      if (c == '\r') {
        ++pos_;
        continue;
      }
      if (c == ' ') {
        ++pos_;
        continue;
      }
      if (c == '\t') fail("spaces instead of a tab");
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\\') fail("no backslash line continuation");
      if (ident_start(c)) {
        lex_word();
        continue;
      }
      if (digit(c)) {
        lex_int();
        continue;
      }
      if (c == '\'' || c == '"') {
        lex_string();
        continue;
      }
      lex_op();
    }
    if (depth_ > 0) fail("closing bracket");
    if (!tokens_.empty() && tokens_.back().kind != Tok::Newline &&
        tokens_.back().kind != Tok::Dedent) {
      push(Tok::Newline, "\\n", line_, col());
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(Tok::Dedent, "", line_, col());
    }
    push(Tok::End, "", line_, col());
    return std::move(tokens_);
  }

 private:
  int col() const { return static_cast<int>(pos_ - line_begin_) + 1; }

  [[noreturn]] void fail(std::string expected) const {
    throw SyntaxError(line_, col(), std::move(expected));
  }

  void push(Tok kind, std::string text, int line, int column) {
    tokens_.push_back(Token{kind, std::move(text), line, column});
  }

  void advance_line() {
    ++pos_;
    ++line_;
    line_begin_ = pos_;
    at_line_start_ = true;
  }

  // Measures indentation of a logical line. Returns true when the whole line
  // was consumed (blank or comment only).
  bool handle_line_start() {
    std::size_t p = pos_;
    int width = 0;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) {
      if (src_[p] == '\t') {
        pos_ = p;
        fail("spaces for indentation (tabs are not allowed)");
      }
      ++width;
      ++p;
    }
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#' || src_[p] == '\r') {
      while (p < src_.size() && src_[p] != '\n') ++p;
      pos_ = p;
      if (pos_ < src_.size()) advance_line();
      return true;
    }
    pos_ = p;
    at_line_start_ = false;
    if (width > indents_.back()) {
      if (tokens_.empty() || tokens_.back().kind != Tok::Newline ||
          !(tokens_.size() >= 2 && tokens_[tokens_.size() - 2].kind == Tok::Op &&
            tokens_[tokens_.size() - 2].text == ":")) {
        fail("no unexpected indentation");
      }
      indents_.push_back(width);
      push(Tok::Indent, "", line_, 1);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(Tok::Dedent, "", line_, 1);
      }
      if (width != indents_.back()) fail("indentation matching an enclosing block");
    }
    return false;
  }

  void lex_word() {
    int start_col = col();
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    std::string word(src_.substr(start, pos_ - start));
    if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') && word.size() <= 2) {
      std::string lower = word;
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      if (lower.find_first_not_of("rbuf") == std::string::npos) {
        pos_ = start;
        fail("plain string literal (string prefixes such as f-strings are not supported)");
      }
    }
    if (pos_ < src_.size() && static_cast<unsigned char>(src_[pos_]) >= 0x80) {
      fail("ASCII identifier");
    }
    if (is_unsupported(word)) {
      pos_ = start;
      fail("supported construct, found '" + word + "'");
    }
    const Tok kind = is_keyword(word) ? Tok::Keyword : Tok::Name;
    push(kind, std::move(word), line_, start_col);
  }

  void lex_int() {
    int start_col = col();
    std::size_t start = pos_;
    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && (ident_char(src_[pos_]) || src_[pos_] == '.')) {
      fail("integer literal (floats and suffixes are not supported)");
    }
    std::string digits(src_.substr(start, pos_ - start));
    if (digits.size() > 1 && digits[0] == '0') {
      pos_ = start;
      fail("integer without leading zeros");
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc()) {
      pos_ = start;
      fail("integer within 64-bit range");
    }
    push(Tok::Int, std::move(digits), line_, start_col);
  }

  static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  void lex_string() {
    int start_col = col();
    int start_line = line_;
    char quote = src_[pos_];
    if (src_.substr(pos_, 3) == std::string(3, quote)) fail("single-line string (triple quotes are not supported)");
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail("closing quote");
      char c = src_[pos_];
      if (c == quote) {
        ++pos_;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) fail("escape sequence");
        char e = src_[pos_ + 1];
        pos_ += 2;
        switch (e) {
          case '\\': value += '\\'; break;
          case '\'': value += '\''; break;
          case '"': value += '"'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          case '0': value += '\0'; break;
          case 'x': {
            int hi = pos_ < src_.size() ? hex_value(src_[pos_]) : -1;
            int lo = pos_ + 1 < src_.size() ? hex_value(src_[pos_ + 1]) : -1;
            if (hi < 0 || lo < 0) fail("two hex digits after \\x");
            int code = hi * 16 + lo;
            if (code >= 0x80) {
              value += static_cast<char>(0xC0 | (code >> 6));
              value += static_cast<char>(0x80 | (code & 0x3F));
            } else {
              value += static_cast<char>(code);
            }
            pos_ += 2;
            break;
          }
          case '\n': fail("no backslash line continuation");
          default:
            value += '\\';
            value += e;
        }
        continue;
      }
      value += c;
      ++pos_;
    }
    push(Tok::String, std::move(value), start_line, start_col);
  }

  void lex_op() {
    int start_col = col();
    static constexpr std::array two = {"==", "!=", "<=", ">="};
    for (const char* op : two) {
      if (src_.substr(pos_, 2) == op) {
        pos_ += 2;
        push(Tok::Op, op, line_, start_col);
        return;
      }
    }
    char c = src_[pos_];
    static constexpr std::string_view singles = "()[],:.=<>+-*";
    if (singles.find(c) == std::string_view::npos) fail("operator or delimiter");
    if (c == '(' || c == '[') ++depth_;
    if (c == ')' || c == ']') {
      if (depth_ == 0) fail("no unmatched closing bracket");
      --depth_;
    }
    ++pos_;
    push(Tok::Op, std::string(1, c), line_, start_col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_begin_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program prog;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Indent) fail("statement at the enclosing indentation");
      prog.statements.push_back(statement());
    }
    return prog;
  }

  Expr lone_expression() {
    Expr e = expression();
    if (peek().kind == Tok::Newline) next();
    if (peek().kind != Tok::End) fail("end of expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  bool at_op(std::string_view op) const {
    return peek().kind == Tok::Op && peek().text == op;
  }
  bool at_kw(std::string_view kw) const {
    return peek().kind == Tok::Keyword && peek().text == kw;
  }

  [[noreturn]] void fail(std::string expected) const {
    const Token& t = peek();
    std::string found;
    switch (t.kind) {
      case Tok::End: found = "end of input"; break;
      case Tok::Newline: found = "end of line"; break;
      case Tok::Indent: found = "indent"; break;
      case Tok::Dedent: found = "dedent"; break;
      case Tok::String: found = "string literal"; break;
      default: found = "'" + t.text + "'";
    }
    throw SyntaxError(t.line, t.column, expected + ", found " + found);
  }

  void expect_op(std::string_view op) {
    if (!at_op(op)) fail("'" + std::string(op) + "'");
    next();
  }
  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail("'" + std::string(kw) + "'");
    next();
  }
  void expect_newline() {
    if (peek().kind != Tok::Newline) fail("end of statement");
    next();
  }

  // -- statements ----------------------------------------------------------

  Stmt statement() {
    if (at_kw("for")) return for_statement();
    if (at_kw("while")) return while_statement();
    if (at_kw("with")) return with_statement();
    if (at_kw("if")) fail("supported statement ('if' statements are not supported)");
    Stmt s = simple_statement();
    expect_newline();
    return s;
  }

  std::vector<Stmt> block() {
    std::vector<Stmt> body;
    if (peek().kind != Tok::Newline) {
      body.push_back(simple_statement());
      expect_newline();
      return body;
    }
    next();
    if (peek().kind != Tok::Indent) fail("indented block");
    next();
    while (peek().kind != Tok::Dedent && peek().kind != Tok::End) {
      body.push_back(statement());
    }
    if (peek().kind == Tok::Dedent) next();
    return body;
  }

  std::vector<Stmt> else_block() {
    if (!at_kw("else")) return {};
    next();
    expect_op(":");
    return block();
  }

  Stmt for_statement() {
    expect_kw("for");
    AssignTarget target = target_list();
    expect_kw("in");
    Expr iter = expression();
    expect_op(":");
    auto body = block();
    auto orelse = else_block();
    return Stmt{For{std::move(target), std::move(iter), std::move(body), std::move(orelse)}};
  }

  Stmt while_statement() {
    expect_kw("while");
    Expr test = expression();
    expect_op(":");
    auto body = block();
    auto orelse = else_block();
    return Stmt{While{std::move(test), std::move(body), std::move(orelse)}};
  }

  Stmt with_statement() {
    expect_kw("with");
    std::vector<WithItem> items;
    do {
      Expr ctx = expression();
      std::optional<AssignTarget> bound;
      if (at_kw("as")) {
        next();
        bound = target_atom();
      }
      items.push_back(WithItem{std::move(ctx), std::move(bound)});
      if (!at_op(",")) break;
      next();
    } while (true);
    expect_op(":");
    auto body = block();
    return Stmt{With{std::move(items), std::move(body)}};
  }

  Stmt simple_statement() {
    const Token start = peek();
    std::vector<Expr> parts = expression_list();
    if (!at_op("=")) {
      if (parts.size() != 1) {
        throw SyntaxError(start.line, start.column, "single expression (tuples are not supported)");
      }
      return Stmt{ExprStmt{std::move(parts.front())}};
    }
    std::vector<AssignTarget> targets;
    std::vector<Expr> value = std::move(parts);
    const Token* value_start = &start;
    while (at_op("=")) {
      targets.push_back(to_target(value, *value_start));
      next();
      value_start = &peek();
      value = expression_list();
    }
    if (value.size() != 1) {
      throw SyntaxError(value_start->line, value_start->column,
                        "single expression on the right of '=' (tuples are not supported)");
    }
    return Stmt{Assign{std::move(targets), std::move(value.front())}};
  }

  std::vector<Expr> expression_list() {
    std::vector<Expr> parts;
    parts.push_back(expression());
    while (at_op(",")) {
      next();
      if (at_op("=") || peek().kind == Tok::Newline) break;
      parts.push_back(expression());
    }
    return parts;
  }

  static AssignTarget expr_to_target(const Expr& e, const Token& at) {
    if (const auto* n = e.get_if<Name>()) return AssignTarget{NameTarget{n->id}};
    throw SyntaxError(at.line, at.column, "assignable name on the left of '='");
  }

  static AssignTarget to_target(const std::vector<Expr>& parts, const Token& at) {
    if (parts.size() == 1) return expr_to_target(parts.front(), at);
    TupleTarget tuple;
    for (const auto& p : parts) tuple.elements.push_back(expr_to_target(p, at));
    return AssignTarget{std::move(tuple)};
  }

  // NAME | '(' target_list ')'
  AssignTarget target_atom() {
    if (at_op("(")) {
      next();
      AssignTarget inner = target_list();
      expect_op(")");
      if (!std::holds_alternative<TupleTarget>(inner.node)) fail("tuple of names inside parentheses");
      return inner;
    }
    if (peek().kind != Tok::Name) fail("target name");
    return AssignTarget{NameTarget{next().text}};
  }

  AssignTarget target_list() {
    AssignTarget first = target_atom();
    if (!at_op(",")) return first;
    TupleTarget tuple;
    tuple.elements.push_back(std::move(first));
    while (at_op(",")) {
      next();
      if (at_kw("in") || at_op(")")) break;
      tuple.elements.push_back(target_atom());
    }
    if (tuple.elements.size() < 2) fail("at least two names in a tuple target");
    return AssignTarget{std::move(tuple)};
  }

  // -- expressions ---------------------------------------------------------

  Expr expression() {
    Expr then = or_test();
    if (!at_kw("if")) return then;
    next();
    Expr test = or_test();
    expect_kw("else");
    Expr otherwise = expression();
    return Expr{Conditional{std::move(then), std::move(test), std::move(otherwise)}};
  }

  Expr or_test() {
    Expr first = and_test();
    if (!at_kw("or")) return first;
    std::vector<Expr> ops;
    ops.push_back(std::move(first));
    while (at_kw("or")) {
      next();
      ops.push_back(and_test());
    }
    return Expr{BoolOp{LogicOp::Or, std::move(ops)}};
  }

  Expr and_test() {
    Expr first = not_test();
    if (!at_kw("and")) return first;
    std::vector<Expr> ops;
    ops.push_back(std::move(first));
    while (at_kw("and")) {
      next();
      ops.push_back(not_test());
    }
    return Expr{BoolOp{LogicOp::And, std::move(ops)}};
  }

  Expr not_test() {
    if (at_kw("not")) {
      next();
      return Expr{Not{not_test()}};
    }
    return comparison();
  }

  std::optional<CmpOp> comparison_op() const {
    if (peek().kind != Tok::Op) {
      if (at_kw("in") || at_kw("not")) return std::nullopt;
      return std::nullopt;
    }
    const std::string& t = peek().text;
    if (t == "==") return CmpOp::Eq;
    if (t == "!=") return CmpOp::NotEq;
    if (t == "<") return CmpOp::Lt;
    if (t == "<=") return CmpOp::LtE;
    if (t == ">") return CmpOp::Gt;
    if (t == ">=") return CmpOp::GtE;
    return std::nullopt;
  }

  Expr comparison() {
    Expr left = arith();
    auto op = comparison_op();
    if (!op) return left;
    next();
    Expr right = arith();
    if (comparison_op()) fail("end of comparison (chained comparisons are not supported)");
    return Expr{Compare{std::move(left), *op, std::move(right)}};
  }

  Expr arith() {
    Expr left = term();
    while (at_op("+") || at_op("-")) {
      ArithOp op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
      Expr right = term();
      left = Expr{BinOp{std::move(left), op, std::move(right)}};
    }
    return left;
  }

  Expr term() {
    Expr left = unary();
    while (at_op("*")) {
      next();
      Expr right = unary();
      left = Expr{BinOp{std::move(left), ArithOp::Mul, std::move(right)}};
    }
    return left;
  }

  Expr unary() {
    if (!at_op("-")) return postfix();
    const Token minus = next();
    Expr operand = unary();
    auto* lit = operand.get_if<Int>();
    if (lit == nullptr || lit->value < 0) {
      throw SyntaxError(minus.line, minus.column, "integer literal after unary '-'");
    }
    lit->value = -lit->value;
    return operand;
  }

  Expr postfix() {
    Expr e = atom();
    while (true) {
      if (at_op(".")) {
        next();
        if (peek().kind != Tok::Name) fail("attribute or method name");
        std::string member = next().text;
        if (at_op("(")) {
          auto args = call_args();
          e = Expr{MethodCall{std::move(e), std::move(member), std::move(args)}};
        } else {
          e = Expr{Attribute{std::move(e), std::move(member)}};
        }
      } else if (at_op("[")) {
        next();
        Expr idx = expression();
        expect_op("]");
        e = Expr{Index{std::move(e), std::move(idx)}};
      } else if (at_op("(")) {
        fail("call on a plain function name");
      } else {
        return e;
      }
    }
  }

  std::vector<Expr> call_args() {
    expect_op("(");
    std::vector<Expr> args;
    if (at_op(")")) {
      next();
      return args;
    }
    Expr first = expression();
    if (at_kw("for")) {
      auto gens = comp_for();
      expect_op(")");
      args.push_back(Expr{Comprehension{CompKind::Generator, std::move(first), std::move(gens)}});
      return args;
    }
    args.push_back(std::move(first));
    while (at_op(",")) {
      next();
      if (at_op(")")) break;
      args.push_back(expression());
    }
    if (at_op("=")) fail("positional argument (keyword arguments are not supported)");
    expect_op(")");
    return args;
  }

  std::vector<Generator> comp_for() {
    std::vector<Generator> gens;
    while (at_kw("for")) {
      next();
      AssignTarget target = target_list();
      expect_kw("in");
      Expr iter = or_test();
      std::vector<Expr> conds;
      while (at_kw("if")) {
        next();
        conds.push_back(or_test());
      }
      gens.push_back(Generator{std::move(target), std::move(iter), std::move(conds)});
    }
    return gens;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Name: {
        std::string id = next().text;
        if (at_op("(")) {
          auto args = call_args();
          return Expr{Call{std::move(id), std::move(args)}};
        }
        return Expr{Name{std::move(id)}};
      }
      case Tok::Int: {
        std::int64_t v = 0;
        const std::string& digits = next().text;
        std::from_chars(digits.data(), digits.data() + digits.size(), v);
        return Expr{Int{v}};
      }
      case Tok::String: {
        std::string v = next().text;
        if (peek().kind == Tok::String) fail("operator (implicit string concatenation is not supported)");
        return Expr{Str{std::move(v)}};
      }
      case Tok::Keyword:
        if (t.text == "True" || t.text == "False") {
          bool v = next().text == "True";
          return Expr{BoolLit{v}};
        }
        fail("expression");
      case Tok::Op:
        if (t.text == "[") return list_display();
        if (t.text == "(") return parenthesized();
        fail("expression");
      default:
        fail("expression");
    }
  }

  Expr list_display() {
    expect_op("[");
    std::vector<Expr> elements;
    if (at_op("]")) {
      next();
      return Expr{ListLit{}};
    }
    Expr first = expression();
    if (at_kw("for")) {
      auto gens = comp_for();
      expect_op("]");
      return Expr{Comprehension{CompKind::List, std::move(first), std::move(gens)}};
    }
    elements.push_back(std::move(first));
    while (at_op(",")) {
      next();
      if (at_op("]")) break;
      elements.push_back(expression());
    }
    expect_op("]");
    return Expr{ListLit{std::move(elements)}};
  }

  Expr parenthesized() {
    expect_op("(");
    if (at_op(")")) fail("expression (tuples are not supported)");
    Expr inner = expression();
    if (at_kw("for")) {
      auto gens = comp_for();
      expect_op(")");
      return Expr{Comprehension{CompKind::Generator, std::move(inner), std::move(gens)}};
    }
    if (at_op(",")) fail("')' (tuples are not supported)");
    expect_op(")");
    return inner;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view source) {
  Parser parser(Lexer(source).run());
  return parser.program();
}

Expr parse_expression(std::string_view source) {
  Parser parser(Lexer(source).run());
  return parser.lone_expression();
}

}  // namespace vpd
