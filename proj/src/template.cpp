#include "vpd/template.hpp"

#include <map>
#include <utility>

#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/slots.hpp"
#include "vpd/text.hpp"

namespace vpd {

namespace {

// Replaces every occurrence of one identifier (loads, stores and callee
// names) inside a subtree.
class NameReplacer {
 public:
  NameReplacer(const std::string& from, const std::string& to) : from_(from), to_(to) {}

  void target(AssignTarget& t) const {
    if (auto* n = std::get_if<NameTarget>(&t.node)) {
      if (n->id == from_) n->id = to_;
    } else {
      for (auto& e : std::get<TupleTarget>(t.node).elements) target(e);
    }
  }

  void stmt(Stmt& s) const {
    std::visit(
        [this](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            for (auto& t : n.targets) target(t);
            expr(n.value);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, For>) {
            target(n.target);
            expr(n.iter);
            for (auto& b : n.body) stmt(b);
            for (auto& b : n.orelse) stmt(b);
          } else if constexpr (std::is_same_v<T, While>) {
            expr(n.test);
            for (auto& b : n.body) stmt(b);
            for (auto& b : n.orelse) stmt(b);
          } else if constexpr (std::is_same_v<T, With>) {
            for (auto& item : n.items) {
              expr(item.context);
              if (item.bound) target(*item.bound);
            }
            for (auto& b : n.body) stmt(b);
          }
        },
        s.node);
  }

  void expr(Expr& e) const {
    std::visit(
        [this](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Name>) {
            if (n.id == from_) n.id = to_;
          } else if constexpr (std::is_same_v<T, ListLit>) {
            for (auto& x : n.elements) expr(x);
          } else if constexpr (std::is_same_v<T, Call>) {
            if (n.callee == from_) n.callee = to_;
            for (auto& x : n.args) expr(x);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            expr(*n.receiver);
            for (auto& x : n.args) expr(x);
          } else if constexpr (std::is_same_v<T, Attribute>) {
            expr(*n.receiver);
          } else if constexpr (std::is_same_v<T, Index>) {
            expr(*n.receiver);
            expr(*n.index);
          } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, BinOp>) {
            expr(*n.left);
            expr(*n.right);
          } else if constexpr (std::is_same_v<T, BoolOp>) {
            for (auto& x : n.operands) expr(x);
          } else if constexpr (std::is_same_v<T, Not>) {
            expr(*n.operand);
          } else if constexpr (std::is_same_v<T, Conditional>) {
            expr(*n.test);
            expr(*n.then);
            expr(*n.otherwise);
          } else if constexpr (std::is_same_v<T, Comprehension>) {
            expr(*n.element);
            for (auto& g : n.generators) {
              target(g.target);
              expr(*g.iter);
              for (auto& c : g.conditions) expr(c);
            }
          }
        },
        e.node);
  }

 private:
  const std::string& from_;
  const std::string& to_;
};

class Renamer {
 public:
  explicit Renamer(const std::set<std::string>& skip) : skip_(skip) {}

  void program(Program& p) {
    for (auto& s : p.statements) stmt(s);
  }

 private:
  std::string new_name() { return "var" + std::to_string(counter_++); }
  std::string new_temp_name() { return "temp_var_" + std::to_string(temp_counter_++); }
  bool skipped(const std::string& id) const { return skip_.count(id) != 0; }

  void rename_target(AssignTarget& t) {
    if (auto* n = std::get_if<NameTarget>(&t.node)) {
      if (skipped(n->id)) return;
      auto it = name_map_.find(n->id);
      if (it == name_map_.end()) it = name_map_.emplace(n->id, new_name()).first;
      n->id = it->second;
    } else {
      for (auto& e : std::get<TupleTarget>(t.node).elements) rename_target(e);
    }
  }

  // Plain name lookup through the assignment map.
  void map_name(std::string& id) const {
    if (skipped(id)) return;
    if (auto it = name_map_.find(id); it != name_map_.end()) id = it->second;
  }

  // If `t` is a single renamable name, gives it a fresh temp name and
  // returns the (old, new) pair.
  std::optional<std::pair<std::string, std::string>> take_temp(AssignTarget& t) {
    auto* n = std::get_if<NameTarget>(&t.node);
    if (n == nullptr || skipped(n->id)) return std::nullopt;
    std::string old = n->id;
    n->id = new_temp_name();
    return std::make_pair(std::move(old), n->id);
  }

  void block(std::vector<Stmt>& body, const std::optional<std::pair<std::string, std::string>>& scoped) {
    for (auto& s : body) {
      stmt(s);
      if (scoped) NameReplacer(scoped->first, scoped->second).stmt(s);
    }
  }

  void stmt(Stmt& s) {
    std::visit(
        [this](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            expr(n.value);
            for (auto& t : n.targets) rename_target(t);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, For>) {
            auto scoped = take_temp(n.target);
            if (!scoped) rename_target(n.target);
            expr(n.iter);
            block(n.body, scoped);
            block(n.orelse, scoped);
          } else if constexpr (std::is_same_v<T, While>) {
            expr(n.test);
            block(n.body, std::nullopt);
            block(n.orelse, std::nullopt);
          } else if constexpr (std::is_same_v<T, With>) {
            std::vector<std::pair<std::string, std::string>> scoped;
            for (auto& item : n.items) {
              if (item.bound) {
                if (auto renamed = take_temp(*item.bound)) {
                  scoped.push_back(std::move(*renamed));
                } else {
                  rename_target(*item.bound);
                }
              }
              expr(item.context);
            }
            for (auto& b : n.body) {
              stmt(b);
              for (const auto& [from, to] : scoped) NameReplacer(from, to).stmt(b);
            }
          }
        },
        s.node);
  }

  void comprehension(Comprehension& c) {
    auto& gens = c.generators;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (auto scoped = take_temp(gens[i].target)) {
        NameReplacer replace(scoped->first, scoped->second);
        replace.expr(*c.element);
        for (std::size_t j = i; j < gens.size(); ++j) {
          for (auto& cond : gens[j].conditions) replace.expr(cond);
          if (j > i) replace.expr(*gens[j].iter);
        }
        for (auto& g : gens) replace.target(g.target);
      } else {
        rename_target(gens[i].target);
      }
      expr(*gens[i].iter);
    }
    expr(*c.element);
    for (auto& g : gens) {
      for (auto& cond : g.conditions) expr(cond);
    }
  }

  void expr(Expr& e) {
    std::visit(
        [this](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Name>) {
            map_name(n.id);
          } else if constexpr (std::is_same_v<T, ListLit>) {
            for (auto& x : n.elements) expr(x);
          } else if constexpr (std::is_same_v<T, Call>) {
            map_name(n.callee);
            for (auto& x : n.args) expr(x);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            expr(*n.receiver);
            for (auto& x : n.args) expr(x);
          } else if constexpr (std::is_same_v<T, Attribute>) {
            expr(*n.receiver);
          } else if constexpr (std::is_same_v<T, Index>) {
            expr(*n.receiver);
            expr(*n.index);
          } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, BinOp>) {
            expr(*n.left);
            expr(*n.right);
          } else if constexpr (std::is_same_v<T, BoolOp>) {
            for (auto& x : n.operands) expr(x);
          } else if constexpr (std::is_same_v<T, Not>) {
            expr(*n.operand);
          } else if constexpr (std::is_same_v<T, Conditional>) {
            expr(*n.test);
            expr(*n.then);
            expr(*n.otherwise);
          } else if constexpr (std::is_same_v<T, Comprehension>) {
            comprehension(n);
          }
        },
        e.node);
  }

  const std::set<std::string>& skip_;
  int counter_ = 1;
  int temp_counter_ = 1;
  std::map<std::string, std::string> name_map_;
};

}  // namespace

Program rename_variables(Program program, const std::set<std::string>& skip) {
  Renamer(skip).program(program);
  return program;
}

std::string placeholder(std::size_t i) { return "<arg_" + std::to_string(i) + ">"; }

Template::Template(Program body)
    : body_(std::move(body)),
      text_(print_canonical(body_)),
      slot_count_(string_literal_slots(body_).size()),
      signature_(call_signature(body_)) {}

std::string Template::id() const { return "t" + text::hex64(text::fnv1a64(text_)); }

ArgBinding ArgBinding::from_values(std::vector<std::string> values) {
  ArgBinding b;
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [it, fresh] = group_of.emplace(values[i], b.link_groups.size());
    if (fresh) b.link_groups.emplace_back();
    b.link_groups[it->second].push_back(i);
  }
  b.values = std::move(values);
  return b;
}

ArityMismatch::ArityMismatch(std::size_t expected, std::size_t actual)
    : std::invalid_argument("template has " + std::to_string(expected) + " slots but binding has " +
                            std::to_string(actual) + " values") {}

Abstraction abstract_arguments(const Program& program) {
  auto slots = string_literal_slots(program);
  std::vector<std::string> values;
  std::vector<std::string> holes;
  values.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    values.push_back(std::move(slots[i].value));
    holes.push_back(placeholder(i));
  }
  return Abstraction{Template(substitute_slots(program, holes)), ArgBinding::from_values(std::move(values))};
}

TemplateRecord extract(std::string question, std::string_view program_source, std::string source_id) {
  auto abstraction = abstract_arguments(rename_variables(parse(program_source)));
  return TemplateRecord{std::move(question), std::move(abstraction.tmpl), std::move(abstraction.args),
                        std::move(source_id)};
}

std::string instantiate(const Template& tmpl, const std::vector<std::string>& values) {
  if (values.size() != tmpl.slot_count()) throw ArityMismatch(tmpl.slot_count(), values.size());
  return print_canonical(substitute_slots(tmpl.body(), values));
}

std::string instantiate(const Template& tmpl, const ArgBinding& args) {
  return instantiate(tmpl, args.values);
}

}  // namespace vpd
