#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vpd/ast.hpp"

namespace vpd {

/// Names that keep their spelling through variable renaming.
inline const std::set<std::string>& default_skip_names() {
  static const std::set<std::string> names{"image_patch", "answer"};
  return names;
}

/// Canonical variable renaming.
///
/// Assignment targets become var1, var2, ... in visit order (right-hand side
/// first). Loop, comprehension and `with` targets become temp_var_1, ... and
/// every occurrence of the old name inside that construct's scope is rewritten.
/// Both counters run over the whole program. Names in `skip` are untouched.
Program rename_variables(Program program,
                         const std::set<std::string>& skip = default_skip_names());

/// Placeholder text for slot `i`: `<arg_i>`.
std::string placeholder(std::size_t i);

class Template {
 public:
  Template() = default;
  explicit Template(Program body);

  const Program& body() const noexcept { return body_; }
  /// Canonical text of the abstracted body; template identity.
  const std::string& text() const noexcept { return text_; }
  std::size_t slot_count() const noexcept { return slot_count_; }
  const std::vector<std::string>& signature() const noexcept { return signature_; }
  /// Stable identifier derived from `text()`.
  std::string id() const;

  friend bool operator==(const Template& a, const Template& b) { return a.text_ == b.text_; }

 private:
  Program body_;
  std::string text_;
  std::size_t slot_count_ = 0;
  std::vector<std::string> signature_;
};

struct ArgBinding {
  std::vector<std::string> values;
  /// Partition of slot indices by equal value, ordered by first index.
  std::vector<std::vector<std::size_t>> link_groups;

  static ArgBinding from_values(std::vector<std::string> values);
  bool operator==(const ArgBinding&) const = default;
};

struct TemplateRecord {
  std::string question;
  Template tmpl;
  ArgBinding args;
  std::string source_id;
};

class ArityMismatch : public std::invalid_argument {
 public:
  ArityMismatch(std::size_t expected, std::size_t actual);
};

struct Abstraction {
  Template tmpl;
  ArgBinding args;
};

/// Replaces each argument-position string literal with `<arg_i>`.
/// Expects an already renamed program.
Abstraction abstract_arguments(const Program& program);

/// parse -> rename_variables -> abstract_arguments.
TemplateRecord extract(std::string question, std::string_view program_source,
                       std::string source_id = {});

/// Fills the template's slots and returns canonical program text.
std::string instantiate(const Template& tmpl, const ArgBinding& args);
std::string instantiate(const Template& tmpl, const std::vector<std::string>& values);

}  // namespace vpd
