#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vpd/ast.hpp"
#include "vpd/scene.hpp"

namespace vpd {

/// Runtime image region. Fallback patches stand in for "nothing detected":
/// they cover the whole image and carry no object.
struct Patch {
  BBox region;
  std::optional<std::string> object;
  bool fallback = false;
  bool operator==(const Patch&) const = default;
};

/// The `image` binding seen by programs.
struct ImageRef {
  bool operator==(const ImageRef&) const = default;
};

struct Value;
using List = std::vector<Value>;

struct Value {
  std::variant<ImageRef, bool, std::int64_t, std::string, Patch, List> v;

  const char* type_name() const;
};

enum class FailureKind { SyntaxError, NameError, TypeError, ArityError, DomainError, StepLimit, NoAnswer };

const char* to_string(FailureKind kind);

/// Thrown inside the interpreter and by SceneApi; run() converts it to a
/// Failure outcome.
class ExecError : public std::runtime_error {
 public:
  ExecError(FailureKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  FailureKind kind() const noexcept { return kind_; }

 private:
  FailureKind kind_;
};

struct Answer {
  std::string text;
  bool operator==(const Answer&) const = default;
};

struct Failure {
  FailureKind kind = FailureKind::NoAnswer;
  std::string message;
  /// Top-level statement being executed; statement count when the failure
  /// happened after the last statement; -1 for parse failures.
  int statement_index = -1;
  bool operator==(const Failure&) const = default;
};

struct ExecOutcome {
  std::variant<Answer, Failure> result;

  bool ok() const { return std::holds_alternative<Answer>(result); }
  const std::string& answer() const { return std::get<Answer>(result).text; }
  const Failure& failure() const { return std::get<Failure>(result); }
  /// The answer text, or "<Kind>: message" for failures.
  std::string describe() const;
  bool operator==(const ExecOutcome&) const = default;
};

struct ExecLimits {
  std::size_t step_budget = 10'000;
  std::string unknown_token = "unknown";
};

inline const std::vector<std::string>& crop_directions() {
  static const std::vector<std::string> dirs{"left",   "right", "above",   "below", "on",
                                             "in front", "behind", "next to", "near"};
  return dirs;
}

/// The image API over a scene graph. Calls that break a contract throw
/// ExecError with the matching FailureKind.
class SceneApi {
 public:
  explicit SceneApi(const SceneGraph& scene, std::string unknown_token = "unknown");

  const SceneGraph& scene() const noexcept { return *scene_; }
  Patch root() const;
  Patch fallback() const;
  Patch object_patch(const SceneObject& obj) const;

  /// Objects named `name` centered in `patch`, ordered by (left, lower, id);
  /// a single fallback patch when nothing matches.
  std::vector<Patch> find(const Patch& patch, std::string_view name) const;
  Patch crop_position(const Patch& patch, std::string_view direction, const Patch& reference) const;
  bool verify_property(const Patch& patch, std::string_view property) const;
  std::string classify(const Patch& patch, const std::vector<std::string>& options) const;
  std::string classify(const Patch& patch, std::string_view category) const;
  std::string simple_query(const Patch& patch, std::string_view question) const;
  std::vector<Patch> filter_img(const std::vector<Patch>& patches, std::string_view criteria) const;
  bool exists(const std::vector<Patch>& patches) const;
  std::int64_t count(const std::vector<Patch>& patches) const;
  std::string choose_relationship(const Patch& a, const Patch& b, const std::vector<std::string>& options) const;
  std::string verify_relationship(const Patch& a, const Patch& b, std::string_view relation) const;
  /// True when `relation` holds from `a` to `b`.
  bool holds(const Patch& a, const Patch& b, std::string_view relation) const;

 private:
  std::vector<const SceneObject*> objects_in(const BBox& region) const;
  std::vector<std::string> attribute_values(const Patch& patch) const;

  const SceneGraph* scene_;
  std::string unknown_;
};

std::string bool_to_yesno(bool value);

/// Executes `program` against `scene` and returns the stringified `answer`.
ExecOutcome run(const Program& program, const SceneGraph& scene, const ExecLimits& limits = {});

/// Parses then runs; parse errors become Failure{SyntaxError}.
ExecOutcome run_source(std::string_view source, const SceneGraph& scene, const ExecLimits& limits = {});

}  // namespace vpd
