#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpd/dataset.hpp"
#include "vpd/scene.hpp"

namespace vpd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Family { Existence, Count, AttributeQuery, SameAttribute, RelationChoose, PositionalExistence };

const char* to_string(Family family);
Family family_from_string(std::string_view name);
const std::vector<Family>& all_families();

struct BenchmarkConfig {
  std::size_t n_scenes = 200;
  std::size_t min_objects = 3;
  std::size_t max_objects = 8;
  std::vector<std::string> nouns;
  /// Category name to values, e.g. "color" -> {"red", "blue"}.
  std::map<std::string, std::vector<std::string>> attributes;
  std::vector<std::string> relations;
  std::map<Family, double> family_weights;
  std::size_t questions_per_scene = 5;
  /// Chance that an existence question names an attribute.
  double existence_attribute_probability = 0.5;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;

  /// Throws ConfigError on empty vocabularies, bad weights, or a family
  /// that no scene could support.
  void validate() const;
};

/// Vocabulary drawn from the bundled lexicon, with all six families.
BenchmarkConfig default_benchmark_config();

/// Parameters of one generated question.
struct QuestionSpec {
  Family family = Family::Existence;
  std::string noun;
  std::string other_noun;
  std::string attribute;
  std::string category;
  /// Positional direction, or the first option of a relation choice.
  std::string direction;
};

std::string question_text(const QuestionSpec& spec);
/// Canonical gold program for the question.
std::string gold_program(const QuestionSpec& spec);

/// Answer computed directly from the scene graph with set semantics,
/// without going through the program interpreter.
std::string reference_answer(const QuestionSpec& spec, const SceneGraph& scene);

struct BenchItem {
  DatasetRecord record;
  std::string program;
  QuestionSpec spec;
};

struct Benchmark {
  std::vector<SceneGraph> scenes;
  std::vector<BenchItem> items;

  std::vector<DatasetRecord> records() const;
  std::map<std::string, SceneGraph> scene_map() const;
};

/// Deterministic under config.seed. Each answer is the gold program's
/// execution result; a disagreement with reference_answer is a logic_error.
Benchmark gen_bench(const BenchmarkConfig& config);

}  // namespace vpd
