#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace vpd {

/// Axis-aligned box in image coordinates; `upper` > `lower`.
struct BBox {
  int left = 0;
  int lower = 0;
  int right = 0;
  int upper = 0;

  double center_x() const { return (left + right) / 2.0; }
  double center_y() const { return (lower + upper) / 2.0; }
  /// Closed-interval test on the center of `other`.
  bool contains_center_of(const BBox& other) const;
  bool operator==(const BBox&) const = default;
};

struct ObjectAttribute {
  std::string value;
  std::string category;
  bool operator==(const ObjectAttribute&) const = default;
};

struct SceneObject {
  std::string id;
  std::string name;
  std::vector<std::string> synonyms;
  BBox bbox;
  std::vector<ObjectAttribute> attributes;

  /// Case-folded comparison against the name and synonyms.
  bool is_called(std::string_view noun) const;
  bool has_attribute(std::string_view value) const;
  bool operator==(const SceneObject&) const = default;
};

struct Relation {
  std::string subject;
  std::string predicate;
  std::string object;
  bool operator==(const Relation&) const = default;
};

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SceneGraph {
  std::string scene_id;
  int width = 0;
  int height = 0;
  std::vector<SceneObject> objects;
  std::vector<Relation> relations;
  /// Keys are normalized question text.
  std::map<std::string, std::string> qa_oracle;

  BBox full_image() const { return BBox{0, 0, width, height}; }
  const SceneObject* object(std::string_view id) const;
  bool related(std::string_view subject, std::string_view predicate, std::string_view object) const;

  /// Throws SceneError if ids repeat, relations dangle, boxes are
  /// degenerate or leave the image, or attribute values repeat per object.
  void validate() const;

  bool operator==(const SceneGraph&) const = default;
};

SceneGraph scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneGraph& scene);

/// Reads a file holding one JSON scene or JSON Lines of scenes, keyed by
/// scene_id. Every scene is validated.
std::map<std::string, SceneGraph> load_scenes(const std::string& path);
void save_scenes_jsonl(const std::string& path, const std::vector<SceneGraph>& scenes);

}  // namespace vpd
