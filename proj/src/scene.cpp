#include "vpd/scene.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "vpd/io_error.hpp"
#include "vpd/text.hpp"

namespace vpd {

using nlohmann::json;

bool BBox::contains_center_of(const BBox& other) const {
  const double cx = other.center_x();
  const double cy = other.center_y();
  return left <= cx && cx <= right && lower <= cy && cy <= upper;
}

bool SceneObject::is_called(std::string_view noun) const {
  const std::string folded = text::case_fold(text::trim(noun));
  if (folded.empty()) return false;
  if (text::case_fold(name) == folded) return true;
  for (const auto& s : synonyms) {
    if (text::case_fold(s) == folded) return true;
  }
  return false;
}

bool SceneObject::has_attribute(std::string_view value) const {
  const std::string folded = text::case_fold(text::trim(value));
  for (const auto& a : attributes) {
    if (text::case_fold(a.value) == folded) return true;
  }
  return false;
}

const SceneObject* SceneGraph::object(std::string_view id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

bool SceneGraph::related(std::string_view subject, std::string_view predicate,
                         std::string_view object) const {
  const std::string pred = text::normalize(predicate);
  for (const auto& r : relations) {
    if (r.subject == subject && r.object == object && text::normalize(r.predicate) == pred) return true;
  }
  return false;
}

void SceneGraph::validate() const {
  if (width <= 0 || height <= 0) throw SceneError("scene " + scene_id + ": non-positive image size");
  std::set<std::string> ids;
  for (const auto& o : objects) {
    if (!ids.insert(o.id).second) throw SceneError("scene " + scene_id + ": duplicate object id " + o.id);
    const BBox& b = o.bbox;
    if (!(b.left < b.right && b.lower < b.upper)) {
      throw SceneError("scene " + scene_id + ": degenerate bbox for object " + o.id);
    }
    if (b.left < 0 || b.lower < 0 || b.right > width || b.upper > height) {
      throw SceneError("scene " + scene_id + ": bbox outside image for object " + o.id);
    }
    std::set<std::string> values;
    for (const auto& a : o.attributes) {
      if (!values.insert(text::case_fold(a.value)).second) {
        throw SceneError("scene " + scene_id + ": repeated attribute '" + a.value + "' on object " + o.id);
      }
    }
  }
  for (const auto& r : relations) {
    if (!ids.count(r.subject) || !ids.count(r.object)) {
      throw SceneError("scene " + scene_id + ": relation references unknown object");
    }
  }
}

namespace {

std::string id_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw SceneError("object id must be a string or integer");
}

}  // namespace

SceneGraph scene_from_json(const json& j) {
  try {
    SceneGraph s;
    s.scene_id = id_string(j.at("scene_id"));
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    for (const auto& o : j.value("objects", json::array())) {
      SceneObject obj;
      obj.id = id_string(o.at("id"));
      obj.name = o.at("name").get<std::string>();
      obj.synonyms = o.value("synonyms", std::vector<std::string>{});
      const auto& b = o.at("bbox");
      if (!b.is_array() || b.size() != 4) throw SceneError("bbox must be [left, lower, right, upper]");
      obj.bbox = BBox{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
      for (const auto& a : o.value("attributes", json::array())) {
        if (!a.is_array() || a.size() != 2) throw SceneError("attribute must be [value, category]");
        obj.attributes.push_back({a[0].get<std::string>(), a[1].get<std::string>()});
      }
      s.objects.push_back(std::move(obj));
    }
    for (const auto& r : j.value("relations", json::array())) {
      if (!r.is_array() || r.size() != 3) throw SceneError("relation must be [subject, predicate, object]");
      s.relations.push_back({id_string(r[0]), r[1].get<std::string>(), id_string(r[2])});
    }
    for (const auto& qa : j.value("qa", json::array())) {
      if (!qa.is_array() || qa.size() != 2) throw SceneError("qa entry must be [question, answer]");
      s.qa_oracle[text::normalize(qa[0].get<std::string>())] = qa[1].get<std::string>();
    }
    return s;
  } catch (const json::exception& e) {
    throw SceneError(std::string("malformed scene: ") + e.what());
  }
}

json scene_to_json(const SceneGraph& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    json attrs = json::array();
    for (const auto& a : o.attributes) attrs.push_back({a.value, a.category});
    objects.push_back({{"id", o.id},
                       {"name", o.name},
                       {"synonyms", o.synonyms},
                       {"bbox", {o.bbox.left, o.bbox.lower, o.bbox.right, o.bbox.upper}},
                       {"attributes", attrs}});
  }
  json relations = json::array();
  for (const auto& r : scene.relations) relations.push_back({r.subject, r.predicate, r.object});
  json qa = json::array();
  for (const auto& [q, a] : scene.qa_oracle) qa.push_back({q, a});
  return json{{"scene_id", scene.scene_id},
              {"width", scene.width},
              {"height", scene.height},
              {"objects", objects},
              {"relations", relations},
              {"qa", qa}};
}

std::map<std::string, SceneGraph> load_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  std::map<std::string, SceneGraph> scenes;
  auto add = [&](const json& j) {
    SceneGraph s = scene_from_json(j);
    s.validate();
    std::string id = s.scene_id;
    if (!scenes.emplace(id, std::move(s)).second) throw SceneError("duplicate scene id " + id);
  };

  json whole = json::parse(content, nullptr, false);
  if (!whole.is_discarded()) {
    if (whole.is_array()) {
      for (const auto& j : whole) add(j);
    } else {
      add(whole);
    }
    return scenes;
  }
  std::istringstream lines(content);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw SceneError(path + ":" + std::to_string(lineno) + ": invalid JSON");
    }
    add(j);
  }
  return scenes;
}

void save_scenes_jsonl(const std::string& path, const std::vector<SceneGraph>& scenes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene file " + path);
  for (const auto& s : scenes) out << scene_to_json(s).dump() << '\n';
}

}  // namespace vpd
