#pragma once

#include <string>
#include <vector>

#include "vpd/scene.hpp"

namespace fixtures {

inline const std::string kDogProgram =
    "image_patch = ImagePatch(image)\n"
    "dog = image_patch.find('dog')\n"
    "answer = dog.classify('color')";

/// Same-color template program, indexed so classify receives a patch.
inline const std::string kSameColorProgram =
    "image_patch = ImagePatch(image)\n"
    "cat = image_patch.find('cat')[0]\n"
    "cat_color = cat.classify('color')\n"
    "tshirt = image_patch.find('tshirt')[0]\n"
    "tshirt_color = tshirt.classify('color')\n"
    "answer = bool_to_yesno(cat_color == tshirt_color)";
inline const std::string kSameColorQuestion = "Are the cat and the tshirt the same color?";

// Error-taxonomy exemplars, one documented flag each.
struct Exemplar {
  const char* label;
  std::string question;
  std::string program;
};

inline const std::vector<Exemplar>& error_exemplars() {
  static const std::vector<Exemplar> v{
      {"NotExecutable", "Is the chair left or right?",
       "image_patch = ImagePatch(image)\n"
       "chair = image_patch.find('chair')[0]\n"
       "side = choose_relationship(chair, image_patch, 'left or right')\n"
       "answer = side"},
      {"ApiViolation", "What color is the running dog on the left?",
       "image_patch = ImagePatch(image)\n"
       "left_side = image_patch.crop_position('running left', image_patch)\n"
       "dog = left_side.find('dog')[0]\n"
       "answer = dog.classify('color')"},
      {"ContradictsQuestion", "What color is the car above the road?",
       "image_patch = ImagePatch(image)\n"
       "road = image_patch.find('road')[0]\n"
       "below_road = road.crop_position('below', road)\n"
       "car = below_road.find('car')[0]\n"
       "answer = car.classify('color')"},
      {"DoesNotAnswerQuestion", "Are there two tables?",
       "image_patch = ImagePatch(image)\n"
       "tables = image_patch.find('table')\n"
       "num = count(tables)\n"
       "answer = str(num)"},
      {"MissingQuestionInformation", "Is the blue toy small?",
       "image_patch = ImagePatch(image)\n"
       "toy = image_patch.find('toy')[0]\n"
       "is_small = toy.verify_property('small')\n"
       "answer = bool_to_yesno(is_small)"},
  };
  return v;
}

inline vpd::SceneObject object(std::string id, std::string name, vpd::BBox box,
                               std::vector<vpd::ObjectAttribute> attributes = {}) {
  vpd::SceneObject o;
  o.id = std::move(id);
  o.name = std::move(name);
  o.bbox = box;
  o.attributes = std::move(attributes);
  return o;
}

/// 100x100 scene: cat (black, left), tshirt (black, right), two chairs, a
/// red car at the top.
inline vpd::SceneGraph small_scene() {
  vpd::SceneGraph g;
  g.scene_id = "fixture";
  g.width = 100;
  g.height = 100;
  g.objects = {
      object("o1", "cat", {10, 10, 20, 20}, {{"black", "color"}, {"small", "size"}}),
      object("o2", "tshirt", {70, 12, 90, 30}, {{"black", "color"}, {"fabric", "material"}}),
      object("o3", "chair", {30, 40, 40, 50}, {{"wood", "material"}}),
      object("o4", "chair", {50, 42, 60, 52}, {{"metal", "material"}}),
      object("o5", "car", {40, 80, 60, 95}, {{"red", "color"}}),
  };
  g.relations = {{"o1", "near", "o3"}, {"o5", "above", "o3"}};
  g.qa_oracle = {{"who is riding", "nobody"}};
  g.validate();
  return g;
}

}  // namespace fixtures
