#include "vpd/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "vpd/augment.hpp"
#include "vpd/exec.hpp"
#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/rng.hpp"
#include "vpd/text.hpp"

namespace vpd {

namespace {

constexpr const char* kFamilyNames[] = {"existence",      "count",           "attribute_query",
                                        "same_attribute", "relation_choose", "positional_existence"};

bool has_attributes(const BenchmarkConfig& c) {
  return std::any_of(c.attributes.begin(), c.attributes.end(), [](const auto& kv) { return !kv.second.empty(); });
}

double weight(const BenchmarkConfig& c, Family f) {
  auto it = c.family_weights.find(f);
  return it == c.family_weights.end() ? 0.0 : it->second;
}

std::string identifier(std::string_view noun) {
  std::string out;
  for (char c : noun) out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "obj_" + out;
  return out;
}

std::string quoted(const std::string& s) { return quote_string(s); }

std::string opposite(std::string_view first) {
  if (first == "left") return "right";
  if (first == "right") return "left";
  if (first == "above") return "below";
  return "above";
}

// --- reference semantics -------------------------------------------------

bool named(const SceneObject& o, const std::string& noun) {
  const std::string n = text::case_fold(noun);
  if (text::case_fold(o.name) == n) return true;
  return std::any_of(o.synonyms.begin(), o.synonyms.end(), [&](const auto& s) { return text::case_fold(s) == n; });
}

std::vector<const SceneObject*> all_named(const SceneGraph& g, const std::string& noun) {
  std::vector<const SceneObject*> out;
  for (const auto& o : g.objects) {
    if (named(o, noun)) out.push_back(&o);
  }
  return out;
}

const SceneObject* unique_named(const SceneGraph& g, const std::string& noun) {
  auto all = all_named(g, noun);
  return all.size() == 1 ? all.front() : nullptr;
}

std::string attribute_in(const SceneObject& o, const std::string& category) {
  for (const auto& a : o.attributes) {
    if (a.category == category) return a.value;
  }
  return "unknown";
}

bool in_direction(const SceneObject& o, const std::string& dir, const SceneObject& ref, const SceneGraph& g) {
  const double x = o.bbox.center_x();
  const double y = o.bbox.center_y();
  if (dir == "left") return x >= 0 && x <= ref.bbox.left;
  if (dir == "right") return x >= ref.bbox.right && x <= g.width;
  if (dir == "above") return y >= ref.bbox.upper && y <= g.height;
  return y >= 0 && y <= ref.bbox.lower;
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

// --- scene sampling --------------------------------------------------------

std::vector<int> distinct_positions(Rng& rng, int lo, int hi, std::size_t n) {
  std::set<int> chosen;
  while (chosen.size() < n) chosen.insert(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
  std::vector<int> out(chosen.begin(), chosen.end());
  // Shuffle so x and y orders are independent.
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
  return out;
}

SceneGraph sample_scene(const BenchmarkConfig& c, std::size_t index, Rng& rng) {
  SceneGraph g;
  std::ostringstream id;
  id << 's';
  id.width(4);
  id.fill('0');
  id << index + 1;
  g.scene_id = id.str();
  g.width = c.width;
  g.height = c.height;

  const std::size_t n = c.min_objects + rng.below(c.max_objects - c.min_objects + 1);
  constexpr int kMargin = 24;
  const auto xs = distinct_positions(rng, kMargin, c.width - kMargin, n);
  const auto ys = distinct_positions(rng, kMargin, c.height - kMargin, n);
  for (std::size_t i = 0; i < n; ++i) {
    SceneObject o;
    o.id = "o" + std::to_string(i + 1);
    o.name = c.nouns[rng.below(c.nouns.size())];
    const int hw = 4 + static_cast<int>(rng.below(kMargin - 4));
    const int hh = 4 + static_cast<int>(rng.below(kMargin - 4));
    o.bbox = BBox{xs[i] - hw, ys[i] - hh, xs[i] + hw, ys[i] + hh};
    for (const auto& [category, values] : c.attributes) {
      if (!values.empty()) o.attributes.push_back({values[rng.below(values.size())], category});
    }
    g.objects.push_back(std::move(o));
  }
  if (!c.relations.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !rng.bernoulli(0.15)) continue;
        g.relations.push_back({g.objects[i].id, c.relations[rng.below(c.relations.size())], g.objects[j].id});
      }
    }
  }
  g.validate();
  return g;
}

// --- question sampling -----------------------------------------------------

Family draw_family(const BenchmarkConfig& c, Rng& rng) {
  double u = rng.uniform();
  Family last = Family::Existence;
  for (Family f : all_families()) {
    const double w = weight(c, f);
    if (w <= 0) continue;
    last = f;
    if (u < w) return f;
    u -= w;
  }
  return last;
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

std::vector<std::string> present_nouns(const SceneGraph& g) {
  std::set<std::string> s;
  for (const auto& o : g.objects) s.insert(o.name);
  return {s.begin(), s.end()};
}

std::vector<std::string> unique_nouns(const SceneGraph& g) {
  std::vector<std::string> out;
  for (const auto& n : present_nouns(g)) {
    if (unique_named(g, n)) out.push_back(n);
  }
  return out;
}

std::vector<std::string> categories(const BenchmarkConfig& c) {
  std::vector<std::string> out;
  for (const auto& [k, v] : c.attributes) {
    if (!v.empty()) out.push_back(k);
  }
  return out;
}

std::optional<QuestionSpec> sample_question(Family f, const BenchmarkConfig& c, const SceneGraph& g, Rng& rng) {
  QuestionSpec q;
  q.family = f;
  const auto present = present_nouns(g);
  const auto unique = unique_nouns(g);
  switch (f) {
    case Family::Existence: {
      std::vector<std::string> absent;
      for (const auto& n : c.nouns) {
        if (std::find(present.begin(), present.end(), n) == present.end()) absent.push_back(n);
      }
      q.noun = (absent.empty() || rng.bernoulli(0.5)) ? pick(present, rng) : pick(absent, rng);
      if (has_attributes(c) && rng.bernoulli(c.existence_attribute_probability)) {
        const auto& values = c.attributes.at(pick(categories(c), rng));
        q.attribute = pick(values, rng);
      }
      return q;
    }
    case Family::Count:
      q.noun = pick(present, rng);
      return q;
    case Family::AttributeQuery:
      if (unique.empty() || !has_attributes(c)) return std::nullopt;
      q.noun = pick(unique, rng);
      q.category = pick(categories(c), rng);
      return q;
    case Family::SameAttribute:
    case Family::RelationChoose:
    case Family::PositionalExistence: {
      if (unique.size() < (f == Family::PositionalExistence ? 1u : 2u)) return std::nullopt;
      const std::size_t a = rng.below(unique.size());
      if (f == Family::PositionalExistence) {
        q.other_noun = unique[a];
        std::vector<std::string> targets;
        for (const auto& n : c.nouns) {
          if (n != q.other_noun) targets.push_back(n);
        }
        if (targets.empty()) return std::nullopt;
        q.noun = pick(targets, rng);
        static const std::vector<std::string> dirs{"left", "right", "above", "below"};
        q.direction = pick(dirs, rng);
        return q;
      }
      std::size_t b = rng.below(unique.size() - 1);
      if (b >= a) ++b;
      q.noun = unique[a];
      q.other_noun = unique[b];
      if (f == Family::SameAttribute) {
        if (!has_attributes(c)) return std::nullopt;
        q.category = pick(categories(c), rng);
      } else {
        q.direction = rng.bernoulli(0.5) ? "left" : "above";
      }
      return q;
    }
  }
  return std::nullopt;
}

std::string canonical(const std::string& src) { return print_canonical(parse(src)); }

}  // namespace

const char* to_string(Family f) { return kFamilyNames[static_cast<int>(f)]; }

const std::vector<Family>& all_families() {
  static const std::vector<Family> v{Family::Existence,     Family::Count,          Family::AttributeQuery,
                                     Family::SameAttribute, Family::RelationChoose, Family::PositionalExistence};
  return v;
}

Family family_from_string(std::string_view name) {
  for (Family f : all_families()) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("unknown question family '" + std::string(name) + "'");
}

void BenchmarkConfig::validate() const {
  if (nouns.empty()) throw ConfigError("noun vocabulary is empty");
  for (const auto& [cat, values] : attributes) {
    if (values.empty()) throw ConfigError("attribute category '" + cat + "' is empty");
  }
  if (n_scenes == 0) throw ConfigError("n_scenes must be positive");
  if (min_objects == 0 || min_objects > max_objects) throw ConfigError("object range must satisfy 1 <= min <= max");
  constexpr int kMinSide = 64;
  if (width < kMinSide || height < kMinSide) throw ConfigError("image must be at least 64x64");
  const std::size_t slots = static_cast<std::size_t>(std::min(width, height) - 2 * 24 + 1);
  if (max_objects > slots) throw ConfigError("too many objects for the image size");
  if (!(existence_attribute_probability >= 0 && existence_attribute_probability <= 1)) {
    throw ConfigError("existence_attribute_probability must be in [0, 1]");
  }
  double total = 0;
  for (const auto& [f, w] : family_weights) {
    if (!(w >= 0)) throw ConfigError(std::string("negative weight for family ") + to_string(f));
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ConfigError("family weights must sum to 1");
  auto need = [&](Family f, bool ok, const char* why) {
    if (weight(*this, f) > 0 && !ok) throw ConfigError(std::string("family ") + to_string(f) + " is impossible: " + why);
  };
  const bool attrs = has_attributes(*this);
  need(Family::AttributeQuery, attrs, "no attribute categories");
  need(Family::SameAttribute, attrs, "no attribute categories");
  need(Family::SameAttribute, max_objects >= 2 && nouns.size() >= 2, "needs two distinct objects");
  need(Family::RelationChoose, max_objects >= 2 && nouns.size() >= 2, "needs two distinct objects");
  need(Family::PositionalExistence, nouns.size() >= 2, "needs a target noun distinct from the reference");
  if (questions_per_scene == 0) throw ConfigError("questions_per_scene must be positive");
}

BenchmarkConfig default_benchmark_config() {
  const auto& lex = default_lexicon();
  BenchmarkConfig c;
  c.nouns = {"chair", "table", "dog", "cat", "car", "tree", "cup", "lamp",
             "sofa", "desk", "horse", "bus", "bench", "bottle", "book", "clock"};
  for (const char* cat : {"color", "material", "size"}) {
    const auto& words = lex.words(cat);
    c.attributes[cat] = std::vector<std::string>(words.begin(), words.begin() + std::min<std::size_t>(words.size(), 8));
  }
  c.relations = {"near", "next to", "behind", "in front of"};
  c.family_weights = {{Family::Existence, 0.2},     {Family::Count, 0.15},         {Family::AttributeQuery, 0.2},
                      {Family::SameAttribute, 0.15}, {Family::RelationChoose, 0.15}, {Family::PositionalExistence, 0.15}};
  return c;
}

std::string question_text(const QuestionSpec& q) {
  switch (q.family) {
    case Family::Existence:
      return "Is there a " + (q.attribute.empty() ? "" : q.attribute + " ") + q.noun + "?";
    case Family::Count:
      return "How many " + text::plural(q.noun) + " are there?";
    case Family::AttributeQuery:
      return "What " + q.category + " is the " + q.noun + "?";
    case Family::SameAttribute:
      return "Is the " + q.noun + " the same " + q.category + " as the " + q.other_noun + "?";
    case Family::RelationChoose:
      if (q.direction == "left" || q.direction == "right") {
        return "Is the " + q.noun + " to the left or right of the " + q.other_noun + "?";
      }
      return "Is the " + q.noun + " above or below the " + q.other_noun + "?";
    case Family::PositionalExistence:
      if (q.direction == "left" || q.direction == "right") {
        return "Is there a " + q.noun + " to the " + q.direction + " of the " + q.other_noun + "?";
      }
      return "Is there a " + q.noun + " " + q.direction + " the " + q.other_noun + "?";
  }
  return {};
}

std::string gold_program(const QuestionSpec& q) {
  std::ostringstream p;
  p << "image_patch = ImagePatch(image)\n";
  const std::string a = identifier(q.noun);
  const std::string b = identifier(q.other_noun);
  switch (q.family) {
    case Family::Existence:
      p << a << "_patches = image_patch.find(" << quoted(q.noun) << ")\n";
      if (!q.attribute.empty()) {
        p << a << "_patches = filter_img(" << a << "_patches, " << quoted(q.attribute) << ")\n";
      }
      p << "answer = bool_to_yesno(exists(" << a << "_patches))";
      break;
    case Family::Count:
      p << a << "_patches = image_patch.find(" << quoted(q.noun) << ")\n";
      p << "answer = str(len(" << a << "_patches))";
      break;
    case Family::AttributeQuery:
      p << a << "_patch = image_patch.find(" << quoted(q.noun) << ")[0]\n";
      p << "answer = " << a << "_patch.classify(" << quoted(q.category) << ")";
      break;
    case Family::SameAttribute:
      p << a << "_patch = image_patch.find(" << quoted(q.noun) << ")[0]\n";
      p << b << "_patch = image_patch.find(" << quoted(q.other_noun) << ")[0]\n";
      p << a << "_value = " << a << "_patch.classify(" << quoted(q.category) << ")\n";
      p << b << "_value = " << b << "_patch.classify(" << quoted(q.category) << ")\n";
      p << "answer = bool_to_yesno(" << a << "_value == " << b << "_value)";
      break;
    case Family::RelationChoose:
      p << a << "_patch = image_patch.find(" << quoted(q.noun) << ")[0]\n";
      p << b << "_patch = image_patch.find(" << quoted(q.other_noun) << ")[0]\n";
      p << "answer = choose_relationship(" << a << "_patch, " << b << "_patch, [" << quoted(q.direction) << ", "
        << quoted(opposite(q.direction)) << "])";
      break;
    case Family::PositionalExistence:
      p << "reference = image_patch.find(" << quoted(q.other_noun) << ")[0]\n";
      p << "region = image_patch.crop_position(" << quoted(q.direction) << ", reference)\n";
      p << a << "_patches = region.find(" << quoted(q.noun) << ")\n";
      p << "answer = bool_to_yesno(exists(" << a << "_patches))";
      break;
  }
  return canonical(p.str());
}

std::string reference_answer(const QuestionSpec& q, const SceneGraph& g) {
  switch (q.family) {
    case Family::Existence: {
      for (const auto* o : all_named(g, q.noun)) {
        if (q.attribute.empty() || o->has_attribute(q.attribute)) return "yes";
      }
      return "no";
    }
    case Family::Count: {
      const auto n = all_named(g, q.noun).size();
      // A miss still yields one stand-in patch.
      return std::to_string(std::max<std::size_t>(n, 1));
    }
    case Family::AttributeQuery: {
      const auto* o = unique_named(g, q.noun);
      return o ? attribute_in(*o, q.category) : "unknown";
    }
    case Family::SameAttribute: {
      const auto* a = unique_named(g, q.noun);
      const auto* b = unique_named(g, q.other_noun);
      if (!a || !b) throw std::logic_error("same-attribute question without unique objects");
      return yesno(attribute_in(*a, q.category) == attribute_in(*b, q.category));
    }
    case Family::RelationChoose: {
      const auto* a = unique_named(g, q.noun);
      const auto* b = unique_named(g, q.other_noun);
      if (!a || !b) throw std::logic_error("relation question without unique objects");
      bool first;
      if (q.direction == "left" || q.direction == "right") {
        first = (q.direction == "left") == (a->bbox.center_x() < b->bbox.center_x());
      } else {
        first = (q.direction == "above") == (a->bbox.center_y() > b->bbox.center_y());
      }
      return first ? q.direction : opposite(q.direction);
    }
    case Family::PositionalExistence: {
      const auto* ref = unique_named(g, q.other_noun);
      if (!ref) throw std::logic_error("positional question without a unique reference");
      for (const auto* o : all_named(g, q.noun)) {
        if (in_direction(*o, q.direction, *ref, g)) return "yes";
      }
      return "no";
    }
  }
  return {};
}

std::vector<DatasetRecord> Benchmark::records() const {
  std::vector<DatasetRecord> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.record);
  return out;
}

std::map<std::string, SceneGraph> Benchmark::scene_map() const {
  std::map<std::string, SceneGraph> out;
  for (const auto& s : scenes) out.emplace(s.scene_id, s);
  return out;
}

Benchmark gen_bench(const BenchmarkConfig& c) {
  c.validate();
  Benchmark bench;
  for (std::size_t s = 0; s < c.n_scenes; ++s) {
    Rng rng = Rng::derived(c.seed, "scene-" + std::to_string(s));
    SceneGraph scene = sample_scene(c, s, rng);
    std::set<std::string> asked;
    std::size_t emitted = 0;
    for (std::size_t attempt = 0; attempt < 50 * c.questions_per_scene && emitted < c.questions_per_scene;
         ++attempt) {
      auto spec = sample_question(draw_family(c, rng), c, scene, rng);
      if (!spec) continue;
      const std::string question = question_text(*spec);
      if (!asked.insert(question).second) continue;
      BenchItem item;
      item.spec = *spec;
      item.program = gold_program(*spec);
      const ExecOutcome out = run_source(item.program, scene);
      if (!out.ok()) throw std::logic_error("gold program failed on " + scene.scene_id + ": " + out.describe());
      const std::string expected = reference_answer(*spec, scene);
      if (out.answer() != expected) {
        throw std::logic_error("gold/reference mismatch on " + scene.scene_id + " for '" + question +
                               "': " + out.answer() + " vs " + expected);
      }
      std::ostringstream id;
      id << scene.scene_id << "-q";
      id.width(2);
      id.fill('0');
      id << ++emitted;
      item.record = DatasetRecord{id.str(), question, out.answer(), scene.scene_id, "train", {}};
      bench.items.push_back(std::move(item));
    }
    bench.scenes.push_back(std::move(scene));
  }
  return bench;
}

}  // namespace vpd
