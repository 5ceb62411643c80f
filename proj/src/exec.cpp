#include "vpd/exec.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "vpd/parse.hpp"
#include "vpd/text.hpp"

namespace vpd {

const char* Value::type_name() const {
  switch (v.index()) {
    case 0: return "image";
    case 1: return "bool";
    case 2: return "int";
    case 3: return "str";
    case 4: return "ImagePatch";
    default: return "list";
  }
}

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::SyntaxError: return "SyntaxError";
    case FailureKind::NameError: return "NameError";
    case FailureKind::TypeError: return "TypeError";
    case FailureKind::ArityError: return "ArityError";
    case FailureKind::DomainError: return "DomainError";
    case FailureKind::StepLimit: return "StepLimit";
    case FailureKind::NoAnswer: return "NoAnswer";
  }
  return "Unknown";
}

std::string ExecOutcome::describe() const {
  if (ok()) return answer();
  return std::string(to_string(failure().kind)) + ": " + failure().message;
}

std::string bool_to_yesno(bool value) { return value ? "yes" : "no"; }

// ---------------------------------------------------------------------------
// SceneApi

namespace {

bool box_order(const SceneObject* a, const SceneObject* b) {
  if (a->bbox.left != b->bbox.left) return a->bbox.left < b->bbox.left;
  if (a->bbox.lower != b->bbox.lower) return a->bbox.lower < b->bbox.lower;
  return a->id < b->id;
}

std::string spatial_keyword(std::string_view option) {
  std::string o = text::normalize(option);
  if (o.rfind("to the ", 0) == 0) o = o.substr(7);
  if (o.size() > 3 && o.compare(o.size() - 3, 3, " of") == 0) o = o.substr(0, o.size() - 3);
  if (o == "left" || o == "right" || o == "above" || o == "below") return o;
  return {};
}

}  // namespace

SceneApi::SceneApi(const SceneGraph& scene, std::string unknown_token)
    : scene_(&scene), unknown_(std::move(unknown_token)) {}

Patch SceneApi::root() const { return Patch{scene_->full_image(), std::nullopt, false}; }
Patch SceneApi::fallback() const { return Patch{scene_->full_image(), std::nullopt, true}; }
Patch SceneApi::object_patch(const SceneObject& obj) const { return Patch{obj.bbox, obj.id, false}; }

std::vector<const SceneObject*> SceneApi::objects_in(const BBox& region) const {
  std::vector<const SceneObject*> out;
  for (const auto& o : scene_->objects) {
    if (region.contains_center_of(o.bbox)) out.push_back(&o);
  }
  std::sort(out.begin(), out.end(), box_order);
  return out;
}

std::vector<Patch> SceneApi::find(const Patch& patch, std::string_view name) const {
  std::vector<Patch> found;
  for (const SceneObject* o : objects_in(patch.region)) {
    if (o->is_called(name)) found.push_back(object_patch(*o));
  }
  if (found.empty()) found.push_back(fallback());
  return found;
}

Patch SceneApi::crop_position(const Patch&, std::string_view direction, const Patch& reference) const {
  const std::string dir = text::normalize(direction);
  const auto& dirs = crop_directions();
  if (std::find(dirs.begin(), dirs.end(), dir) == dirs.end()) {
    throw ExecError(FailureKind::DomainError, "'" + std::string(direction) + "' is not a valid direction");
  }
  const BBox& ref = reference.region;
  const int w = scene_->width;
  const int h = scene_->height;
  BBox region = scene_->full_image();
  if (dir == "left") {
    region = BBox{0, 0, ref.left, h};
  } else if (dir == "right") {
    region = BBox{ref.right, 0, w, h};
  } else if (dir == "above") {
    region = BBox{0, ref.upper, w, h};
  } else if (dir == "below") {
    region = BBox{0, 0, w, ref.lower};
  } else if (reference.object) {
    bool any = false;
    BBox u{};
    for (const auto& o : scene_->objects) {
      if (scene_->related(o.id, dir, *reference.object) || scene_->related(o.id, dir + " of", *reference.object)) {
        if (!any) {
          u = o.bbox;
          any = true;
        } else {
          u = BBox{std::min(u.left, o.bbox.left), std::min(u.lower, o.bbox.lower),
                   std::max(u.right, o.bbox.right), std::max(u.upper, o.bbox.upper)};
        }
      }
    }
    if (any) region = u;
  }
  return Patch{region, std::nullopt, false};
}

std::vector<std::string> SceneApi::attribute_values(const Patch& patch) const {
  std::vector<std::string> values;
  if (patch.fallback) return values;
  if (patch.object) {
    if (const SceneObject* o = scene_->object(*patch.object)) {
      for (const auto& a : o->attributes) values.push_back(a.value);
    }
    return values;
  }
  for (const SceneObject* o : objects_in(patch.region)) {
    for (const auto& a : o->attributes) values.push_back(a.value);
  }
  return values;
}

bool SceneApi::verify_property(const Patch& patch, std::string_view property) const {
  const std::string wanted = text::case_fold(text::trim(property));
  for (const auto& v : attribute_values(patch)) {
    if (text::case_fold(v) == wanted) return true;
  }
  return false;
}

std::string SceneApi::classify(const Patch& patch, const std::vector<std::string>& options) const {
  const auto values = attribute_values(patch);
  for (const auto& opt : options) {
    const std::string folded = text::case_fold(text::trim(opt));
    for (const auto& v : values) {
      if (text::case_fold(v) == folded) return opt;
    }
  }
  return unknown_;
}

std::string SceneApi::classify(const Patch& patch, std::string_view category) const {
  const std::string cat = text::case_fold(text::trim(category));
  if (cat == "object") throw ExecError(FailureKind::DomainError, "classify input should not be 'object'");
  if (patch.fallback) return unknown_;
  auto search = [&](const SceneObject& o) -> std::optional<std::string> {
    for (const auto& a : o.attributes) {
      if (text::case_fold(a.category) == cat) return a.value;
    }
    return std::nullopt;
  };
  if (patch.object) {
    if (const SceneObject* o = scene_->object(*patch.object)) {
      if (auto v = search(*o)) return *v;
    }
    return unknown_;
  }
  for (const SceneObject* o : objects_in(patch.region)) {
    if (auto v = search(*o)) return *v;
  }
  return unknown_;
}

std::string SceneApi::simple_query(const Patch&, std::string_view question) const {
  auto it = scene_->qa_oracle.find(text::normalize(question));
  return it == scene_->qa_oracle.end() ? unknown_ : it->second;
}

std::vector<Patch> SceneApi::filter_img(const std::vector<Patch>& patches, std::string_view criteria) const {
  std::vector<Patch> kept;
  for (const auto& p : patches) {
    if (p.fallback || !p.object) continue;
    const SceneObject* o = scene_->object(*p.object);
    if (o != nullptr && (o->is_called(criteria) || o->has_attribute(criteria))) kept.push_back(p);
  }
  return kept;
}

bool SceneApi::exists(const std::vector<Patch>& patches) const {
  return std::any_of(patches.begin(), patches.end(), [](const Patch& p) { return !p.fallback; });
}

std::int64_t SceneApi::count(const std::vector<Patch>& patches) const {
  return std::count_if(patches.begin(), patches.end(), [](const Patch& p) { return !p.fallback; });
}

bool SceneApi::holds(const Patch& a, const Patch& b, std::string_view relation) const {
  const std::string spatial = spatial_keyword(relation);
  if (!spatial.empty()) {
    const double ax = a.region.center_x();
    const double ay = a.region.center_y();
    const double bx = b.region.center_x();
    const double by = b.region.center_y();
    if (spatial == "left") return ax < bx;
    if (spatial == "right") return ax > bx;
    if (spatial == "above") return ay > by;
    return ay < by;
  }
  if (!a.object || !b.object) return false;
  const std::string rel = text::normalize(relation);
  return scene_->related(*a.object, rel, *b.object) || scene_->related(*a.object, rel + " of", *b.object);
}

std::string SceneApi::choose_relationship(const Patch& a, const Patch& b,
                                          const std::vector<std::string>& options) const {
  for (const auto& opt : options) {
    if (holds(a, b, opt)) return opt;
  }
  return unknown_;
}

std::string SceneApi::verify_relationship(const Patch& a, const Patch& b, std::string_view relation) const {
  return bool_to_yesno(holds(a, b, relation));
}

// ---------------------------------------------------------------------------
// Interpreter

namespace {

[[noreturn]] void type_error(const std::string& msg) { throw ExecError(FailureKind::TypeError, msg); }

bool truthy(const Value& v) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) return x;
        else if constexpr (std::is_same_v<T, std::int64_t>) return x != 0;
        else if constexpr (std::is_same_v<T, std::string>) return !x.empty();
        else if constexpr (std::is_same_v<T, List>) return !x.empty();
        else return true;
      },
      v.v);
}

std::optional<std::int64_t> numeric(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v.v)) return *b ? 1 : 0;
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return *i;
  return std::nullopt;
}

bool equal(const Value& a, const Value& b) {
  auto na = numeric(a);
  auto nb = numeric(b);
  if (na && nb) return *na == *nb;
  if (a.v.index() != b.v.index()) return false;
  if (const auto* la = std::get_if<List>(&a.v)) {
    const auto& lb = std::get<List>(b.v);
    if (la->size() != lb.size()) return false;
    for (std::size_t i = 0; i < la->size(); ++i) {
      if (!equal((*la)[i], lb[i])) return false;
    }
    return true;
  }
  if (const auto* sa = std::get_if<std::string>(&a.v)) return *sa == std::get<std::string>(b.v);
  if (const auto* pa = std::get_if<Patch>(&a.v)) return *pa == std::get<Patch>(b.v);
  return true;  // ImageRef
}

const std::set<std::string>& known_functions() {
  static const std::set<std::string> fns{"ImagePatch",  "len",    "str",   "bool_to_yesno",
                                         "exists",      "count",  "filter_img",
                                         "choose_relationship", "verify_relationship"};
  return fns;
}

class Interpreter {
 public:
  Interpreter(const SceneGraph& scene, const ExecLimits& limits)
      : api_(scene, limits.unknown_token), budget_(limits.step_budget) {
    scopes_.emplace_back();
    scopes_.front()["image"] = Value{ImageRef{}};
  }

  ExecOutcome run(const Program& p) {
    int index = 0;
    try {
      for (; index < static_cast<int>(p.statements.size()); ++index) stmt(p.statements[index]);
      const Value* ans = lookup("answer");
      if (ans == nullptr) {
        return fail(FailureKind::NoAnswer, "program did not assign 'answer'", index);
      }
      return ExecOutcome{Answer{stringify(*ans)}};
    } catch (const ExecError& e) {
      return fail(e.kind(), e.what(), index);
    }
  }

 private:
  static ExecOutcome fail(FailureKind kind, std::string msg, int index) {
    return ExecOutcome{Failure{kind, std::move(msg), index}};
  }

  static std::string stringify(const Value& v) {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::string>) return x;
          else if constexpr (std::is_same_v<T, bool>) return x ? "True" : "False";
          else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
          else type_error(std::string("answer must be a string, got ") + v.type_name());
        },
        v.v);
  }

  void tick() {
    if (++steps_ > budget_) {
      throw ExecError(FailureKind::StepLimit, "step budget of " + std::to_string(budget_) + " exceeded");
    }
  }

  const Value* lookup(const std::string& id) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto f = it->find(id); f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void bind(const AssignTarget& t, const Value& v) {
    if (const auto* n = std::get_if<NameTarget>(&t.node)) {
      scopes_.back()[n->id] = v;
      return;
    }
    const auto& tup = std::get<TupleTarget>(t.node);
    const auto* list = std::get_if<List>(&v.v);
    if (list == nullptr) type_error(std::string("cannot unpack ") + v.type_name());
    if (list->size() != tup.elements.size()) {
      type_error("expected " + std::to_string(tup.elements.size()) + " values to unpack, got " +
                 std::to_string(list->size()));
    }
    for (std::size_t i = 0; i < list->size(); ++i) bind(tup.elements[i], (*list)[i]);
  }

  const List& iterable(const Value& v) {
    if (const auto* l = std::get_if<List>(&v.v)) return *l;
    type_error(std::string("'") + v.type_name() + "' object is not iterable");
  }

  void block(const std::vector<Stmt>& body) {
    for (const auto& s : body) stmt(s);
  }

  void stmt(const Stmt& s) {
    tick();
    std::visit(
        [this](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            Value v = expr(n.value);
            for (const auto& t : n.targets) bind(t, v);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, For>) {
            const List items = iterable(expr(n.iter));
            for (const auto& item : items) {
              tick();
              bind(n.target, item);
              block(n.body);
            }
            block(n.orelse);
          } else if constexpr (std::is_same_v<T, While>) {
            while (truthy(expr(n.test))) block(n.body);
            block(n.orelse);
          } else if constexpr (std::is_same_v<T, With>) {
            for (const auto& item : n.items) {
              Value ctx = expr(item.context);
              if (item.bound) bind(*item.bound, ctx);
            }
            block(n.body);
          }
        },
        s.node);
  }

  void comprehension(const Comprehension& c, std::size_t gen, List& out) {
    if (gen == c.generators.size()) {
      out.push_back(expr(*c.element));
      return;
    }
    const Generator& g = c.generators[gen];
    const List items = iterable(expr(*g.iter));
    for (const auto& item : items) {
      tick();
      bind(g.target, item);
      bool keep = true;
      for (const auto& cond : g.conditions) {
        if (!truthy(expr(cond))) {
          keep = false;
          break;
        }
      }
      if (keep) comprehension(c, gen + 1, out);
    }
  }

  static std::int64_t checked(std::int64_t a, std::int64_t b, ArithOp op) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
      case ArithOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
      case ArithOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
    }
    if (overflow) throw ExecError(FailureKind::DomainError, "integer overflow");
    return r;
  }

  Value arith(const Value& a, ArithOp op, const Value& b) {
    auto na = numeric(a);
    auto nb = numeric(b);
    if (na && nb) return Value{checked(*na, *nb, op)};
    if (op == ArithOp::Add) {
      if (const auto* sa = std::get_if<std::string>(&a.v)) {
        if (const auto* sb = std::get_if<std::string>(&b.v)) return Value{*sa + *sb};
      }
      if (const auto* la = std::get_if<List>(&a.v)) {
        if (const auto* lb = std::get_if<List>(&b.v)) {
          List joined = *la;
          joined.insert(joined.end(), lb->begin(), lb->end());
          return Value{std::move(joined)};
        }
      }
    }
    type_error(std::string("unsupported operand types for ") + to_string(op) + ": '" + a.type_name() +
               "' and '" + b.type_name() + "'");
  }

  bool compare(const Value& a, CmpOp op, const Value& b) {
    if (op == CmpOp::Eq) return equal(a, b);
    if (op == CmpOp::NotEq) return !equal(a, b);
    int c = 0;
    auto na = numeric(a);
    auto nb = numeric(b);
    if (na && nb) {
      c = *na < *nb ? -1 : (*na > *nb ? 1 : 0);
    } else if (std::holds_alternative<std::string>(a.v) && std::holds_alternative<std::string>(b.v)) {
      c = std::get<std::string>(a.v).compare(std::get<std::string>(b.v));
    } else {
      type_error(std::string("'") + to_string(op) + "' not supported between '" + a.type_name() + "' and '" +
                 b.type_name() + "'");
    }
    switch (op) {
      case CmpOp::Lt: return c < 0;
      case CmpOp::LtE: return c <= 0;
      case CmpOp::Gt: return c > 0;
      default: return c >= 0;
    }
  }

  Value index(const Value& recv, const Value& idx) {
    auto i = numeric(idx);
    if (!i || std::holds_alternative<bool>(idx.v)) type_error("indices must be integers");
    auto at = [&](std::int64_t size) {
      std::int64_t k = *i < 0 ? *i + size : *i;
      if (k < 0 || k >= size) throw ExecError(FailureKind::DomainError, "index out of range");
      return static_cast<std::size_t>(k);
    };
    if (const auto* l = std::get_if<List>(&recv.v)) return (*l)[at(static_cast<std::int64_t>(l->size()))];
    if (const auto* s = std::get_if<std::string>(&recv.v)) {
      return Value{std::string(1, (*s)[at(static_cast<std::int64_t>(s->size()))])};
    }
    type_error(std::string("'") + recv.type_name() + "' object is not subscriptable");
  }

  // -- argument coercion ---------------------------------------------------

  static void arity(const std::string& fn, const std::vector<Expr>& args, std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
      throw ExecError(FailureKind::ArityError,
                      fn + "() takes " + want + " arguments but " + std::to_string(args.size()) + " were given");
    }
  }

  static const std::string& as_string(const Value& v, const std::string& what) {
    if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
    type_error(what + " must be a string, got " + v.type_name());
  }

  static const Patch& as_patch(const Value& v, const std::string& what) {
    if (const auto* p = std::get_if<Patch>(&v.v)) return *p;
    type_error(what + " must be an ImagePatch, got " + v.type_name());
  }

  static std::vector<Patch> as_patches(const Value& v, const std::string& what, bool allow_single) {
    if (allow_single) {
      if (const auto* p = std::get_if<Patch>(&v.v)) return {*p};
    }
    const auto* l = std::get_if<List>(&v.v);
    if (l == nullptr) type_error(what + " must be a list of ImagePatch, got " + v.type_name());
    std::vector<Patch> out;
    for (const auto& item : *l) out.push_back(as_patch(item, what + " element"));
    return out;
  }

  static std::vector<std::string> as_strings(const List& l, const std::string& what) {
    std::vector<std::string> out;
    for (const auto& item : l) out.push_back(as_string(item, what + " element"));
    return out;
  }

  // Lists stand for their first detected element.
  static Patch representative(const Value& v, const std::string& what) {
    auto patches = as_patches(v, what, true);
    if (patches.empty()) throw ExecError(FailureKind::DomainError, what + " is an empty list");
    for (const auto& p : patches) {
      if (!p.fallback) return p;
    }
    return patches.front();
  }

  static Value patch_list(std::vector<Patch> patches) {
    List l;
    l.reserve(patches.size());
    for (auto& p : patches) l.push_back(Value{std::move(p)});
    return Value{std::move(l)};
  }

  std::vector<Value> eval_args(const std::vector<Expr>& args) {
    std::vector<Value> vals;
    vals.reserve(args.size());
    for (const auto& a : args) vals.push_back(expr(a));
    return vals;
  }

  Value call(const Call& c) {
    if (!known_functions().count(c.callee)) {
      throw ExecError(FailureKind::NameError, "name '" + c.callee + "' is not defined");
    }
    const std::string& fn = c.callee;
    if (fn == "len" || fn == "str" || fn == "bool_to_yesno" || fn == "exists" || fn == "count" ||
        fn == "ImagePatch") {
      arity(fn, c.args, 1, 1);
    } else if (fn == "filter_img") {
      arity(fn, c.args, 2, 2);
    } else {
      arity(fn, c.args, 3, 3);
    }
    auto a = eval_args(c.args);
    if (fn == "ImagePatch") {
      if (!std::holds_alternative<ImageRef>(a[0].v)) type_error("ImagePatch() expects the image");
      return Value{api_.root()};
    }
    if (fn == "len") {
      if (const auto* l = std::get_if<List>(&a[0].v)) return Value{static_cast<std::int64_t>(l->size())};
      if (const auto* s = std::get_if<std::string>(&a[0].v)) return Value{static_cast<std::int64_t>(s->size())};
      type_error(std::string("object of type '") + a[0].type_name() + "' has no len()");
    }
    if (fn == "str") {
      if (std::holds_alternative<List>(a[0].v) || std::holds_alternative<Patch>(a[0].v) ||
          std::holds_alternative<ImageRef>(a[0].v)) {
        type_error(std::string("str() of '") + a[0].type_name() + "' is not supported");
      }
      return Value{stringify(a[0])};
    }
    if (fn == "bool_to_yesno") {
      const auto* b = std::get_if<bool>(&a[0].v);
      if (b == nullptr) type_error(std::string("bool_to_yesno expects a bool, got ") + a[0].type_name());
      return Value{bool_to_yesno(*b)};
    }
    if (fn == "exists") return Value{api_.exists(as_patches(a[0], "exists() argument", true))};
    if (fn == "count") return Value{api_.count(as_patches(a[0], "count() argument", true))};
    if (fn == "filter_img") {
      return patch_list(api_.filter_img(as_patches(a[0], "filter_img() patches", false),
                                        as_string(a[1], "filter_img() criteria")));
    }
    const Patch p1 = representative(a[0], fn + "() first patch");
    const Patch p2 = representative(a[1], fn + "() second patch");
    if (fn == "choose_relationship") {
      const auto* options = std::get_if<List>(&a[2].v);
      if (options == nullptr) {
        type_error(std::string("choose_relationship requires a list of options, got ") + a[2].type_name());
      }
      return Value{api_.choose_relationship(p1, p2, as_strings(*options, "choose_relationship() option"))};
    }
    return Value{api_.verify_relationship(p1, p2, as_string(a[2], "verify_relationship() relation"))};
  }

  Value method(const MethodCall& m) {
    Value recv = expr(*m.receiver);
    const auto* patch = std::get_if<Patch>(&recv.v);
    if (patch == nullptr) {
      type_error(std::string("'") + recv.type_name() + "' object has no method '" + m.method + "'");
    }
    const Patch self = *patch;
    const std::string& name = m.method;
    if (name == "find") {
      arity(name, m.args, 1, 1);
      auto a = eval_args(m.args);
      return patch_list(api_.find(self, as_string(a[0], "find() object name")));
    }
    if (name == "crop_position") {
      arity(name, m.args, 1, 2);
      auto a = eval_args(m.args);
      const std::string& dir = as_string(a[0], "crop_position() direction");
      const Patch ref = a.size() == 2 ? as_patch(a[1], "crop_position() reference") : self;
      return Value{api_.crop_position(self, dir, ref)};
    }
    if (name == "verify_property") {
      arity(name, m.args, 1, 1);
      auto a = eval_args(m.args);
      return Value{api_.verify_property(self, as_string(a[0], "verify_property() property"))};
    }
    if (name == "classify") {
      arity(name, m.args, 1, 1);
      auto a = eval_args(m.args);
      if (const auto* l = std::get_if<List>(&a[0].v)) {
        return Value{api_.classify(self, as_strings(*l, "classify() option"))};
      }
      return Value{api_.classify(self, std::string_view(as_string(a[0], "classify() input")))};
    }
    if (name == "simple_query") {
      arity(name, m.args, 1, 1);
      auto a = eval_args(m.args);
      return Value{api_.simple_query(self, as_string(a[0], "simple_query() question"))};
    }
    throw ExecError(FailureKind::NameError, "ImagePatch has no method '" + name + "'");
  }

  Value attribute(const Attribute& a) {
    Value recv = expr(*a.receiver);
    const Patch& p = as_patch(recv, "attribute receiver");
    if (a.name == "left") return Value{std::int64_t{p.region.left}};
    if (a.name == "lower") return Value{std::int64_t{p.region.lower}};
    if (a.name == "right") return Value{std::int64_t{p.region.right}};
    if (a.name == "upper") return Value{std::int64_t{p.region.upper}};
    if (a.name == "width") return Value{std::int64_t{p.region.right - p.region.left}};
    if (a.name == "height") return Value{std::int64_t{p.region.upper - p.region.lower}};
    throw ExecError(FailureKind::NameError, "ImagePatch has no attribute '" + a.name + "'");
  }

  Value expr(const Expr& e) {
    tick();
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Name>) {
            if (const Value* v = lookup(n.id)) return *v;
            throw ExecError(FailureKind::NameError, "name '" + n.id + "' is not defined");
          } else if constexpr (std::is_same_v<T, Str>) {
            return Value{n.value};
          } else if constexpr (std::is_same_v<T, Int>) {
            return Value{n.value};
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return Value{n.value};
          } else if constexpr (std::is_same_v<T, ListLit>) {
            List l;
            for (const auto& x : n.elements) l.push_back(expr(x));
            return Value{std::move(l)};
          } else if constexpr (std::is_same_v<T, Call>) {
            return call(n);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            return method(n);
          } else if constexpr (std::is_same_v<T, Attribute>) {
            return attribute(n);
          } else if constexpr (std::is_same_v<T, Index>) {
            Value recv = expr(*n.receiver);
            return index(recv, expr(*n.index));
          } else if constexpr (std::is_same_v<T, Compare>) {
            Value l = expr(*n.left);
            return Value{compare(l, n.op, expr(*n.right))};
          } else if constexpr (std::is_same_v<T, BinOp>) {
            Value l = expr(*n.left);
            return arith(l, n.op, expr(*n.right));
          } else if constexpr (std::is_same_v<T, BoolOp>) {
            Value last;
            for (const auto& operand : n.operands) {
              last = expr(operand);
              const bool t = truthy(last);
              if (n.op == LogicOp::And && !t) return last;
              if (n.op == LogicOp::Or && t) return last;
            }
            return last;
          } else if constexpr (std::is_same_v<T, Not>) {
            return Value{!truthy(expr(*n.operand))};
          } else if constexpr (std::is_same_v<T, Conditional>) {
            return truthy(expr(*n.test)) ? expr(*n.then) : expr(*n.otherwise);
          } else if constexpr (std::is_same_v<T, Comprehension>) {
            scopes_.emplace_back();
            List out;
            try {
              comprehension(n, 0, out);
            } catch (...) {
              scopes_.pop_back();
              throw;
            }
            scopes_.pop_back();
            return Value{std::move(out)};
          }
        },
        e.node);
  }

  SceneApi api_;
  std::size_t budget_;
  std::size_t steps_ = 0;
  std::vector<std::map<std::string, Value>> scopes_;
};

}  // namespace

ExecOutcome run(const Program& program, const SceneGraph& scene, const ExecLimits& limits) {
  return Interpreter(scene, limits).run(program);
}

ExecOutcome run_source(std::string_view source, const SceneGraph& scene, const ExecLimits& limits) {
  Program program;
  try {
    program = parse(source);
  } catch (const SyntaxError& e) {
    return ExecOutcome{Failure{FailureKind::SyntaxError, e.what(), -1}};
  }
  return run(program, scene, limits);
}

}  // namespace vpd
