#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace oracle {

using namespace vpd;

std::vector<std::size_t> brute_force_top_k(const std::vector<double>& query,
                                           const std::vector<std::vector<double>>& pool, std::size_t k) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  if (pool.size() <= k) return order;

  std::vector<double> score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double dot = 0, nq = 0, np = 0;
    for (std::size_t d = 0; d < query.size(); ++d) {
      dot += query[d] * pool[i][d];
      nq += query[d] * query[d];
      np += pool[i][d] * pool[i][d];
    }
    score[i] = (nq == 0 || np == 0) ? 0.0 : dot / (std::sqrt(nq) * std::sqrt(np));
  }
  std::vector<std::size_t> out;
  std::vector<bool> taken(pool.size(), false);
  for (std::size_t r = 0; r < k; ++r) {
    std::size_t best = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      if (best == pool.size() || score[i] > score[best]) best = i;
    }
    taken[best] = true;
    out.push_back(best);
  }
  return out;
}

double vqa_formula(const std::string& prediction, const std::vector<std::string>& annotators) {
  // Exact rational mean of min(1, m_i / 3) over the leave-one-out folds.
  const long long folds = static_cast<long long>(annotators.size());
  if (folds == 0) return 0.0;
  long long num = 0;  // in units of 1/3
  for (std::size_t left_out = 0; left_out < annotators.size(); ++left_out) {
    long long m = 0;
    for (std::size_t j = 0; j < annotators.size(); ++j) {
      if (j != left_out && annotators[j] == prediction) ++m;
    }
    num += std::min<long long>(m, 3);
  }
  const long long den = 3 * folds;
  const long long g = std::gcd(num, den);
  return static_cast<double>(num / g) / static_cast<double>(den / g);
}

double bigram_entropy(const std::vector<std::string>& questions) {
  std::map<std::pair<std::string, std::string>, double> counts;
  double total = 0;
  for (const auto& q : questions) {
    std::istringstream in(q);
    std::vector<std::string> words;
    for (std::string w; in >> w;) {
      std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      words.push_back(w);
    }
    for (std::size_t i = 1; i < words.size(); ++i) {
      counts[{words[i - 1], words[i]}] += 1;
      total += 1;
    }
  }
  double h = 0;
  for (const auto& [bigram, c] : counts) h += (c / total) * std::log2(total / c);
  return h;
}

namespace {

bool is_called(const SceneObject& o, const std::string& noun) {
  if (o.name == noun) return true;
  return std::find(o.synonyms.begin(), o.synonyms.end(), noun) != o.synonyms.end();
}

std::vector<SceneObject> named(const SceneGraph& g, const std::string& noun) {
  std::vector<SceneObject> out;
  std::copy_if(g.objects.begin(), g.objects.end(), std::back_inserter(out),
               [&](const SceneObject& o) { return is_called(o, noun); });
  return out;
}

std::string value_of(const SceneObject& o, const std::string& category) {
  auto it = std::find_if(o.attributes.begin(), o.attributes.end(),
                         [&](const ObjectAttribute& a) { return a.category == category; });
  return it == o.attributes.end() ? "unknown" : it->value;
}

const SceneObject& the(const SceneGraph& g, const std::string& noun) {
  static const SceneObject none;
  auto all = named(g, noun);
  if (all.size() != 1) throw std::logic_error("expected exactly one " + noun);
  for (const auto& o : g.objects) {
    if (o.id == all[0].id) return o;
  }
  return none;
}

}  // namespace

std::string answer_by_enumeration(const QuestionSpec& q, const SceneGraph& g) {
  // Centers doubled so all comparisons stay in integers.
  auto cx2 = [](const SceneObject& o) { return o.bbox.left + o.bbox.right; };
  auto cy2 = [](const SceneObject& o) { return o.bbox.lower + o.bbox.upper; };
  switch (q.family) {
    case Family::Existence: {
      for (const auto& o : named(g, q.noun)) {
        const bool attr_ok = q.attribute.empty() ||
                             std::any_of(o.attributes.begin(), o.attributes.end(),
                                         [&](const ObjectAttribute& a) { return a.value == q.attribute; });
        if (attr_ok) return "yes";
      }
      return "no";
    }
    case Family::Count:
      return std::to_string(named(g, q.noun).size());
    case Family::AttributeQuery:
      return value_of(the(g, q.noun), q.category);
    case Family::SameAttribute:
      return value_of(the(g, q.noun), q.category) == value_of(the(g, q.other_noun), q.category) ? "yes" : "no";
    case Family::RelationChoose: {
      const SceneObject& a = the(g, q.noun);
      const SceneObject& b = the(g, q.other_noun);
      if (q.direction == "left") return cx2(a) < cx2(b) ? "left" : "right";
      if (q.direction == "right") return cx2(a) > cx2(b) ? "right" : "left";
      if (q.direction == "above") return cy2(a) > cy2(b) ? "above" : "below";
      return cy2(a) < cy2(b) ? "below" : "above";
    }
    case Family::PositionalExistence: {
      const SceneObject& ref = the(g, q.other_noun);
      for (const auto& o : named(g, q.noun)) {
        bool inside = false;
        if (q.direction == "left") inside = cx2(o) <= 2 * ref.bbox.left;
        if (q.direction == "right") inside = cx2(o) >= 2 * ref.bbox.right;
        if (q.direction == "above") inside = cy2(o) >= 2 * ref.bbox.upper;
        if (q.direction == "below") inside = cy2(o) <= 2 * ref.bbox.lower;
        if (inside) return "yes";
      }
      return "no";
    }
  }
  return "";
}

// ---------------------------------------------------------------------------

namespace {

const char* const kNames[] = {"a", "b", "x", "patch", "var1", "image_patch", "answer", "foo_bar", "n2", "item"};
const char* const kCallees[] = {"f", "len", "str", "exists", "bool_to_yesno", "g2"};
const char* const kMethods[] = {"find", "classify", "crop_position", "m"};
const char* const kAttrs[] = {"left", "upper", "width", "name"};

}  // namespace

std::string RandomProgram::ident() { return kNames[pick(10)]; }

std::string RandomProgram::text() {
  static const std::string alphabet = "abc XYZ'\"\\\n\t.,?-_01";
  std::string s;
  const int len = pick(8);
  for (int i = 0; i < len; ++i) s += alphabet[static_cast<std::size_t>(pick(static_cast<int>(alphabet.size())))];
  return s;
}

AssignTarget RandomProgram::target(int depth) {
  if (depth > 0 && pick(5) == 0) {
    std::vector<AssignTarget> elems;
    const int n = 2 + pick(2);
    for (int i = 0; i < n; ++i) elems.push_back(target(depth - 1));
    return build::tuple(std::move(elems));
  }
  return build::target(ident());
}

Expr RandomProgram::expr(int depth) {
  const int leaf_kinds = 4;
  const int kind = depth <= 0 ? pick(leaf_kinds) : pick(17);
  switch (kind) {
    case 0: return build::name(ident());
    case 1: return build::str(text());
    case 2: return build::integer(pick(2000) - 50);
    case 3: return build::boolean(pick(2) == 1);
    case 4: {
      std::vector<Expr> e;
      for (int i = pick(4); i > 0; --i) e.push_back(expr(depth - 1));
      return build::list(std::move(e));
    }
    case 5: {
      std::vector<Expr> a;
      for (int i = pick(4); i > 0; --i) a.push_back(expr(depth - 1));
      return build::call(kCallees[pick(6)], std::move(a));
    }
    case 6: {
      std::vector<Expr> a;
      for (int i = pick(3); i > 0; --i) a.push_back(expr(depth - 1));
      return build::method(expr(depth - 1), kMethods[pick(4)], std::move(a));
    }
    case 7: return build::attr(expr(depth - 1), kAttrs[pick(4)]);
    case 8: return build::index(expr(depth - 1), expr(depth - 1));
    case 9: return build::compare(expr(depth - 1), static_cast<CmpOp>(pick(6)), expr(depth - 1));
    case 10: return build::arith(expr(depth - 1), static_cast<ArithOp>(pick(3)), expr(depth - 1));
    case 11: {
      std::vector<Expr> ops;
      for (int i = 2 + pick(2); i > 0; --i) ops.push_back(expr(depth - 1));
      return build::logic(static_cast<LogicOp>(pick(2)), std::move(ops));
    }
    case 12: return build::negate(expr(depth - 1));
    case 13: return build::conditional(expr(depth - 1), expr(depth - 1), expr(depth - 1));
    case 14:
    case 15: {
      std::vector<Generator> gens;
      for (int i = 1 + pick(2); i > 0; --i) {
        std::vector<Expr> conds;
        for (int c = pick(3); c > 0; --c) conds.push_back(expr(depth - 1));
        gens.push_back(build::generator(target(1), expr(depth - 1), std::move(conds)));
      }
      return build::comprehension(kind == 14 ? CompKind::List : CompKind::Generator, expr(depth - 1), std::move(gens));
    }
    default: {
      // A call whose only argument is a generator expression.
      std::vector<Generator> gens{build::generator(target(0), expr(depth - 1))};
      std::vector<Expr> args;
      args.push_back(build::comprehension(CompKind::Generator, expr(depth - 1), std::move(gens)));
      return build::call(kCallees[pick(6)], std::move(args));
    }
  }
}

std::vector<Stmt> RandomProgram::block(int depth) {
  std::vector<Stmt> body;
  for (int i = 1 + pick(3); i > 0; --i) body.push_back(stmt(depth - 1));
  return body;
}

Stmt RandomProgram::stmt(int depth) {
  const int kind = depth <= 0 ? pick(2) : pick(6);
  switch (kind) {
    case 0: {
      std::vector<AssignTarget> targets;
      for (int i = 1 + (pick(6) == 0 ? 1 : 0); i > 0; --i) targets.push_back(target(1));
      return build::assign(std::move(targets), expr(3));
    }
    case 1: return build::expr(expr(3));
    case 2: return build::for_loop(target(1), expr(2), block(depth), pick(3) == 0 ? block(depth) : std::vector<Stmt>{});
    case 3: return build::while_loop(expr(2), block(depth), pick(3) == 0 ? block(depth) : std::vector<Stmt>{});
    case 4: {
      std::vector<WithItem> items;
      for (int i = 1 + pick(2); i > 0; --i) {
        WithItem item{expr(2), std::nullopt};
        if (pick(3) != 0) item.bound = target(1);
        items.push_back(std::move(item));
      }
      return build::with(std::move(items), block(depth));
    }
    default:
      return build::assign(ident(), expr(4));
  }
}

Program RandomProgram::next() {
  Program p;
  for (int i = pick(7); i > 0; --i) p.statements.push_back(stmt(2));
  return p;
}

}  // namespace oracle
