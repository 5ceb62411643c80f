#include "vpd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "vpd/io_error.hpp"
#include "vpd/parse.hpp"
#include "vpd/teacher.hpp"
#include "vpd/text.hpp"

namespace vpd {

using nlohmann::json;

const char* to_string(Flag flag) {
  switch (flag) {
    case Flag::NotExecutable: return "NotExecutable";
    case Flag::ApiViolation: return "ApiViolation";
    case Flag::ContradictsQuestion: return "ContradictsQuestion";
    case Flag::DoesNotAnswerQuestion: return "DoesNotAnswerQuestion";
    case Flag::MissingQuestionInformation: return "MissingQuestionInformation";
  }
  return "Unknown";
}

std::optional<Flag> flag_from_string(std::string_view name) {
  for (Flag f : {Flag::NotExecutable, Flag::ApiViolation, Flag::ContradictsQuestion, Flag::DoesNotAnswerQuestion,
                 Flag::MissingQuestionInformation}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

const char* to_string(FlagSource source) {
  switch (source) {
    case FlagSource::Static: return "static";
    case FlagSource::Heuristic: return "heuristic";
    case FlagSource::Human: return "human";
  }
  return "unknown";
}

const char* to_string(FinalVerdict verdict) {
  switch (verdict) {
    case FinalVerdict::Correct: return "correct";
    case FinalVerdict::Incorrect: return "incorrect";
    case FinalVerdict::Unreviewed: return "unreviewed";
  }
  return "unknown";
}

CheckLexicon CheckLexicon::from_categories(const CategoryLexicon& lexicon) {
  CheckLexicon out;
  for (const auto& name : lexicon.category_names()) {
    std::set<std::string>* dest = nullptr;
    if (name == CategoryLexicon::kGenericCategory) {
      dest = &out.nouns;
    } else if (name == "relation" || name == "direction") {
      dest = &out.relations;
    } else if (name != "property") {
      dest = &out.attributes;
    }
    if (dest == nullptr) continue;
    for (const auto& w : lexicon.words(name)) dest->insert(text::case_fold(w));
  }
  return out;
}

const CheckLexicon& default_check_lexicon() {
  static const CheckLexicon lexicon = CheckLexicon::from_categories(default_lexicon());
  return lexicon;
}

namespace {

// -- tree helpers -----------------------------------------------------------

void walk(const Expr& e, const std::function<void(const Expr&)>& f) {
  f(e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ListLit>) {
          for (const auto& x : n.elements) walk(x, f);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& x : n.args) walk(x, f);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          walk(*n.receiver, f);
          for (const auto& x : n.args) walk(x, f);
        } else if constexpr (std::is_same_v<T, Attribute>) {
          walk(*n.receiver, f);
        } else if constexpr (std::is_same_v<T, Index>) {
          walk(*n.receiver, f);
          walk(*n.index, f);
        } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, BinOp>) {
          walk(*n.left, f);
          walk(*n.right, f);
        } else if constexpr (std::is_same_v<T, BoolOp>) {
          for (const auto& x : n.operands) walk(x, f);
        } else if constexpr (std::is_same_v<T, Not>) {
          walk(*n.operand, f);
        } else if constexpr (std::is_same_v<T, Conditional>) {
          walk(*n.test, f);
          walk(*n.then, f);
          walk(*n.otherwise, f);
        } else if constexpr (std::is_same_v<T, Comprehension>) {
          for (const auto& g : n.generators) {
            walk(*g.iter, f);
            for (const auto& c : g.conditions) walk(c, f);
          }
          walk(*n.element, f);
        }
      },
      e.node);
}

void walk(const std::vector<Stmt>& body, const std::function<void(const Expr&)>& f) {
  for (const auto& s : body) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign> || std::is_same_v<T, ExprStmt>) {
            walk(n.value, f);
          } else if constexpr (std::is_same_v<T, For>) {
            walk(n.iter, f);
            walk(n.body, f);
            walk(n.orelse, f);
          } else if constexpr (std::is_same_v<T, While>) {
            walk(n.test, f);
            walk(n.body, f);
            walk(n.orelse, f);
          } else if constexpr (std::is_same_v<T, With>) {
            for (const auto& item : n.items) walk(item.context, f);
            walk(n.body, f);
          }
        },
        s.node);
  }
}

// Latest single-name assignment for each variable, in statement order.
using Bindings = std::map<std::string, const Expr*>;

void collect_bindings(const std::vector<Stmt>& body, Bindings& out) {
  for (const auto& s : body) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      for (const auto& t : a->targets) {
        if (const auto* n = std::get_if<NameTarget>(&t.node)) out[n->id] = &a->value;
      }
    } else if (const auto* f = std::get_if<For>(&s.node)) {
      collect_bindings(f->body, out);
    } else if (const auto* w = std::get_if<While>(&s.node)) {
      collect_bindings(w->body, out);
    } else if (const auto* w2 = std::get_if<With>(&s.node)) {
      collect_bindings(w2->body, out);
    }
  }
}

const Expr& resolve(const Expr& e, const Bindings& b, int depth = 0) {
  if (depth < 8) {
    if (const auto* n = e.get_if<Name>()) {
      if (auto it = b.find(n->id); it != b.end() && it->second != &e) return resolve(*it->second, b, depth + 1);
    }
  }
  return e;
}

const std::map<std::string, std::pair<std::size_t, std::size_t>>& function_arity() {
  static const std::map<std::string, std::pair<std::size_t, std::size_t>> m{
      {"ImagePatch", {1, 1}},          {"len", {1, 1}},        {"str", {1, 1}},
      {"bool_to_yesno", {1, 1}},       {"exists", {1, 1}},     {"count", {1, 1}},
      {"filter_img", {2, 2}},          {"choose_relationship", {3, 3}},
      {"verify_relationship", {3, 3}}};
  return m;
}

const std::map<std::string, std::pair<std::size_t, std::size_t>>& method_arity() {
  static const std::map<std::string, std::pair<std::size_t, std::size_t>> m{
      {"find", {1, 1}},     {"crop_position", {1, 2}}, {"verify_property", {1, 1}},
      {"classify", {1, 1}}, {"simple_query", {1, 1}}};
  return m;
}

bool statically_not_list(const Expr& raw, const Bindings& b) {
  const Expr& e = resolve(raw, b);
  if (e.is<Str>() || e.is<Int>() || e.is<BoolLit>() || e.is<Compare>() || e.is<Not>()) return true;
  if (const auto* c = e.get_if<Call>()) {
    static const std::set<std::string> scalar{"str", "len", "bool_to_yesno", "exists", "count",
                                              "choose_relationship", "verify_relationship", "ImagePatch"};
    return scalar.count(c->callee) != 0;
  }
  if (const auto* m = e.get_if<MethodCall>()) {
    static const std::set<std::string> scalar{"classify", "simple_query", "verify_property", "crop_position"};
    return scalar.count(m->method) != 0;
  }
  return false;
}

const std::string* literal(const std::vector<Expr>& args, std::size_t i) {
  if (i >= args.size()) return nullptr;
  if (const auto* s = args[i].get_if<Str>()) return &s->value;
  return nullptr;
}

bool is_crop(const Expr& e) {
  const auto* m = e.get_if<MethodCall>();
  return m != nullptr && m->method == "crop_position";
}

std::optional<std::string> opposite(const std::string& dir) {
  if (dir == "left") return "right";
  if (dir == "right") return "left";
  if (dir == "above") return "below";
  if (dir == "below") return "above";
  return std::nullopt;
}

// Noun searched to produce `e`, looking through names and indexing.
std::optional<std::string> found_noun(const Expr& raw, const Bindings& b, int depth = 0) {
  if (depth > 8) return std::nullopt;
  const Expr& e = resolve(raw, b);
  if (const auto* i = e.get_if<Index>()) return found_noun(*i->receiver, b, depth + 1);
  if (const auto* m = e.get_if<MethodCall>(); m != nullptr && m->method == "find") {
    if (const auto* s = literal(m->args, 0)) return text::case_fold(text::trim(*s));
  }
  return std::nullopt;
}

}  // namespace

FlagSet static_check(std::string_view program_source, std::string_view, const CheckLexicon& lex) {
  FlagSet flags;
  Program p;
  try {
    p = parse(program_source);
  } catch (const SyntaxError&) {
    flags.insert(Flag::NotExecutable);
    return flags;
  }
  Bindings bindings;
  collect_bindings(p.statements, bindings);

  auto in = [](const std::set<std::string>& s, const std::string& w) { return s.count(text::case_fold(text::trim(w))) != 0; };
  const auto& dirs = crop_directions();

  walk(p.statements, [&](const Expr& e) {
    if (const auto* c = e.get_if<Call>()) {
      auto it = function_arity().find(c->callee);
      if (it == function_arity().end()) {
        flags.insert(Flag::NotExecutable);
        return;
      }
      if (c->args.size() < it->second.first || c->args.size() > it->second.second) flags.insert(Flag::NotExecutable);
      if (c->callee == "choose_relationship" && c->args.size() == 3 && statically_not_list(c->args[2], bindings)) {
        flags.insert(Flag::NotExecutable);
      }
      if (c->callee == "filter_img") {
        if (const auto* s = literal(c->args, 1); s && in(lex.relations, *s) && !in(lex.nouns, *s) &&
                                                 !in(lex.attributes, *s)) {
          flags.insert(Flag::ApiViolation);
        }
      }
    } else if (const auto* m = e.get_if<MethodCall>()) {
      auto it = method_arity().find(m->method);
      if (it == method_arity().end()) {
        flags.insert(Flag::NotExecutable);
        return;
      }
      if (m->args.size() < it->second.first || m->args.size() > it->second.second) flags.insert(Flag::NotExecutable);
      const std::string* s = literal(m->args, 0);
      if (s == nullptr) return;
      if (m->method == "classify" && text::case_fold(text::trim(*s)) == "object") flags.insert(Flag::NotExecutable);
      if (m->method == "find" && (in(lex.relations, *s) || in(lex.attributes, *s)) && !in(lex.nouns, *s)) {
        flags.insert(Flag::ApiViolation);
      }
      if (m->method == "verify_property" && in(lex.nouns, *s) && !in(lex.attributes, *s)) {
        flags.insert(Flag::ApiViolation);
      }
      if (m->method == "crop_position" &&
          std::find(dirs.begin(), dirs.end(), text::normalize(*s)) == dirs.end()) {
        flags.insert(Flag::ApiViolation);
      }
    } else if (const auto* i = e.get_if<Index>()) {
      if (is_crop(*i->receiver)) flags.insert(Flag::NotExecutable);
    }
  });

  // A crop_position result indexed on the following line.
  for (std::size_t i = 0; i + 1 < p.statements.size(); ++i) {
    const auto* a = std::get_if<Assign>(&p.statements[i].node);
    if (a == nullptr || !is_crop(a->value)) continue;
    std::set<std::string> cropped;
    for (const auto& t : a->targets) {
      if (const auto* n = std::get_if<NameTarget>(&t.node)) cropped.insert(n->id);
    }
    walk(std::vector<Stmt>{p.statements[i + 1]}, [&](const Expr& e) {
      if (const auto* ix = e.get_if<Index>()) {
        if (const auto* n = ix->receiver->get_if<Name>(); n && cropped.count(n->id)) flags.insert(Flag::NotExecutable);
      }
    });
  }
  return flags;
}

FlagSet heuristic_check(std::string_view question, std::string_view program_source, const CheckLexicon& lex) {
  FlagSet flags;
  Program p;
  try {
    p = parse(program_source);
  } catch (const SyntaxError&) {
    return flags;
  }
  Bindings bindings;
  collect_bindings(p.statements, bindings);
  const auto words = text::word_tokens(question);
  if (words.empty()) return flags;

  // Final answer expression.
  const Expr* answer = nullptr;
  for (const auto& s : p.statements) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      for (const auto& t : a->targets) {
        if (const auto* n = std::get_if<NameTarget>(&t.node); n && n->id == "answer") answer = &a->value;
      }
    }
  }

  static const std::set<std::string> yes_no_openers{"is",  "are", "was", "were",  "does",   "do",  "did",
                                                    "can", "could", "has", "have", "will", "should"};
  bool offers_choice = false;
  for (std::size_t i = 1; i + 1 < words.size(); ++i) offers_choice = offers_choice || words[i] == "or";
  const bool yes_no = yes_no_openers.count(words.front()) != 0 && !offers_choice;

  if (answer != nullptr) {
    const Expr& value = resolve(*answer, bindings);
    const auto* call = value.get_if<Call>();
    if (offers_choice && call != nullptr && call->callee == "bool_to_yesno") flags.insert(Flag::DoesNotAnswerQuestion);
    if (yes_no) {
      const Expr* counted = &value;
      if (call != nullptr && call->callee == "str" && call->args.size() == 1) counted = &resolve(call->args[0], bindings);
      if (const auto* c = counted->get_if<Call>(); c && (c->callee == "count" || c->callee == "len")) {
        flags.insert(Flag::DoesNotAnswerQuestion);
      }
    }
  }

  // Searched nouns and every word used in any string argument.
  std::set<std::string> nouns;
  std::set<std::string> arg_words;
  struct Crop {
    std::string direction;
    std::optional<std::string> reference;
  };
  std::vector<Crop> crops;
  walk(p.statements, [&](const Expr& e) {
    auto take_args = [&](const std::vector<Expr>& args) {
      for (const auto& a : args) {
        walk(a, [&](const Expr& x) {
          if (const auto* s = x.get_if<Str>()) {
            for (auto& w : text::word_tokens(s->value)) arg_words.insert(std::move(w));
          }
        });
      }
    };
    if (const auto* c = e.get_if<Call>()) take_args(c->args);
    if (const auto* m = e.get_if<MethodCall>()) {
      take_args(m->args);
      if (m->method == "find") {
        if (const auto* s = literal(m->args, 0)) nouns.insert(text::case_fold(text::trim(*s)));
      }
      if (m->method == "crop_position") {
        if (const auto* s = literal(m->args, 0)) {
          const Expr& ref = m->args.size() >= 2 ? m->args[1] : *m->receiver;
          crops.push_back({text::normalize(*s), found_noun(ref, bindings)});
        }
      }
    }
  });

  auto is_found_noun = [&](const std::string& w) {
    for (const auto& n : nouns) {
      if (w == n || w == text::plural(n)) return true;
    }
    return false;
  };
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (!is_found_noun(words[i])) continue;
    const std::string& mod = words[i - 1];
    if (lex.attributes.count(mod) && !arg_words.count(mod) && !is_found_noun(mod)) {
      flags.insert(Flag::MissingQuestionInformation);
    }
  }

  static const std::set<std::string> fillers{"of", "the", "a", "an"};
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!opposite(words[i])) continue;
    if ((i > 0 && words[i - 1] == "or") || (i + 1 < words.size() && words[i + 1] == "or")) continue;
    std::size_t j = i + 1;
    while (j < words.size() && fillers.count(words[j])) ++j;
    if (j >= words.size() || j == i + 1) continue;
    const std::string& noun = words[j];
    for (const auto& crop : crops) {
      if (!crop.reference) continue;
      const bool same = *crop.reference == noun || text::plural(*crop.reference) == noun;
      if (same && opposite(crop.direction) == words[i]) flags.insert(Flag::ContradictsQuestion);
    }
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Verdicts

ProgramVerdict automatic_verdict(std::string record_id, std::string_view question, std::string_view program,
                                 const CheckLexicon& lexicon) {
  ProgramVerdict v;
  v.record_id = std::move(record_id);
  for (Flag f : heuristic_check(question, program, lexicon)) v.flags[f] = FlagSource::Heuristic;
  for (Flag f : static_check(program, question, lexicon)) v.flags[f] = FlagSource::Static;
  const bool confirmed = std::any_of(v.flags.begin(), v.flags.end(),
                                     [](const auto& kv) { return kv.second == FlagSource::Static; });
  v.final = confirmed ? FinalVerdict::Incorrect : FinalVerdict::Unreviewed;
  return v;
}

ProgramVerdict record_verdict(ProgramVerdict verdict, const HumanVerdict& review) {
  if (!review.correct && review.flags.empty()) {
    throw std::invalid_argument("an incorrect verdict needs at least one flag");
  }
  std::map<Flag, FlagSource> flags;
  for (const auto& [f, src] : verdict.flags) {
    if (src == FlagSource::Static) flags[f] = src;
  }
  for (Flag f : review.flags) flags.try_emplace(f, FlagSource::Human);
  verdict.flags = std::move(flags);
  verdict.final = verdict.flags.empty() ? FinalVerdict::Correct : FinalVerdict::Incorrect;
  verdict.annotator = review.annotator;
  verdict.timestamp = review.timestamp;
  return verdict;
}

json verdict_to_json(const ProgramVerdict& v) {
  json flags = json::array();
  json source = json::object();
  for (const auto& [f, src] : v.flags) {
    flags.push_back(to_string(f));
    source[to_string(f)] = to_string(src);
  }
  return json{{"record_id", v.record_id}, {"flags", flags},          {"source", source},
              {"final", to_string(v.final)}, {"annotator", v.annotator}, {"timestamp", v.timestamp}};
}

ProgramVerdict verdict_from_json(const json& j) {
  ProgramVerdict v;
  v.record_id = j.at("record_id").get<std::string>();
  const json source = j.value("source", json::object());
  for (const auto& name : j.at("flags")) {
    auto f = flag_from_string(name.get<std::string>());
    if (!f) throw std::invalid_argument("unknown flag '" + name.get<std::string>() + "' in verdict " + v.record_id);
    const std::string src = source.value(name.get<std::string>(), "human");
    v.flags[*f] = src == "static" ? FlagSource::Static : src == "heuristic" ? FlagSource::Heuristic : FlagSource::Human;
  }
  const std::string fin = j.at("final").get<std::string>();
  if (fin == "correct") {
    v.final = FinalVerdict::Correct;
  } else if (fin == "incorrect") {
    v.final = FinalVerdict::Incorrect;
  } else if (fin == "unreviewed") {
    v.final = FinalVerdict::Unreviewed;
  } else {
    throw std::invalid_argument("unknown final verdict '" + fin + "' in verdict " + v.record_id);
  }
  v.annotator = j.value("annotator", "");
  v.timestamp = j.value("timestamp", "");
  return v;
}

void append_verdict(const std::string& path, const ProgramVerdict& verdict) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot append to verdict file " + path);
  out << verdict_to_json(verdict).dump() << '\n';
}

std::map<std::string, ProgramVerdict> load_verdicts(const std::string& path) {
  std::map<std::string, ProgramVerdict> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    ProgramVerdict v = verdict_from_json(json::parse(line));
    std::string id = v.record_id;
    out.insert_or_assign(std::move(id), std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

double accuracy_exact(const std::vector<std::string>& predictions, const std::vector<std::string>& gold) {
  if (predictions.size() != gold.size()) throw std::invalid_argument("prediction and gold counts differ");
  if (gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += answers_match(predictions[i], gold[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double accuracy_vqa(std::string_view prediction, const std::vector<std::string>& annotators) {
  if (annotators.empty()) return 0.0;
  std::size_t matches = 0;
  std::vector<bool> hit(annotators.size());
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    hit[i] = answers_match(prediction, annotators[i]);
    matches += hit[i] ? 1 : 0;
  }
  // Sum of min(3, matches among the others) over folds, scaled once.
  std::size_t numerator = 0;
  for (std::size_t i = 0; i < annotators.size(); ++i) numerator += std::min<std::size_t>(3, matches - (hit[i] ? 1 : 0));
  return static_cast<double>(numerator) / static_cast<double>(3 * annotators.size());
}

AgreementReport student_teacher_agreement(const std::vector<AgreementInput>& records, const ExecLimits& limits) {
  AgreementReport r;
  for (const auto& rec : records) {
    if (rec.scene == nullptr) throw std::invalid_argument("agreement record without a scene");
    ++r.n;
    const ExecOutcome s = run_source(rec.student_program, *rec.scene, limits);
    const ExecOutcome t = run_source(rec.teacher_program, *rec.scene, limits);
    if (s.ok() && t.ok() && answers_match(s.answer(), t.answer())) ++r.agree;
    if (s.ok() && t.ok() && answers_match(s.answer(), rec.gold) && answers_match(t.answer(), rec.gold)) {
      ++r.both_correct;
    }
  }
  return r;
}

double ngram_entropy(const std::vector<std::string>& questions, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n-gram order must be positive");
  std::map<std::vector<std::string>, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& q : questions) {
    const auto tokens = text::split_words(q);
    if (tokens.size() < n) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
      ++total;
    }
  }
  double h = 0.0;
  for (const auto& [gram, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;
}

ThroughputReport throughput(const std::function<std::string(const std::string&)>& generate,
                            const std::vector<std::string>& questions, std::size_t warmup, std::size_t min_sample) {
  if (questions.size() < warmup + min_sample) {
    throw std::invalid_argument("throughput needs at least " + std::to_string(warmup + min_sample) + " questions");
  }
  for (std::size_t i = 0; i < warmup; ++i) generate(questions[i]);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = warmup; i < questions.size(); ++i) generate(questions[i]);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  ThroughputReport r;
  r.sample_size = questions.size() - warmup;
  r.seconds = elapsed.count();
  r.questions_per_second = r.seconds > 0.0 ? static_cast<double>(r.sample_size) / r.seconds : 0.0;
  return r;
}

std::optional<double> program_accuracy(const std::vector<ProgramVerdict>& verdicts) {
  std::size_t reviewed = 0;
  std::size_t correct = 0;
  for (const auto& v : verdicts) {
    if (v.final == FinalVerdict::Unreviewed) continue;
    ++reviewed;
    correct += v.final == FinalVerdict::Correct ? 1 : 0;
  }
  if (reviewed == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(reviewed);
}

json MetricsReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json tp = nullptr;
  if (throughput) {
    tp = json{{"questions_per_second", throughput->questions_per_second},
              {"sample_size", throughput->sample_size},
              {"seconds", throughput->seconds}};
  }
  return json{{"answer_accuracy", opt(answer_accuracy)},
              {"vqa_agreement_accuracy", opt(vqa_agreement_accuracy)},
              {"student_teacher_agreement", opt(student_teacher_agreement)},
              {"program_accuracy", opt(program_accuracy)},
              {"ngram_entropy", opt(ngram_entropy)},
              {"throughput", tp},
              {"records", records},
              {"manifest_hash", manifest_hash}};
}

}  // namespace vpd
