#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "vpd/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "vpd/io_error.hpp"
#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/rng.hpp"
#include "vpd/text.hpp"
#include "vpd_embedded_data.hpp"

namespace vpd {

using nlohmann::json;

std::vector<double> HashedEmbedder::embed(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  auto tokens = text::word_tokens(text);
  if (tokens.empty()) tokens = text::split_words(text);
  for (const auto& t : tokens) v[text::fnv1a64(t) % dimension_] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---------------------------------------------------------------------------
// ExamplePool

bool ExamplePool::contains(const std::string& question, const std::string& program) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const PoolEntry& e) { return e.question == question && e.program == program; });
}

bool ExamplePool::add(std::string question, std::string program, const Embedder& embedder, std::string scene_id,
                      std::string answer) {
  if (contains(question, program)) return false;
  PoolEntry e;
  e.embedding = embedder.embed(question);
  e.question = std::move(question);
  e.program = std::move(program);
  e.inserted_at_index = entries_.size();
  e.scene_id = std::move(scene_id);
  e.answer = std::move(answer);
  entries_.push_back(std::move(e));
  return true;
}

void ExamplePool::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write pool file " + path);
  for (const auto& e : entries_) {
    out << json{{"question", e.question},
                {"program", e.program},
                {"inserted_at_index", e.inserted_at_index},
                {"scene_id", e.scene_id},
                {"answer", e.answer}}
               .dump()
        << '\n';
  }
}

ExamplePool ExamplePool::load_jsonl(const std::string& path, const Embedder& embedder) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pool file " + path);
  ExamplePool pool;
  std::string line;
  std::vector<std::pair<std::size_t, PoolEntry>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      PoolEntry e;
      e.question = j.at("question").get<std::string>();
      e.program = j.at("program").get<std::string>();
      e.scene_id = j.value("scene_id", "");
      e.answer = j.value("answer", "");
      const std::size_t idx = j.value("inserted_at_index", rows.size());
      rows.emplace_back(idx, std::move(e));
    } catch (const json::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [idx, e] : rows) {
    pool.add(std::move(e.question), std::move(e.program), embedder, std::move(e.scene_id), std::move(e.answer));
  }
  return pool;
}

std::vector<const PoolEntry*> retrieve(std::string_view question, const ExamplePool& pool, std::size_t k,
                                       const Embedder& embedder) {
  std::vector<const PoolEntry*> out;
  const auto& entries = pool.entries();
  if (entries.size() <= k) {
    for (const auto& e : entries) out.push_back(&e);
    return out;
  }
  const auto q = embedder.embed(question);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) scored.emplace_back(cosine_similarity(q, entries[i].embedding), i);
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t i = 0; i < k; ++i) out.push_back(&entries[scored[i].second]);
  return out;
}

// ---------------------------------------------------------------------------
// Prompts

std::string default_prompt_template() { return std::string(embedded::kPromptTemplate); }

std::string assemble_prompt(std::string_view question, const std::vector<const PoolEntry*>& retrieved,
                            std::string_view prompt_template) {
  std::string examples;
  for (std::size_t i = 0; i < retrieved.size(); ++i) {
    if (i) examples += "\n\n";
    examples += "Question: " + retrieved[i]->question + "\nProgram:\n" + retrieved[i]->program;
  }
  std::string out(prompt_template);
  auto fill = [&out](std::string_view slot, const std::string& value) {
    bool found = false;
    for (std::size_t pos = out.find(slot); pos != std::string::npos; pos = out.find(slot, pos + value.size())) {
      out.replace(pos, slot.size(), value);
      found = true;
    }
    return found;
  };
  if (!fill("{examples}", examples)) {
    throw std::invalid_argument("prompt template has no {examples} slot");
  }
  const std::string q(question);
  if (!fill("{question}", q)) out += "\nQuestion: " + q + "\nProgram:\n";
  return out;
}

namespace {

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  lines.push_back(std::move(cur));
  return lines;
}

constexpr std::string_view kQuestionTag = "Question: ";

}  // namespace

std::vector<PromptExample> prompt_examples(std::string_view prompt) {
  const auto lines = lines_of(prompt);
  std::vector<PromptExample> out;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    if (lines[i].rfind(kQuestionTag, 0) != 0 || lines[i + 1] != "Program:") continue;
    PromptExample ex;
    ex.question = lines[i].substr(kQuestionTag.size());
    std::size_t j = i + 2;
    for (; j < lines.size() && !lines[j].empty(); ++j) {
      if (!ex.program.empty()) ex.program += '\n';
      ex.program += lines[j];
    }
    if (!ex.program.empty()) out.push_back(std::move(ex));
    i = j - 1;
  }
  return out;
}

std::string prompt_question(std::string_view prompt) {
  const auto lines = lines_of(prompt);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (it->rfind(kQuestionTag, 0) == 0) return it->substr(kQuestionTag.size());
  }
  return {};
}

// ---------------------------------------------------------------------------
// Teachers

void ReplayTeacher::add(const std::string& question, std::string completion) {
  completions_[question].push_back(std::move(completion));
}

ReplayTeacher ReplayTeacher::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open replay file " + path);
  ReplayTeacher t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      t.add(j.at("question").get<std::string>(), j.at("completion").get<std::string>());
    } catch (const json::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return t;
}

std::string ReplayTeacher::generate(const std::string& prompt) {
  const std::string q = prompt_question(prompt);
  auto it = completions_.find(q);
  if (it == completions_.end()) throw TransportError("no archived completion for question: " + q);
  std::size_t& cur = cursor_[q];
  if (cur >= it->second.size()) throw TransportError("archived completions exhausted for question: " + q);
  return it->second[cur++];
}

HttpTeacher::HttpTeacher(std::string url, std::string token, TeacherConfig config, int timeout_seconds)
    : token_(std::move(token)), config_(config), timeout_seconds_(timeout_seconds) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("teacher URL needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::unique_ptr<HttpTeacher> HttpTeacher::from_environment(TeacherConfig config) {
  const char* url = std::getenv("VPD_TEACHER_URL");
  if (url == nullptr || *url == '\0') throw std::invalid_argument("VPD_TEACHER_URL is not set");
  const char* token = std::getenv("VPD_TEACHER_TOKEN");
  return std::make_unique<HttpTeacher>(url, token ? token : "", config);
}

std::string HttpTeacher::generate(const std::string& prompt) {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  const json body{{"prompt", prompt},
                  {"temperature", config_.temperature},
                  {"top_p", config_.top_p},
                  {"frequency_penalty", config_.frequency_penalty},
                  {"presence_penalty", config_.presence_penalty},
                  {"max_tokens", config_.max_output_tokens}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TransportError("teacher request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("teacher returned HTTP " + std::to_string(res->status));
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("completion") || !reply["completion"].is_string()) {
    throw TransportError("teacher reply lacks a string 'completion'");
  }
  return reply["completion"].get<std::string>();
}

namespace {

const char* replacement_name(const std::string& name) {
  static const std::map<std::string, const char*> names{
      {"find", "detect"},          {"classify", "label"},           {"verify_property", "has_property"},
      {"crop_position", "crop"},   {"simple_query", "ask"},         {"filter_img", "filter_patches"},
      {"exists", "any_exist"},     {"count", "count_all"},          {"choose_relationship", "relationship"},
      {"verify_relationship", "relation_holds"}, {"len", "length"}, {"str", "to_text"},
      {"bool_to_yesno", "yes_or_no"}};
  auto it = names.find(name);
  return it == names.end() ? nullptr : it->second;
}

// First call (other than ImagePatch) in statement order, found by walking
// each statement's value expression.
template <class F>
bool first_call(Expr& e, F&& f) {
  if (auto* c = e.get_if<Call>()) {
    for (auto& a : c->args) {
      if (first_call(a, f)) return true;
    }
    if (c->callee != "ImagePatch") return f(e);
    return false;
  }
  if (auto* m = e.get_if<MethodCall>()) {
    if (first_call(*m->receiver, f)) return true;
    for (auto& a : m->args) {
      if (first_call(a, f)) return true;
    }
    return f(e);
  }
  if (auto* i = e.get_if<Index>()) return first_call(*i->receiver, f) || first_call(*i->index, f);
  if (auto* a = e.get_if<Attribute>()) return first_call(*a->receiver, f);
  if (auto* c = e.get_if<Compare>()) return first_call(*c->left, f) || first_call(*c->right, f);
  if (auto* b = e.get_if<BinOp>()) return first_call(*b->left, f) || first_call(*b->right, f);
  if (auto* b = e.get_if<BoolOp>()) {
    for (auto& x : b->operands) {
      if (first_call(x, f)) return true;
    }
    return false;
  }
  if (auto* n = e.get_if<Not>()) return first_call(*n->operand, f);
  return false;
}

template <class F>
bool first_call(Program& p, F&& f) {
  for (auto& s : p.statements) {
    Expr* value = nullptr;
    if (auto* a = std::get_if<Assign>(&s.node)) value = &a->value;
    if (auto* x = std::get_if<ExprStmt>(&s.node)) value = &x->value;
    if (value != nullptr && first_call(*value, f)) return true;
  }
  return false;
}

}  // namespace

std::string corrupt_program(const std::string& program, Corruption kind) {
  Program p = parse(program);
  bool changed = false;
  switch (kind) {
    case Corruption::WrongFunction:
      changed = first_call(p, [](Expr& e) {
        std::string& name = e.is<Call>() ? e.as<Call>().callee : e.as<MethodCall>().method;
        const char* other = replacement_name(name);
        if (other == nullptr) return false;
        name = other;
        return true;
      });
      break;
    case Corruption::DroppedSlot:
      changed = first_call(p, [](Expr& e) {
        auto& args = e.is<Call>() ? e.as<Call>().args : e.as<MethodCall>().args;
        auto it = std::find_if(args.begin(), args.end(),
                               [](const Expr& a) { return a.is<Str>() || a.is<ListLit>(); });
        if (it == args.end()) return false;
        args.erase(it);
        return true;
      });
      break;
    case Corruption::AnswerTypeFlip:
      for (auto it = p.statements.rbegin(); it != p.statements.rend() && !changed; ++it) {
        auto* a = std::get_if<Assign>(&it->node);
        if (a == nullptr) continue;
        const auto* t = std::get_if<NameTarget>(&a->targets.front().node);
        if (t == nullptr || t->id != "answer") continue;
        if (auto* c = a->value.get_if<Call>(); c != nullptr && c->callee == "bool_to_yesno") {
          c->callee = "str";
        } else {
          a->value = build::call("bool_to_yesno", {std::move(a->value)});
        }
        changed = true;
      }
      break;
  }
  if (!changed) {
    p.statements.push_back(Stmt{ExprStmt{build::call("undefined_step", {})}});
  }
  return print_canonical(p);
}

OracleTeacher::OracleTeacher(std::uint64_t seed, double base, double step) : seed_(seed), base_(base), step_(step) {}

void OracleTeacher::add_gold(const std::string& question, const std::string& program) {
  gold_.insert_or_assign(question, Gold{program, extract(question, program).tmpl});
}

double OracleTeacher::reliability(std::size_t matching_examples) const {
  return std::min(1.0, base_ + step_ * static_cast<double>(matching_examples));
}

std::string OracleTeacher::generate(const std::string& prompt) {
  const std::string q = prompt_question(prompt);
  auto it = gold_.find(q);
  if (it == gold_.end()) {
    return "image_patch = ImagePatch(image)\nanswer = image_patch.simple_query(" + quote_string(q) + ")";
  }
  const Gold& gold = it->second;
  std::size_t matching = 0;
  for (const auto& ex : prompt_examples(prompt)) {
    try {
      if (extract(ex.question, ex.program).tmpl == gold.tmpl) ++matching;
    } catch (const SyntaxError&) {
    }
  }
  const std::size_t call = calls_[q]++;
  Rng rng = Rng::derived(seed_, q + "\x1f" + std::to_string(call));
  if (rng.bernoulli(reliability(matching))) return gold.program;
  static constexpr Corruption kinds[] = {Corruption::WrongFunction, Corruption::DroppedSlot,
                                         Corruption::AnswerTypeFlip};
  return corrupt_program(gold.program, kinds[rng.below(3)]);
}

std::string normalize_completion(std::string_view completion) {
  std::string s = text::trim(completion);
  if (s.rfind("```", 0) == 0) {
    const auto nl = s.find('\n');
    s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
    const auto fence = s.rfind("```");
    if (fence != std::string::npos) s = s.substr(0, fence);
    s = text::trim(s);
  }
  const bool defines = s.find("image_patch = ImagePatch(") != std::string::npos ||
                       s.find("image_patch=ImagePatch(") != std::string::npos;
  if (!defines && s.find("image_patch") != std::string::npos) s = "image_patch = ImagePatch(image)\n" + s;
  return s;
}

// ---------------------------------------------------------------------------
// Annotation loop

const char* to_string(AnnotationStatus status) {
  switch (status) {
    case AnnotationStatus::Validated: return "validated";
    case AnnotationStatus::Discarded: return "discarded";
    case AnnotationStatus::TransportFailure: return "transport_error";
  }
  return "unknown";
}

bool answers_match(std::string_view predicted, std::string_view gold) {
  return text::normalize(predicted) == text::normalize(gold);
}

AnnotationResult annotate(const std::vector<AnnotationInput>& records, const std::map<std::string, SceneGraph>& scenes,
                          TeacherClient& teacher, ExamplePool& pool, const Embedder& embedder,
                          const AnnotationRunConfig& config,
                          const std::function<void(const AnnotationOutcome&)>& on_outcome) {
  AnnotationResult result;
  auto& st = result.stats;
  const std::size_t n =
      config.max_questions == 0 ? records.size() : std::min(records.size(), config.max_questions);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i];
    ++st.processed;
    AnnotationOutcome out;
    out.id = rec.id;
    auto scene = scenes.find(rec.scene_id);
    if (scene == scenes.end()) {
      out.status = AnnotationStatus::Discarded;
      out.reason = "unknown scene_id '" + rec.scene_id + "'";
      ++st.discarded;
    } else {
      const std::string prompt =
          assemble_prompt(rec.question, retrieve(rec.question, pool, config.retrieval_k, embedder),
                          config.prompt_template);
      std::optional<std::string> completion;
      std::string transport_message;
      for (int attempt = 0; attempt <= config.max_retries && !completion; ++attempt) {
        try {
          completion = teacher.generate(prompt);
        } catch (const TransportError& e) {
          transport_message = e.what();
        }
      }
      if (!completion) {
        out.status = AnnotationStatus::TransportFailure;
        out.reason = transport_message;
        ++st.transport_errors;
      } else {
        out.program = normalize_completion(*completion);
        const ExecOutcome exec = run_source(out.program, scene->second, config.limits);
        if (exec.ok() && answers_match(exec.answer(), rec.answer)) {
          out.status = AnnotationStatus::Validated;
          out.predicted = exec.answer();
          ++st.validated;
          if (pool.add(rec.question, out.program, embedder, rec.scene_id, rec.answer)) {
            ++st.pool_inserts;
          } else {
            ++st.duplicates;
          }
        } else {
          out.status = AnnotationStatus::Discarded;
          ++st.discarded;
          if (exec.ok()) {
            out.predicted = exec.answer();
            out.reason = "answer mismatch: got '" + exec.answer() + "', expected '" + rec.answer + "'";
          } else {
            out.reason = exec.describe();
          }
        }
      }
    }
    if (on_outcome) on_outcome(out);
    result.outcomes.push_back(std::move(out));
  }
  return result;
}

double pool_soundness(const ExamplePool& pool, const std::map<std::string, SceneGraph>& scenes,
                      const ExecLimits& limits) {
  if (pool.size() == 0) return 1.0;
  std::size_t sound = 0;
  for (const auto& e : pool.entries()) {
    auto scene = scenes.find(e.scene_id);
    if (scene == scenes.end()) continue;
    const ExecOutcome o = run_source(e.program, scene->second, limits);
    if (o.ok() && answers_match(o.answer(), e.answer)) ++sound;
  }
  return static_cast<double>(sound) / static_cast<double>(pool.size());
}

}  // namespace vpd
