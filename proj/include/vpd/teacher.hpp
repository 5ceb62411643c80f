#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vpd/exec.hpp"
#include "vpd/scene.hpp"
#include "vpd/template.hpp"

namespace vpd {

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Token counts hashed into a fixed number of buckets, L2-normalized.
class HashedEmbedder : public Embedder {
 public:
  explicit HashedEmbedder(std::size_t dimension = 512) : dimension_(dimension) {}
  std::vector<double> embed(std::string_view text) const override;
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::size_t dimension_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct PoolEntry {
  std::string question;
  std::string program;
  std::vector<double> embedding;
  std::size_t inserted_at_index = 0;
  /// Provenance used to re-execute the entry.
  std::string scene_id;
  std::string answer;
};

/// Append-only store of validated examples.
class ExamplePool {
 public:
  /// Appends unless the same (question, program) pair is already present.
  bool add(std::string question, std::string program, const Embedder& embedder, std::string scene_id = {},
           std::string answer = {});
  bool contains(const std::string& question, const std::string& program) const;

  const std::vector<PoolEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// JSONL rows of {question, program, inserted_at_index, scene_id, answer}.
  void save_jsonl(const std::string& path) const;
  static ExamplePool load_jsonl(const std::string& path, const Embedder& embedder);

 private:
  std::vector<PoolEntry> entries_;
};

/// All entries in insertion order when the pool holds at most `k`; else the
/// `k` most similar to the question, most similar first, ties by insertion.
std::vector<const PoolEntry*> retrieve(std::string_view question, const ExamplePool& pool, std::size_t k,
                                       const Embedder& embedder);

/// Shipped teacher prompt (`data/prompt_template.txt`).
std::string default_prompt_template();

/// Renders examples as `Question: ...` / `Program:` blocks at `{examples}`
/// and fills `{question}`; the question is appended when the template has
/// no `{question}` slot.
std::string assemble_prompt(std::string_view question, const std::vector<const PoolEntry*>& retrieved,
                            std::string_view prompt_template);

struct PromptExample {
  std::string question;
  std::string program;
};

/// Recovers the example blocks and the final question from an assembled
/// prompt.
std::vector<PromptExample> prompt_examples(std::string_view prompt);
std::string prompt_question(std::string_view prompt);

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling settings forwarded to the teacher endpoint.
struct TeacherConfig {
  double temperature = 0.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_output_tokens = 256;
};

class TeacherClient {
 public:
  virtual ~TeacherClient() = default;
  /// Throws TransportError when no completion could be obtained.
  virtual std::string generate(const std::string& prompt) = 0;
};

/// Serves archived completions. Repeated questions consume their archived
/// completions in file order.
class ReplayTeacher : public TeacherClient {
 public:
  void add(const std::string& question, std::string completion);
  /// JSONL rows of {question, completion}.
  static ReplayTeacher load_jsonl(const std::string& path);
  std::string generate(const std::string& prompt) override;

 private:
  std::map<std::string, std::vector<std::string>> completions_;
  std::map<std::string, std::size_t> cursor_;
};

/// POSTs {prompt, temperature, top_p, frequency_penalty, presence_penalty,
/// max_tokens} and reads {completion}.
class HttpTeacher : public TeacherClient {
 public:
  HttpTeacher(std::string url, std::string token = {}, TeacherConfig config = {}, int timeout_seconds = 60);
  /// Endpoint from VPD_TEACHER_URL, token from VPD_TEACHER_TOKEN.
  static std::unique_ptr<HttpTeacher> from_environment(TeacherConfig config = {});
  std::string generate(const std::string& prompt) override;

 private:
  std::string base_;
  std::string path_;
  std::string token_;
  TeacherConfig config_;
  int timeout_seconds_;
};

enum class Corruption { WrongFunction, DroppedSlot, AnswerTypeFlip };

/// Corrupts a program so that it no longer answers its question.
std::string corrupt_program(const std::string& program, Corruption kind);

/// Simulated teacher. Knows the gold program for each question and emits it
/// with probability r(n) = min(1, base + step * n), where n counts prompt
/// examples sharing the gold template; otherwise a corrupted program.
class OracleTeacher : public TeacherClient {
 public:
  struct Gold {
    std::string program;
    Template tmpl;
  };

  OracleTeacher(std::uint64_t seed, double base = 0.2, double step = 0.1);
  void add_gold(const std::string& question, const std::string& program);
  double reliability(std::size_t matching_examples) const;
  std::string generate(const std::string& prompt) override;

 private:
  std::uint64_t seed_;
  double base_;
  double step_;
  std::map<std::string, Gold> gold_;
  std::map<std::string, std::size_t> calls_;
};

/// Removes code fences and prepends the root patch binding when the program
/// uses `image_patch` without defining it.
std::string normalize_completion(std::string_view completion);

struct AnnotationRunConfig {
  std::size_t retrieval_k = 50;
  /// 0 means no limit.
  std::size_t max_questions = 0;
  std::uint64_t seed = 0;
  std::string prompt_template = default_prompt_template();
  /// Extra attempts after a TransportError.
  int max_retries = 2;
  ExecLimits limits;
};

struct AnnotationInput {
  std::string id;
  std::string question;
  std::string answer;
  std::string scene_id;
};

enum class AnnotationStatus { Validated, Discarded, TransportFailure };

const char* to_string(AnnotationStatus status);

struct AnnotationOutcome {
  std::string id;
  AnnotationStatus status = AnnotationStatus::Discarded;
  std::string program;
  std::string predicted;
  std::string reason;
};

struct AnnotationStats {
  std::size_t processed = 0;
  std::size_t validated = 0;
  std::size_t discarded = 0;
  std::size_t transport_errors = 0;
  std::size_t pool_inserts = 0;
  std::size_t duplicates = 0;

  double validation_rate() const {
    return processed == 0 ? 0.0 : static_cast<double>(validated) / static_cast<double>(processed);
  }
};

struct AnnotationResult {
  std::vector<AnnotationOutcome> outcomes;
  AnnotationStats stats;
};

/// Answers compare after case folding, punctuation stripping and
/// whitespace collapsing.
bool answers_match(std::string_view predicted, std::string_view gold);

/// Sequential teacher annotation. Each validated program joins the pool
/// before the next question is prompted.
AnnotationResult annotate(const std::vector<AnnotationInput>& records, const std::map<std::string, SceneGraph>& scenes,
                          TeacherClient& teacher, ExamplePool& pool, const Embedder& embedder,
                          const AnnotationRunConfig& config,
                          const std::function<void(const AnnotationOutcome&)>& on_outcome = {});

/// Fraction of pool entries whose program still yields their recorded
/// answer on their scene.
double pool_soundness(const ExamplePool& pool, const std::map<std::string, SceneGraph>& scenes,
                      const ExecLimits& limits = {});

}  // namespace vpd
