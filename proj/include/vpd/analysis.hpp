#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vpd/augment.hpp"
#include "vpd/exec.hpp"
#include "vpd/scene.hpp"

namespace vpd {

enum class Flag {
  NotExecutable,
  ApiViolation,
  ContradictsQuestion,
  DoesNotAnswerQuestion,
  MissingQuestionInformation,
};

using FlagSet = std::set<Flag>;

const char* to_string(Flag flag);
std::optional<Flag> flag_from_string(std::string_view name);

/// Word classes consulted by the checkers.
struct CheckLexicon {
  std::set<std::string> nouns;
  std::set<std::string> attributes;
  /// Relation and direction words.
  std::set<std::string> relations;

  /// Maps lexicon categories to word classes: the generic object category
  /// gives nouns, `relation` and `direction` give relations, `property`
  /// (classify categories) is ignored and every other category is treated
  /// as attributes.
  static CheckLexicon from_categories(const CategoryLexicon& lexicon);
};

/// Word classes of the shipped lexicon.
const CheckLexicon& default_check_lexicon();

/// Rule-based checks that need no human judgment.
///
/// NotExecutable: parse failure, unknown function or method, wrong argument
/// count, choose_relationship options that are not a list, classify('object'),
/// or a crop_position result indexed directly or on the following line.
/// ApiViolation: find/filter_img given a relation or direction word, find
/// given an attribute, verify_property given a noun, crop_position given a
/// direction outside the supported set.
FlagSet static_check(std::string_view program_source, std::string_view question, const CheckLexicon& lexicon);

/// Triage hints; these never fail a program on their own.
///
/// DoesNotAnswerQuestion: an "X or Y" question answered with bool_to_yesno,
/// or a yes/no question answered with a count. MissingQuestionInformation:
/// an attribute word directly before a searched noun that appears in no
/// argument. ContradictsQuestion: a question direction relative to a noun is
/// the opposite of a crop_position direction taken from that noun.
FlagSet heuristic_check(std::string_view question, std::string_view program_source, const CheckLexicon& lexicon);

enum class FlagSource { Static, Heuristic, Human };
enum class FinalVerdict { Correct, Incorrect, Unreviewed };

const char* to_string(FlagSource source);
const char* to_string(FinalVerdict verdict);

struct ProgramVerdict {
  std::string record_id;
  std::map<Flag, FlagSource> flags;
  FinalVerdict final = FinalVerdict::Unreviewed;
  std::string annotator;
  std::string timestamp;
};

/// Static and heuristic flags; static flags make the verdict incorrect.
ProgramVerdict automatic_verdict(std::string record_id, std::string_view question, std::string_view program,
                                 const CheckLexicon& lexicon);

struct HumanVerdict {
  bool correct = false;
  /// Required when `correct` is false.
  FlagSet flags;
  std::string annotator;
  std::string timestamp;
};

/// Applies a human review: heuristic flags are replaced by the reviewer's
/// flags; static flags stay.
ProgramVerdict record_verdict(ProgramVerdict verdict, const HumanVerdict& review);

nlohmann::json verdict_to_json(const ProgramVerdict& verdict);
ProgramVerdict verdict_from_json(const nlohmann::json& j);

/// Appends one JSONL row per call.
void append_verdict(const std::string& path, const ProgramVerdict& verdict);
/// Latest verdict per record id.
std::map<std::string, ProgramVerdict> load_verdicts(const std::string& path);

// ---------------------------------------------------------------------------
// Metrics

double accuracy_exact(const std::vector<std::string>& predictions, const std::vector<std::string>& gold);

/// Leave-one-annotator-out agreement: for each fold, min(matches among the
/// remaining annotators / 3, 1), averaged over folds.
double accuracy_vqa(std::string_view prediction, const std::vector<std::string>& annotators);

struct AgreementInput {
  std::string student_program;
  std::string teacher_program;
  const SceneGraph* scene = nullptr;
  std::string gold;
};

struct AgreementReport {
  std::size_t n = 0;
  std::size_t agree = 0;
  std::size_t both_correct = 0;

  double agreement() const { return n == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(n); }
  double joint_accuracy() const {
    return n == 0 ? 0.0 : static_cast<double>(both_correct) / static_cast<double>(n);
  }
};

/// Records agree when both programs produce equal answers; a failure on
/// either side is a disagreement.
AgreementReport student_teacher_agreement(const std::vector<AgreementInput>& records, const ExecLimits& limits = {});

/// Shannon entropy in bits of the word n-gram distribution. Tokens are
/// whitespace-separated and case-folded; n-grams do not cross questions.
double ngram_entropy(const std::vector<std::string>& questions, std::size_t n = 2);

struct ThroughputReport {
  double questions_per_second = 0.0;
  std::size_t sample_size = 0;
  double seconds = 0.0;
};

/// Times `generate` over `questions` after running the first `warmup`
/// questions untimed. Throws std::invalid_argument when fewer than
/// `min_sample` questions remain to be timed.
ThroughputReport throughput(const std::function<std::string(const std::string&)>& generate,
                            const std::vector<std::string>& questions, std::size_t warmup = 10,
                            std::size_t min_sample = 100);

/// Fraction of reviewed verdicts judged correct.
std::optional<double> program_accuracy(const std::vector<ProgramVerdict>& verdicts);

struct MetricsReport {
  std::optional<double> answer_accuracy;
  std::optional<double> vqa_agreement_accuracy;
  std::optional<double> student_teacher_agreement;
  std::optional<double> program_accuracy;
  std::optional<double> ngram_entropy;
  std::optional<ThroughputReport> throughput;
  std::size_t records = 0;
  std::string manifest_hash;

  nlohmann::json to_json() const;
};

}  // namespace vpd
