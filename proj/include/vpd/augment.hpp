#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vpd/rng.hpp"
#include "vpd/template.hpp"

namespace vpd {

/// Word lists by argument category plus the generic object list.
class CategoryLexicon {
 public:
  /// Category whose words form the generic fallback list.
  static constexpr std::string_view kGenericCategory = "object";

  /// Lines of `category<TAB>word1,word2,...`; blank lines and `#` comments
  /// are ignored. A word listed under several categories stays in the first.
  static CategoryLexicon parse(std::string_view tsv);
  static CategoryLexicon load(const std::string& path);

  void add_category(const std::string& name, const std::vector<std::string>& words);

  const std::vector<std::string>& category_names() const noexcept { return order_; }
  const std::vector<std::string>& words(const std::string& category) const;
  std::optional<std::string> category_of(std::string_view word) const;
  const std::vector<std::string>& generic_objects() const;
  /// Duplicate-word notices collected while loading.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::string>> categories_;
  std::map<std::string, std::string> reverse_;
  std::vector<std::string> warnings_;
};

/// The lexicon shipped in `data/lexicon.tsv`.
const CategoryLexicon& default_lexicon();

enum class LinkMode { Linked, Independent };
enum class DetachedMode { Skip, Provider };

struct ReplacementPolicy {
  double probability = 0.5;
  std::uint64_t seed = 0;
  LinkMode link_mode = LinkMode::Linked;
  DetachedMode question_detached_mode = DetachedMode::Skip;

  /// Throws std::invalid_argument when probability is outside [0, 1].
  void validate() const;
};

/// Slots that will share the proposed replacement.
struct SlotContext {
  std::vector<std::size_t> slots;
};

/// Source of replacement candidates for one argument.
class ReplacementProvider {
 public:
  virtual ~ReplacementProvider() = default;
  virtual std::vector<std::string> propose(const std::string& argument, const std::string& question,
                                           const SlotContext& context) const = 0;
};

/// Category list when the argument is known, else the generic object list.
class LexiconProvider : public ReplacementProvider {
 public:
  explicit LexiconProvider(const CategoryLexicon& lexicon) : lexicon_(&lexicon) {}
  std::vector<std::string> propose(const std::string& argument, const std::string& question,
                                   const SlotContext& context) const override;

 private:
  const CategoryLexicon* lexicon_;
};

struct Replacement {
  std::size_t slot = 0;
  std::string old_value;
  std::string new_value;
  bool operator==(const Replacement&) const = default;
};

struct ReplacementPlan {
  /// One entry per replaced slot, ordered by slot index.
  std::vector<Replacement> replacements;
  /// Bernoulli draws made and how many came up "replace".
  std::size_t decisions = 0;
  std::size_t selected = 0;

  bool empty() const noexcept { return replacements.empty(); }
};

/// Decides which slots (or link groups) to replace and draws new words.
/// A drawn word always differs from the original when the candidate list
/// offers an alternative; otherwise the slot is left alone.
ReplacementPlan plan_replacements(const TemplateRecord& record, const ReplacementProvider& provider,
                                  const ReplacementPolicy& policy, Rng& rng);

class QuestionDetachedArgument : public std::runtime_error {
 public:
  explicit QuestionDetachedArgument(const std::string& argument);
  const std::string& argument() const noexcept { return argument_; }

 private:
  std::string argument_;
};

struct AugmentedPair {
  std::string id;
  std::string question;
  std::string program;
  std::string parent_id;
  std::vector<Replacement> replacements;
};

/// Rewrites every whole-word occurrence of each replaced argument in the
/// question, longest argument first, and fills the template with the new
/// values. Plural forms of an argument are rewritten to the plural of the
/// replacement.
AugmentedPair apply_plan(const TemplateRecord& record, const ReplacementPlan& plan,
                         DetachedMode mode = DetachedMode::Skip);

/// Whole-word, case-insensitive substitution of several words at once.
std::string replace_words(std::string_view sentence, const std::vector<std::pair<std::string, std::string>>& subs);

/// True when `word` (or its plural) occurs as a whole word in `sentence`.
bool contains_word(std::string_view sentence, std::string_view word);

struct AugmentStats {
  std::size_t records = 0;
  std::size_t attempts = 0;
  std::size_t emitted = 0;
  std::size_t duplicates = 0;
  std::size_t detached_skips = 0;
  std::size_t empty_plans = 0;
};

/// Produces up to `k_per_record` distinct pairs per record, each differing
/// from its source. Each record draws from its own stream derived from the
/// policy seed and the record id, so output does not depend on record order.
std::vector<AugmentedPair> augment_stream(const std::vector<TemplateRecord>& records, std::size_t k_per_record,
                                          const ReplacementProvider& provider, const ReplacementPolicy& policy,
                                          AugmentStats* stats = nullptr);

/// Retry budget for duplicate or skipped attempts per record.
std::size_t augment_attempt_limit(std::size_t k_per_record);

}  // namespace vpd
