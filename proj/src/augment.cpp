#include "vpd/augment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "vpd/io_error.hpp"
#include "vpd/text.hpp"
#include "vpd_embedded_data.hpp"

namespace vpd {

namespace {

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (auto w = text::trim(cur); !w.empty()) out.push_back(w);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (auto w = text::trim(cur); !w.empty()) out.push_back(w);
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool at_boundary(std::string_view s, std::size_t begin, std::size_t end) {
  return (begin == 0 || !is_word_char(s[begin - 1])) && (end == s.size() || !is_word_char(s[end]));
}

struct Span {
  std::size_t begin;
  std::size_t end;
  std::string replacement;
};

// Whole-word occurrences of `needle` in the folded haystack.
std::vector<std::size_t> find_words(const std::string& folded, const std::string& needle) {
  std::vector<std::size_t> hits;
  if (needle.empty()) return hits;
  for (std::size_t pos = folded.find(needle); pos != std::string::npos; pos = folded.find(needle, pos + 1)) {
    if (at_boundary(folded, pos, pos + needle.size())) hits.push_back(pos);
  }
  return hits;
}

}  // namespace

// ---------------------------------------------------------------------------

CategoryLexicon CategoryLexicon::parse(std::string_view tsv) {
  CategoryLexicon lex;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::invalid_argument("lexicon line " + std::to_string(lineno) + ": expected category<TAB>words");
    }
    const std::string name = text::trim(std::string_view(line).substr(0, tab));
    auto words = split_list(std::string_view(line).substr(tab + 1));
    if (name.empty() || words.empty()) {
      throw std::invalid_argument("lexicon line " + std::to_string(lineno) + ": empty category or word list");
    }
    lex.add_category(name, words);
  }
  return lex;
}

CategoryLexicon CategoryLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void CategoryLexicon::add_category(const std::string& name, const std::vector<std::string>& words) {
  if (words.empty()) throw std::invalid_argument("lexicon category '" + name + "' is empty");
  auto [it, fresh] = categories_.try_emplace(name);
  if (fresh) order_.push_back(name);
  for (const auto& w : words) {
    const std::string key = text::case_fold(w);
    auto [r, inserted] = reverse_.try_emplace(key, name);
    if (!inserted && r->second != name) {
      warnings_.push_back("'" + w + "' listed in '" + r->second + "' and '" + name + "'; keeping '" + r->second + "'");
    }
    if (std::find(it->second.begin(), it->second.end(), w) == it->second.end()) it->second.push_back(w);
  }
}

const std::vector<std::string>& CategoryLexicon::words(const std::string& category) const {
  static const std::vector<std::string> none;
  auto it = categories_.find(category);
  return it == categories_.end() ? none : it->second;
}

std::optional<std::string> CategoryLexicon::category_of(std::string_view word) const {
  auto it = reverse_.find(text::case_fold(text::trim(word)));
  if (it == reverse_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& CategoryLexicon::generic_objects() const {
  return words(std::string(kGenericCategory));
}

const CategoryLexicon& default_lexicon() {
  static const CategoryLexicon lexicon = CategoryLexicon::parse(embedded::kLexicon);
  return lexicon;
}

void ReplacementPolicy::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw std::invalid_argument("replacement probability must be in [0, 1]");
  }
}

std::vector<std::string> LexiconProvider::propose(const std::string& argument, const std::string&,
                                                  const SlotContext&) const {
  if (auto cat = lexicon_->category_of(argument)) return lexicon_->words(*cat);
  // Unknown phrases (whole questions, long descriptions) have no safe
  // word-level substitute.
  if (text::split_words(argument).size() != 1) return {};
  return lexicon_->generic_objects();
}

// ---------------------------------------------------------------------------

ReplacementPlan plan_replacements(const TemplateRecord& record, const ReplacementProvider& provider,
                                  const ReplacementPolicy& policy, Rng& rng) {
  policy.validate();
  std::vector<std::vector<std::size_t>> units;
  if (policy.link_mode == LinkMode::Linked) {
    units = record.args.link_groups;
  } else {
    for (std::size_t i = 0; i < record.args.values.size(); ++i) units.push_back({i});
  }

  ReplacementPlan plan;
  for (const auto& unit : units) {
    ++plan.decisions;
    if (!rng.bernoulli(policy.probability)) continue;
    ++plan.selected;
    const std::string& old_value = record.args.values[unit.front()];
    std::vector<std::string> candidates;
    for (auto& c : provider.propose(old_value, record.question, SlotContext{unit})) {
      if (text::case_fold(c) != text::case_fold(old_value)) candidates.push_back(std::move(c));
    }
    if (candidates.empty()) continue;
    const std::string& drawn = candidates[rng.below(candidates.size())];
    for (std::size_t slot : unit) plan.replacements.push_back({slot, old_value, drawn});
  }
  std::sort(plan.replacements.begin(), plan.replacements.end(),
            [](const Replacement& a, const Replacement& b) { return a.slot < b.slot; });
  return plan;
}

QuestionDetachedArgument::QuestionDetachedArgument(const std::string& argument)
    : std::runtime_error("argument '" + argument + "' does not occur in the question"), argument_(argument) {}

bool contains_word(std::string_view sentence, std::string_view word) {
  const std::string folded = text::case_fold(sentence);
  const std::string w = text::case_fold(text::trim(word));
  return !find_words(folded, w).empty() || !find_words(folded, text::plural(w)).empty();
}

std::string replace_words(std::string_view sentence, const std::vector<std::pair<std::string, std::string>>& subs) {
  const std::string folded = text::case_fold(sentence);
  std::vector<std::pair<std::string, std::string>> order(subs.begin(), subs.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  std::vector<Span> spans;
  auto claim = [&](std::size_t begin, std::size_t end, const std::string& replacement) {
    for (const auto& s : spans) {
      if (begin < s.end && s.begin < end) return;
    }
    spans.push_back({begin, end, replacement});
  };
  for (const auto& [old_value, new_value] : order) {
    const std::string w = text::case_fold(text::trim(old_value));
    const std::string pl = text::plural(w);
    for (std::size_t pos : find_words(folded, pl)) claim(pos, pos + pl.size(), text::plural(new_value));
    for (std::size_t pos : find_words(folded, w)) claim(pos, pos + w.size(), new_value);
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.begin < b.begin; });

  std::string out;
  std::size_t cursor = 0;
  for (const auto& s : spans) {
    out.append(sentence.substr(cursor, s.begin - cursor));
    std::string rep = s.replacement;
    if (!rep.empty() && std::isupper(static_cast<unsigned char>(sentence[s.begin]))) {
      rep[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rep[0])));
    }
    out += rep;
    cursor = s.end;
  }
  out.append(sentence.substr(cursor));
  return out;
}

AugmentedPair apply_plan(const TemplateRecord& record, const ReplacementPlan& plan, DetachedMode mode) {
  std::vector<std::string> values = record.args.values;
  std::vector<std::pair<std::string, std::string>> subs;
  std::set<std::string> seen_old;
  for (const auto& r : plan.replacements) {
    values.at(r.slot) = r.new_value;
    if (!seen_old.insert(text::case_fold(r.old_value)).second) continue;
    if (!contains_word(record.question, r.old_value)) {
      if (mode == DetachedMode::Skip) throw QuestionDetachedArgument(r.old_value);
      continue;
    }
    subs.emplace_back(r.old_value, r.new_value);
  }
  AugmentedPair pair;
  pair.parent_id = record.source_id;
  pair.question = subs.empty() ? record.question : replace_words(record.question, subs);
  pair.program = instantiate(record.tmpl, values);
  pair.replacements = plan.replacements;
  return pair;
}

std::size_t augment_attempt_limit(std::size_t k_per_record) { return 8 * k_per_record + 8; }

std::vector<AugmentedPair> augment_stream(const std::vector<TemplateRecord>& records, std::size_t k_per_record,
                                          const ReplacementProvider& provider, const ReplacementPolicy& policy,
                                          AugmentStats* stats) {
  policy.validate();
  AugmentStats local;
  AugmentStats& st = stats ? *stats : local;
  std::vector<AugmentedPair> out;
  if (k_per_record == 0) {
    st.records += records.size();
    return out;
  }
  for (const auto& record : records) {
    ++st.records;
    Rng rng = Rng::derived(policy.seed, record.source_id.empty() ? record.question : record.source_id);
    std::set<std::pair<std::string, std::string>> seen;
    seen.emplace(record.question, instantiate(record.tmpl, record.args));
    std::size_t emitted = 0;
    const std::size_t limit = augment_attempt_limit(k_per_record);
    for (std::size_t attempt = 0; attempt < limit && emitted < k_per_record; ++attempt) {
      ++st.attempts;
      ReplacementPlan plan = plan_replacements(record, provider, policy, rng);
      if (plan.empty()) {
        ++st.empty_plans;
        continue;
      }
      AugmentedPair pair;
      try {
        pair = apply_plan(record, plan, policy.question_detached_mode);
      } catch (const QuestionDetachedArgument&) {
        ++st.detached_skips;
        continue;
      }
      if (!seen.emplace(pair.question, pair.program).second) {
        ++st.duplicates;
        continue;
      }
      pair.id = record.source_id + "-aug" + std::to_string(emitted);
      out.push_back(std::move(pair));
      ++emitted;
      ++st.emitted;
    }
  }
  return out;
}

}  // namespace vpd
