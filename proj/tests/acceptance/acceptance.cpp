// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the oracles in tests/support.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "vpd/analysis.hpp"
#include "vpd/augment.hpp"
#include "vpd/bench.hpp"
#include "vpd/exec.hpp"
#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/rng.hpp"
#include "vpd/teacher.hpp"
#include "vpd/template.hpp"

using namespace vpd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int number, const char* name, const std::function<Result()>& criterion) {
  Result r;
  try {
    r = criterion();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  if (!r.pass) ++failures;
  std::printf("[%s] %2d %-24s %s\n", r.pass ? "PASS" : "FAIL", number, name, r.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Benchmark bench(std::size_t scenes, std::uint64_t seed) {
  BenchmarkConfig c = default_benchmark_config();
  c.n_scenes = scenes;
  c.seed = seed;
  return gen_bench(c);
}

std::vector<TemplateRecord> template_records(const Benchmark& b) {
  std::vector<TemplateRecord> out;
  for (const auto& item : b.items) out.push_back(extract(item.record.question, item.program, item.record.id));
  return out;
}

// -------------------------------------------------------------------------

Result renamer_conformance() {
  const auto t0 = Clock::now();
  struct Case {
    std::string source;
    std::string expected;
  };
  const std::vector<Case> cases{
      {fixtures::kDogProgram,
       "image_patch=ImagePatch(image)\nvar1=image_patch.find('dog')\nanswer=var1.classify('color')"},
      {"image_patch = ImagePatch(image)\n"
       "patches = image_patch.find('dog')\n"
       "total = 0\n"
       "for patch in patches:\n"
       "    legs = patch.find('leg')\n"
       "    total = total + len(legs)\n"
       "answer = str(total)",
       "image_patch=ImagePatch(image)\n"
       "var1=image_patch.find('dog')\n"
       "var2=0\n"
       "for temp_var_1 in var1:\n"
       "    var3=temp_var_1.find('leg')\n"
       "    var2=var2 + len(var3)\n"
       "answer=str(var2)"},
      {"image_patch = ImagePatch(image)\n"
       "dogs = image_patch.find('dog')\n"
       "brown = [d for d in dogs if d.verify_property('brown')]\n"
       "answer = bool_to_yesno(len(brown) > 0)",
       "image_patch=ImagePatch(image)\n"
       "var1=image_patch.find('dog')\n"
       "var2=[temp_var_1 for temp_var_1 in var1 if temp_var_1.verify_property('brown')]\n"
       "answer=bool_to_yesno(len(var2) > 0)"},
      {"image_patch = ImagePatch(image)\n"
       "with image_patch.crop_position('left', image_patch) as left:\n"
       "    cars = image_patch.find('car')\n"
       "    n = len(cars)\n"
       "answer = str(n)",
       "image_patch=ImagePatch(image)\n"
       "with image_patch.crop_position('left', image_patch) as temp_var_1:\n"
       "    var1=image_patch.find('car')\n"
       "    var2=len(var1)\n"
       "answer=str(var2)"},
  };
  int matched = 0;
  for (const auto& c : cases) {
    if (print_canonical(rename_variables(parse(c.source))) == c.expected) ++matched;
  }
  const double secs = seconds_since(t0);
  return {matched == 4 && secs < 1.0,
          std::to_string(matched) + "/4 byte-exact, " + fmt("%.3f s (< 1 s)", secs)};
}

Result round_trip() {
  oracle::RandomProgram gen(2024);
  int failed = 0;
  for (int i = 0; i < 1000; ++i) {
    const Program p = gen.next();
    try {
      if (!(parse(print_canonical(p)) == p)) ++failed;
    } catch (const SyntaxError&) {
      ++failed;
    }
  }
  return {failed == 0, std::to_string(failed) + " failures in 1000 random programs"};
}

Result template_invariance(const std::vector<TemplateRecord>& records) {
  const LexiconProvider provider(default_lexicon());
  ReplacementPolicy policy;
  policy.seed = 99;
  std::map<std::string, const TemplateRecord*> parent;
  for (const auto& r : records) parent[r.source_id] = &r;

  std::vector<AugmentedPair> pairs;
  for (std::size_t k = 10; pairs.size() < 10000 && k <= 80; k *= 2) {
    pairs = augment_stream(records, k, provider, policy);
  }
  if (pairs.size() < 10000) return {false, "only " + std::to_string(pairs.size()) + " augmentations produced"};
  pairs.resize(10000);

  const auto& lex = default_check_lexicon();
  std::size_t mismatched = 0, unparsable = 0, not_executable = 0;
  for (const auto& p : pairs) {
    try {
      parse(p.program);
    } catch (const SyntaxError&) {
      ++unparsable;
      continue;
    }
    if (!(extract(p.question, p.program).tmpl == parent.at(p.parent_id)->tmpl)) ++mismatched;
    if (static_check(p.program, p.question, lex).count(Flag::NotExecutable) != 0) ++not_executable;
  }
  const bool ok = mismatched == 0 && unparsable == 0 && not_executable == 0;
  return {ok, "10000 augmentations: " + std::to_string(mismatched) + " template changes, " +
                  std::to_string(unparsable) + " unparsable, " + std::to_string(not_executable) +
                  " statically non-executable"};
}

Result replacement_rate(const std::vector<TemplateRecord>& records) {
  const auto t0 = Clock::now();
  const LexiconProvider provider(default_lexicon());
  ReplacementPolicy policy;
  policy.probability = 0.5;
  Rng rng(7);
  std::size_t decisions = 0, selected = 0;
  for (std::size_t i = 0; decisions < 100000; ++i) {
    const auto plan = plan_replacements(records[i % records.size()], provider, policy, rng);
    decisions += plan.decisions;
    selected += plan.selected;
  }
  const double n = static_cast<double>(decisions);
  const double rate = static_cast<double>(selected) / n;
  const double dev = static_cast<double>(selected) - n / 2;
  const double chi2 = 4.0 * dev * dev / n;
  const double secs = seconds_since(t0);
  const bool ok = std::abs(rate - 0.5) <= 0.01 && chi2 < oracle::kChiSquare1Df001 && secs < 10.0;
  return {ok, std::to_string(decisions) + " decisions, rate " + fmt("%.4f", rate) + fmt(", chi2 %.3f", chi2) +
                  fmt(" (< 6.635), %.2f s", secs)};
}

Result retrieval_oracle() {
  const HashedEmbedder embedder;
  const std::vector<std::string> words{"is",    "the",  "a",     "cat",  "dog",   "red",   "blue",  "left",
                                       "right", "of",   "how",   "many", "there", "chair", "table", "what",
                                       "color", "same", "above", "near", "car",   "tree",  "small", "metal"};
  Rng rng(31);
  auto sentence = [&] {
    std::string s;
    const auto len = 3 + rng.below(6);
    for (std::uint64_t i = 0; i < len; ++i) s += (i ? " " : "") + words[rng.below(words.size())];
    return s + "?";
  };
  int exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t size = 60 + rng.below(441);
    ExamplePool pool;
    while (pool.size() < size) pool.add(sentence(), "p" + std::to_string(pool.size()), embedder);
    std::vector<std::vector<double>> vecs;
    for (const auto& e : pool.entries()) vecs.push_back(e.embedding);
    const std::string q = sentence();
    const auto expected = oracle::brute_force_top_k(embedder.embed(q), vecs, 50);
    const auto got = retrieve(q, pool, 50, embedder);
    bool same = got.size() == expected.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i]->inserted_at_index == expected[i];
    exact += same ? 1 : 0;
  }
  int passthrough = 0;
  for (std::size_t size : {0, 1, 17, 50}) {
    ExamplePool pool;
    while (pool.size() < size) pool.add(sentence(), "p" + std::to_string(pool.size()), embedder);
    const auto got = retrieve(sentence(), pool, 50, embedder);
    bool same = got.size() == size;
    for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i]->inserted_at_index == i;
    passthrough += same ? 1 : 0;
  }
  return {exact == 20 && passthrough == 4, std::to_string(exact) + "/20 pools exact, " +
                                               std::to_string(passthrough) + "/4 pass-through pools"};
}

Result executor_oracle(const Benchmark& b) {
  std::set<std::string> scenes;
  const auto by_id = b.scene_map();
  std::size_t agree = 0, total = 0;
  for (const auto& item : b.items) {
    scenes.insert(item.record.scene_id);
    if (scenes.size() > 100) break;
    ++total;
    const auto& scene = by_id.at(item.record.scene_id);
    const ExecOutcome out = run_source(item.program, scene);
    if (out.ok() && out.answer() == oracle::answer_by_enumeration(item.spec, scene)) ++agree;
  }
  const auto string_options = run_source(fixtures::error_exemplars().at(0).program, fixtures::small_scene());
  const bool string_options_ok = !string_options.ok() && string_options.failure().kind == FailureKind::TypeError;
  return {agree == total && total > 0 && string_options_ok,
          std::to_string(agree) + "/" + std::to_string(total) + " answers agree over 100 scenes; string-options program " +
              (string_options_ok ? "fails with TypeError" : "did not fail as documented")};
}

struct SimulationTrace {
  std::string outcomes;
  std::vector<bool> validated;
  double soundness = 0;
};

SimulationTrace simulate(const std::vector<BenchItem>& items, const std::map<std::string, SceneGraph>& scenes) {
  OracleTeacher teacher(77);
  std::vector<AnnotationInput> inputs;
  for (const auto& item : items) {
    teacher.add_gold(item.record.question, item.program);
    inputs.push_back({item.record.id, item.record.question, item.record.answer, item.record.scene_id});
  }
  const HashedEmbedder embedder;
  ExamplePool pool;
  AnnotationRunConfig cfg;
  cfg.seed = 77;
  const auto result = annotate(inputs, scenes, teacher, pool, embedder, cfg);
  SimulationTrace t;
  for (const auto& o : result.outcomes) {
    t.outcomes += o.id + ":" + to_string(o.status) + ":" + o.program + "\n";
    t.validated.push_back(o.status == AnnotationStatus::Validated);
  }
  t.soundness = pool_soundness(pool, scenes);
  return t;
}

Result end_to_end(const Benchmark& b) {
  const auto t0 = Clock::now();
  std::vector<BenchItem> items(b.items.begin(), b.items.begin() + std::min<std::size_t>(1000, b.items.size()));
  if (items.size() < 1000) return {false, "benchmark produced only " + std::to_string(items.size()) + " questions"};
  const auto scenes = b.scene_map();
  const SimulationTrace first = simulate(items, scenes);
  const SimulationTrace second = simulate(items, scenes);
  const double secs = seconds_since(t0);
  auto decile_rate = [&](std::size_t d) {
    std::size_t v = 0;
    for (std::size_t i = d * 100; i < (d + 1) * 100; ++i) v += first.validated[i] ? 1 : 0;
    return static_cast<double>(v) / 100.0;
  };
  const double lo = decile_rate(0);
  const double hi = decile_rate(9);
  const bool deterministic = first.outcomes == second.outcomes;
  const bool ok = first.soundness == 1.0 && hi >= lo + 0.15 && deterministic && secs < 120.0;
  return {ok, fmt("soundness %.3f, ", first.soundness) + fmt("first decile %.2f, ", lo) + fmt("last decile %.2f, ", hi) +
                  (deterministic ? "deterministic, " : "NOT deterministic, ") + fmt("%.1f s for two runs", secs)};
}

Result entropy_direction(const Benchmark& b, const std::vector<TemplateRecord>& records) {
  std::vector<std::string> source;
  for (const auto& item : b.items) source.push_back(item.record.question);
  ReplacementPolicy policy;
  policy.seed = 5;
  std::vector<std::string> augmented = source;
  for (const auto& p : augment_stream(records, 5, LexiconProvider(default_lexicon()), policy)) {
    augmented.push_back(p.question);
  }
  const double h_source = ngram_entropy(source, 2);
  const double h_aug = ngram_entropy(augmented, 2);

  double worst = 0;
  worst = std::max(worst, std::abs(ngram_entropy(std::vector<std::string>(10, "what what what what"), 2)));
  worst = std::max(worst, std::abs(ngram_entropy(std::vector<std::string>(10, "is the cat black"), 4)));
  for (int k = 1; k <= 32; ++k) {
    std::vector<std::string> qs;
    for (int i = 0; i < k; ++i) qs.push_back("w" + std::to_string(i) + " v" + std::to_string(i));
    std::vector<std::string> doubled = qs;
    doubled.insert(doubled.end(), qs.begin(), qs.end());
    worst = std::max(worst, std::abs(ngram_entropy(doubled, 2) - std::log2(static_cast<double>(k))));
  }
  const double oracle_gap = std::abs(h_source - oracle::bigram_entropy(source));
  const bool ok = h_aug > h_source && worst < 1e-9 && oracle_gap < 1e-9;
  return {ok, fmt("source %.4f bits, ", h_source) + fmt("augmented %.4f bits; ", h_aug) +
                  fmt("fixture max error %.1e", worst) + fmt(", oracle gap %.1e", oracle_gap)};
}

Result checker_taxonomy(const Benchmark& b) {
  const auto& lex = default_check_lexicon();
  int exemplars = 0;
  for (const auto& ex : fixtures::error_exemplars()) {
    FlagSet flags = static_check(ex.program, ex.question, lex);
    const FlagSet hints = heuristic_check(ex.question, ex.program, lex);
    flags.insert(hints.begin(), hints.end());
    if (flags.size() == 1 && std::string(to_string(*flags.begin())) == ex.label) ++exemplars;
  }
  std::size_t flagged = 0;
  for (const auto& item : b.items) {
    if (!static_check(item.program, item.record.question, lex).empty() ||
        !heuristic_check(item.record.question, item.program, lex).empty()) {
      ++flagged;
    }
  }
  return {exemplars == 5 && flagged == 0, std::to_string(exemplars) + "/5 exemplars flagged exactly, " +
                                              std::to_string(flagged) + "/" + std::to_string(b.items.size()) +
                                              " gold programs flagged"};
}

Result replay_conformance(const Benchmark& b) {
  std::vector<BenchItem> items(b.items.begin(), b.items.begin() + std::min<std::size_t>(1000, b.items.size()));
  if (items.size() < 1000) return {false, "benchmark produced only " + std::to_string(items.size()) + " questions"};

  // Archive: 474 gold completions at seeded positions, corruptions elsewhere.
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(474);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<bool> expected(items.size(), false);
  for (std::size_t i = 0; i < 474; ++i) expected[order[i]] = true;

  const std::string path = "acceptance_replay.jsonl";
  {
    std::ofstream out(path);
    static constexpr Corruption kinds[] = {Corruption::WrongFunction, Corruption::DroppedSlot,
                                           Corruption::AnswerTypeFlip};
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string completion = expected[i] ? items[i].program : corrupt_program(items[i].program, kinds[i % 3]);
      out << nlohmann::json{{"question", items[i].record.question}, {"completion", completion}}.dump() << '\n';
    }
  }
  ReplayTeacher teacher = ReplayTeacher::load_jsonl(path);
  std::vector<AnnotationInput> inputs;
  for (const auto& item : items) {
    inputs.push_back({item.record.id, item.record.question, item.record.answer, item.record.scene_id});
  }
  const HashedEmbedder embedder;
  ExamplePool pool;
  const auto result = annotate(inputs, b.scene_map(), teacher, pool, embedder, {});
  std::remove(path.c_str());

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if ((result.outcomes[i].status == AnnotationStatus::Validated) != expected[i]) ++mismatches;
  }
  const bool ok = mismatches == 0 && result.stats.validated == 474 && result.stats.transport_errors == 0;
  return {ok, std::to_string(result.stats.validated) + " validated out of " + std::to_string(items.size()) + ", " +
                  std::to_string(mismatches) + " partition mismatches"};
}

Result vqa_metric() {
  const std::vector<std::string> vocab{"yes", "no", "2", "red", "dog"};
  Rng rng(10);
  double max_err = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> annotators;
    for (int j = 0; j < 10; ++j) annotators.push_back(vocab[rng.below(vocab.size())]);
    const std::string prediction = vocab[rng.below(vocab.size())];
    max_err = std::max(max_err, std::abs(accuracy_vqa(prediction, annotators) - oracle::vqa_formula(prediction, annotators)));
  }
  return {max_err == 0.0, fmt("1000 annotator sets, max abs error %.3g", max_err)};
}

}  // namespace

int main() {
  const Benchmark main_bench = bench(220, 2024);
  const auto records = template_records(main_bench);

  report(1, "renamer-conformance", renamer_conformance);
  report(2, "round-trip", round_trip);
  report(3, "template-invariance", [&] { return template_invariance(records); });
  report(4, "replacement-rate", [&] { return replacement_rate(records); });
  report(5, "retrieval-oracle", retrieval_oracle);
  report(6, "executor-oracle", [&] { return executor_oracle(main_bench); });
  report(7, "end-to-end-simulation", [&] { return end_to_end(main_bench); });
  report(8, "entropy-direction", [&] { return entropy_direction(main_bench, records); });
  report(9, "checker-taxonomy", [&] { return checker_taxonomy(main_bench); });
  report(10, "replay-conformance", [&] { return replay_conformance(main_bench); });
  report(11, "vqa-agreement-metric", vqa_metric);

  std::printf("%s: %d of 11 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
