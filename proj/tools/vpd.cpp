// vpd: command-line driver for the distillation pipeline stages.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vpd/analysis.hpp"
#include "vpd/augment.hpp"
#include "vpd/bench.hpp"
#include "vpd/dataset.hpp"
#include "vpd/exec.hpp"
#include "vpd/io_error.hpp"
#include "vpd/parse.hpp"
#include "vpd/teacher.hpp"
#include "vpd/template.hpp"

namespace {

using nlohmann::json;
using namespace vpd;

enum Exit { kOk = 0, kValidation = 1, kIo = 2 };

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config_path;
};

std::string config_hash(const Common& c, const std::string& options) {
  std::string text = options;
  if (!c.config_path.empty()) text += "\n" + sha256_file(c.config_path);
  return sha256_hex(text);
}

RunManifest manifest_for(const std::string& stage, const Common& c, const std::string& options,
                         const std::vector<std::string>& inputs) {
  RunManifest m;
  m.stage = stage;
  m.seed = c.seed;
  m.config_hash = config_hash(c, options);
  m.tool_version = tool_version();
  for (const auto& in : inputs) {
    if (!in.empty()) m.input_digests[in] = sha256_file(in);
  }
  return m;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  json j = m.to_json();
  j["manifest_hash"] = m.hash();
  out << j.dump(2) << '\n';
}

std::string sidecar(const std::string& out) { return out + ".manifest.json"; }

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (auto t = text::trim(item); !t.empty()) out.push_back(t);
  }
  return out;
}

/// Rows {id, program} keyed by id.
std::map<std::string, std::string> load_programs(const std::string& path) {
  std::map<std::string, std::string> out;
  for (const auto& row : read_jsonl(path)) {
    const std::string id = require_string(row, "id", "<unknown>");
    if (!out.emplace(id, require_string(row, "program", id)).second) {
      throw SchemaError("record " + id + ": duplicate id");
    }
  }
  return out;
}

std::vector<DatasetRecord> subsample(std::vector<DatasetRecord> records, double fraction, std::size_t n,
                                     std::uint64_t seed) {
  if (fraction < 1.0) records = sample_fraction(records, fraction, seed);
  if (n > 0) records = sample_n(records, n, seed);
  return records;
}

// --- gen-bench ---------------------------------------------------------------

struct GenBenchArgs {
  std::size_t n_scenes = 200;
  std::size_t min_objects = 3;
  std::size_t max_objects = 8;
  std::size_t questions_per_scene = 5;
  std::string nouns;
  std::vector<std::string> weights;
};

int cmd_gen_bench(const Common& c, const GenBenchArgs& a) {
  BenchmarkConfig cfg = default_benchmark_config();
  cfg.seed = c.seed;
  cfg.n_scenes = a.n_scenes;
  cfg.min_objects = a.min_objects;
  cfg.max_objects = a.max_objects;
  cfg.questions_per_scene = a.questions_per_scene;
  if (!a.nouns.empty()) cfg.nouns = split_commas(a.nouns);
  if (!a.weights.empty()) {
    cfg.family_weights.clear();
    for (const auto& w : a.weights) {
      const auto eq = w.find('=');
      if (eq == std::string::npos) throw ConfigError("weight '" + w + "' must look like family=value");
      cfg.family_weights[family_from_string(text::trim(w.substr(0, eq)))] = std::stod(w.substr(eq + 1));
    }
  }
  const Benchmark bench = gen_bench(cfg);

  std::filesystem::create_directories(c.out);
  const std::string dir = c.out + "/";
  save_scenes_jsonl(dir + "scenes.jsonl", bench.scenes);
  save_dataset(dir + "dataset.jsonl", bench.records());
  std::vector<json> gold;
  for (const auto& it : bench.items) gold.push_back({{"id", it.record.id}, {"program", it.program}});
  write_jsonl(dir + "gold.jsonl", gold);

  std::ostringstream opts;
  opts << "gen-bench " << a.n_scenes << ' ' << a.min_objects << ' ' << a.max_objects << ' '
       << a.questions_per_scene << ' ' << a.nouns;
  for (const auto& w : a.weights) opts << ' ' << w;
  RunManifest m = manifest_for("gen-bench", c, opts.str(), {});
  m.counts = {{"scenes", bench.scenes.size()}, {"questions", bench.items.size()}};
  write_manifest(dir + "manifest.json", m);
  std::cout << json(m.counts).dump() << '\n';
  return kOk;
}

// --- annotate ----------------------------------------------------------------

struct AnnotateArgs {
  std::string dataset;
  std::string scenes;
  std::string teacher = "oracle";
  std::string gold;
  std::string replay;
  std::string pool_in;
  std::string pool_out;
  std::size_t k = 50;
  std::size_t max_questions = 0;
  double fraction = 1.0;
  std::size_t sample_n = 0;
  std::string prompt_template;
};

int cmd_annotate(const Common& c, const AnnotateArgs& a) {
  const auto records = subsample(load_dataset(a.dataset), a.fraction, a.sample_n, c.seed);
  const auto scenes = load_scenes(a.scenes);

  std::unique_ptr<TeacherClient> teacher;
  if (a.teacher == "oracle") {
    if (a.gold.empty()) throw ConfigError("--gold is required with the oracle teacher");
    auto oracle = std::make_unique<OracleTeacher>(c.seed);
    const auto gold = load_programs(a.gold);
    for (const auto& r : records) {
      auto it = gold.find(r.id);
      if (it != gold.end()) oracle->add_gold(r.question, it->second);
    }
    teacher = std::move(oracle);
  } else if (a.teacher == "replay") {
    if (a.replay.empty()) throw ConfigError("--replay is required with the replay teacher");
    teacher = std::make_unique<ReplayTeacher>(ReplayTeacher::load_jsonl(a.replay));
  } else if (a.teacher == "http") {
    teacher = HttpTeacher::from_environment();
  } else {
    throw ConfigError("unknown teacher '" + a.teacher + "'");
  }

  HashedEmbedder embedder;
  ExamplePool pool = a.pool_in.empty() ? ExamplePool{} : ExamplePool::load_jsonl(a.pool_in, embedder);
  AnnotationRunConfig cfg;
  cfg.retrieval_k = a.k;
  cfg.max_questions = a.max_questions;
  cfg.seed = c.seed;
  if (!a.prompt_template.empty()) {
    std::ifstream in(a.prompt_template);
    if (!in) throw IoError("cannot open " + a.prompt_template);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg.prompt_template = buf.str();
  }

  std::vector<AnnotationInput> inputs;
  std::map<std::string, const DatasetRecord*> by_id;
  for (const auto& r : records) {
    inputs.push_back({r.id, r.question, r.answer, r.scene_id});
    by_id[r.id] = &r;
  }
  const AnnotationResult result = annotate(inputs, scenes, *teacher, pool, embedder, cfg);

  std::vector<json> validated;
  for (const auto& o : result.outcomes) {
    if (o.status != AnnotationStatus::Validated) continue;
    const DatasetRecord& r = *by_id.at(o.id);
    validated.push_back(
        {{"id", r.id}, {"question", r.question}, {"program", o.program}, {"answer", r.answer}, {"scene_id", r.scene_id}});
  }
  write_jsonl(c.out, validated);
  const std::string pool_path = a.pool_out.empty() ? c.out + ".pool.jsonl" : a.pool_out;
  pool.save_jsonl(pool_path);

  const auto& s = result.stats;
  RunManifest m = manifest_for("annotate", c,
                               "annotate " + a.teacher + " " + std::to_string(a.k) + " " +
                                   std::to_string(a.max_questions) + " " + std::to_string(a.fraction) + " " +
                                   std::to_string(a.sample_n),
                               {a.dataset, a.scenes, a.gold, a.replay, a.pool_in});
  m.counts = {{"processed", s.processed},   {"validated", s.validated},       {"discarded", s.discarded},
              {"transport_errors", s.transport_errors}, {"pool_inserts", s.pool_inserts}, {"duplicates", s.duplicates},
              {"pool_size", pool.size()}};
  write_manifest(sidecar(c.out), m);
  json stats = m.counts;
  stats["validation_rate"] = s.validation_rate();
  std::cout << stats.dump() << '\n';
  return s.transport_errors > 0 ? kIo : kOk;
}

// --- extract -----------------------------------------------------------------

int cmd_extract(const Common& c, const std::string& in_path) {
  std::vector<json> out;
  std::map<std::string, std::size_t> templates;
  for (const auto& row : read_jsonl(in_path)) {
    const std::string id = require_string(row, "id", "<unknown>");
    const TemplateRecord rec = extract(require_string(row, "question", id), require_string(row, "program", id), id);
    ++templates[rec.tmpl.id()];
    out.push_back({{"id", id},
                   {"template_id", rec.tmpl.id()},
                   {"template_text", rec.tmpl.text()},
                   {"signature", rec.tmpl.signature()},
                   {"slot_count", rec.tmpl.slot_count()},
                   {"args", rec.args.values}});
  }
  write_jsonl(c.out, out);
  RunManifest m = manifest_for("extract", c, "extract", {in_path});
  m.counts = {{"records", out.size()}, {"templates", templates.size()}};
  write_manifest(sidecar(c.out), m);
  std::cout << json(m.counts).dump() << '\n';
  return kOk;
}

// --- augment -----------------------------------------------------------------

struct AugmentArgs {
  std::string in;
  std::size_t k = 10;
  double probability = 0.5;
  std::string link = "linked";
  std::string detached = "skip";
  std::string lexicon;
};

int cmd_augment(const Common& c, const AugmentArgs& a) {
  std::ifstream in(a.in, std::ios::binary);
  if (!in) throw IoError("cannot open " + a.in);
  std::stringstream raw;
  raw << in.rdbuf();

  std::vector<TemplateRecord> records;
  for (const auto& row : read_jsonl(a.in)) {
    const std::string id = require_string(row, "id", "<unknown>");
    records.push_back(extract(require_string(row, "question", id), require_string(row, "program", id), id));
  }

  const CategoryLexicon lexicon = a.lexicon.empty() ? default_lexicon() : CategoryLexicon::load(a.lexicon);
  if (!a.lexicon.empty()) {
    for (const auto& w : lexicon.warnings()) std::cerr << "lexicon: " << w << '\n';
  }
  LexiconProvider provider(lexicon);
  ReplacementPolicy policy;
  policy.probability = a.probability;
  policy.seed = c.seed;
  if (a.link == "independent") {
    policy.link_mode = LinkMode::Independent;
  } else if (a.link != "linked") {
    throw ConfigError("--link must be linked or independent");
  }
  if (a.detached == "provider") {
    policy.question_detached_mode = DetachedMode::Provider;
  } else if (a.detached != "skip") {
    throw ConfigError("--detached must be skip or provider");
  }

  AugmentStats stats;
  const auto pairs = augment_stream(records, a.k, provider, policy, &stats);

  std::ofstream out(c.out, std::ios::binary);
  if (!out) throw IoError("cannot write " + c.out);
  out << raw.str();
  for (const auto& p : pairs) {
    json reps = json::array();
    for (const auto& r : p.replacements) reps.push_back({{"slot", r.slot}, {"old", r.old_value}, {"new", r.new_value}});
    out << json{{"id", p.id}, {"parent_id", p.parent_id}, {"question", p.question}, {"program", p.program},
                {"replacements", reps}}
               .dump()
        << '\n';
  }
  out.close();

  RunManifest m = manifest_for("augment", c,
                               "augment " + std::to_string(a.k) + " " + std::to_string(a.probability) + " " + a.link +
                                   " " + a.detached,
                               {a.in, a.lexicon});
  m.counts = {{"records", stats.records},   {"attempts", stats.attempts},           {"emitted", stats.emitted},
              {"duplicates", stats.duplicates}, {"detached_skips", stats.detached_skips}, {"empty_plans", stats.empty_plans}};
  write_manifest(sidecar(c.out), m);
  std::cout << json(m.counts).dump() << '\n';
  return kOk;
}

// --- exec --------------------------------------------------------------------

int cmd_exec(const Common& c, const std::string& in_path, const std::string& dataset, const std::string& scenes_path) {
  const auto programs = load_programs(in_path);
  const auto scenes = load_scenes(scenes_path);
  std::map<std::string, DatasetRecord> records;
  for (auto& r : load_dataset(dataset)) records.emplace(r.id, std::move(r));

  std::vector<json> out;
  std::size_t ok = 0, correct = 0;
  for (const auto& [id, program] : programs) {
    auto rec = records.find(id);
    if (rec == records.end()) throw SchemaError("record " + id + ": not in dataset");
    auto scene = scenes.find(rec->second.scene_id);
    if (scene == scenes.end()) throw SchemaError("record " + id + ": unknown scene_id " + rec->second.scene_id);
    const ExecOutcome o = run_source(program, scene->second);
    json row{{"id", id}, {"scene_id", rec->second.scene_id}};
    if (o.ok()) {
      ++ok;
      const bool match = answers_match(o.answer(), rec->second.answer);
      correct += match;
      row["answer"] = o.answer();
      row["correct"] = match;
    } else {
      row["failure"] = {{"kind", to_string(o.failure().kind)},
                        {"message", o.failure().message},
                        {"statement_index", o.failure().statement_index}};
      row["correct"] = false;
    }
    out.push_back(std::move(row));
  }
  write_jsonl(c.out, out);
  RunManifest m = manifest_for("exec", c, "exec", {in_path, dataset, scenes_path});
  m.counts = {{"programs", programs.size()}, {"executed", ok}, {"correct", correct}};
  write_manifest(sidecar(c.out), m);
  std::cout << json(m.counts).dump() << '\n';
  return kOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string dataset;
  std::string scenes;
  std::string student;
  std::string teacher_programs;
  std::string verdicts;
};

int cmd_eval(const Common& c, const EvalArgs& a) {
  const auto records = load_dataset(a.dataset);
  const auto student = load_programs(a.student);
  std::map<std::string, SceneGraph> scenes;
  if (!a.scenes.empty()) scenes = load_scenes(a.scenes);
  std::map<std::string, std::string> teacher;
  if (!a.teacher_programs.empty()) teacher = load_programs(a.teacher_programs);

  MetricsReport report;
  std::vector<std::string> predictions, gold, questions;
  std::vector<AgreementInput> agreement;
  double vqa_sum = 0;
  std::size_t vqa_n = 0;
  for (const auto& r : records) {
    auto sp = student.find(r.id);
    if (sp == student.end()) continue;
    questions.push_back(r.question);
    auto scene = scenes.find(r.scene_id);
    // Execution metrics need the scene graph; records without one are skipped.
    if (scene == scenes.end()) continue;
    const ExecOutcome o = run_source(sp->second, scene->second);
    const std::string predicted = o.ok() ? o.answer() : std::string();
    predictions.push_back(text::normalize(predicted));
    gold.push_back(text::normalize(r.answer));
    if (!r.annotator_answers.empty()) {
      vqa_sum += o.ok() ? accuracy_vqa(predicted, r.annotator_answers) : 0.0;
      ++vqa_n;
    }
    if (auto tp = teacher.find(r.id); tp != teacher.end()) {
      agreement.push_back({sp->second, tp->second, &scene->second, r.answer});
    }
  }
  report.records = questions.size();
  if (!predictions.empty()) report.answer_accuracy = accuracy_exact(predictions, gold);
  if (vqa_n > 0) report.vqa_agreement_accuracy = vqa_sum / static_cast<double>(vqa_n);
  if (!agreement.empty()) report.student_teacher_agreement = student_teacher_agreement(agreement).agreement();
  if (!questions.empty()) report.ngram_entropy = ngram_entropy(questions, 2);
  if (!a.verdicts.empty()) {
    std::vector<ProgramVerdict> v;
    for (auto& [id, verdict] : load_verdicts(a.verdicts)) v.push_back(std::move(verdict));
    report.program_accuracy = program_accuracy(v);
  }
  RunManifest m = manifest_for("eval", c, "eval", {a.dataset, a.scenes, a.student, a.teacher_programs, a.verdicts});
  m.counts = {{"records", report.records}, {"executed", predictions.size()}};
  report.manifest_hash = m.hash();
  const std::string body = report.to_json().dump(2);
  if (c.out.empty()) {
    std::cout << body << '\n';
  } else {
    std::ofstream out(c.out);
    if (!out) throw IoError("cannot write " + c.out);
    out << body << '\n';
    write_manifest(sidecar(c.out), m);
  }
  return kOk;
}

// --- review ------------------------------------------------------------------

struct ReviewArgs {
  std::string in;
  std::string record_id;
  std::string verdict;
  std::string flags;
  std::string annotator;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_review(const Common& c, const ReviewArgs& a) {
  const CheckLexicon& lex = default_check_lexicon();
  if (a.record_id.empty()) {
    // Automatic pass over every program.
    std::size_t flagged = 0, incorrect = 0, rows = 0;
    for (const auto& row : read_jsonl(a.in)) {
      const std::string id = require_string(row, "id", "<unknown>");
      const ProgramVerdict v =
          automatic_verdict(id, require_string(row, "question", id), require_string(row, "program", id), lex);
      flagged += !v.flags.empty();
      incorrect += v.final == FinalVerdict::Incorrect;
      ++rows;
      append_verdict(c.out, v);
    }
    std::cout << json{{"records", rows}, {"flagged", flagged}, {"incorrect", incorrect}}.dump() << '\n';
    return kOk;
  }

  const auto latest = load_verdicts(c.out);
  auto it = latest.find(a.record_id);
  if (it == latest.end()) throw SchemaError("record " + a.record_id + ": no automatic verdict to review");
  HumanVerdict h;
  if (a.verdict == "correct") {
    h.correct = true;
  } else if (a.verdict != "incorrect") {
    throw ConfigError("--verdict must be correct or incorrect");
  }
  for (const auto& name : split_commas(a.flags)) {
    auto f = flag_from_string(name);
    if (!f) throw SchemaError("record " + a.record_id + ": unknown flag '" + name + "'");
    h.flags.insert(*f);
  }
  h.annotator = a.annotator;
  h.timestamp = utc_now();
  const ProgramVerdict v = record_verdict(it->second, h);
  append_verdict(c.out, v);
  std::cout << verdict_to_json(v).dump() << '\n';
  return kOk;
}

// --- export-train ------------------------------------------------------------

int cmd_export_train(const Common& c, const std::vector<std::string>& inputs) {
  std::vector<json> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t rows = 0;
  for (const auto& path : inputs) {
    for (const auto& row : read_jsonl(path)) {
      ++rows;
      const std::string id = row.contains("id") ? require_string(row, "id", "<unknown>") : "<row " + std::to_string(rows) + ">";
      const std::string question = require_string(row, "question", id);
      const std::string program = require_string(row, "program", id);
      try {
        (void)parse(program);
      } catch (const SyntaxError& e) {
        throw SchemaError("record " + id + ": field 'program' does not parse: " + e.what());
      }
      if (seen.emplace(question, program).second) out.push_back({{"question", question}, {"program", program}});
    }
  }
  write_jsonl(c.out, out);
  RunManifest m = manifest_for("export-train", c, "export-train", inputs);
  m.counts = {{"input_rows", rows}, {"exported", out.size()}};
  write_manifest(sidecar(c.out), m);
  std::cout << json(m.counts).dump() << '\n';
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool out_required = true) {
  sub->add_option("--seed", c.seed, "Random seed");
  auto* o = sub->add_option("--out", c.out, "Output path");
  if (out_required) o->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual program distillation pipeline"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  Common common;
  app.set_config("--config", "", "INI file; a [subcommand] section supplies defaults for its flags");
  app.require_subcommand(1);

  GenBenchArgs gb;
  auto* gen = app.add_subcommand("gen-bench", "Generate synthetic scenes, questions and gold programs");
  add_common(gen, common);
  gen->add_option("--n-scenes", gb.n_scenes);
  gen->add_option("--min-objects", gb.min_objects);
  gen->add_option("--max-objects", gb.max_objects);
  gen->add_option("--questions-per-scene", gb.questions_per_scene);
  gen->add_option("--nouns", gb.nouns, "Comma-separated noun vocabulary");
  gen->add_option("--weight", gb.weights, "family=weight, repeatable");

  AnnotateArgs an;
  auto* ann = app.add_subcommand("annotate", "Teacher annotation with execution validation");
  add_common(ann, common);
  ann->add_option("--dataset", an.dataset)->required();
  ann->add_option("--scenes", an.scenes)->required();
  ann->add_option("--teacher", an.teacher)->check(CLI::IsMember({"oracle", "replay", "http"}));
  ann->add_option("--gold", an.gold, "Gold {id, program} JSONL for the oracle teacher");
  ann->add_option("--replay", an.replay, "Archived {question, completion} JSONL");
  ann->add_option("--pool-in", an.pool_in);
  ann->add_option("--pool-out", an.pool_out);
  ann->add_option("--k", an.k, "In-context examples per prompt");
  ann->add_option("--max-questions", an.max_questions);
  ann->add_option("--fraction", an.fraction)->check(CLI::Range(0.0, 1.0));
  ann->add_option("--sample-n", an.sample_n);
  ann->add_option("--prompt-template", an.prompt_template);

  std::string extract_in;
  auto* ext = app.add_subcommand("extract", "Extract templates from validated programs");
  add_common(ext, common);
  ext->add_option("--in", extract_in)->required();

  AugmentArgs ag;
  auto* aug = app.add_subcommand("augment", "Template-based augmentation");
  add_common(aug, common);
  aug->add_option("--in", ag.in)->required();
  aug->add_option("--k", ag.k, "Augmentations per record");
  aug->add_option("--p", ag.probability, "Per-slot replacement probability")->check(CLI::Range(0.0, 1.0));
  aug->add_option("--link", ag.link)->check(CLI::IsMember({"linked", "independent"}));
  aug->add_option("--detached", ag.detached)->check(CLI::IsMember({"skip", "provider"}));
  aug->add_option("--lexicon", ag.lexicon);

  std::string exec_in, exec_dataset, exec_scenes;
  auto* exe = app.add_subcommand("exec", "Execute {id, program} rows against scenes");
  add_common(exe, common);
  exe->add_option("--in", exec_in)->required();
  exe->add_option("--dataset", exec_dataset)->required();
  exe->add_option("--scenes", exec_scenes)->required();

  EvalArgs ev;
  auto* eva = app.add_subcommand("eval", "Score student programs");
  add_common(eva, common, false);
  eva->add_option("--dataset", ev.dataset)->required();
  eva->add_option("--student", ev.student)->required();
  eva->add_option("--scenes", ev.scenes);
  eva->add_option("--teacher-programs", ev.teacher_programs);
  eva->add_option("--verdicts", ev.verdicts);

  ReviewArgs rv;
  auto* rev = app.add_subcommand("review", "Flag programs; --out is the verdict JSONL");
  add_common(rev, common);
  rev->add_option("--in", rv.in);
  rev->add_option("--record-id", rv.record_id);
  rev->add_option("--verdict", rv.verdict);
  rev->add_option("--flags", rv.flags);
  rev->add_option("--annotator", rv.annotator);

  std::vector<std::string> export_in;
  auto* exp = app.add_subcommand("export-train", "Emit {question, program} training rows");
  add_common(exp, common);
  exp->add_option("--in", export_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  if (auto* cfg = app.get_config_ptr(); cfg && cfg->count() > 0) common.config_path = cfg->as<std::string>();

  try {
    if (*gen) return cmd_gen_bench(common, gb);
    if (*ann) return cmd_annotate(common, an);
    if (*ext) return cmd_extract(common, extract_in);
    if (*aug) return cmd_augment(common, ag);
    if (*exe) return cmd_exec(common, exec_in, exec_dataset, exec_scenes);
    if (*eva) return cmd_eval(common, ev);
    if (*rev) {
      if (rv.record_id.empty() && rv.in.empty()) throw ConfigError("review needs --in or --record-id");
      return cmd_review(common, rv);
    }
    if (*exp) return cmd_export_train(common, export_in);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}
