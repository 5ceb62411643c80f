#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "vpd/bench.hpp"
#include "vpd/dataset.hpp"
#include "vpd/exec.hpp"
#include "vpd/parse.hpp"

using namespace vpd;

namespace {

BenchmarkConfig tiny(std::vector<std::string> nouns, std::map<Family, double> weights) {
  BenchmarkConfig c = default_benchmark_config();
  c.nouns = std::move(nouns);
  c.family_weights = std::move(weights);
  c.n_scenes = 3;
  c.seed = 17;
  return c;
}

void write_file(const std::string& path, const std::string& body) { std::ofstream(path) << body; }

}  // namespace

TEST_CASE("question text and gold programs per family") {
  QuestionSpec s;
  s.family = Family::Existence;
  s.noun = "chair";
  CHECK(question_text(s) == "Is there a chair?");
  s.attribute = "red";
  CHECK(question_text(s) == "Is there a red chair?");

  s = {};
  s.family = Family::Count;
  s.noun = "dog";
  CHECK(question_text(s) == "How many dogs are there?");

  s = {};
  s.family = Family::RelationChoose;
  s.noun = "cat";
  s.other_noun = "car";
  s.direction = "left";
  CHECK(question_text(s) == "Is the cat to the left or right of the car?");
  const Program p = parse(gold_program(s));
  REQUIRE_FALSE(p.statements.empty());
  const auto& last = p.statements.back().as<Assign>().value;
  REQUIRE(last.is<Call>());
  CHECK(last.as<Call>().callee == "choose_relationship");
  CHECK(last.as<Call>().args[2].is<ListLit>());
}

TEST_CASE("gen_bench: existence with a single noun and no attributes") {
  auto cfg = tiny({"chair"}, {{Family::Existence, 1.0}});
  cfg.existence_attribute_probability = 0.0;
  cfg.questions_per_scene = 1;
  const Benchmark b = gen_bench(cfg);
  REQUIRE(b.items.size() == 3);
  for (const auto& item : b.items) {
    CHECK(item.record.question == "Is there a chair?");
    CHECK(item.record.answer == "yes");
  }
}

TEST_CASE("gen_bench: counts match enumeration") {
  auto cfg = tiny({"dog", "cat"}, {{Family::Count, 1.0}});
  cfg.questions_per_scene = 2;
  const Benchmark b = gen_bench(cfg);
  const auto scenes = b.scene_map();
  REQUIRE_FALSE(b.items.empty());
  for (const auto& item : b.items) {
    const auto& scene = scenes.at(item.record.scene_id);
    CHECK(item.record.answer == oracle::answer_by_enumeration(item.spec, scene));
    CHECK(run_source(item.program, scene).answer() == item.record.answer);
  }
}

TEST_CASE("gen_bench: deterministic, unique ids, validated scenes") {
  auto cfg = default_benchmark_config();
  cfg.n_scenes = 5;
  cfg.seed = 3;
  const Benchmark a = gen_bench(cfg);
  const Benchmark b = gen_bench(cfg);
  REQUIRE(a.items.size() == b.items.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].record == b.items[i].record);
    CHECK(a.items[i].program == b.items[i].program);
    ids.insert(a.items[i].record.id);
  }
  CHECK(ids.size() == a.items.size());
  CHECK(a.items.front().record.id == "s0001-q01");
  for (const auto& s : a.scenes) CHECK_NOTHROW(s.validate());
}

TEST_CASE("BenchmarkConfig::validate rejects bad settings") {
  auto cfg = default_benchmark_config();
  cfg.nouns.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_benchmark_config();
  cfg.family_weights = {{Family::Count, -1.0}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_benchmark_config();
  cfg.min_objects = 9;
  cfg.max_objects = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_benchmark_config();
  cfg.nouns = {"cup"};
  cfg.family_weights = {{Family::SameAttribute, 1.0}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(family_from_string("colour"), ConfigError);
  CHECK(family_from_string("relation_choose") == Family::RelationChoose);
}

TEST_CASE("dataset: JSONL round trip and schema errors") {
  DatasetRecord r{"q1", "Is it?", "yes", "s1", "val", {"yes", "no"}};
  save_dataset("ds_test.jsonl", {r});
  const auto back = load_dataset("ds_test.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back[0] == r);

  write_file("ds_bad.jsonl", "{\"id\": \"a\", \"question\": \"q\", \"answer\": \"x\", \"scene_id\": \"s\"}\n"
                             "{\"id\": \"b\", \"answer\": \"x\", \"scene_id\": \"s\"}\n");
  CHECK_THROWS_AS(load_dataset("ds_bad.jsonl"), SchemaError);
  write_file("ds_dup.jsonl", "{\"id\": \"a\", \"question\": \"q\", \"answer\": \"x\", \"scene_id\": \"s\"}\n"
                             "{\"id\": \"a\", \"question\": \"q\", \"answer\": \"x\", \"scene_id\": \"s\"}\n");
  CHECK_THROWS_AS(load_dataset("ds_dup.jsonl"), SchemaError);
  write_file("ds_int.jsonl", "{\"id\": 7, \"question\": \"q\", \"answer\": 3, \"scene_id\": 12}\n");
  CHECK(load_dataset("ds_int.jsonl")[0].answer == "3");
  write_file("ds_broken.jsonl", "{\"id\": \n");
  CHECK_THROWS(read_jsonl("ds_broken.jsonl"));
  for (const char* p : {"ds_test.jsonl", "ds_bad.jsonl", "ds_dup.jsonl", "ds_int.jsonl", "ds_broken.jsonl"}) {
    std::remove(p);
  }
}

TEST_CASE("dataset: GQA and VQA loaders") {
  write_file("gqa_q.json", R"({"201": {"question": "Is the cat black?", "answer": "yes", "imageId": "n1"}})");
  const auto gqa = load_gqa_questions("gqa_q.json", "testdev");
  REQUIRE(gqa.size() == 1);
  CHECK(gqa[0].id == "201");
  CHECK(gqa[0].scene_id == "n1");
  CHECK(gqa[0].split == "testdev");

  write_file("vqa_q.json", R"({"questions": [{"question_id": 5, "image_id": 9, "question": "What is it?"}]})");
  write_file("vqa_a.json", R"({"annotations": [{"question_id": 5, "multiple_choice_answer": "dog",
    "answers": [{"answer": "dog"}, {"answer": "puppy"}]}]})");
  const auto vqa = load_vqa("vqa_q.json", "vqa_a.json", "val");
  REQUIRE(vqa.size() == 1);
  CHECK(vqa[0].answer == "dog");
  CHECK(vqa[0].annotator_answers == std::vector<std::string>{"dog", "puppy"});
  for (const char* p : {"gqa_q.json", "vqa_q.json", "vqa_a.json"}) std::remove(p);
}

TEST_CASE("sampling: seeded, order preserving, sized") {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i;
  const auto a = sample_n(v, 10, 4);
  CHECK(a == sample_n(v, 10, 4));
  CHECK(a.size() == 10);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(sample_n(v, 500, 4).size() == 100);
  CHECK(sample_fraction(v, 0.25, 1).size() == 25);
  CHECK(sample_fraction(v, 0.001, 1).size() == 1);
  CHECK(sample_fraction(v, 0.0, 1).empty());
  CHECK_THROWS_AS(sample_fraction(v, 1.5, 1), std::invalid_argument);
}

TEST_CASE("sha256 and manifests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  RunManifest m;
  m.stage = "test";
  m.seed = 1;
  m.tool_version = tool_version();
  const std::string h = m.hash();
  CHECK(h.size() == 64);
  m.counts["rows"] = 2;
  CHECK(m.hash() != h);
}
