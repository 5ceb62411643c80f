#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "oracles.hpp"
#include "vpd/teacher.hpp"

using namespace vpd;

namespace {

const std::string kTemplate = "Examples:\n{examples}\nQuestion: {question}\nProgram:\n";

std::map<std::string, SceneGraph> scenes() { return {{"fixture", fixtures::small_scene()}}; }

class ThrowingTeacher : public TeacherClient {
 public:
  int calls = 0;
  std::string generate(const std::string&) override {
    ++calls;
    throw TransportError("offline");
  }
};

}  // namespace

TEST_CASE("HashedEmbedder: dimension, normalization, cosine") {
  const HashedEmbedder e;
  const auto v = e.embed("Is the cat black?");
  CHECK(v.size() == 512);
  double norm = 0;
  for (double x : v) norm += x * x;
  CHECK(norm == doctest::Approx(1.0));
  CHECK(cosine_similarity(v, v) == doctest::Approx(1.0));
  CHECK(cosine_similarity(v, e.embed("")) == 0.0);
}

TEST_CASE("retrieve: pass-through, empty pool and ranking") {
  const HashedEmbedder e;
  ExamplePool pool;
  CHECK(retrieve("anything", pool, 50, e).empty());
  pool.add("What color is the car?", "p1", e);
  pool.add("How many dogs are there?", "p2", e);
  pool.add("Is the cat black?", "p3", e);
  CHECK_FALSE(pool.add("Is the cat black?", "p3", e));
  auto all = retrieve("Is the cat black?", pool, 50, e);
  REQUIRE(all.size() == 3);
  CHECK(all[0]->program == "p1");
  CHECK(all[2]->program == "p3");

  const auto top = retrieve("Is the cat black?", pool, 1, e);
  REQUIRE(top.size() == 1);
  CHECK(top[0]->program == "p3");

  std::vector<std::vector<double>> vecs;
  for (const auto& p : pool.entries()) vecs.push_back(p.embedding);
  const auto expected = oracle::brute_force_top_k(e.embed("How many cars?"), vecs, 2);
  const auto got = retrieve("How many cars?", pool, 2, e);
  REQUIRE(got.size() == 2);
  CHECK(got[0]->inserted_at_index == expected[0]);
  CHECK(got[1]->inserted_at_index == expected[1]);
}

TEST_CASE("prompt: assemble and recover examples") {
  const HashedEmbedder e;
  ExamplePool pool;
  pool.add("Is the cat black?", fixtures::kDogProgram, e);
  pool.add("How many dogs?", "image_patch = ImagePatch(image)\nanswer = str(len(image_patch.find('dog')))", e);
  const std::string prompt = assemble_prompt("What color is the car?", retrieve("q", pool, 5, e), kTemplate);
  const auto ex = prompt_examples(prompt);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].question == "Is the cat black?");
  CHECK(ex[0].program == fixtures::kDogProgram);
  CHECK(prompt_question(prompt) == "What color is the car?");

  const std::string bare = assemble_prompt("Where?", {}, "Examples:\n{examples}\n");
  CHECK(prompt_question(bare) == "Where?");
  CHECK(default_prompt_template().find("{question}") != std::string::npos);
  CHECK_THROWS_AS(assemble_prompt("Where?", {}, "No slots here."), std::invalid_argument);
}

TEST_CASE("normalize_completion strips fences and adds the root binding") {
  CHECK(normalize_completion("```python\nanswer = image_patch.simple_query('x')\n```") ==
        "image_patch = ImagePatch(image)\nanswer = image_patch.simple_query('x')");
  CHECK(normalize_completion("  answer = 'yes'  ") == "answer = 'yes'");
}

TEST_CASE("OracleTeacher: reliability curve and corruptions") {
  OracleTeacher t(1);
  CHECK(t.reliability(0) == doctest::Approx(0.2));
  CHECK(t.reliability(3) == doctest::Approx(0.5));
  CHECK(t.reliability(20) == 1.0);
  const std::string gold = "image_patch = ImagePatch(image)\nanswer = image_patch.find('car')[0].classify('color')";
  for (auto kind : {Corruption::WrongFunction, Corruption::DroppedSlot, Corruption::AnswerTypeFlip}) {
    const std::string bad = corrupt_program(gold, kind);
    CHECK(bad != gold);
    const auto out = run_source(bad, fixtures::small_scene());
    CHECK_FALSE((out.ok() && answers_match(out.answer(), "red")));
  }
}

TEST_CASE("annotate: replay teacher validates, discards and fills the pool") {
  ReplayTeacher teacher;
  teacher.add("How many chairs?", "answer = str(len(image_patch.find('chair')))");
  teacher.add("What color is the car?", "```\nanswer = 'blue'\n```");
  teacher.add("How many chairs?", "answer = '7'");
  const std::vector<AnnotationInput> in{{"a", "How many chairs?", "2", "fixture"},
                                        {"b", "What color is the car?", "red", "fixture"},
                                        {"c", "How many chairs?", "2", "fixture"},
                                        {"d", "Is it?", "yes", "missing-scene"}};
  const HashedEmbedder e;
  ExamplePool pool;
  AnnotationRunConfig cfg;
  cfg.prompt_template = kTemplate;
  const auto result = annotate(in, scenes(), teacher, pool, e, cfg);
  REQUIRE(result.outcomes.size() == 4);
  CHECK(result.outcomes[0].status == AnnotationStatus::Validated);
  CHECK(result.outcomes[1].status == AnnotationStatus::Discarded);
  CHECK(result.outcomes[2].status == AnnotationStatus::Discarded);
  CHECK(result.outcomes[3].status == AnnotationStatus::Discarded);
  CHECK(result.stats.validated == 1);
  CHECK(pool.size() == 1);
  CHECK(pool_soundness(pool, scenes()) == 1.0);
}

TEST_CASE("annotate: transport failures are retried then recorded") {
  ThrowingTeacher teacher;
  const HashedEmbedder e;
  ExamplePool pool;
  AnnotationRunConfig cfg;
  cfg.max_retries = 2;
  const auto result = annotate({{"a", "q", "x", "fixture"}}, scenes(), teacher, pool, e, cfg);
  CHECK(teacher.calls == 3);
  CHECK(result.stats.transport_errors == 1);
  CHECK(result.outcomes[0].status == AnnotationStatus::TransportFailure);
}

TEST_CASE("annotate: unparsable completions validate nothing") {
  ReplayTeacher teacher;
  teacher.add("q1", "def f():\n    return 1");
  teacher.add("q2", "answer = (");
  const HashedEmbedder e;
  ExamplePool pool;
  const auto result =
      annotate({{"a", "q1", "1", "fixture"}, {"b", "q2", "1", "fixture"}}, scenes(), teacher, pool, e, {});
  CHECK(result.stats.validated == 0);
  CHECK(pool.size() == 0);
}

TEST_CASE("annotate: oracle runs are deterministic under seed") {
  auto run_once = [](std::uint64_t seed) {
    OracleTeacher teacher(seed);
    teacher.add_gold("How many chairs?", "image_patch = ImagePatch(image)\nanswer = str(len(image_patch.find('chair')))");
    teacher.add_gold("What color is the car?",
                     "image_patch = ImagePatch(image)\nanswer = image_patch.find('car')[0].classify('color')");
    std::vector<AnnotationInput> in;
    for (int i = 0; i < 20; ++i) {
      in.push_back({"c" + std::to_string(i), "How many chairs?", "2", "fixture"});
      in.push_back({"r" + std::to_string(i), "What color is the car?", "red", "fixture"});
    }
    const HashedEmbedder e;
    ExamplePool pool;
    std::string trace;
    for (const auto& o : annotate(in, scenes(), teacher, pool, e, {}).outcomes) trace += o.program + "|";
    return trace;
  };
  CHECK(run_once(5) == run_once(5));
}

TEST_CASE("pool: JSONL round trip") {
  const HashedEmbedder e;
  ExamplePool pool;
  pool.add("q1", "p1", e, "s1", "a1");
  pool.add("q2", "p2", e, "s2", "a2");
  const std::string path = "pool_roundtrip.jsonl";
  pool.save_jsonl(path);
  const auto back = ExamplePool::load_jsonl(path, e);
  REQUIRE(back.size() == 2);
  CHECK(back.entries()[1].question == "q2");
  CHECK(back.entries()[1].answer == "a2");
  CHECK(back.entries()[1].inserted_at_index == 1);
  std::remove(path.c_str());
}

TEST_CASE("HttpTeacher: posts sampling settings and reads the completion") {
  httplib::Server server;
  nlohmann::json seen;
  std::string auth;
  server.Post("/v1/generate", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"completion": "answer = 'ok'"})", "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  TeacherConfig cfg;
  cfg.temperature = 0.3;
  cfg.max_output_tokens = 64;
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  HttpTeacher teacher(base + "/v1/generate", "secret", cfg, 5);
  CHECK(teacher.generate("Question: x\nProgram:\n") == "answer = 'ok'");
  CHECK(seen["temperature"] == doctest::Approx(0.3));
  CHECK(seen["max_tokens"] == 64);
  CHECK(auth == "Bearer secret");

  HttpTeacher broken(base + "/broken", {}, cfg, 5);
  CHECK_THROWS_AS(broken.generate("p"), TransportError);

  server.stop();
  worker.join();
  CHECK_THROWS_AS(HttpTeacher("no-scheme"), std::invalid_argument);
}
