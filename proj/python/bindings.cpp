#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "vpd/analysis.hpp"
#include "vpd/augment.hpp"
#include "vpd/bench.hpp"
#include "vpd/exec.hpp"
#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/slots.hpp"
#include "vpd/teacher.hpp"
#include "vpd/template.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace vpd;

namespace {

py::dict template_dict(const TemplateRecord& r) {
  py::dict d;
  d["question"] = r.question;
  d["source_id"] = r.source_id;
  d["template_id"] = r.tmpl.id();
  d["template_text"] = r.tmpl.text();
  d["slot_count"] = r.tmpl.slot_count();
  d["signature"] = r.tmpl.signature();
  d["args"] = r.args.values;
  d["link_groups"] = r.args.link_groups;
  return d;
}

py::dict outcome_dict(const ExecOutcome& o) {
  py::dict d;
  d["ok"] = o.ok();
  if (o.ok()) {
    d["answer"] = o.answer();
  } else {
    d["failure"] = to_string(o.failure().kind);
    d["message"] = o.failure().message;
    d["statement_index"] = o.failure().statement_index;
  }
  return d;
}

std::map<std::string, SceneGraph> scenes_from_json(const std::vector<std::string>& scenes) {
  std::map<std::string, SceneGraph> out;
  for (const auto& s : scenes) {
    SceneGraph g = scene_from_json(json::parse(s));
    g.validate();
    out.emplace(g.scene_id, std::move(g));
  }
  return out;
}

std::vector<std::string> flag_names(const FlagSet& flags) {
  std::vector<std::string> out;
  for (Flag f : flags) out.emplace_back(to_string(f));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Visual program parsing, templates, execution, augmentation and metrics";

  static py::exception<SyntaxError> syntax_error(m, "ProgramSyntaxError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SyntaxError& e) {
      py::object err = py::handle(syntax_error.ptr())(e.what());
      err.attr("line") = e.line();
      err.attr("column") = e.column();
      PyErr_SetObject(syntax_error.ptr(), err.ptr());
    }
  });
  py::register_exception<ArityMismatch>(m, "ArityMismatch", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SceneError>(m, "SceneError", PyExc_ValueError);

  m.def("canonicalize", [](const std::string& source) { return print_canonical(parse(source)); },
        py::arg("source"), "Parse and print in canonical form.");
  m.def("rename_variables",
        [](const std::string& source) { return print_canonical(rename_variables(parse(source))); },
        py::arg("source"));
  m.def(
      "string_slots",
      [](const std::string& source) {
        std::vector<std::string> out;
        for (const auto& s : string_literal_slots(parse(source))) out.push_back(s.value);
        return out;
      },
      py::arg("source"));

  m.def(
      "extract",
      [](const std::string& question, const std::string& program, const std::string& source_id) {
        return template_dict(extract(question, program, source_id));
      },
      py::arg("question"), py::arg("program"), py::arg("source_id") = "");
  m.def(
      "instantiate",
      [](const std::string& template_text, const std::vector<std::string>& values) {
        return instantiate(Template(parse(template_text)), values);
      },
      py::arg("template_text"), py::arg("values"));

  m.def(
      "execute",
      [](const std::string& program, const std::string& scene_json, std::size_t step_budget) {
        SceneGraph g = scene_from_json(json::parse(scene_json));
        g.validate();
        ExecLimits limits;
        limits.step_budget = step_budget;
        return outcome_dict(run_source(program, g, limits));
      },
      py::arg("program"), py::arg("scene_json"), py::arg("step_budget") = 10000);

  m.def(
      "augment",
      [](const std::vector<std::tuple<std::string, std::string, std::string>>& records, std::size_t k,
         double probability, std::uint64_t seed, bool linked, bool detached_provider) {
        std::vector<TemplateRecord> recs;
        for (const auto& [id, question, program] : records) recs.push_back(extract(question, program, id));
        ReplacementPolicy policy;
        policy.probability = probability;
        policy.seed = seed;
        policy.link_mode = linked ? LinkMode::Linked : LinkMode::Independent;
        policy.question_detached_mode = detached_provider ? DetachedMode::Provider : DetachedMode::Skip;
        py::list out;
        for (const auto& p : augment_stream(recs, k, LexiconProvider(default_lexicon()), policy)) {
          py::dict d;
          d["id"] = p.id;
          d["parent_id"] = p.parent_id;
          d["question"] = p.question;
          d["program"] = p.program;
          py::list reps;
          for (const auto& r : p.replacements) reps.append(py::make_tuple(r.slot, r.old_value, r.new_value));
          d["replacements"] = reps;
          out.append(d);
        }
        return out;
      },
      py::arg("records"), py::arg("k"), py::arg("probability") = 0.5, py::arg("seed") = 0, py::arg("linked") = true,
      py::arg("detached_provider") = false, "records are (id, question, program) triples.");

  m.def(
      "check",
      [](const std::string& question, const std::string& program) {
        const auto& lex = default_check_lexicon();
        py::dict d;
        d["static"] = flag_names(static_check(program, question, lex));
        d["heuristic"] = flag_names(heuristic_check(question, program, lex));
        return d;
      },
      py::arg("question"), py::arg("program"));

  m.def("accuracy_vqa", [](const std::string& p, const std::vector<std::string>& a) { return accuracy_vqa(p, a); },
        py::arg("prediction"), py::arg("annotators"));
  m.def("accuracy_exact", &accuracy_exact, py::arg("predictions"), py::arg("gold"));
  m.def("ngram_entropy", &ngram_entropy, py::arg("questions"), py::arg("n") = 2);

  m.def(
      "gen_bench",
      [](std::size_t n_scenes, std::size_t questions_per_scene, std::uint64_t seed) {
        BenchmarkConfig c = default_benchmark_config();
        c.n_scenes = n_scenes;
        c.questions_per_scene = questions_per_scene;
        c.seed = seed;
        const Benchmark b = gen_bench(c);
        py::list scenes;
        for (const auto& s : b.scenes) scenes.append(scene_to_json(s).dump());
        py::list items;
        for (const auto& item : b.items) {
          py::dict d;
          d["id"] = item.record.id;
          d["question"] = item.record.question;
          d["answer"] = item.record.answer;
          d["scene_id"] = item.record.scene_id;
          d["program"] = item.program;
          d["family"] = to_string(item.spec.family);
          items.append(d);
        }
        py::dict out;
        out["scenes"] = scenes;
        out["items"] = items;
        return out;
      },
      py::arg("n_scenes"), py::arg("questions_per_scene") = 5, py::arg("seed") = 0,
      "Scenes come back as JSON strings.");

  m.def(
      "annotate",
      [](const std::vector<std::map<std::string, std::string>>& records, const std::vector<std::string>& scenes,
         const std::map<std::string, std::string>& gold_programs, std::size_t k, std::uint64_t seed) {
        OracleTeacher teacher(seed);
        for (const auto& [q, p] : gold_programs) teacher.add_gold(q, p);
        std::vector<AnnotationInput> inputs;
        for (const auto& r : records) inputs.push_back({r.at("id"), r.at("question"), r.at("answer"), r.at("scene_id")});
        const HashedEmbedder embedder;
        ExamplePool pool;
        AnnotationRunConfig cfg;
        cfg.retrieval_k = k;
        cfg.seed = seed;
        const auto scene_map = scenes_from_json(scenes);
        const auto result = annotate(inputs, scene_map, teacher, pool, embedder, cfg);
        py::list outcomes;
        for (const auto& o : result.outcomes) {
          py::dict d;
          d["id"] = o.id;
          d["status"] = to_string(o.status);
          d["program"] = o.program;
          d["reason"] = o.reason;
          outcomes.append(d);
        }
        py::dict stats;
        stats["processed"] = result.stats.processed;
        stats["validated"] = result.stats.validated;
        stats["discarded"] = result.stats.discarded;
        stats["pool_size"] = pool.size();
        stats["pool_soundness"] = pool_soundness(pool, scene_map);
        py::dict out;
        out["outcomes"] = outcomes;
        out["stats"] = stats;
        return out;
      },
      py::arg("records"), py::arg("scenes"), py::arg("gold_programs"), py::arg("k") = 50, py::arg("seed") = 0,
      "Oracle-teacher annotation; records need id, question, answer and scene_id.");
}
