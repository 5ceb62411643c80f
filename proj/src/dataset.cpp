#include "vpd/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "vpd/io_error.hpp"
#include "vpd/rng.hpp"
#include "vpd/text.hpp"

namespace vpd {

using nlohmann::json;

const char* tool_version() { return "vpd 0.1.0"; }

std::string require_string(const json& row, const char* field, const std::string& record_id) {
  auto it = row.find(field);
  if (it == row.end()) throw SchemaError("record " + record_id + ": missing field '" + field + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw SchemaError("record " + record_id + ": field '" + field + "' must be a string");
}

json to_json(const DatasetRecord& r) {
  json j{{"id", r.id}, {"question", r.question}, {"answer", r.answer}, {"scene_id", r.scene_id}, {"split", r.split}};
  if (!r.annotator_answers.empty()) j["answers"] = r.annotator_answers;
  return j;
}

DatasetRecord dataset_record_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("dataset row is not an object");
  DatasetRecord r;
  r.id = require_string(j, "id", "<unknown>");
  r.question = require_string(j, "question", r.id);
  r.answer = require_string(j, "answer", r.id);
  r.scene_id = j.contains("scene_id") ? require_string(j, "scene_id", r.id) : "";
  r.split = j.contains("split") ? require_string(j, "split", r.id) : "train";
  if (auto it = j.find("answers"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("record " + r.id + ": field 'answers' must be a list");
    for (const auto& a : *it) {
      if (!a.is_string()) throw SchemaError("record " + r.id + ": field 'answers' must hold strings");
      r.annotator_answers.push_back(a.get<std::string>());
    }
  }
  return r;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<json> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError(path + ":" + std::to_string(lineno) + ": invalid JSON");
    rows.push_back(std::move(j));
  }
  return rows;
}

void write_jsonl(const std::string& path, const std::vector<json>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& r : rows) out << r.dump() << '\n';
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::vector<DatasetRecord> out;
  std::set<std::string> ids;
  for (const auto& row : read_jsonl(path)) {
    DatasetRecord r = dataset_record_from_json(row);
    if (!ids.insert(r.id).second) throw SchemaError("record " + r.id + ": duplicate id");
    out.push_back(std::move(r));
  }
  return out;
}

void save_dataset(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError(path + ": invalid JSON");
  return j;
}

}  // namespace

std::vector<DatasetRecord> load_gqa_questions(const std::string& path, const std::string& split) {
  const json j = read_json(path);
  if (!j.is_object()) throw SchemaError(path + ": expected an object keyed by question id");
  std::vector<DatasetRecord> out;
  for (const auto& [qid, q] : j.items()) {
    DatasetRecord r;
    r.id = qid;
    r.question = require_string(q, "question", qid);
    r.answer = require_string(q, "answer", qid);
    r.scene_id = require_string(q, "imageId", qid);
    r.split = split;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DatasetRecord> load_vqa(const std::string& questions_path, const std::string& annotations_path,
                                    const std::string& split) {
  const json qs = read_json(questions_path);
  const json anns = read_json(annotations_path);
  if (!qs.contains("questions") || !anns.contains("annotations")) {
    throw SchemaError("VQA files need 'questions' and 'annotations' lists");
  }
  std::map<std::string, const json*> by_id;
  for (const auto& a : anns["annotations"]) by_id[require_string(a, "question_id", "<annotation>")] = &a;
  std::vector<DatasetRecord> out;
  for (const auto& q : qs["questions"]) {
    DatasetRecord r;
    r.id = require_string(q, "question_id", "<question>");
    r.question = require_string(q, "question", r.id);
    r.scene_id = require_string(q, "image_id", r.id);
    r.split = split;
    auto it = by_id.find(r.id);
    if (it == by_id.end()) throw SchemaError("record " + r.id + ": no annotation");
    const json& a = *it->second;
    r.answer = require_string(a, "multiple_choice_answer", r.id);
    for (const auto& ans : a.value("answers", json::array())) r.annotator_answers.push_back(require_string(ans, "answer", r.id));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
  n = std::min(n, population);
  // Partial Fisher-Yates over the index range, then restore input order.
  std::vector<std::size_t> idx(population);
  for (std::size_t i = 0; i < population; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

struct DigestDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialization failed");
    }
  }
  void update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) throw std::runtime_error("SHA-256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw std::runtime_error("SHA-256 finalization failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 0xF];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Sha256 h;
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

json RunManifest::to_json() const {
  return json{{"stage", stage},           {"seed", seed},
              {"config_hash", config_hash}, {"input_digests", input_digests},
              {"tool_version", tool_version}, {"counts", counts}};
}

std::string RunManifest::hash() const { return sha256_hex(to_json().dump()); }

}  // namespace vpd
