#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace vpd {

/// A malformed input row; the message names the record and field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetRecord {
  std::string id;
  std::string question;
  std::string answer;
  std::string scene_id;
  std::string split = "train";
  /// Per-annotator answers for agreement scoring; may be empty.
  std::vector<std::string> annotator_answers;

  bool operator==(const DatasetRecord&) const = default;
};

nlohmann::json to_json(const DatasetRecord& record);
DatasetRecord dataset_record_from_json(const nlohmann::json& j);

/// Non-empty lines of a JSONL file, parsed. Parse errors carry the line
/// number.
std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows);

/// Reads dataset rows and rejects duplicate ids.
std::vector<DatasetRecord> load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<DatasetRecord>& records);

/// String field `field` of `row`, or SchemaError naming `record_id`.
std::string require_string(const nlohmann::json& row, const char* field, const std::string& record_id);

/// GQA question file: an object keyed by question id whose values hold
/// `question`, `answer` and `imageId`.
std::vector<DatasetRecord> load_gqa_questions(const std::string& path, const std::string& split);

/// VQAv2 question and annotation files joined on `question_id`.
std::vector<DatasetRecord> load_vqa(const std::string& questions_path, const std::string& annotations_path,
                                    const std::string& split);

/// Seeded uniform subset of size min(n, records.size()), original order kept.
template <class T>
std::vector<T> sample_n(const std::vector<T>& records, std::size_t n, std::uint64_t seed);

/// Seeded subset of round(fraction * size) records, at least one when the
/// input is non-empty and fraction > 0.
template <class T>
std::vector<T> sample_fraction(const std::vector<T>& records, double fraction, std::uint64_t seed);

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed);

template <class T>
std::vector<T> sample_n(const std::vector<T>& records, std::size_t n, std::uint64_t seed) {
  std::vector<T> out;
  for (std::size_t i : sample_indices(records.size(), n, seed)) out.push_back(records[i]);
  return out;
}

template <class T>
std::vector<T> sample_fraction(const std::vector<T>& records, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must be in [0, 1]");
  std::size_t n = static_cast<std::size_t>(fraction * static_cast<double>(records.size()) + 0.5);
  if (n == 0 && fraction > 0.0 && !records.empty()) n = 1;
  return sample_n(records, n, seed);
}

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

/// Provenance of one pipeline stage.
struct RunManifest {
  std::string stage;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::string> input_digests;
  std::string tool_version;
  std::map<std::string, std::size_t> counts;

  nlohmann::json to_json() const;
  /// SHA-256 of the manifest's canonical JSON.
  std::string hash() const;
};

const char* tool_version();

}  // namespace vpd
