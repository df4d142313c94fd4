#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace complab::corpus {

struct Instance {
  std::string id;
  std::vector<std::string> fields;  // ordered text segments
  std::string label;
};

struct TokenizerConfig {
  bool lowercase = false;
  bool punctuation_strip = true;
  // Stripped from token edges when punctuation_strip is set.
  std::string punctuation = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  std::vector<size_t> field_selector;  // empty = all fields
};

struct LabeledCorpus {
  std::vector<Instance> instances;
  std::vector<std::string> label_set;             // sorted, unique
  std::map<std::string, uint64_t> label_counts;

  void finalize();  // rebuild label_set / label_counts from instances
  size_t label_index(const std::string& label) const;
};

struct LoadError {
  size_t line = 0;
  std::string message;
};

struct LoadReport {
  LabeledCorpus corpus;
  std::vector<LoadError> errors;
};

enum class Format { Jsonl, Csv };

struct SchemaConfig {
  std::vector<std::string> text_fields;  // JSONL keys / CSV columns, in order
  std::string label_field = "label";
  std::string id_field;                       // optional
  std::vector<std::string> closed_label_set;  // empty = infer from data
};

// Order-preserving ingestion; malformed records land in the error report.
LoadReport load_corpus(const std::string& path, Format format,
                       const SchemaConfig& schema);

// Token occurrences (with multiplicity) from the selected fields.
std::vector<std::string> extract_features(const Instance& instance,
                                          const TokenizerConfig& config);

struct FeatureCounts {
  uint64_t n = 0;                     // total occurrences
  std::vector<uint64_t> class_counts; // indexed by corpus label_set order
  bool operator==(const FeatureCounts&) const = default;
};

// token type -> counts; std::map keeps serialization order canonical.
using CountTable = std::map<std::string, FeatureCounts>;

CountTable count_features(const LabeledCorpus& corpus,
                          const TokenizerConfig& config);

}  // namespace complab::corpus
