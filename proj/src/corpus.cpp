#include "complab/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace complab::corpus {

void LabeledCorpus::finalize() {
  std::set<std::string> labels;
  label_counts.clear();
  for (const auto& inst : instances) {
    labels.insert(inst.label);
    ++label_counts[inst.label];
  }
  label_set.assign(labels.begin(), labels.end());
}

size_t LabeledCorpus::label_index(const std::string& label) const {
  auto it = std::lower_bound(label_set.begin(), label_set.end(), label);
  if (it == label_set.end() || *it != label)
    throw std::out_of_range("unknown label: " + label);
  return static_cast<size_t>(it - label_set.begin());
}

namespace {

// RFC4180-ish: quoted fields, doubled quotes, no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

bool check_record(const SchemaConfig& schema, Instance& inst, size_t line,
                  std::vector<LoadError>& errors) {
  if (inst.label.empty()) {
    errors.push_back({line, "empty or missing label"});
    return false;
  }
  if (!schema.closed_label_set.empty() &&
      std::find(schema.closed_label_set.begin(), schema.closed_label_set.end(),
                inst.label) == schema.closed_label_set.end()) {
    errors.push_back({line, "label not in declared label set: " + inst.label});
    return false;
  }
  if (inst.fields.empty()) {
    errors.push_back({line, "no text fields"});
    return false;
  }
  return true;
}

}  // namespace

LoadReport load_corpus(const std::string& path, Format format,
                       const SchemaConfig& schema) {
  if (schema.text_fields.empty())
    throw std::invalid_argument("load_corpus: schema needs >= 1 text field");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_corpus: cannot open " + path);

  LoadReport report;
  std::string line;
  size_t line_no = 0;

  std::vector<int> csv_text_cols;
  int csv_label_col = -1, csv_id_col = -1;
  if (format == Format::Csv) {
    if (!std::getline(in, line))
      throw std::runtime_error("load_corpus: empty CSV " + path);
    ++line_no;
    strip_cr(line);
    auto header = split_csv_line(line);
    auto col_of = [&](const std::string& name) -> int {
      auto it = std::find(header.begin(), header.end(), name);
      return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    for (const auto& f : schema.text_fields) {
      int c = col_of(f);
      if (c < 0) throw std::runtime_error("load_corpus: missing column " + f);
      csv_text_cols.push_back(c);
    }
    csv_label_col = col_of(schema.label_field);
    if (csv_label_col < 0)
      throw std::runtime_error("load_corpus: missing label column " +
                               schema.label_field);
    if (!schema.id_field.empty()) csv_id_col = col_of(schema.id_field);
  }

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    Instance inst;
    if (format == Format::Jsonl) {
      nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) {
        report.errors.push_back({line_no, "malformed JSON object"});
        continue;
      }
      bool ok = true;
      for (const auto& f : schema.text_fields) {
        if (!obj.contains(f) || !obj[f].is_string()) {
          report.errors.push_back({line_no, "missing text field: " + f});
          ok = false;
          break;
        }
        inst.fields.push_back(obj[f].get<std::string>());
      }
      if (!ok) continue;
      if (obj.contains(schema.label_field)) {
        const auto& lv = obj[schema.label_field];
        if (lv.is_string())
          inst.label = lv.get<std::string>();
        else if (lv.is_number_integer())
          inst.label = std::to_string(lv.get<int64_t>());
        else if (lv.is_boolean())
          inst.label = lv.get<bool>() ? "true" : "false";
      }
      if (!schema.id_field.empty() && obj.contains(schema.id_field) &&
          obj[schema.id_field].is_string())
        inst.id = obj[schema.id_field].get<std::string>();
    } else {
      auto cells = split_csv_line(line);
      auto cell = [&](int c) -> std::string {
        return c >= 0 && c < static_cast<int>(cells.size()) ? cells[c] : "";
      };
      for (int c : csv_text_cols) inst.fields.push_back(cell(c));
      inst.label = cell(csv_label_col);
      inst.id = cell(csv_id_col);
    }
    if (inst.id.empty()) inst.id = std::to_string(line_no);
    if (!check_record(schema, inst, line_no, report.errors)) continue;
    report.corpus.instances.push_back(std::move(inst));
  }
  report.corpus.finalize();
  return report;
}

std::vector<std::string> extract_features(const Instance& instance,
                                          const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  auto emit_from = [&](const std::string& text) {
    size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() &&
             std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      size_t start = i;
      while (i < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      if (i == start) continue;
      std::string tok = text.substr(start, i - start);
      if (config.punctuation_strip) {
        size_t b = 0, e = tok.size();
        while (b < e && config.punctuation.find(tok[b]) != std::string::npos)
          ++b;
        while (e > b &&
               config.punctuation.find(tok[e - 1]) != std::string::npos)
          --e;
        tok = tok.substr(b, e - b);
      }
      if (config.lowercase)
        for (auto& c : tok)
          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (!tok.empty()) tokens.push_back(std::move(tok));
    }
  };
  if (config.field_selector.empty()) {
    for (const auto& f : instance.fields) emit_from(f);
  } else {
    for (size_t idx : config.field_selector) {
      if (idx >= instance.fields.size())
        throw std::out_of_range("extract_features: field index out of range");
      emit_from(instance.fields[idx]);
    }
  }
  return tokens;
}

CountTable count_features(const LabeledCorpus& corpus,
                          const TokenizerConfig& config) {
  CountTable table;
  const size_t num_classes = corpus.label_set.size();
  for (const auto& inst : corpus.instances) {
    const size_t cls = corpus.label_index(inst.label);
    for (const auto& tok : extract_features(inst, config)) {
      auto& entry = table[tok];
      if (entry.class_counts.empty()) entry.class_counts.resize(num_classes, 0);
      ++entry.n;
      ++entry.class_counts[cls];
    }
  }
  return table;
}

}  // namespace complab::corpus
