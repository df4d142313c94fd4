#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "complab/corpus.hpp"

using namespace complab::corpus;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("jsonl ingestion with inferred labels") {
  auto path = write_temp(
      "corpus_3line.jsonl",
      R"({"premise":"a man walks","hypothesis":"someone moves","label":"entailment"})"
      "\n"
      R"({"premise":"a dog runs","hypothesis":"nobody sleeps","label":"contradiction"})"
      "\n"
      R"({"premise":"kids play","hypothesis":"kids are outside","label":"neutral"})"
      "\n");
  SchemaConfig schema;
  schema.text_fields = {"premise", "hypothesis"};
  auto report = load_corpus(path, Format::Jsonl, schema);
  CHECK(report.errors.empty());
  CHECK(report.corpus.instances.size() == 3);
  CHECK(report.corpus.label_set ==
        std::vector<std::string>{"contradiction", "entailment", "neutral"});
  CHECK(report.corpus.instances[0].fields.size() == 2);
}

TEST_CASE("empty label goes to the error report") {
  auto path = write_temp("corpus_badlabel.jsonl",
                         R"({"text":"fine","label":"a"})"
                         "\n"
                         R"({"text":"broken","label":""})"
                         "\n"
                         R"({"text":"also fine","label":"b"})"
                         "\n");
  SchemaConfig schema;
  schema.text_fields = {"text"};
  auto report = load_corpus(path, Format::Jsonl, schema);
  CHECK(report.corpus.instances.size() == 2);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].line == 2);
}

TEST_CASE("unknown label under a closed label set") {
  auto path = write_temp("corpus_closed.jsonl",
                         R"({"text":"x","label":"yes"})"
                         "\n"
                         R"({"text":"y","label":"maybe"})"
                         "\n");
  SchemaConfig schema;
  schema.text_fields = {"text"};
  schema.closed_label_set = {"yes", "no"};
  auto report = load_corpus(path, Format::Jsonl, schema);
  CHECK(report.corpus.instances.size() == 1);
  CHECK(report.errors.size() == 1);
}

TEST_CASE("csv ingestion") {
  std::string content = "text,label\n";
  for (int i = 0; i < 100; ++i)
    content += "row " + std::to_string(i) + "," + (i % 2 ? "pos" : "neg") + "\n";
  auto path = write_temp("corpus_100.csv", content);
  SchemaConfig schema;
  schema.text_fields = {"text"};
  auto report = load_corpus(path, Format::Csv, schema);
  CHECK(report.errors.empty());
  CHECK(report.corpus.instances.size() == 100);
  CHECK(report.corpus.instances[0].fields.size() == 1);
  CHECK(report.corpus.label_counts.at("pos") == 50);
}

TEST_CASE("csv quoting") {
  auto path = write_temp("corpus_quote.csv",
                         "text,label\n\"hello, \"\"world\"\"\",a\nplain,b\n");
  SchemaConfig schema;
  schema.text_fields = {"text"};
  auto report = load_corpus(path, Format::Csv, schema);
  REQUIRE(report.corpus.instances.size() == 2);
  CHECK(report.corpus.instances[0].fields[0] == "hello, \"world\"");
}

TEST_CASE("missing file") {
  SchemaConfig schema;
  schema.text_fields = {"text"};
  CHECK_THROWS_AS(load_corpus("/nonexistent/nope.jsonl", Format::Jsonl, schema),
                  std::runtime_error);
}

TEST_CASE("tokenizer: punctuation strip and lowercase") {
  Instance inst{"1", {"A dog, a dog."}, "x"};
  TokenizerConfig cfg;
  cfg.lowercase = true;
  cfg.punctuation_strip = true;
  auto toks = extract_features(inst, cfg);
  std::sort(toks.begin(), toks.end());
  CHECK(toks == std::vector<std::string>{"a", "a", "dog", "dog"});
}

TEST_CASE("tokenizer: empty text and defaults") {
  TokenizerConfig cfg;
  CHECK(extract_features({"1", {""}, "x"}, cfg).empty());
  auto toks = extract_features({"1", {"Not amazing"}, "x"}, cfg);
  CHECK(toks == std::vector<std::string>{"Not", "amazing"});
}

TEST_CASE("tokenizer: field selector") {
  Instance inst{"1", {"alpha beta", "gamma"}, "x"};
  TokenizerConfig cfg;
  cfg.field_selector = {1};
  CHECK(extract_features(inst, cfg) == std::vector<std::string>{"gamma"});
  cfg.field_selector = {5};
  CHECK_THROWS_AS(extract_features(inst, cfg), std::out_of_range);
}

TEST_CASE("count_features basic counting") {
  LabeledCorpus corpus;
  for (int i = 0; i < 7; ++i) corpus.instances.push_back({"a" + std::to_string(i), {"cat"}, "A"});
  for (int i = 0; i < 3; ++i) corpus.instances.push_back({"b" + std::to_string(i), {"cat"}, "B"});
  corpus.finalize();
  auto table = count_features(corpus, {});
  REQUIRE(table.count("cat"));
  CHECK(table["cat"].n == 10);
  CHECK(table["cat"].class_counts[corpus.label_index("A")] == 7);
  CHECK(table["cat"].class_counts[corpus.label_index("B")] == 3);
}

TEST_CASE("count_features: within-instance multiplicity counts") {
  LabeledCorpus corpus;
  corpus.instances.push_back({"1", {"word word"}, "A"});
  corpus.instances.push_back({"2", {"other"}, "B"});
  corpus.finalize();
  auto table = count_features(corpus, {});
  CHECK(table["word"].n == 2);
}

TEST_CASE("count_features: empty corpus") {
  LabeledCorpus corpus;
  corpus.finalize();
  CHECK(count_features(corpus, {}).empty());
}

TEST_CASE("permutation invariance and mass conservation") {
  LabeledCorpus corpus;
  std::mt19937 gen(42);
  const std::vector<std::string> words = {"red", "green", "blue", "dog", "cat"};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    const int len = 1 + static_cast<int>(gen() % 6);
    for (int w = 0; w < len; ++w) {
      if (!text.empty()) text += ' ';
      text += words[gen() % words.size()];
    }
    corpus.instances.push_back(
        {std::to_string(i), {text}, gen() % 2 ? "A" : "B"});
  }
  corpus.finalize();
  TokenizerConfig cfg;
  auto table = count_features(corpus, cfg);

  uint64_t table_mass = 0;
  for (const auto& [tok, entry] : table) table_mass += entry.n;
  uint64_t emitted = 0;
  for (const auto& inst : corpus.instances)
    emitted += extract_features(inst, cfg).size();
  CHECK(table_mass == emitted);

  LabeledCorpus shuffled = corpus;
  std::shuffle(shuffled.instances.begin(), shuffled.instances.end(), gen);
  shuffled.finalize();
  CHECK(count_features(shuffled, cfg) == table);
}
