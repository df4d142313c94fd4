#include "complab/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace complab::detector {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void sort_features(std::vector<FeatureStats>& features) {
  std::sort(features.begin(), features.end(),
            [](const FeatureStats& a, const FeatureStats& b) {
              if (a.max_z() != b.max_z()) return a.max_z() > b.max_z();
              return a.feature < b.feature;
            });
}

}  // namespace

ArtifactReport analyze_counts(const corpus::CountTable& counts,
                              const std::vector<std::string>& label_set,
                              const std::vector<uint64_t>& label_totals,
                              stats::TestConfig test, NullModel null_model) {
  if (label_set.size() < 2)
    throw std::invalid_argument("analyze: need >= 2 classes");
  const size_t num_classes = label_set.size();

  ArtifactReport report;
  report.label_set = label_set;
  report.null_model = null_model;
  report.vocabulary_size = counts.size();
  if (test.num_tests == 0) test.num_tests = std::max<uint64_t>(counts.size(), 1);
  report.test = test;
  report.threshold = stats::z_threshold(test);

  uint64_t total_instances = 0;
  for (uint64_t c : label_totals) total_instances += c;
  if (total_instances == 0)
    throw std::invalid_argument("analyze: empty corpus");

  report.p0.resize(num_classes);
  std::vector<double> p_y(num_classes);
  for (size_t c = 0; c < num_classes; ++c) {
    p_y[c] = static_cast<double>(label_totals[c]) /
             static_cast<double>(total_instances);
    report.p0[c] = null_model == NullModel::Uniform
                       ? 1.0 / static_cast<double>(num_classes)
                       : p_y[c];
  }

  report.significant_per_class.assign(num_classes, 0);
  report.features.reserve(counts.size());
  for (const auto& [token, entry] : counts) {
    FeatureStats fs;
    fs.feature = token;
    fs.n = entry.n;
    fs.class_counts = entry.class_counts;
    fs.class_counts.resize(num_classes, 0);
    fs.reliable = fs.n >= test.min_count;
    fs.p_hat.resize(num_classes);
    fs.z.resize(num_classes);
    fs.pmi.resize(num_classes);
    fs.significant.resize(num_classes);
    for (size_t c = 0; c < num_classes; ++c) {
      fs.p_hat[c] = static_cast<double>(fs.class_counts[c]) /
                    static_cast<double>(fs.n);
      fs.z[c] = stats::z_statistic(fs.p_hat[c], report.p0[c], fs.n);
      fs.pmi[c] = p_y[c] > 0.0
                      ? stats::pmi(fs.p_hat[c], p_y[c])
                      : -std::numeric_limits<double>::infinity();
      fs.significant[c] = fs.z[c] >= report.threshold;
      if (fs.z[c] > fs.z[fs.max_z_class]) fs.max_z_class = c;
      if (fs.significant[c] && fs.reliable) ++report.significant_per_class[c];
    }
    report.features.push_back(std::move(fs));
  }
  sort_features(report.features);
  return report;
}

ArtifactReport analyze(const corpus::LabeledCorpus& corpus,
                       const corpus::TokenizerConfig& tok,
                       stats::TestConfig test, NullModel null_model) {
  if (corpus.instances.empty())
    throw std::invalid_argument("analyze: empty corpus");
  if (corpus.label_set.size() < 2)
    throw std::invalid_argument("analyze: single-class corpus");
  std::vector<uint64_t> label_totals;
  label_totals.reserve(corpus.label_set.size());
  for (const auto& l : corpus.label_set)
    label_totals.push_back(corpus.label_counts.at(l));
  auto counts = corpus::count_features(corpus, tok);
  auto report =
      analyze_counts(counts, corpus.label_set, label_totals, test, null_model);
  report.tokenizer = tok;
  return report;
}

ComparisonSummary compare_reports(const ArtifactReport& a,
                                  const ArtifactReport& b) {
  ComparisonSummary s;
  s.significant_a = a.significant_per_class;
  s.significant_b = b.significant_per_class;
  for (uint64_t c : s.significant_a) s.total_significant_a += c;
  for (uint64_t c : s.significant_b) s.total_significant_b += c;

  std::map<std::string, const FeatureStats*> b_index;
  for (const auto& f : b.features) b_index[f.feature] = &f;
  for (const auto& f : a.features) {
    s.series_a.push_back({f.feature, f.n, f.max_z()});
    auto it = b_index.find(f.feature);
    if (it != b_index.end() && f.max_z_class < it->second->z.size())
      s.shared_deltas.push_back(
          {f.feature, f.max_z(), it->second->z[f.max_z_class]});
  }
  for (const auto& f : b.features) s.series_b.push_back({f.feature, f.n, f.max_z()});
  return s;
}

std::vector<FeatureStats> top_artifacts(const ArtifactReport& report,
                                        const std::string& cls, size_t k,
                                        Ranking ranking, RankOrder order) {
  if (k < 1) throw std::invalid_argument("top_artifacts: k must be >= 1");
  auto it = std::find(report.label_set.begin(), report.label_set.end(), cls);
  if (it == report.label_set.end())
    throw std::out_of_range("top_artifacts: class not in report: " + cls);
  const size_t c = static_cast<size_t>(it - report.label_set.begin());

  std::vector<FeatureStats> pool;
  for (const auto& f : report.features)
    if (f.reliable) pool.push_back(f);

  auto stat = [&](const FeatureStats& f) {
    return ranking == Ranking::Z ? f.z[c] : f.pmi[c];
  };
  const bool desc = order == RankOrder::Highest;
  std::sort(pool.begin(), pool.end(),
            [&](const FeatureStats& a, const FeatureStats& b) {
              double sa = stat(a), sb = stat(b);
              if (sa != sb) return desc ? sa > sb : sa < sb;
              if (a.n != b.n) return a.n > b.n;
              return a.feature < b.feature;
            });
  if (pool.size() > k) pool.resize(k);
  return pool;
}

namespace {

nlohmann::ordered_json json_stat(double v) {
  if (std::isinf(v) && v < 0) return "undefined";
  // 6 significant digits in exports
  return nlohmann::ordered_json::parse(fmt6(v));
}

}  // namespace

std::string to_json(const ArtifactReport& report) {
  nlohmann::ordered_json j;
  j["config"]["alpha"] = report.test.alpha;
  j["config"]["num_tests"] = report.test.num_tests;
  j["config"]["min_count"] = report.test.min_count;
  j["config"]["null_model"] =
      report.null_model == NullModel::Uniform ? "uniform" : "empirical";
  j["config"]["lowercase"] = report.tokenizer.lowercase;
  j["config"]["punctuation_strip"] = report.tokenizer.punctuation_strip;
  j["config"]["z_threshold"] = json_stat(report.threshold);
  j["labels"] = report.label_set;
  j["p0"] = report.p0;
  j["vocabulary_size"] = report.vocabulary_size;
  j["summary"]["significant_per_class"] = report.significant_per_class;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& f : report.features) {
    nlohmann::ordered_json row;
    row["feature"] = f.feature;
    row["n"] = f.n;
    row["class_counts"] = f.class_counts;
    auto arr = [&](const std::vector<double>& v) {
      auto a = nlohmann::ordered_json::array();
      for (double x : v) a.push_back(json_stat(x));
      return a;
    };
    row["p_hat"] = arr(f.p_hat);
    row["z"] = arr(f.z);
    row["pmi"] = arr(f.pmi);
    row["significant"] = f.significant;
    row["max_z_class"] = report.label_set[f.max_z_class];
    row["reliable"] = f.reliable;
    rows.push_back(std::move(row));
  }
  j["features"] = std::move(rows);
  return j.dump(2) + "\n";
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_csv(const ArtifactReport& report) {
  std::string out = "feature,class,n,count,p_hat,z,pmi,significant,reliable\n";
  for (const auto& f : report.features) {
    for (size_t c = 0; c < report.label_set.size(); ++c) {
      out += csv_escape(f.feature);
      out += ',';
      out += csv_escape(report.label_set[c]);
      out += ',';
      out += std::to_string(f.n);
      out += ',';
      out += std::to_string(f.class_counts[c]);
      out += ',';
      out += fmt6(f.p_hat[c]);
      out += ',';
      out += fmt6(f.z[c]);
      out += ',';
      out += std::isinf(f.pmi[c]) ? "undefined" : fmt6(f.pmi[c]);
      out += ',';
      out += f.significant[c] ? "true" : "false";
      out += ',';
      out += f.reliable ? "true" : "false";
      out += '\n';
    }
  }
  return out;
}

}  // namespace complab::detector
