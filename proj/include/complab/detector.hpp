#pragma once

#include <string>
#include <vector>

#include "complab/corpus.hpp"
#include "complab/stats.hpp"

namespace complab::detector {

enum class NullModel { Uniform, Empirical };

struct FeatureStats {
  std::string feature;
  uint64_t n = 0;
  std::vector<uint64_t> class_counts;
  std::vector<double> p_hat;
  std::vector<double> z;
  std::vector<double> pmi;  // -inf marks "undefined"
  std::vector<bool> significant;
  size_t max_z_class = 0;
  bool reliable = false;  // n >= min_count
  double max_z() const { return z[max_z_class]; }
};

struct ArtifactReport {
  stats::TestConfig test;
  corpus::TokenizerConfig tokenizer;
  NullModel null_model = NullModel::Uniform;
  std::vector<std::string> label_set;
  std::vector<double> p0;  // per-class null proportion
  double threshold = 0.0;  // z_threshold actually applied
  uint64_t vocabulary_size = 0;
  std::vector<FeatureStats> features;          // sorted (max z desc, feature asc)
  std::vector<uint64_t> significant_per_class; // reliable features only
};

// Per-feature one-vs-rest z tests against the competency null.  When
// test.num_tests is 0 the Bonferroni family defaults to the vocabulary size.
ArtifactReport analyze(const corpus::LabeledCorpus& corpus,
                       const corpus::TokenizerConfig& tok,
                       stats::TestConfig test,
                       NullModel null_model = NullModel::Uniform);

// Same analysis over a precomputed count table (used by the simulators).
ArtifactReport analyze_counts(const corpus::CountTable& counts,
                              const std::vector<std::string>& label_set,
                              const std::vector<uint64_t>& label_totals,
                              stats::TestConfig test, NullModel null_model);

struct SharedFeatureDelta {
  std::string feature;
  double z_a = 0.0;
  double z_b = 0.0;  // delta = z_b - z_a, on the max-z class of a
};

struct PlotPoint {
  std::string feature;
  uint64_t n = 0;
  double z = 0.0;
};

struct ComparisonSummary {
  std::vector<uint64_t> significant_a;
  std::vector<uint64_t> significant_b;
  uint64_t total_significant_a = 0;
  uint64_t total_significant_b = 0;
  std::vector<SharedFeatureDelta> shared_deltas;
  std::vector<PlotPoint> series_a;  // (n, max z) per feature
  std::vector<PlotPoint> series_b;
};

ComparisonSummary compare_reports(const ArtifactReport& a,
                                  const ArtifactReport& b);

enum class Ranking { Z, Pmi };
enum class RankOrder { Highest, Lowest };

// Top-k reliable features for one class; ties break by
// (statistic, n desc, lexicographic).
std::vector<FeatureStats> top_artifacts(const ArtifactReport& report,
                                        const std::string& cls, size_t k,
                                        Ranking ranking,
                                        RankOrder order = RankOrder::Highest);

std::string to_json(const ArtifactReport& report);
std::string to_csv(const ArtifactReport& report);

}  // namespace complab::detector
