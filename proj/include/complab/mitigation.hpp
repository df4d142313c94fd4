#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "complab/bias_sim.hpp"
#include "complab/corpus.hpp"
#include "complab/detector.hpp"

namespace complab::mitigation {

struct AnnotatorPoolConfig {
  size_t k = 1;                    // annotator count
  bias_sim::BiasConfig base;       // template; base.n = total instances
  double sparsity = 0.5;           // P(dimension biased) per annotator
  double magnitude_min = 0.0;      // r magnitude uniform on (magnitude_min, 1]
  bool signed_bias = true;         // random rejection direction per draw
  std::vector<size_t> correlated_dims;  // one shared draw across annotators
  uint64_t seed = 0;
  void validate() const;
};

struct PoolResult {
  bias_sim::BooleanDataset dataset;           // concatenated slices
  std::vector<std::vector<double>> r_vectors; // per annotator
  std::vector<std::vector<int>> reject_labels;
};

// k slices, each generated by bias-sim under its own sampled r vector.
PoolResult multi_annotator_corpus(const AnnotatorPoolConfig& config);

struct FilterSpec {
  std::vector<std::string> subset_ids;  // externally produced
  bool balance_labels = true;
  bool match_size_reference = true;
  uint64_t seed = 0;
};

struct DownsampleResult {
  corpus::LabeledCorpus filtered;
  corpus::LabeledCorpus reference;  // same-size balanced sample of the whole
};

// Balanced downsample of the subset plus a size-matched reference drawn from
// the full corpus; deterministic given spec.seed.
DownsampleResult balanced_downsample(const corpus::LabeledCorpus& corpus,
                                     const FilterSpec& spec);

// Thin wrapper over detector::compare_reports with config compatibility checks.
detector::ComparisonSummary mitigation_comparison(
    const detector::ArtifactReport& before, const detector::ArtifactReport& after);

std::string pool_provenance_json(const AnnotatorPoolConfig& config,
                                 const PoolResult& result);

AnnotatorPoolConfig pool_config_from_json(const std::string& text);

std::vector<std::string> read_subset_ids(const std::string& path);

}  // namespace complab::mitigation
