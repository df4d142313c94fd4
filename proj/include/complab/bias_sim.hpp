#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "complab/corpus.hpp"
#include "complab/rng.hpp"

namespace complab::bias_sim {

enum class LabelModel { FairCoin, Parity };

struct BiasConfig {
  size_t d = 1;
  std::vector<double> f;  // unbiased marginals p_u(x_i = 1), in (0,1)
  std::vector<double> r;  // rejection probabilities, in [0,1]
  // Label value that triggers rejection when paired with x_i = 1.  Default 0
  // everywhere (reject x_i=1 with y=0, inflating p(y=1|x_i)); setting 1 for a
  // dimension biases the opposite direction, which lets slice biases cancel.
  std::vector<int> reject_label;
  LabelModel label_model = LabelModel::FairCoin;
  std::vector<size_t> parity_dims;  // parity model: y = XOR over these dims
  uint64_t n = 0;
  uint64_t seed = 0;
  uint64_t resample_cap = 1000000;
  void validate() const;
};

struct BooleanInstance {
  uint64_t x = 0;  // bit i = feature x_i; d <= 64
  uint8_t y = 0;
  bool bit(size_t i) const { return (x >> i) & 1; }
};

struct BooleanDataset {
  BiasConfig config;
  std::vector<BooleanInstance> instances;
};

struct TheoreticalStats {
  std::vector<double> joint;        // p_b(y=1, x_i=1)
  std::vector<double> marginal;     // p_b(x_i=1)
  std::vector<double> conditional;  // p_b(y=1 | x_i=1)
};

TheoreticalStats theoretical_stats(const BiasConfig& config);

// Sampling variance of p_hat over n_occ occurrences at p = 1/(2-r):
// binomial form p(1-p)/n_occ, and the squared form printed alongside it.
double variance_binomial(double r, double n_occ);
double variance_squared(double r, double n_occ);

BooleanInstance sample_unbiased(const BiasConfig& config, Rng& rng);

// Draws from sample_unbiased, then applies per-dimension rejection coins;
// resamples until acceptance or the resample cap trips.
BooleanInstance sample_biased(const BiasConfig& config, Rng& rng);

// n accepted instances, one RNG stream per instance index; chunk-parallel
// generation is bit-identical to sequential.
BooleanDataset generate_dataset(const BiasConfig& config, unsigned threads = 1);

corpus::LabeledCorpus to_labeled_corpus(const BooleanDataset& dataset);
corpus::LabeledCorpus generate_corpus(const BiasConfig& config);

struct DimComparison {
  double mean_p_hat = 0.0;
  double var_p_hat = 0.0;
  double theory_mean = 0.0;
  double theory_var_binomial = 0.0;
  double theory_var_squared = 0.0;
  double mean_n_occ = 0.0;
};

std::vector<DimComparison> empirical_vs_theory(const BiasConfig& config,
                                               uint64_t replications);

// JSONL: {"x":"0101...","y":0|1}, one object per instance.
std::string dataset_to_jsonl(const BooleanDataset& dataset);
BooleanDataset dataset_from_jsonl(const std::string& path);
std::string config_to_json(const BiasConfig& config);
BiasConfig config_from_json(const std::string& text);

}  // namespace complab::bias_sim
