#include "complab/mitigation.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace complab::mitigation {

void AnnotatorPoolConfig::validate() const {
  if (k < 1) throw std::invalid_argument("AnnotatorPoolConfig: k must be >= 1");
  if (!(sparsity >= 0.0 && sparsity <= 1.0))
    throw std::invalid_argument("AnnotatorPoolConfig: sparsity must be in [0,1]");
  if (!(magnitude_min >= 0.0 && magnitude_min < 1.0))
    throw std::invalid_argument("AnnotatorPoolConfig: magnitude_min in [0,1)");
  for (size_t dim : correlated_dims)
    if (dim >= base.d)
      throw std::invalid_argument("AnnotatorPoolConfig: correlated dim out of range");
  bias_sim::BiasConfig check = base;
  if (check.n == 0) check.n = 1;
  check.validate();
}

PoolResult multi_annotator_corpus(const AnnotatorPoolConfig& config) {
  config.validate();
  const size_t d = config.base.d;

  // one shared draw for correlated dimensions
  Rng shared_rng = Rng::stream(config.seed, 0xc0ffee);
  std::vector<double> shared_r(d, 0.0);
  std::vector<int> shared_dir(d, 0);
  for (size_t dim : config.correlated_dims) {
    if (config.base.r[dim] > 0.0) {
      shared_r[dim] = config.base.r[dim];
      shared_dir[dim] = config.base.reject_label.empty()
                            ? 0
                            : config.base.reject_label[dim];
    } else {
      shared_r[dim] = config.magnitude_min +
                      (1.0 - config.magnitude_min) * shared_rng.next_double();
      shared_dir[dim] =
          config.signed_bias && shared_rng.bernoulli(0.5) ? 1 : 0;
    }
  }

  PoolResult result;
  result.dataset.config = config.base;
  result.dataset.config.r.assign(d, 0.0);
  result.dataset.config.reject_label.clear();

  const uint64_t total = config.base.n;
  for (size_t a = 0; a < config.k; ++a) {
    Rng rng = Rng::stream(config.seed, a + 1);
    bias_sim::BiasConfig slice = config.base;
    slice.r.assign(d, 0.0);
    slice.reject_label.assign(d, 0);
    for (size_t dim = 0; dim < d; ++dim) {
      if (std::find(config.correlated_dims.begin(), config.correlated_dims.end(),
                    dim) != config.correlated_dims.end()) {
        slice.r[dim] = shared_r[dim];
        slice.reject_label[dim] = shared_dir[dim];
        continue;
      }
      if (!rng.bernoulli(config.sparsity)) continue;
      slice.r[dim] = config.magnitude_min +
                     (1.0 - config.magnitude_min) * rng.next_double();
      slice.reject_label[dim] = config.signed_bias && rng.bernoulli(0.5) ? 1 : 0;
    }
    slice.n = total / config.k + (a < total % config.k ? 1 : 0);
    uint64_t sm = config.seed ^ (a + 1) * 0x9e3779b97f4a7c15ULL;
    slice.seed = splitmix64(sm);
    auto ds = bias_sim::generate_dataset(slice);
    result.dataset.instances.insert(result.dataset.instances.end(),
                                    ds.instances.begin(), ds.instances.end());
    result.r_vectors.push_back(slice.r);
    result.reject_labels.push_back(slice.reject_label);
  }
  result.dataset.config.n = result.dataset.instances.size();
  return result;
}

namespace {

// canonical order (sorted ids), then a seeded Fisher-Yates shuffle
void seeded_shuffle(std::vector<size_t>& idx,
                    const corpus::LabeledCorpus& corpus, Rng& rng) {
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return corpus.instances[a].id < corpus.instances[b].id;
  });
  for (size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
}

corpus::LabeledCorpus take_balanced(
    const corpus::LabeledCorpus& corpus,
    const std::map<std::string, std::vector<size_t>>& by_label,
    uint64_t per_label, uint64_t seed, uint64_t stream) {
  corpus::LabeledCorpus out;
  uint64_t sub = 0;
  for (const auto& [label, indices] : by_label) {
    std::vector<size_t> idx = indices;
    Rng rng = Rng::stream(seed, stream * 1000 + sub++);
    seeded_shuffle(idx, corpus, rng);
    if (idx.size() > per_label) idx.resize(per_label);
    for (size_t i : idx) out.instances.push_back(corpus.instances[i]);
  }
  out.finalize();
  return out;
}

}  // namespace

DownsampleResult balanced_downsample(const corpus::LabeledCorpus& corpus,
                                     const FilterSpec& spec) {
  std::unordered_map<std::string, size_t> id_index;
  for (size_t i = 0; i < corpus.instances.size(); ++i)
    id_index.emplace(corpus.instances[i].id, i);

  std::map<std::string, std::vector<size_t>> subset_by_label;
  for (const auto& id : spec.subset_ids) {
    auto it = id_index.find(id);
    if (it == id_index.end())
      throw std::invalid_argument("balanced_downsample: unresolved id " + id);
    subset_by_label[corpus.instances[it->second].label].push_back(it->second);
  }
  if (subset_by_label.empty())
    throw std::invalid_argument("balanced_downsample: empty subset");
  if (spec.balance_labels)
    for (const auto& label : corpus.label_set)
      if (!subset_by_label.count(label))
        throw std::invalid_argument("balanced_downsample: label absent from subset: " +
                                    label);

  uint64_t per_label = UINT64_MAX;
  for (const auto& [label, idx] : subset_by_label)
    per_label = std::min<uint64_t>(per_label, idx.size());
  if (!spec.balance_labels) per_label = UINT64_MAX;

  DownsampleResult result;
  result.filtered = take_balanced(corpus, subset_by_label, per_label, spec.seed, 1);

  if (spec.match_size_reference) {
    std::map<std::string, std::vector<size_t>> full_by_label;
    for (size_t i = 0; i < corpus.instances.size(); ++i)
      full_by_label[corpus.instances[i].label].push_back(i);
    // mirror the filtered corpus's exact per-label counts
    std::map<std::string, std::vector<size_t>> capped;
    for (const auto& [label, count] : result.filtered.label_counts) {
      auto it = full_by_label.find(label);
      if (it == full_by_label.end() || it->second.size() < count)
        throw std::invalid_argument(
            "balanced_downsample: full corpus cannot match reference size");
      capped[label] = it->second;
    }
    corpus::LabeledCorpus ref;
    uint64_t sub = 0;
    for (const auto& [label, indices] : capped) {
      std::vector<size_t> idx = indices;
      Rng rng = Rng::stream(spec.seed, 2000 + sub++);
      seeded_shuffle(idx, corpus, rng);
      const uint64_t want = result.filtered.label_counts.at(label);
      if (idx.size() > want) idx.resize(want);
      for (size_t i : idx) ref.instances.push_back(corpus.instances[i]);
    }
    ref.finalize();
    result.reference = std::move(ref);
  }
  return result;
}

detector::ComparisonSummary mitigation_comparison(
    const detector::ArtifactReport& before,
    const detector::ArtifactReport& after) {
  if (before.label_set != after.label_set)
    throw std::invalid_argument("mitigation_comparison: label sets differ");
  if (before.test.alpha != after.test.alpha ||
      before.test.min_count != after.test.min_count ||
      before.null_model != after.null_model)
    throw std::invalid_argument("mitigation_comparison: test configs differ");
  return detector::compare_reports(before, after);
}

std::string pool_provenance_json(const AnnotatorPoolConfig& config,
                                 const PoolResult& result) {
  nlohmann::ordered_json j;
  j["k"] = config.k;
  j["seed"] = config.seed;
  j["sparsity"] = config.sparsity;
  j["magnitude_min"] = config.magnitude_min;
  j["signed_bias"] = config.signed_bias;
  j["correlated_dims"] = config.correlated_dims;
  j["base"] = nlohmann::ordered_json::parse(bias_sim::config_to_json(config.base));
  j["r_vectors"] = result.r_vectors;
  j["reject_labels"] = result.reject_labels;
  return j.dump(2) + "\n";
}

AnnotatorPoolConfig pool_config_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  AnnotatorPoolConfig c;
  c.k = j.at("k").get<size_t>();
  c.base = bias_sim::config_from_json(j.at("base").dump());
  c.sparsity = j.value("sparsity", 0.5);
  c.magnitude_min = j.value("magnitude_min", 0.0);
  c.signed_bias = j.value("signed_bias", true);
  if (j.contains("correlated_dims"))
    c.correlated_dims = j["correlated_dims"].get<std::vector<size_t>>();
  c.seed = j.value("seed", uint64_t{0});
  c.validate();
  return c;
}

std::vector<std::string> read_subset_ids(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_subset_ids: cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

}  // namespace complab::mitigation
