#include "complab/bias_sim.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace complab::bias_sim {

void BiasConfig::validate() const {
  if (d < 1 || d > 64) throw std::invalid_argument("BiasConfig: d must be in [1,64]");
  if (f.size() != d || r.size() != d)
    throw std::invalid_argument("BiasConfig: |f| and |r| must equal d");
  if (!reject_label.empty() && reject_label.size() != d)
    throw std::invalid_argument("BiasConfig: |reject_label| must equal d");
  for (double fi : f)
    if (!(fi > 0.0 && fi < 1.0))
      throw std::invalid_argument("BiasConfig: each f_i must be in (0,1)");
  for (double ri : r)
    if (!(ri >= 0.0 && ri <= 1.0))
      throw std::invalid_argument("BiasConfig: each r_i must be in [0,1]");
  for (int l : reject_label)
    if (l != 0 && l != 1)
      throw std::invalid_argument("BiasConfig: reject_label values must be 0 or 1");
  if (label_model == LabelModel::Parity) {
    if (parity_dims.empty())
      throw std::invalid_argument("BiasConfig: parity model needs parity_dims");
    for (size_t i : parity_dims) {
      if (i >= d) throw std::invalid_argument("BiasConfig: parity dim out of range");
      if (f[i] != 0.5)
        throw std::invalid_argument(
            "BiasConfig: parity dims require f = 0.5 (competency null)");
    }
  }
  if (resample_cap < 1)
    throw std::invalid_argument("BiasConfig: resample_cap must be >= 1");
}

TheoreticalStats theoretical_stats(const BiasConfig& config) {
  config.validate();
  TheoreticalStats s;
  s.joint.resize(config.d);
  s.marginal.resize(config.d);
  s.conditional.resize(config.d);
  for (size_t i = 0; i < config.d; ++i) {
    const double fi = config.f[i], ri = config.r[i];
    const double joint_favored = fi / (2.0 - fi * ri);
    const double marginal = (2.0 * fi - fi * ri) / (2.0 - fi * ri);
    const double cond_favored = 1.0 / (2.0 - ri);
    const bool flip = !config.reject_label.empty() && config.reject_label[i] == 1;
    s.marginal[i] = marginal;
    s.conditional[i] = flip ? 1.0 - cond_favored : cond_favored;
    s.joint[i] = flip ? marginal - joint_favored : joint_favored;
  }
  return s;
}

double variance_binomial(double r, double n_occ) {
  const double p = 1.0 / (2.0 - r);
  return p * (1.0 - p) / n_occ;
}

double variance_squared(double r, double n_occ) {
  const double v = (1.0 - r) / ((2.0 - r) * (2.0 - r));
  return v * v / n_occ;
}

BooleanInstance sample_unbiased(const BiasConfig& config, Rng& rng) {
  BooleanInstance inst;
  for (size_t i = 0; i < config.d; ++i)
    if (rng.bernoulli(config.f[i])) inst.x |= uint64_t{1} << i;
  if (config.label_model == LabelModel::FairCoin) {
    inst.y = rng.bernoulli(0.5) ? 1 : 0;
  } else {
    uint8_t y = 0;
    for (size_t i : config.parity_dims) y ^= static_cast<uint8_t>(inst.bit(i));
    inst.y = y;
  }
  return inst;
}

BooleanInstance sample_biased(const BiasConfig& config, Rng& rng) {
  for (uint64_t attempt = 0; attempt < config.resample_cap; ++attempt) {
    BooleanInstance inst = sample_unbiased(config, rng);
    bool rejected = false;
    for (size_t i = 0; i < config.d && !rejected; ++i) {
      if (config.r[i] == 0.0 || !inst.bit(i)) continue;
      const int trigger =
          config.reject_label.empty() ? 0 : config.reject_label[i];
      if (inst.y == trigger && rng.bernoulli(config.r[i])) rejected = true;
    }
    if (!rejected) return inst;
  }
  throw std::runtime_error("sample_biased: resample cap exceeded");
}

BooleanDataset generate_dataset(const BiasConfig& config, unsigned threads) {
  config.validate();
  BooleanDataset ds;
  ds.config = config;
  ds.instances.resize(config.n);
  auto fill = [&](uint64_t begin, uint64_t end) {
    for (uint64_t idx = begin; idx < end; ++idx) {
      Rng rng = Rng::stream(config.seed, idx);
      ds.instances[idx] = sample_biased(config, rng);
    }
  };
  if (threads <= 1 || config.n < 4096) {
    fill(0, config.n);
    return ds;
  }
  std::vector<std::thread> pool;
  const uint64_t chunk = (config.n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const uint64_t begin = t * chunk;
    if (begin >= config.n) break;
    pool.emplace_back(fill, begin, std::min(config.n, begin + chunk));
  }
  for (auto& th : pool) th.join();
  return ds;
}

corpus::LabeledCorpus to_labeled_corpus(const BooleanDataset& dataset) {
  corpus::LabeledCorpus lc;
  lc.instances.reserve(dataset.instances.size());
  std::vector<std::string> tokens(dataset.config.d);
  for (size_t i = 0; i < dataset.config.d; ++i)
    tokens[i] = "x" + std::to_string(i);
  size_t idx = 0;
  for (const auto& inst : dataset.instances) {
    corpus::Instance ci;
    ci.id = std::to_string(idx++);
    std::string text;
    for (size_t i = 0; i < dataset.config.d; ++i) {
      if (!inst.bit(i)) continue;
      if (!text.empty()) text += ' ';
      text += tokens[i];
    }
    ci.fields.push_back(std::move(text));
    ci.label = inst.y ? "1" : "0";
    lc.instances.push_back(std::move(ci));
  }
  lc.finalize();
  // keep both classes declared even if one never occurred
  if (lc.label_set.size() < 2) {
    lc.label_set = {"0", "1"};
    lc.label_counts.insert({"0", 0});
    lc.label_counts.insert({"1", 0});
  }
  return lc;
}

corpus::LabeledCorpus generate_corpus(const BiasConfig& config) {
  return to_labeled_corpus(generate_dataset(config));
}

std::vector<DimComparison> empirical_vs_theory(const BiasConfig& config,
                                               uint64_t replications) {
  config.validate();
  if (replications < 2)
    throw std::invalid_argument("empirical_vs_theory: replications must be >= 2");
  const auto theory = theoretical_stats(config);
  const size_t d = config.d;

  std::vector<double> sum_p(d, 0.0), sum_p2(d, 0.0), sum_inv_n(d, 0.0),
      sum_n(d, 0.0);
  std::vector<uint64_t> valid(d, 0);
  for (uint64_t rep = 0; rep < replications; ++rep) {
    BiasConfig c = config;
    uint64_t s = config.seed ^ (rep + 1) * 0xd1342543de82ef95ULL;
    c.seed = splitmix64(s);
    auto ds = generate_dataset(c);
    for (size_t i = 0; i < d; ++i) {
      uint64_t n_occ = 0, ones = 0;
      for (const auto& inst : ds.instances) {
        if (!inst.bit(i)) continue;
        ++n_occ;
        ones += inst.y;
      }
      if (n_occ == 0) continue;
      const double p_hat =
          static_cast<double>(ones) / static_cast<double>(n_occ);
      sum_p[i] += p_hat;
      sum_p2[i] += p_hat * p_hat;
      sum_inv_n[i] += 1.0 / static_cast<double>(n_occ);
      sum_n[i] += static_cast<double>(n_occ);
      ++valid[i];
    }
  }

  std::vector<DimComparison> out(d);
  for (size_t i = 0; i < d; ++i) {
    auto& o = out[i];
    if (valid[i] < 2) continue;
    const double k = static_cast<double>(valid[i]);
    o.mean_p_hat = sum_p[i] / k;
    o.var_p_hat = (sum_p2[i] - k * o.mean_p_hat * o.mean_p_hat) / (k - 1.0);
    o.mean_n_occ = sum_n[i] / k;
    o.theory_mean = theory.conditional[i];
    const double mean_inv = sum_inv_n[i] / k;
    o.theory_var_binomial = variance_binomial(config.r[i], 1.0 / mean_inv);
    o.theory_var_squared = variance_squared(config.r[i], 1.0 / mean_inv);
  }
  return out;
}

std::string dataset_to_jsonl(const BooleanDataset& dataset) {
  std::string out;
  for (const auto& inst : dataset.instances) {
    out += "{\"x\":\"";
    for (size_t i = 0; i < dataset.config.d; ++i)
      out += inst.bit(i) ? '1' : '0';
    out += "\",\"y\":";
    out += inst.y ? '1' : '0';
    out += "}\n";
  }
  return out;
}

BooleanDataset dataset_from_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset_from_jsonl: cannot open " + path);
  BooleanDataset ds;
  std::string line;
  size_t line_no = 0;
  size_t d = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.contains("x") || !obj.contains("y"))
      throw std::runtime_error("dataset_from_jsonl: malformed line " +
                               std::to_string(line_no));
    const std::string bits = obj["x"].get<std::string>();
    if (d == 0) d = bits.size();
    if (bits.size() != d || d == 0 || d > 64)
      throw std::runtime_error("dataset_from_jsonl: bad dimension at line " +
                               std::to_string(line_no));
    BooleanInstance inst;
    for (size_t i = 0; i < d; ++i) {
      if (bits[i] == '1')
        inst.x |= uint64_t{1} << i;
      else if (bits[i] != '0')
        throw std::runtime_error("dataset_from_jsonl: bad bit at line " +
                                 std::to_string(line_no));
    }
    inst.y = obj["y"].get<int>() ? 1 : 0;
    ds.instances.push_back(inst);
  }
  ds.config.d = d;
  ds.config.f.assign(d, 0.5);
  ds.config.r.assign(d, 0.0);
  ds.config.n = ds.instances.size();
  return ds;
}

std::string config_to_json(const BiasConfig& config) {
  nlohmann::ordered_json j;
  j["d"] = config.d;
  j["f"] = config.f;
  j["r"] = config.r;
  if (!config.reject_label.empty()) j["reject_label"] = config.reject_label;
  j["label_model"] =
      config.label_model == LabelModel::FairCoin ? "fair_coin" : "parity";
  if (!config.parity_dims.empty()) j["parity_dims"] = config.parity_dims;
  j["n"] = config.n;
  j["seed"] = config.seed;
  j["resample_cap"] = config.resample_cap;
  return j.dump(2) + "\n";
}

BiasConfig config_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  BiasConfig c;
  c.d = j.at("d").get<size_t>();
  if (j.contains("f")) {
    if (j["f"].is_number())
      c.f.assign(c.d, j["f"].get<double>());
    else
      c.f = j["f"].get<std::vector<double>>();
  } else {
    c.f.assign(c.d, 0.5);
  }
  if (j.contains("r")) {
    if (j["r"].is_number())
      c.r.assign(c.d, j["r"].get<double>());
    else
      c.r = j["r"].get<std::vector<double>>();
  } else {
    c.r.assign(c.d, 0.0);
  }
  if (j.contains("reject_label"))
    c.reject_label = j["reject_label"].get<std::vector<int>>();
  if (j.contains("label_model")) {
    const auto m = j["label_model"].get<std::string>();
    if (m == "fair_coin")
      c.label_model = LabelModel::FairCoin;
    else if (m == "parity")
      c.label_model = LabelModel::Parity;
    else
      throw std::invalid_argument("unknown label_model: " + m);
  }
  if (j.contains("parity_dims"))
    c.parity_dims = j["parity_dims"].get<std::vector<size_t>>();
  c.n = j.at("n").get<uint64_t>();
  c.seed = j.value("seed", uint64_t{0});
  c.resample_cap = j.value("resample_cap", uint64_t{1000000});
  c.validate();
  return c;
}

}  // namespace complab::bias_sim
