#include "complab/sensitivity.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace complab::sensitivity {

namespace {

uint64_t mask_of(size_t d, const std::vector<size_t>& subset) {
  uint64_t m = 0;
  for (size_t i : subset) {
    if (i >= d) throw std::invalid_argument("BooleanFunction: subset dim out of range");
    m |= uint64_t{1} << i;
  }
  return m;
}

std::vector<size_t> full_subset(size_t d) {
  std::vector<size_t> s(d);
  for (size_t i = 0; i < d; ++i) s[i] = i;
  return s;
}

}  // namespace

BooleanFunction BooleanFunction::from_table(size_t d,
                                            std::vector<uint8_t> table) {
  if (d == 0 || d > kMaxTableDim)
    throw std::invalid_argument("BooleanFunction: table dimension must be in [1,24]");
  if (table.size() != (size_t{1} << d))
    throw std::invalid_argument("BooleanFunction: table length must be 2^d");
  BooleanFunction f;
  f.d_ = d;
  f.gen_ = Generator::Table;
  f.table_ = std::move(table);
  for (auto& b : f.table_) b = b ? 1 : 0;
  return f;
}

BooleanFunction BooleanFunction::constant(size_t d, int value) {
  if (d == 0 || d > 64) throw std::invalid_argument("BooleanFunction: bad dimension");
  BooleanFunction f;
  f.d_ = d;
  f.gen_ = value ? Generator::Constant1 : Generator::Constant0;
  return f;
}

BooleanFunction BooleanFunction::parity(size_t d, std::vector<size_t> subset) {
  if (d == 0 || d > 64) throw std::invalid_argument("BooleanFunction: bad dimension");
  if (subset.empty()) subset = full_subset(d);
  BooleanFunction f;
  f.d_ = d;
  f.gen_ = Generator::Parity;
  f.subset_mask_ = mask_of(d, subset);
  f.subset_ = std::move(subset);
  return f;
}

BooleanFunction BooleanFunction::conjunction(size_t d,
                                             std::vector<size_t> subset) {
  if (d == 0 || d > 64) throw std::invalid_argument("BooleanFunction: bad dimension");
  if (subset.empty()) subset = full_subset(d);
  BooleanFunction f;
  f.d_ = d;
  f.gen_ = Generator::Conjunction;
  f.subset_mask_ = mask_of(d, subset);
  f.subset_ = std::move(subset);
  return f;
}

int BooleanFunction::operator()(uint64_t x) const {
  switch (gen_) {
    case Generator::Table:
      return table_[x];
    case Generator::Constant0:
      return 0;
    case Generator::Constant1:
      return 1;
    case Generator::Parity:
      return std::popcount(x & subset_mask_) & 1;
    case Generator::Conjunction:
      return (x & subset_mask_) == subset_mask_ ? 1 : 0;
  }
  return 0;
}

BooleanFunction BooleanFunction::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  const size_t d = j.at("d").get<size_t>();
  if (j.contains("table")) {
    const std::string hex = j["table"].get<std::string>();
    const size_t bits = size_t{1} << d;
    if (hex.size() * 4 < bits)
      throw std::invalid_argument("BooleanFunction: hex table too short");
    std::vector<uint8_t> table(bits);
    for (size_t i = 0; i < bits; ++i) {
      const char c = hex[i / 4];
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else throw std::invalid_argument("BooleanFunction: bad hex digit");
      table[i] = (v >> (i % 4)) & 1;
    }
    return from_table(d, std::move(table));
  }
  const std::string name = j.at("generator").get<std::string>();
  std::vector<size_t> subset;
  if (j.contains("subset")) subset = j["subset"].get<std::vector<size_t>>();
  if (name == "constant-0") return constant(d, 0);
  if (name == "constant-1") return constant(d, 1);
  if (name == "parity") return parity(d, subset);
  if (name == "conjunction") return conjunction(d, subset);
  throw std::invalid_argument("BooleanFunction: unknown generator " + name);
}

std::string BooleanFunction::to_json() const {
  nlohmann::ordered_json j;
  j["d"] = d_;
  switch (gen_) {
    case Generator::Table: {
      std::string hex((table_.size() + 3) / 4, '0');
      for (size_t i = 0; i < table_.size(); ++i)
        if (table_[i]) {
          char& c = hex[i / 4];
          int v = c <= '9' ? c - '0' : c - 'a' + 10;
          v |= 1 << (i % 4);
          c = v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10);
        }
      j["table"] = hex;
      break;
    }
    case Generator::Constant0:
      j["generator"] = "constant-0";
      break;
    case Generator::Constant1:
      j["generator"] = "constant-1";
      break;
    case Generator::Parity:
      j["generator"] = "parity";
      j["subset"] = subset_;
      break;
    case Generator::Conjunction:
      j["generator"] = "conjunction";
      j["subset"] = subset_;
      break;
  }
  return j.dump();
}

std::vector<size_t> sensitivity_set(const BooleanFunction& f, uint64_t x) {
  if (f.dim() < 64 && (x >> f.dim()) != 0)
    throw std::invalid_argument("sensitivity_set: input exceeds dimension");
  std::vector<size_t> set;
  const int fx = f(x);
  for (size_t i = 0; i < f.dim(); ++i)
    if (f(x ^ (uint64_t{1} << i)) != fx) set.push_back(i);
  return set;
}

size_t local_sensitivity(const BooleanFunction& f, uint64_t x) {
  return sensitivity_set(f, x).size();
}

GlobalSensitivity global_sensitivity(const BooleanFunction& f,
                                     size_t max_argmax) {
  GlobalSensitivity gs;
  switch (f.generator()) {
    case Generator::Constant0:
    case Generator::Constant1:
      gs.value = 0;
      gs.argmax = {0};
      return gs;
    case Generator::Parity:
      gs.value = f.subset().size();
      gs.argmax = {0};
      return gs;
    case Generator::Conjunction: {
      gs.value = f.subset().size();
      uint64_t all_ones = 0;
      for (size_t i : f.subset()) all_ones |= uint64_t{1} << i;
      gs.argmax = {all_ones};
      return gs;
    }
    case Generator::Table:
      break;
  }
  const uint64_t space = uint64_t{1} << f.dim();
  for (uint64_t x = 0; x < space; ++x) {
    const size_t s = local_sensitivity(f, x);
    if (s > gs.value) {
      gs.value = s;
      gs.argmax.clear();
    }
    if (s == gs.value && gs.argmax.size() < max_argmax) gs.argmax.push_back(x);
  }
  return gs;
}

DatasetBound dataset_sensitivity_lower_bound(
    const bias_sim::BooleanDataset& dataset) {
  DatasetBound out;
  const size_t d = dataset.config.d;

  // unique inputs; value 0/1 = consistent label, 2 = conflict
  std::unordered_map<uint64_t, uint8_t> seen;
  for (const auto& inst : dataset.instances) {
    auto [it, inserted] = seen.emplace(inst.x, inst.y);
    if (!inserted && it->second != 2 && it->second != inst.y) {
      it->second = 2;
      out.conflicts.push_back({inst.x});
    }
  }

  for (const auto& [x, y] : seen) {
    if (y == 2) continue;
    size_t count = 0;
    std::vector<WitnessPair> local;
    for (size_t i = 0; i < d; ++i) {
      const uint64_t nb = x ^ (uint64_t{1} << i);
      auto it = seen.find(nb);
      if (it == seen.end() || it->second == 2) continue;
      if (it->second != y) {
        ++count;
        local.push_back({x, nb, i});
      }
    }
    if (count > out.bound) {
      out.bound = count;
      out.witnesses = std::move(local);
    }
  }
  return out;
}

std::string report_to_json(const BooleanFunction& f,
                           const GlobalSensitivity& gs) {
  nlohmann::ordered_json j;
  j["function"] = nlohmann::ordered_json::parse(f.to_json());
  j["global_sensitivity"] = gs.value;
  auto arr = nlohmann::ordered_json::array();
  for (uint64_t x : gs.argmax) arr.push_back(x);
  j["argmax_inputs"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace complab::sensitivity
