#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "complab/bias_sim.hpp"

namespace complab::sensitivity {

enum class Generator { Table, Constant0, Constant1, Parity, Conjunction };

// f : {0,1}^d -> {0,1}, as an explicit truth table (d <= 24) or a named
// generator over a dimension subset.
class BooleanFunction {
 public:
  static constexpr size_t kMaxTableDim = 24;

  static BooleanFunction from_table(size_t d, std::vector<uint8_t> table);
  static BooleanFunction constant(size_t d, int value);
  static BooleanFunction parity(size_t d, std::vector<size_t> subset = {});
  static BooleanFunction conjunction(size_t d, std::vector<size_t> subset = {});

  int operator()(uint64_t x) const;
  size_t dim() const { return d_; }
  Generator generator() const { return gen_; }
  const std::vector<size_t>& subset() const { return subset_; }

  // {"d": int, "table": hex bitstring} or {"d": int, "generator": name,
  // "subset": [dims]}
  static BooleanFunction from_json(const std::string& text);
  std::string to_json() const;

 private:
  BooleanFunction() = default;
  size_t d_ = 0;
  Generator gen_ = Generator::Table;
  std::vector<size_t> subset_;
  uint64_t subset_mask_ = 0;
  std::vector<uint8_t> table_;  // one byte per input, 2^d entries
};

// {i : f(x) != f(x with bit i flipped)}
std::vector<size_t> sensitivity_set(const BooleanFunction& f, uint64_t x);

size_t local_sensitivity(const BooleanFunction& f, uint64_t x);

struct GlobalSensitivity {
  size_t value = 0;
  std::vector<uint64_t> argmax;  // inputs achieving the maximum (capped)
};

// Exhaustive for tables; closed form for named generators (cross-checked by
// tests against exhaustive evaluation).
GlobalSensitivity global_sensitivity(const BooleanFunction& f,
                                     size_t max_argmax = 16);

struct WitnessPair {
  uint64_t x = 0;
  uint64_t neighbor = 0;
  size_t dim = 0;
};

struct Conflict {
  uint64_t x = 0;
};

struct DatasetBound {
  size_t bound = 0;
  std::vector<WitnessPair> witnesses;  // pairs achieving the bound
  std::vector<Conflict> conflicts;     // identical x, conflicting y
};

// Max over observed inputs of the number of observed Hamming-1 partners with
// a differing label.  Hash join on x, O(n * d) expected.
DatasetBound dataset_sensitivity_lower_bound(
    const bias_sim::BooleanDataset& dataset);

std::string report_to_json(const BooleanFunction& f,
                           const GlobalSensitivity& gs);

}  // namespace complab::sensitivity
