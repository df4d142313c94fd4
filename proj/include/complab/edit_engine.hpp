#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "complab/bias_sim.hpp"
#include "complab/corpus.hpp"
#include "complab/sensitivity.hpp"

namespace complab::edit_engine {

enum class EditKind { Parametric, AdversarialPairwise, AdversarialLabelAware };
enum class LabelMode { ParametricFlip, Functional };

struct EditModel {
  EditKind kind = EditKind::Parametric;
  LabelMode label_mode = LabelMode::ParametricFlip;
  // parametric: one dimension flipped per edit, chosen from e; label flipped
  // with probability s
  double s = 0.5;
  std::vector<double> e;
  // adversarial-pairwise targets
  size_t pair_i = 0, pair_j = 1;
  // adversarial-label-aware target
  size_t target_dim = 0;
  // functional label mode: y' = ground_truth(x')
  std::optional<sensitivity::BooleanFunction> ground_truth;

  void validate(size_t d) const;
};

struct EditPair {
  bias_sim::BooleanInstance original;
  bias_sim::BooleanInstance edited;
  uint64_t flipped_mask = 0;
};

struct DimEditStats {
  double e_hat = 0.0;          // fraction of pairs flipping this dimension
  double ratio = 0.0;          // (1 + e_hat) / s_hat; NaN when undefined
  double edited_p_hat = 0.0;   // p_hat(y'=1 | x'_i=1) over edited instances
  uint64_t n_occ = 0;          // edited occurrences of x'_i = 1
  uint64_t flip_count = 0;
  bool low_confidence = false; // s_hat == 0 or flip_count < min_count
};

struct EditStatsReport {
  double s_hat = 0.0;  // fraction of pairs with y' != y
  uint64_t pairs = 0;
  std::vector<DimEditStats> dims;
};

// Closed form for the edited conditional: (2 - (2s - e) r) / (2 (2 - r)).
// Throws std::domain_error at r = 0 (the unbiased case is identically 0.5).
double expected_edited_conditional(double r, double s, double e);

std::vector<EditPair> run_edit_procedure(const bias_sim::BooleanDataset& source,
                                         const EditModel& model, uint64_t m,
                                         uint64_t seed);

EditStatsReport measure_edit_stats(const std::vector<EditPair>& pairs, size_t d,
                                   uint64_t min_count = 20);

struct DriftPoint {
  uint64_t m = 0;
  double p_hat = 0.0;  // p_hat(y=1 | x_j=1) over source + edited combined
};

// Runs the label-aware adversarial procedure at each m in the grid and
// reports how the combined conditional drifts as edits accumulate.
std::vector<DriftPoint> adversarial_label_aware_drift(
    const bias_sim::BooleanDataset& source, size_t target_dim,
    const std::vector<uint64_t>& m_grid,
    const sensitivity::BooleanFunction& ground_truth, uint64_t seed);

// --- real-text paired corpora (original/edited instance pairs) ---

struct TokenEditStats {
  std::string token;
  double e_hat = 0.0;
  double ratio = 0.0;
  double edited_p_hat = 0.0;
  uint64_t n_occ = 0;
  uint64_t flip_count = 0;
  bool low_confidence = false;
};

struct TextEditStatsReport {
  double s_hat = 0.0;
  uint64_t pairs = 0;
  std::string positive_label;
  std::vector<TokenEditStats> tokens;  // sorted by token
  double mean_ratio_reliable = 0.0;    // over tokens with flip_count >= min_count
  double mean_edited_p_hat_reliable = 0.0;
};

// Paired JSONL: {"orig": {<text fields>, "label": ...},
//                "edit": {<text fields>, "label": ...}}.
// Flipped "dimensions" are the symmetric difference of token multisets.
TextEditStatsReport measure_text_edit_stats(
    const std::string& path, const corpus::SchemaConfig& schema,
    const corpus::TokenizerConfig& tok, const std::string& positive_label,
    uint64_t min_count = 20);

std::string report_to_json(const EditStatsReport& report);
std::string report_to_csv(const EditStatsReport& report);
std::string report_to_json(const TextEditStatsReport& report);
std::string report_to_csv(const TextEditStatsReport& report);
std::string pairs_to_jsonl(const std::vector<EditPair>& pairs, size_t d);

}  // namespace complab::edit_engine
