#include "complab/edit_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace complab::edit_engine {

void EditModel::validate(size_t d) const {
  switch (kind) {
    case EditKind::Parametric: {
      if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("EditModel: s must be in [0,1]");
      if (e.size() != d)
        throw std::invalid_argument("EditModel: |e| must equal d");
      double sum = 0.0;
      for (double ei : e) {
        if (ei < 0.0) throw std::invalid_argument("EditModel: e_i must be >= 0");
        sum += ei;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("EditModel: e must sum to 1");
      break;
    }
    case EditKind::AdversarialPairwise:
      if (pair_i >= d || pair_j >= d || pair_i == pair_j)
        throw std::invalid_argument("EditModel: bad pairwise target dims");
      break;
    case EditKind::AdversarialLabelAware:
      if (target_dim >= d)
        throw std::invalid_argument("EditModel: target dim out of range");
      if (label_mode != LabelMode::Functional)
        throw std::invalid_argument(
            "EditModel: label-aware procedure requires functional labels");
      break;
  }
  if (label_mode == LabelMode::Functional) {
    if (!ground_truth)
      throw std::invalid_argument("EditModel: functional mode needs ground truth");
    if (ground_truth->dim() != d)
      throw std::invalid_argument("EditModel: ground truth dimension mismatch");
  }
}

double expected_edited_conditional(double r, double s, double e) {
  if (!(r > 0.0 && r <= 1.0))
    throw std::domain_error(
        "expected_edited_conditional: r must be in (0,1] (at r=0 the value "
        "is identically 0.5)");
  if (!(s >= 0.0 && s <= 1.0) || !(e >= 0.0 && e <= 1.0))
    throw std::domain_error("expected_edited_conditional: s, e must be in [0,1]");
  return (2.0 - (2.0 * s - e) * r) / (2.0 * (2.0 - r));
}

namespace {

size_t pick_dim(const std::vector<double>& e, Rng& rng) {
  double u = rng.next_double();
  for (size_t i = 0; i < e.size(); ++i) {
    u -= e[i];
    if (u < 0.0) return i;
  }
  return e.size() - 1;  // guard against rounding
}

uint8_t edited_label(const EditModel& model, const bias_sim::BooleanInstance& orig,
                     uint64_t x_new, Rng& rng) {
  if (model.label_mode == LabelMode::Functional)
    return static_cast<uint8_t>((*model.ground_truth)(x_new));
  return rng.bernoulli(model.s) ? orig.y ^ 1 : orig.y;
}

EditPair make_edit(const bias_sim::BooleanDataset& source,
                   const EditModel& model, Rng& rng) {
  const auto& orig = source.instances[rng.next_below(source.instances.size())];
  uint64_t flip = 0;
  switch (model.kind) {
    case EditKind::Parametric:
      flip = uint64_t{1} << pick_dim(model.e, rng);
      break;
    case EditKind::AdversarialPairwise: {
      // flips x_j only when !x_i && x_j; otherwise flips x_i
      const bool xi = orig.bit(model.pair_i), xj = orig.bit(model.pair_j);
      flip = uint64_t{1} << (!xi && xj ? model.pair_j : model.pair_i);
      break;
    }
    case EditKind::AdversarialLabelAware: {
      const size_t j = model.target_dim;
      const bool xj = orig.bit(j);
      const uint64_t jbit = uint64_t{1} << j;
      const bool flips_label =
          (*model.ground_truth)(orig.x) != (*model.ground_truth)(orig.x ^ jbit);
      if (((!xj && !orig.y) || (xj && orig.y)) && flips_label) {
        flip = jbit;
      } else {
        // flip some other dimension uniformly at random
        size_t k = static_cast<size_t>(rng.next_below(source.config.d - 1));
        if (k >= j) ++k;
        flip = uint64_t{1} << k;
      }
      break;
    }
  }
  EditPair pair;
  pair.original = orig;
  pair.flipped_mask = flip;
  pair.edited.x = orig.x ^ flip;
  pair.edited.y = edited_label(model, orig, pair.edited.x, rng);
  return pair;
}

}  // namespace

std::vector<EditPair> run_edit_procedure(const bias_sim::BooleanDataset& source,
                                         const EditModel& model, uint64_t m,
                                         uint64_t seed) {
  if (source.instances.empty())
    throw std::invalid_argument("run_edit_procedure: empty source");
  model.validate(source.config.d);
  std::vector<EditPair> pairs;
  pairs.reserve(m);
  for (uint64_t idx = 0; idx < m; ++idx) {
    Rng rng = Rng::stream(seed, idx);
    pairs.push_back(make_edit(source, model, rng));
  }
  return pairs;
}

EditStatsReport measure_edit_stats(const std::vector<EditPair>& pairs, size_t d,
                                   uint64_t min_count) {
  if (pairs.empty())
    throw std::invalid_argument("measure_edit_stats: no pairs");
  EditStatsReport report;
  report.pairs = pairs.size();
  report.dims.resize(d);

  uint64_t label_flips = 0;
  std::vector<uint64_t> ones(d, 0);
  for (const auto& p : pairs) {
    if (p.edited.y != p.original.y) ++label_flips;
    for (size_t i = 0; i < d; ++i) {
      if (p.flipped_mask >> i & 1) ++report.dims[i].flip_count;
      if (p.edited.bit(i)) {
        ++report.dims[i].n_occ;
        ones[i] += p.edited.y;
      }
    }
  }
  report.s_hat =
      static_cast<double>(label_flips) / static_cast<double>(pairs.size());
  for (size_t i = 0; i < d; ++i) {
    auto& ds = report.dims[i];
    ds.e_hat = static_cast<double>(ds.flip_count) /
               static_cast<double>(pairs.size());
    ds.ratio = report.s_hat > 0.0
                   ? (1.0 + ds.e_hat) / report.s_hat
                   : std::numeric_limits<double>::quiet_NaN();
    ds.edited_p_hat = ds.n_occ > 0 ? static_cast<double>(ones[i]) /
                                         static_cast<double>(ds.n_occ)
                                   : 0.0;
    ds.low_confidence = report.s_hat == 0.0 || ds.flip_count < min_count;
  }
  return report;
}

std::vector<DriftPoint> adversarial_label_aware_drift(
    const bias_sim::BooleanDataset& source, size_t target_dim,
    const std::vector<uint64_t>& m_grid,
    const sensitivity::BooleanFunction& ground_truth, uint64_t seed) {
  EditModel model;
  model.kind = EditKind::AdversarialLabelAware;
  model.label_mode = LabelMode::Functional;
  model.target_dim = target_dim;
  model.ground_truth = ground_truth;
  model.validate(source.config.d);

  // rules 1-2 are dead if flipping x_j never flips the label
  bool any_live = false;
  for (const auto& inst : source.instances) {
    const uint64_t jbit = uint64_t{1} << target_dim;
    if (ground_truth(inst.x) != ground_truth(inst.x ^ jbit)) {
      any_live = true;
      break;
    }
  }
  if (!any_live && !source.instances.empty())
    throw std::invalid_argument(
        "adversarial_label_aware_drift: flipping the target dimension never "
        "flips the label");

  uint64_t src_occ = 0, src_ones = 0;
  for (const auto& inst : source.instances) {
    if (!inst.bit(target_dim)) continue;
    ++src_occ;
    src_ones += inst.y;
  }

  std::vector<DriftPoint> out;
  for (uint64_t m : m_grid) {
    uint64_t occ = src_occ, one = src_ones;
    if (m > 0) {
      auto pairs = run_edit_procedure(source, model, m, seed);
      for (const auto& p : pairs) {
        if (!p.edited.bit(target_dim)) continue;
        ++occ;
        one += p.edited.y;
      }
    }
    DriftPoint pt;
    pt.m = m;
    pt.p_hat = occ > 0 ? static_cast<double>(one) / static_cast<double>(occ)
                       : std::numeric_limits<double>::quiet_NaN();
    out.push_back(pt);
  }
  return out;
}

TextEditStatsReport measure_text_edit_stats(const std::string& path,
                                            const corpus::SchemaConfig& schema,
                                            const corpus::TokenizerConfig& tok,
                                            const std::string& positive_label,
                                            uint64_t min_count) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("measure_text_edit_stats: cannot open " + path);

  struct Acc {
    uint64_t flip_count = 0;
    uint64_t n_occ = 0;   // edited-side occurrences
    uint64_t ones = 0;    // of those, label == positive
  };
  std::map<std::string, Acc> acc;
  uint64_t pairs = 0, label_flips = 0;

  auto read_side = [&](const nlohmann::json& obj, corpus::Instance& inst) {
    for (const auto& f : schema.text_fields) {
      if (!obj.contains(f)) throw std::runtime_error("missing field: " + f);
      inst.fields.push_back(obj[f].get<std::string>());
    }
    const auto& lv = obj.at(schema.label_field);
    if (lv.is_string())
      inst.label = lv.get<std::string>();
    else if (lv.is_boolean())
      inst.label = lv.get<bool>() ? "true" : "false";
    else
      inst.label = std::to_string(lv.get<int64_t>());
  };

  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.contains("orig") || !obj.contains("edit"))
      throw std::runtime_error("measure_text_edit_stats: malformed line " +
                               std::to_string(line_no));
    corpus::Instance orig, edit;
    read_side(obj["orig"], orig);
    read_side(obj["edit"], edit);
    ++pairs;
    if (orig.label != edit.label) ++label_flips;

    std::map<std::string, int64_t> delta;
    std::map<std::string, uint64_t> edited_counts;
    for (const auto& t : corpus::extract_features(orig, tok)) --delta[t];
    for (const auto& t : corpus::extract_features(edit, tok)) {
      ++delta[t];
      ++edited_counts[t];
    }
    for (const auto& [t, dcount] : delta)
      if (dcount != 0) ++acc[t].flip_count;
    const bool positive = edit.label == positive_label;
    for (const auto& [t, c] : edited_counts) {
      acc[t].n_occ += c;
      if (positive) acc[t].ones += c;
    }
  }
  if (pairs == 0)
    throw std::runtime_error("measure_text_edit_stats: no pairs in " + path);

  TextEditStatsReport report;
  report.pairs = pairs;
  report.positive_label = positive_label;
  report.s_hat = static_cast<double>(label_flips) / static_cast<double>(pairs);
  double ratio_sum = 0.0, p_hat_sum = 0.0;
  uint64_t reliable = 0;
  for (const auto& [t, a] : acc) {
    TokenEditStats ts;
    ts.token = t;
    ts.flip_count = a.flip_count;
    ts.n_occ = a.n_occ;
    ts.e_hat = static_cast<double>(a.flip_count) / static_cast<double>(pairs);
    ts.ratio = report.s_hat > 0.0
                   ? (1.0 + ts.e_hat) / report.s_hat
                   : std::numeric_limits<double>::quiet_NaN();
    ts.edited_p_hat = a.n_occ > 0 ? static_cast<double>(a.ones) /
                                        static_cast<double>(a.n_occ)
                                  : 0.0;
    ts.low_confidence = report.s_hat == 0.0 || a.flip_count < min_count;
    if (!ts.low_confidence && a.n_occ >= min_count) {
      ratio_sum += ts.ratio;
      p_hat_sum += ts.edited_p_hat;
      ++reliable;
    }
    report.tokens.push_back(std::move(ts));
  }
  if (reliable > 0) {
    report.mean_ratio_reliable = ratio_sum / static_cast<double>(reliable);
    report.mean_edited_p_hat_reliable = p_hat_sum / static_cast<double>(reliable);
  }
  return report;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

nlohmann::ordered_json num_or_undef(double v) {
  if (std::isnan(v)) return "undefined";
  return nlohmann::ordered_json::parse(fmt6(v));
}

}  // namespace

std::string report_to_json(const EditStatsReport& report) {
  nlohmann::ordered_json j;
  j["pairs"] = report.pairs;
  j["s_hat"] = num_or_undef(report.s_hat);
  auto rows = nlohmann::ordered_json::array();
  for (size_t i = 0; i < report.dims.size(); ++i) {
    const auto& d = report.dims[i];
    nlohmann::ordered_json row;
    row["dimension"] = i;
    row["e_hat"] = num_or_undef(d.e_hat);
    row["ratio"] = num_or_undef(d.ratio);
    row["edited_p_hat"] = num_or_undef(d.edited_p_hat);
    row["n_occ"] = d.n_occ;
    row["flip_count"] = d.flip_count;
    row["low_confidence"] = d.low_confidence;
    rows.push_back(std::move(row));
  }
  j["dims"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const EditStatsReport& report) {
  std::string out = "dimension,e_hat,ratio,edited_p_hat,n_occ\n";
  for (size_t i = 0; i < report.dims.size(); ++i) {
    const auto& d = report.dims[i];
    out += std::to_string(i);
    out += ',';
    out += fmt6(d.e_hat);
    out += ',';
    out += std::isnan(d.ratio) ? "undefined" : fmt6(d.ratio);
    out += ',';
    out += fmt6(d.edited_p_hat);
    out += ',';
    out += std::to_string(d.n_occ);
    out += '\n';
  }
  return out;
}

std::string report_to_json(const TextEditStatsReport& report) {
  nlohmann::ordered_json j;
  j["pairs"] = report.pairs;
  j["s_hat"] = num_or_undef(report.s_hat);
  j["positive_label"] = report.positive_label;
  j["mean_ratio_reliable"] = num_or_undef(report.mean_ratio_reliable);
  j["mean_edited_p_hat_reliable"] =
      num_or_undef(report.mean_edited_p_hat_reliable);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& t : report.tokens) {
    nlohmann::ordered_json row;
    row["token"] = t.token;
    row["e_hat"] = num_or_undef(t.e_hat);
    row["ratio"] = num_or_undef(t.ratio);
    row["edited_p_hat"] = num_or_undef(t.edited_p_hat);
    row["n_occ"] = t.n_occ;
    row["flip_count"] = t.flip_count;
    row["low_confidence"] = t.low_confidence;
    rows.push_back(std::move(row));
  }
  j["tokens"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const TextEditStatsReport& report) {
  std::string out = "dimension,e_hat,ratio,edited_p_hat,n_occ\n";
  for (const auto& t : report.tokens) {
    out += t.token;
    out += ',';
    out += fmt6(t.e_hat);
    out += ',';
    out += std::isnan(t.ratio) ? "undefined" : fmt6(t.ratio);
    out += ',';
    out += fmt6(t.edited_p_hat);
    out += ',';
    out += std::to_string(t.n_occ);
    out += '\n';
  }
  return out;
}

std::string pairs_to_jsonl(const std::vector<EditPair>& pairs, size_t d) {
  std::string out;
  auto bits = [&](uint64_t x) {
    std::string s(d, '0');
    for (size_t i = 0; i < d; ++i)
      if (x >> i & 1) s[i] = '1';
    return s;
  };
  for (const auto& p : pairs) {
    out += "{\"orig\":{\"x\":\"" + bits(p.original.x) +
           "\",\"y\":" + std::to_string(p.original.y) +
           "},\"edit\":{\"x\":\"" + bits(p.edited.x) +
           "\",\"y\":" + std::to_string(p.edited.y) + "}}\n";
  }
  return out;
}

}  // namespace complab::edit_engine
