#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "complab/edit_engine.hpp"
#include "complab/sensitivity.hpp"

using namespace complab;
using namespace complab::sensitivity;

TEST_CASE("constant functions have zero sensitivity") {
  for (int v : {0, 1}) {
    auto f = BooleanFunction::constant(6, v);
    for (uint64_t x : {0ull, 17ull, 63ull}) {
      CHECK(f(x) == v);
      CHECK(local_sensitivity(f, x) == 0);
    }
    CHECK(global_sensitivity(f).value == 0);
  }
}

TEST_CASE("parity has full sensitivity everywhere") {
  auto f = BooleanFunction::parity(5);
  CHECK(f(0b00000) == 0);
  CHECK(f(0b10110) == 1);
  for (uint64_t x = 0; x < 32; ++x) {
    CHECK(local_sensitivity(f, x) == 5);
    CHECK(sensitivity_set(f, x).size() == 5);
  }
  CHECK(global_sensitivity(f).value == 5);

  auto g = BooleanFunction::parity(6, {1, 4});
  CHECK(g(0b010010) == 0);
  CHECK(g(0b000010) == 1);
  CHECK(global_sensitivity(g).value == 2);
  CHECK(local_sensitivity(g, 0b111111) == 2);
}

TEST_CASE("conjunction sensitivity equals the clause width") {
  auto f = BooleanFunction::conjunction(8, {0, 3, 5});
  const uint64_t all = 0b101001;  // bits 0, 3, 5
  CHECK(f(all) == 1);
  CHECK(f(all | 0b10) == 1);       // extra irrelevant bit
  CHECK(f(all & ~uint64_t{1}) == 0);
  // at the satisfying assignment every clause bit is pivotal
  CHECK(local_sensitivity(f, all) == 3);
  // one clause bit missing: only that bit is pivotal
  CHECK(local_sensitivity(f, 0b101000) == 1);
  CHECK(sensitivity_set(f, 0b101000) == std::vector<size_t>{0});
  // two clause bits missing: nothing is pivotal
  CHECK(local_sensitivity(f, 0b100000) == 0);
  CHECK(global_sensitivity(f).value == 3);
}

TEST_CASE("truth table functions, exhaustively") {
  // OR over 2 dims: 00 -> 0, else 1
  auto f = BooleanFunction::from_table(2, {0, 1, 1, 1});
  CHECK(local_sensitivity(f, 0b00) == 2);
  CHECK(local_sensitivity(f, 0b01) == 1);
  CHECK(local_sensitivity(f, 0b11) == 0);
  auto gs = global_sensitivity(f);
  CHECK(gs.value == 2);
  REQUIRE(gs.argmax.size() == 1);
  CHECK(gs.argmax[0] == 0);
  CHECK_THROWS_AS(BooleanFunction::from_table(2, {0, 1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_set(f, 4), std::invalid_argument);
}

TEST_CASE("generator closed forms agree with exhaustive table evaluation") {
  for (size_t d = 1; d <= 8; ++d) {
    std::vector<size_t> subset;
    for (size_t i = 0; i < d; i += 2) subset.push_back(i);
    for (auto make : {&BooleanFunction::parity, &BooleanFunction::conjunction}) {
      auto f = make(d, subset);
      std::vector<uint8_t> table(size_t{1} << d);
      for (uint64_t x = 0; x < table.size(); ++x)
        table[x] = static_cast<uint8_t>(f(x));
      auto g = BooleanFunction::from_table(d, table);
      CHECK(global_sensitivity(f).value == global_sensitivity(g).value);
      for (uint64_t x = 0; x < table.size(); ++x)
        CHECK(local_sensitivity(f, x) == local_sensitivity(g, x));
    }
  }
}

TEST_CASE("json round trips") {
  auto f = BooleanFunction::parity(7, {0, 2, 6});
  auto f2 = BooleanFunction::from_json(f.to_json());
  CHECK(f2.dim() == 7);
  CHECK(f2.generator() == Generator::Parity);
  for (uint64_t x = 0; x < 128; ++x) CHECK(f(x) == f2(x));

  auto t = BooleanFunction::from_table(3, {0, 1, 1, 0, 1, 0, 0, 1});
  auto t2 = BooleanFunction::from_json(t.to_json());
  CHECK(t2.dim() == 3);
  for (uint64_t x = 0; x < 8; ++x) CHECK(t(x) == t2(x));

  CHECK_THROWS_AS(BooleanFunction::from_json(R"({"d":2,"generator":"nope"})"),
                  std::invalid_argument);
}

TEST_CASE("report json carries the headline value") {
  auto f = BooleanFunction::parity(4);
  auto gs = global_sensitivity(f);
  auto j = nlohmann::json::parse(report_to_json(f, gs));
  CHECK(j["global_sensitivity"] == 4);
  CHECK(j["function"]["d"] == 4);
}

TEST_CASE("dataset lower bound: sparse data underspecifies sensitivity") {
  bias_sim::BooleanDataset ds;
  ds.config.d = 10;
  ds.config.f.assign(10, 0.5);
  ds.config.r.assign(10, 0.0);
  // no two instances are Hamming neighbors
  ds.instances.push_back({0b0000000000, 0});
  ds.instances.push_back({0b0000000011, 1});
  ds.instances.push_back({0b1111000000, 1});
  auto b = dataset_sensitivity_lower_bound(ds);
  CHECK(b.bound == 0);
  CHECK(b.witnesses.empty());
  CHECK(b.conflicts.empty());
}

TEST_CASE("dataset lower bound counts differing-label neighbors") {
  bias_sim::BooleanDataset ds;
  ds.config.d = 4;
  ds.config.f.assign(4, 0.5);
  ds.config.r.assign(4, 0.0);
  // 0000/0 has neighbors 0001/1 and 0100/1 (bound 2) plus 1000/0 (same label)
  ds.instances.push_back({0b0000, 0});
  ds.instances.push_back({0b0001, 1});
  ds.instances.push_back({0b0100, 1});
  ds.instances.push_back({0b1000, 0});
  auto b = dataset_sensitivity_lower_bound(ds);
  CHECK(b.bound == 2);
  bool saw = false;
  for (const auto& w : b.witnesses)
    saw |= (w.x == 0b0000 && w.neighbor == 0b0001 && w.dim == 0);
  CHECK(saw);
}

TEST_CASE("dataset lower bound on the full parity cube is d") {
  const size_t d = 5;
  auto f = BooleanFunction::parity(d);
  bias_sim::BooleanDataset ds;
  ds.config.d = d;
  ds.config.f.assign(d, 0.5);
  ds.config.r.assign(d, 0.0);
  for (uint64_t x = 0; x < (1u << d); ++x)
    ds.instances.push_back({x, static_cast<uint8_t>(f(x))});
  auto b = dataset_sensitivity_lower_bound(ds);
  CHECK(b.bound == d);
}

TEST_CASE("conflicting duplicates are reported") {
  bias_sim::BooleanDataset ds;
  ds.config.d = 3;
  ds.config.f.assign(3, 0.5);
  ds.config.r.assign(3, 0.0);
  ds.instances.push_back({0b101, 0});
  ds.instances.push_back({0b101, 1});
  auto b = dataset_sensitivity_lower_bound(ds);
  REQUIRE(b.conflicts.size() == 1);
  CHECK(b.conflicts[0].x == 0b101);
}

TEST_CASE("a label-flipping edit pair witnesses sensitivity >= 1") {
  bias_sim::BiasConfig cfg;
  cfg.d = 8;
  cfg.f.assign(8, 0.5);
  cfg.r.assign(8, 0.0);
  cfg.label_model = bias_sim::LabelModel::Parity;
  cfg.parity_dims = {0, 1, 2, 3, 4, 5, 6, 7};
  cfg.n = 50;
  cfg.seed = 3;
  auto src = bias_sim::generate_dataset(cfg);

  edit_engine::EditModel model;
  model.kind = edit_engine::EditKind::Parametric;
  model.label_mode = edit_engine::LabelMode::Functional;
  model.e.assign(8, 0.125);
  model.ground_truth = BooleanFunction::parity(8);
  auto pairs = edit_engine::run_edit_procedure(src, model, 20, 5);

  bias_sim::BooleanDataset augmented = src;
  bool any_flip = false;
  for (const auto& p : pairs) {
    augmented.instances.push_back(p.edited);
    any_flip |= p.edited.y != p.original.y;
  }
  REQUIRE(any_flip);  // parity flips the label on every single-dim edit
  auto b = dataset_sensitivity_lower_bound(augmented);
  CHECK(b.bound >= 1);
}
