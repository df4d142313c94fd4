#include "complab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "complab/bias_sim.hpp"
#include "complab/corpus.hpp"
#include "complab/detector.hpp"
#include "complab/edit_engine.hpp"
#include "complab/manifest.hpp"
#include "complab/mitigation.hpp"
#include "complab/sensitivity.hpp"
#include "complab/stats.hpp"
#include "complab/svg_plot.hpp"

namespace complab::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunContext {
  manifest::RunManifest manifest;
  std::string manifest_out;  // empty = derive from first output
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void write_output(const std::string& path, const std::string& content) {
    svg_plot::write_file(path, content);
    manifest.outputs.push_back(path);
  }

  void finish() {
    manifest.duration_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    std::string path = manifest_out;
    if (path.empty()) {
      if (manifest.outputs.empty()) return;
      path = manifest.outputs.front() + ".manifest.json";
    }
    svg_plot::write_file(path, manifest::to_json(manifest));
  }
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<size_t> parse_dims(const std::string& s) {
  std::vector<size_t> out;
  for (const auto& tok : split_commas(s)) out.push_back(std::stoul(tok));
  return out;
}

// ---- shared corpus-loading options ----

struct CorpusOpts {
  std::string input;
  std::string format = "auto";  // jsonl | csv | bool | auto
  std::string fields = "text";
  std::string label_field = "label";
  std::string id_field;
  bool lowercase = false;
  bool no_strip_punct = false;
  std::string punctuation;

  void attach(CLI::App* cmd, bool with_tokenizer = true) {
    cmd->add_option("--input", input, "input corpus path")->required();
    cmd->add_option("--format", format, "jsonl|csv|bool (default: by extension)");
    cmd->add_option("--fields", fields, "comma-separated text fields");
    cmd->add_option("--label-field", label_field, "label field name");
    cmd->add_option("--id-field", id_field, "instance id field name");
    if (with_tokenizer) {
      cmd->add_flag("--lowercase", lowercase, "lowercase tokens");
      cmd->add_flag("--no-strip-punct", no_strip_punct,
                    "keep edge punctuation on tokens");
      cmd->add_option("--punctuation", punctuation,
                      "punctuation characters stripped from token edges");
    }
  }

  std::string resolved_format() const {
    if (format != "auto") return format;
    if (input.size() > 4 && input.substr(input.size() - 4) == ".csv")
      return "csv";
    return "jsonl";
  }

  corpus::SchemaConfig schema() const {
    corpus::SchemaConfig s;
    s.text_fields = split_commas(fields);
    s.label_field = label_field;
    s.id_field = id_field;
    return s;
  }

  corpus::TokenizerConfig tokenizer() const {
    corpus::TokenizerConfig t;
    t.lowercase = lowercase;
    t.punctuation_strip = !no_strip_punct;
    if (!punctuation.empty()) t.punctuation = punctuation;
    return t;
  }

  corpus::LabeledCorpus load(RunContext& ctx,
                             std::vector<corpus::LoadError>* errors = nullptr) const {
    ctx.manifest.inputs.push_back(input);
    const std::string fmt = resolved_format();
    if (fmt == "bool")
      return bias_sim::to_labeled_corpus(bias_sim::dataset_from_jsonl(input));
    auto report = corpus::load_corpus(
        input, fmt == "csv" ? corpus::Format::Csv : corpus::Format::Jsonl,
        schema());
    if (errors) *errors = report.errors;
    if (report.corpus.instances.empty())
      throw IoError("no usable instances in " + input);
    return report.corpus;
  }
};

std::string corpus_to_jsonl(const corpus::LabeledCorpus& corpus,
                            const std::vector<std::string>& field_names) {
  std::string out;
  for (const auto& inst : corpus.instances) {
    nlohmann::ordered_json j;
    j["id"] = inst.id;
    for (size_t i = 0; i < inst.fields.size(); ++i)
      j[i < field_names.size() ? field_names[i] : "field" + std::to_string(i)] =
          inst.fields[i];
    j["label"] = inst.label;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---- edit model / config parsing ----

edit_engine::EditModel edit_model_from_json(const nlohmann::json& j, size_t d) {
  edit_engine::EditModel m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "parametric")
    m.kind = edit_engine::EditKind::Parametric;
  else if (kind == "adversarial-pairwise")
    m.kind = edit_engine::EditKind::AdversarialPairwise;
  else if (kind == "adversarial-label-aware")
    m.kind = edit_engine::EditKind::AdversarialLabelAware;
  else
    throw std::invalid_argument("unknown edit model kind: " + kind);

  if (j.contains("label_mode")) {
    const std::string lm = j["label_mode"].get<std::string>();
    if (lm == "parametric")
      m.label_mode = edit_engine::LabelMode::ParametricFlip;
    else if (lm == "functional")
      m.label_mode = edit_engine::LabelMode::Functional;
    else
      throw std::invalid_argument("unknown label_mode: " + lm);
  } else if (m.kind == edit_engine::EditKind::AdversarialLabelAware) {
    m.label_mode = edit_engine::LabelMode::Functional;
  }

  m.s = j.value("s", 0.5);
  if (j.contains("e")) {
    if (j["e"].is_string() && j["e"] == "uniform")
      m.e.assign(d, 1.0 / static_cast<double>(d));
    else
      m.e = j["e"].get<std::vector<double>>();
  } else if (m.kind == edit_engine::EditKind::Parametric) {
    m.e.assign(d, 1.0 / static_cast<double>(d));
  }
  if (j.contains("pair")) {
    auto pair = j["pair"].get<std::vector<size_t>>();
    if (pair.size() != 2) throw std::invalid_argument("pair must have 2 dims");
    m.pair_i = pair[0];
    m.pair_j = pair[1];
  }
  m.target_dim = j.value("target_dim", size_t{0});
  if (j.contains("ground_truth"))
    m.ground_truth = sensitivity::BooleanFunction::from_json(j["ground_truth"].dump());
  m.validate(d);
  return m;
}

// ---- report JSON -> plot series ----

svg_plot::Series series_from_report_json(const std::string& path,
                                         const std::string& name,
                                         const std::string& color,
                                         double* threshold) {
  auto j = nlohmann::json::parse(slurp(path));
  svg_plot::Series s;
  s.name = name;
  s.color = color;
  if (threshold && j.contains("config") && j["config"].contains("z_threshold"))
    *threshold = j["config"]["z_threshold"].get<double>();
  for (const auto& row : j.at("features")) {
    detector::PlotPoint p;
    p.feature = row.at("feature").get<std::string>();
    p.n = row.at("n").get<uint64_t>();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : row.at("z"))
      if (z.is_number()) best = std::max(best, z.get<double>());
    p.z = best;
    s.points.push_back(std::move(p));
  }
  return s;
}

// ---- subcommands ----

struct GlobalOpts {
  std::optional<uint64_t> seed;
  unsigned threads = 0;
  std::string manifest_out;

  unsigned resolved_threads() const {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("COMPETENCY_LAB_THREADS"))
      return static_cast<unsigned>(std::max(1, std::atoi(env)));
    return 1;
  }
};

int cmd_analyze(const CorpusOpts& corpus_opts, double alpha,
                uint64_t num_tests, uint64_t min_count,
                const std::string& null_model, const std::string& out,
                const std::string& csv, const std::string& plot,
                bool plot_phat, RunContext& ctx) {
  std::vector<corpus::LoadError> errors;
  auto corpus = corpus_opts.load(ctx, &errors);
  for (const auto& e : errors)
    std::cerr << "warning: line " << e.line << ": " << e.message << "\n";

  stats::TestConfig test;
  test.alpha = alpha;
  test.num_tests = num_tests;  // 0 = vocabulary size
  test.min_count = min_count;
  const auto null_mode = null_model == "empirical"
                             ? detector::NullModel::Empirical
                             : detector::NullModel::Uniform;
  auto report =
      detector::analyze(corpus, corpus_opts.tokenizer(), test, null_mode);

  ctx.write_output(out, detector::to_json(report));
  if (!csv.empty()) ctx.write_output(csv, detector::to_csv(report));
  if (!plot.empty()) {
    svg_plot::PlotSpec spec;
    spec.threshold = report.threshold;
    spec.y_as_p_hat = plot_phat;
    spec.title = "feature z-statistics vs occurrence count";
    auto series = svg_plot::series_from_report(report, "features");
    ctx.write_output(plot, svg_plot::render_scatter({series}, spec));
  }

  std::cout << "vocabulary: " << report.vocabulary_size
            << "  threshold z: " << report.threshold << "\n";
  for (size_t c = 0; c < report.label_set.size(); ++c)
    std::cout << "significant[" << report.label_set[c]
              << "]: " << report.significant_per_class[c] << "\n";

  nlohmann::ordered_json cfg;
  cfg["alpha"] = alpha;
  cfg["num_tests"] = report.test.num_tests;
  cfg["min_count"] = min_count;
  cfg["null_model"] = null_model;
  ctx.manifest.resolved_config_json = cfg.dump();
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 bool verify, uint64_t replications, const GlobalOpts& global,
                 RunContext& ctx) {
  ctx.manifest.inputs.push_back(config_path);
  auto config = bias_sim::config_from_json(slurp(config_path));
  if (global.seed) config.seed = *global.seed;
  ctx.manifest.seed = config.seed;
  ctx.manifest.resolved_config_json = bias_sim::config_to_json(config);

  auto dataset = bias_sim::generate_dataset(config, global.resolved_threads());
  ctx.write_output(out, bias_sim::dataset_to_jsonl(dataset));
  ctx.write_output(out + ".config.json", bias_sim::config_to_json(config));

  if (verify) {
    auto rows = bias_sim::empirical_vs_theory(config, replications);
    std::printf("dim  mean_p_hat  theory_mean  var_p_hat     var_binomial  var_squared\n");
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      std::printf("%-4zu %-11.6f %-12.6f %-13.3e %-13.3e %-13.3e\n", i,
                  r.mean_p_hat, r.theory_mean, r.var_p_hat,
                  r.theory_var_binomial, r.theory_var_squared);
    }
  }
  return kExitOk;
}

int cmd_edit_sim(const std::string& config_path, const std::string& out,
                 bool measure, const std::string& report_path,
                 const std::string& csv_path, const std::string& pairs_path,
                 const CorpusOpts& corpus_opts, const std::string& positive_label,
                 const GlobalOpts& global, RunContext& ctx) {
  // real-text mode: measure stats over an original/edited paired corpus
  if (!pairs_path.empty()) {
    ctx.manifest.inputs.push_back(pairs_path);
    auto report = edit_engine::measure_text_edit_stats(
        pairs_path, corpus_opts.schema(), corpus_opts.tokenizer(),
        positive_label);
    std::cout << "pairs: " << report.pairs << "  s_hat: " << report.s_hat
              << "  mean (1+e)/s: " << report.mean_ratio_reliable
              << "  mean edited p_hat: " << report.mean_edited_p_hat_reliable
              << "\n";
    if (!report_path.empty())
      ctx.write_output(report_path, edit_engine::report_to_json(report));
    if (!csv_path.empty())
      ctx.write_output(csv_path, edit_engine::report_to_csv(report));
    return kExitOk;
  }

  ctx.manifest.inputs.push_back(config_path);
  auto j = nlohmann::json::parse(slurp(config_path));
  bias_sim::BooleanDataset source;
  if (j.contains("source_path")) {
    const auto path = j["source_path"].get<std::string>();
    ctx.manifest.inputs.push_back(path);
    source = bias_sim::dataset_from_jsonl(path);
  } else {
    auto source_config = bias_sim::config_from_json(j.at("source").dump());
    source = bias_sim::generate_dataset(source_config, global.resolved_threads());
  }
  auto model = edit_model_from_json(j.at("model"), source.config.d);
  const uint64_t m = j.at("edits").get<uint64_t>();
  uint64_t seed = j.value("seed", uint64_t{0});
  if (global.seed) seed = *global.seed;
  ctx.manifest.seed = seed;
  ctx.manifest.resolved_config_json = j.dump();

  if (j.contains("drift_grid")) {
    if (!model.ground_truth)
      throw std::invalid_argument("drift_grid requires a ground_truth function");
    auto grid = j["drift_grid"].get<std::vector<uint64_t>>();
    auto drift = edit_engine::adversarial_label_aware_drift(
        source, model.target_dim, grid, *model.ground_truth, seed);
    std::cout << "m,p_hat\n";
    for (const auto& pt : drift)
      std::cout << pt.m << "," << pt.p_hat << "\n";
    return kExitOk;
  }

  auto pairs = edit_engine::run_edit_procedure(source, model, m, seed);
  if (!out.empty())
    ctx.write_output(out, edit_engine::pairs_to_jsonl(pairs, source.config.d));
  if (measure || !report_path.empty() || !csv_path.empty()) {
    auto report = edit_engine::measure_edit_stats(pairs, source.config.d);
    std::cout << "pairs: " << report.pairs << "  s_hat: " << report.s_hat << "\n";
    if (!report_path.empty())
      ctx.write_output(report_path, edit_engine::report_to_json(report));
    if (!csv_path.empty())
      ctx.write_output(csv_path, edit_engine::report_to_csv(report));
  }
  return kExitOk;
}

int cmd_sensitivity(const std::string& function, size_t d,
                    const std::string& subset, const std::string& table_path,
                    const std::string& dataset_path,
                    const std::string& report_path, RunContext& ctx) {
  if (!dataset_path.empty()) {
    ctx.manifest.inputs.push_back(dataset_path);
    auto dataset = bias_sim::dataset_from_jsonl(dataset_path);
    auto bound = sensitivity::dataset_sensitivity_lower_bound(dataset);
    std::cout << "dataset sensitivity lower bound: " << bound.bound << "\n";
    if (!bound.conflicts.empty())
      std::cout << "label conflicts: " << bound.conflicts.size() << "\n";
    if (!report_path.empty()) {
      nlohmann::ordered_json j;
      j["bound"] = bound.bound;
      auto arr = nlohmann::ordered_json::array();
      for (const auto& w : bound.witnesses) {
        nlohmann::ordered_json wj;
        wj["x"] = w.x;
        wj["neighbor"] = w.neighbor;
        wj["dim"] = w.dim;
        arr.push_back(std::move(wj));
      }
      j["witnesses"] = arr;
      j["conflicts"] = bound.conflicts.size();
      ctx.write_output(report_path, j.dump(2) + "\n");
    }
    return kExitOk;
  }

  sensitivity::BooleanFunction f = [&] {
    if (!table_path.empty()) {
      ctx.manifest.inputs.push_back(table_path);
      return sensitivity::BooleanFunction::from_json(slurp(table_path));
    }
    std::vector<size_t> dims;
    if (!subset.empty()) dims = parse_dims(subset);
    if (function == "parity") return sensitivity::BooleanFunction::parity(d, dims);
    if (function == "conjunction")
      return sensitivity::BooleanFunction::conjunction(d, dims);
    if (function == "constant-0") return sensitivity::BooleanFunction::constant(d, 0);
    if (function == "constant-1") return sensitivity::BooleanFunction::constant(d, 1);
    throw std::invalid_argument("unknown function: " + function);
  }();

  auto gs = sensitivity::global_sensitivity(f);
  std::cout << "s(f)=" << gs.value << "\n";
  if (!report_path.empty())
    ctx.write_output(report_path, sensitivity::report_to_json(f, gs));
  return kExitOk;
}

int cmd_mitigate(const std::string& mode, const std::string& config_path,
                 const std::string& out, const std::string& provenance,
                 const CorpusOpts& corpus_opts, const std::string& subset_path,
                 uint64_t seed, const std::string& out_filtered,
                 const std::string& out_reference, bool analyze_after,
                 double alpha, const GlobalOpts& global, RunContext& ctx) {
  if (mode == "annotators") {
    ctx.manifest.inputs.push_back(config_path);
    auto config = mitigation::pool_config_from_json(slurp(config_path));
    if (global.seed) config.seed = *global.seed;
    ctx.manifest.seed = config.seed;
    auto result = mitigation::multi_annotator_corpus(config);
    ctx.write_output(out, bias_sim::dataset_to_jsonl(result.dataset));
    const std::string prov =
        provenance.empty() ? out + ".provenance.json" : provenance;
    ctx.write_output(prov, mitigation::pool_provenance_json(config, result));
    ctx.manifest.resolved_config_json =
        mitigation::pool_provenance_json(config, result);
    return kExitOk;
  }
  if (mode != "filter")
    throw std::invalid_argument("mitigate: mode must be annotators|filter");

  auto corpus = corpus_opts.load(ctx);
  mitigation::FilterSpec spec;
  ctx.manifest.inputs.push_back(subset_path);
  spec.subset_ids = mitigation::read_subset_ids(subset_path);
  spec.seed = seed;
  if (global.seed) spec.seed = *global.seed;
  ctx.manifest.seed = spec.seed;
  auto result = mitigation::balanced_downsample(corpus, spec);

  const auto field_names = corpus_opts.resolved_format() == "bool"
                               ? std::vector<std::string>{"text"}
                               : split_commas(corpus_opts.fields);
  ctx.write_output(out_filtered, corpus_to_jsonl(result.filtered, field_names));
  if (!out_reference.empty())
    ctx.write_output(out_reference,
                     corpus_to_jsonl(result.reference, field_names));

  if (analyze_after) {
    stats::TestConfig test;
    test.alpha = alpha;
    test.num_tests = 0;
    auto tok = corpus_opts.tokenizer();
    auto before = detector::analyze(result.reference, tok, test);
    auto after = detector::analyze(result.filtered, tok, test);
    auto cmp = mitigation::mitigation_comparison(before, after);
    std::cout << "significant (reference): " << cmp.total_significant_a
              << "  significant (filtered): " << cmp.total_significant_b << "\n";
  }
  return kExitOk;
}

int cmd_plot(const std::string& report_path, const std::string& report2_path,
             const std::string& out, double width, double height, bool phat,
             std::optional<double> threshold, const std::string& title,
             RunContext& ctx) {
  ctx.manifest.inputs.push_back(report_path);
  double thr = 0.0;
  std::vector<svg_plot::Series> series;
  series.push_back(
      series_from_report_json(report_path, "before", "#d62728", &thr));
  if (!report2_path.empty()) {
    ctx.manifest.inputs.push_back(report2_path);
    series.push_back(
        series_from_report_json(report2_path, "after", "#2ca02c", nullptr));
  }
  svg_plot::PlotSpec spec;
  spec.width = width;
  spec.height = height;
  spec.y_as_p_hat = phat;
  spec.threshold = threshold.value_or(thr);
  spec.title = title;
  ctx.write_output(out, svg_plot::render_scatter(series, spec));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"dataset artifact statistics and bias simulation toolkit"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "override config seeds");
  app.add_option("--threads", global.threads,
                 "worker threads (env COMPETENCY_LAB_THREADS)");
  app.add_option("--manifest-out", global.manifest_out, "run manifest path");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "artifact statistics for a corpus");
  CorpusOpts an_corpus;
  an_corpus.attach(analyze);
  double an_alpha = 0.01;
  uint64_t an_tests = 0, an_min_count = 20;
  std::string an_null = "uniform", an_out = "report.json", an_csv, an_plot;
  std::string an_correction = "bonferroni";
  bool an_phat = false;
  analyze->add_option("--alpha", an_alpha, "significance level");
  analyze->add_option("--correction", an_correction, "bonferroni (only option)");
  analyze->add_option("--num-tests", an_tests,
                      "Bonferroni family size (default: vocabulary size)");
  analyze->add_option("--min-count", an_min_count, "normal-approximation floor");
  analyze->add_option("--null", an_null, "uniform|empirical");
  analyze->add_option("--out", an_out, "report JSON path");
  analyze->add_option("--csv", an_csv, "report CSV path");
  analyze->add_option("--plot", an_plot, "scatter SVG path");
  analyze->add_flag("--plot-phat", an_phat, "plot p-hat axis instead of z");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "rejection-sampling corpus generator");
  std::string sim_config, sim_out = "corpus.jsonl";
  bool sim_verify = false;
  uint64_t sim_reps = 100;
  simulate->add_option("--config", sim_config, "bias config JSON")->required();
  simulate->add_option("--out", sim_out, "output corpus JSONL");
  simulate->add_flag("--verify", sim_verify, "print empirical-vs-theory table");
  simulate->add_option("--replications", sim_reps, "verify replications");

  // edit-sim
  auto* edit_sim = app.add_subcommand("edit-sim", "local edit procedures and stats");
  std::string es_config, es_out, es_report, es_csv, es_pairs, es_positive = "true";
  bool es_measure = false;
  CorpusOpts es_corpus;
  edit_sim->add_option("--config", es_config, "edit simulation config JSON");
  edit_sim->add_option("--out", es_out, "edit pairs JSONL output");
  edit_sim->add_flag("--measure", es_measure, "print and export edit stats");
  edit_sim->add_option("--report", es_report, "stats report JSON path");
  edit_sim->add_option("--csv", es_csv, "stats report CSV path");
  edit_sim->add_option("--pairs", es_pairs, "real-text paired JSONL input");
  edit_sim->add_option("--fields", es_corpus.fields, "paired-corpus text fields");
  edit_sim->add_option("--label-field", es_corpus.label_field, "label field");
  edit_sim->add_option("--positive-label", es_positive, "positive class label");
  edit_sim->add_flag("--lowercase", es_corpus.lowercase, "lowercase tokens");

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "boolean function sensitivity");
  std::string sn_function = "parity", sn_subset, sn_table, sn_dataset, sn_report;
  size_t sn_d = 4;
  sens->add_option("--function", sn_function,
                   "parity|conjunction|constant-0|constant-1");
  sens->add_option("--d", sn_d, "dimension");
  sens->add_option("--subset", sn_subset, "comma-separated dims");
  sens->add_option("--table", sn_table, "function JSON (truth table)");
  sens->add_option("--dataset", sn_dataset, "boolean corpus for the lower bound");
  sens->add_option("--report", sn_report, "report JSON path");

  // mitigate
  auto* mitigate = app.add_subcommand("mitigate", "annotator pooling / data filtering");
  std::string mt_mode = "annotators", mt_config, mt_out = "corpus.jsonl",
              mt_prov, mt_subset, mt_filtered = "filtered.jsonl", mt_reference;
  uint64_t mt_seed = 0;
  bool mt_analyze = false;
  double mt_alpha = 0.01;
  CorpusOpts mt_corpus;
  mitigate->add_option("--mode", mt_mode, "annotators|filter")->required();
  mitigate->add_option("--config", mt_config, "annotator pool config JSON");
  mitigate->add_option("--out", mt_out, "pooled corpus output");
  mitigate->add_option("--provenance", mt_prov, "provenance sidecar path");
  mitigate->add_option("--input", mt_corpus.input, "corpus to filter");
  mitigate->add_option("--format", mt_corpus.format, "jsonl|csv|bool");
  mitigate->add_option("--fields", mt_corpus.fields, "text fields");
  mitigate->add_option("--label-field", mt_corpus.label_field, "label field");
  mitigate->add_option("--id-field", mt_corpus.id_field, "id field");
  mitigate->add_option("--subset", mt_subset, "newline-delimited instance ids");
  mitigate->add_option("--filter-seed", mt_seed, "downsampling seed");
  mitigate->add_option("--out-filtered", mt_filtered, "filtered corpus output");
  mitigate->add_option("--out-reference", mt_reference, "reference corpus output");
  mitigate->add_flag("--analyze", mt_analyze, "run before/after artifact analysis");
  mitigate->add_option("--alpha", mt_alpha, "analysis significance level");

  // plot
  auto* plot = app.add_subcommand("plot", "scatter SVG from report JSON");
  std::string pl_report, pl_report2, pl_out = "plot.svg", pl_title;
  double pl_width = 800, pl_height = 600;
  bool pl_phat = false;
  std::optional<double> pl_threshold;
  plot->add_option("--report", pl_report, "report JSON")->required();
  plot->add_option("--report2", pl_report2, "overlay report JSON");
  plot->add_option("--out", pl_out, "SVG output path");
  plot->add_option("--width", pl_width, "width px");
  plot->add_option("--height", pl_height, "height px");
  plot->add_flag("--phat", pl_phat, "p-hat axis");
  plot->add_option("--threshold", pl_threshold, "z threshold override");
  plot->add_option("--title", pl_title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  RunContext ctx;
  ctx.manifest_out = global.manifest_out;
  for (int i = 1; i < argc; ++i) ctx.manifest.args.push_back(argv[i]);
  if (global.seed) ctx.manifest.seed = *global.seed;

  try {
    int rc = kExitInternal;
    if (*analyze) {
      ctx.manifest.subcommand = "analyze";
      rc = cmd_analyze(an_corpus, an_alpha, an_tests, an_min_count, an_null,
                       an_out, an_csv, an_plot, an_phat, ctx);
    } else if (*simulate) {
      ctx.manifest.subcommand = "simulate";
      rc = cmd_simulate(sim_config, sim_out, sim_verify, sim_reps, global, ctx);
    } else if (*edit_sim) {
      ctx.manifest.subcommand = "edit-sim";
      if (es_config.empty() && es_pairs.empty())
        throw std::invalid_argument("edit-sim: need --config or --pairs");
      rc = cmd_edit_sim(es_config, es_out, es_measure, es_report, es_csv,
                        es_pairs, es_corpus, es_positive, global, ctx);
    } else if (*sens) {
      ctx.manifest.subcommand = "sensitivity";
      rc = cmd_sensitivity(sn_function, sn_d, sn_subset, sn_table, sn_dataset,
                           sn_report, ctx);
    } else if (*mitigate) {
      ctx.manifest.subcommand = "mitigate";
      rc = cmd_mitigate(mt_mode, mt_config, mt_out, mt_prov, mt_corpus,
                        mt_subset, mt_seed, mt_filtered, mt_reference,
                        mt_analyze, mt_alpha, global, ctx);
    } else if (*plot) {
      ctx.manifest.subcommand = "plot";
      rc = cmd_plot(pl_report, pl_report2, pl_out, pl_width, pl_height,
                    pl_phat, pl_threshold, pl_title, ctx);
    }
    ctx.finish();
    return rc;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("competency-lab");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace complab::cli
