#include "sclba/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sclba/error.hpp"
#include "sclba/rng.hpp"

namespace sclba {

namespace {

using namespace seed_stream;

constexpr std::array<double, 4> kDefaultRates = {0.01, 0.03, 0.05, 0.07};
constexpr std::array<std::size_t, 3> kDefaultTriggerSizes = {1, 2, 3};

}  // namespace

double compute_asr(const Model& model, std::span<const EncodedGraph> attack_set,
                   GraphLabel target_label) {
  if (attack_set.empty()) throw DataError("ASR: attack set is empty");
  std::size_t hits = 0;
  for (const EncodedGraph& g : attack_set) {
    if (predict(model, g) == target_label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(attack_set.size());
}

double compute_cad(double acc_clean, double acc_backdoor) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(acc_clean) || !in_unit(acc_backdoor)) {
    throw ConfigError("CAD: accuracies must lie in [0, 1]");
  }
  return acc_clean - acc_backdoor;
}

std::string_view to_string(AttackKind kind) {
  return kind == AttackKind::kSclba ? "sclba" : "er-baseline";
}

// ---------------------------------------------------------------------------

namespace {

Spread spread_of(const std::vector<SeedResult>& rows, double (*get)(const SeedResult&)) {
  Spread s;
  if (rows.empty()) return s;
  s.min = s.max = get(rows.front());
  double total = 0.0;
  for (const SeedResult& r : rows) {
    const double v = get(r);
    total += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = total / static_cast<double>(rows.size());
  return s;
}

}  // namespace

Spread MetricsRow::acc_clean() const {
  return spread_of(per_seed, [](const SeedResult& r) { return r.acc_clean; });
}
Spread MetricsRow::acc_backdoor() const {
  return spread_of(per_seed, [](const SeedResult& r) { return r.acc_backdoor; });
}
Spread MetricsRow::asr() const {
  return spread_of(per_seed, [](const SeedResult& r) { return r.asr; });
}
Spread MetricsRow::clean_asr() const {
  return spread_of(per_seed, [](const SeedResult& r) { return r.clean_asr; });
}
Spread MetricsRow::cad() const {
  Spread s = spread_of(per_seed, [](const SeedResult& r) { return r.cad(); });
  s.mean = acc_clean().mean - acc_backdoor().mean;
  return s;
}

GraphLabel default_target_label(const std::string& dataset_name) {
  static const std::map<std::string, GraphLabel> kTargets = {
      {"AIDS", 0}, {"NCI1", 0}, {"Mutagenicity", 1}, {"BZR_MD", 0},
      {"TWITTER-Real-Graph-Partial", 1}, {"TWITTER", 1},
  };
  auto it = kTargets.find(dataset_name);
  return it == kTargets.end() ? 0 : it->second;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (models.empty()) throw ConfigError("at least one model is required");
  for (double p : poisoning_rates) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("poisoning rates must lie in (0, 100) percent");
  }
  for (std::size_t t : trigger_sizes) {
    if (t == 0) throw ConfigError("trigger sizes must be at least 1");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  if (hidden_channels == 0) throw ConfigError("hidden channels must be positive");
  if (er_nodes < 2) throw ConfigError("ER trigger needs at least 2 nodes");
  if (!(er_edge_prob >= 0.0 && er_edge_prob <= 1.0)) {
    throw ConfigError("ER edge probability must lie in [0, 1]");
  }
  train.validate();
}

void apply_json_config(ExperimentConfig& config, const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const std::array<const char*, 16> kKnown = {
      "dataset", "target_label", "p", "t", "seeds", "models", "baseline", "out", "train_fraction",
      "hidden", "epochs", "learning_rate", "weight_decay", "batch_size", "er_nodes",
      "er_edge_prob"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(kKnown.begin(), kKnown.end(), [&](const char* k) { return key == k; }) ==
        kKnown.end()) {
      throw ConfigError("config: unknown field '" + key + "'");
    }
  }

  try {
    if (j.contains("dataset")) config.dataset_path = j.at("dataset").get<std::string>();
    if (j.contains("target_label")) config.target_label = j.at("target_label").get<GraphLabel>();
    if (j.contains("p")) {
      config.poisoning_rates.clear();
      for (double pct : j.at("p").get<std::vector<double>>()) config.poisoning_rates.push_back(pct / 100.0);
    }
    if (j.contains("t")) config.trigger_sizes = j.at("t").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("models")) {
      config.models.clear();
      for (const auto& m : j.at("models").get<std::vector<std::string>>()) {
        config.models.push_back(parse_architecture(m));
      }
    }
    if (j.contains("baseline")) config.baseline = j.at("baseline").get<bool>();
    if (j.contains("out")) config.output_dir = j.at("out").get<std::string>();
    if (j.contains("train_fraction")) config.train_fraction = j.at("train_fraction").get<double>();
    if (j.contains("hidden")) config.hidden_channels = j.at("hidden").get<std::size_t>();
    if (j.contains("epochs")) config.train.max_epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("learning_rate")) config.train.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("weight_decay")) config.train.weight_decay = j.at("weight_decay").get<double>();
    if (j.contains("batch_size")) config.train.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("er_nodes")) config.er_nodes = j.at("er_nodes").get<std::size_t>();
    if (j.contains("er_edge_prob")) config.er_edge_prob = j.at("er_edge_prob").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  config.validate();
}

// ---------------------------------------------------------------------------

ExperimentRunner::ExperimentRunner(const Dataset& dataset, ExperimentConfig config,
                                   Progress progress)
    : dataset_(dataset),
      config_(std::move(config)),
      target_label_(config_.target_label.value_or(default_target_label(dataset.name))),
      progress_(std::move(progress)) {
  config_.validate();
  if (target_label_ >= dataset_.num_graph_labels()) {
    throw ConfigError("target label " + std::to_string(target_label_) + " is not a label of " +
                      dataset_.name);
  }
}

void ExperimentRunner::log(const std::string& message) const {
  if (progress_) progress_(message);
}

DataSplit ExperimentRunner::split_for_seed(std::uint64_t seed) const {
  return split_dataset(dataset_, config_.train_fraction, derive_seed(seed, {kSplitStream}));
}

const ExperimentRunner::CleanContext& ExperimentRunner::clean_context(Architecture arch,
                                                                      std::uint64_t seed) {
  const auto key = std::make_pair(arch, seed);
  if (auto it = clean_cache_.find(key); it != clean_cache_.end()) return it->second;

  const std::size_t vocab = dataset_.node_class_vocab_size();
  CleanContext ctx;
  ctx.split = split_for_seed(seed);
  if (ctx.split.test_indices.empty()) throw DataError("test split is empty");
  for (std::size_t i : ctx.split.train_indices) ctx.train.push_back(encode_graph(dataset_.graphs[i], vocab, arch));
  for (std::size_t i : ctx.split.test_indices) ctx.test.push_back(encode_graph(dataset_.graphs[i], vocab, arch));
  ctx.init = Model::create(arch, vocab, dataset_.num_graph_labels(),
                           derive_seed(seed, {kInitStream}), config_.hidden_channels);
  ctx.train_config = config_.train;
  ctx.train_config.seed = derive_seed(seed, {kTrainStream});

  log("training clean " + std::string(to_string(arch)) + " model, seed " + std::to_string(seed));
  std::vector<std::size_t> all(ctx.train.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  ctx.clean = train(ctx.init, ctx.train, all, ctx.train_config).model;
  return clean_cache_.emplace(key, std::move(ctx)).first->second;
}

SeedResult ExperimentRunner::run_seed(Architecture arch, AttackKind attack, double p,
                                      std::size_t t, std::uint64_t seed, std::size_t* skipped) {
  const CleanContext& ctx = clean_context(arch, seed);
  const std::size_t vocab = dataset_.node_class_vocab_size();

  std::vector<Graph> poisoned_train;
  AttackSet attack_set;
  if (attack == AttackKind::kSclba) {
    const TriggerReport report = select_semantic_trigger(dataset_, ctx.split, target_label_);
    AttackConfig ac;
    ac.target_label = target_label_;
    ac.poisoning_rate = p;
    ac.trigger_size = t;
    ac.trigger_class = report.trigger_class;
    ac.seed = derive_seed(seed, {kPoisonStream});
    poisoned_train = generate_poisoned_trainset(dataset_, ctx.split, ac).graphs;
    attack_set = build_attack_testset(dataset_, ctx.split, report.trigger_class, t, target_label_,
                                      derive_seed(seed, {kAttackStream}));
  } else {
    const ErPattern pattern = er_baseline_trigger(config_.er_nodes, config_.er_edge_prob,
                                                  derive_seed(seed, {kPatternStream}));
    auto poisoned = generate_er_poisoned_trainset(dataset_, ctx.split, pattern, target_label_, p,
                                                  derive_seed(seed, {kPoisonStream}));
    poisoned_train = std::move(poisoned.graphs);
    attack_set = build_er_attack_testset(dataset_, ctx.split, pattern, target_label_,
                                         derive_seed(seed, {kAttackStream}));
    if (skipped) *skipped += poisoned.skipped + attack_set.skipped;
  }

  const auto train_set = encode_graphs(poisoned_train, vocab, arch);
  const auto attack_encoded = encode_graphs(attack_set.graphs, vocab, arch);
  log("training backdoored " + std::string(to_string(arch)) + " model (" +
      std::string(to_string(attack)) + ", p=" + format_double(p) + ", t=" + std::to_string(t) +
      ", seed " + std::to_string(seed) + ")");
  std::vector<std::size_t> all(train_set.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Model backdoored = train(ctx.init, train_set, all, ctx.train_config).model;

  SeedResult r;
  r.dataset = dataset_.name;
  r.model = std::string(to_string(arch));
  r.p = p;
  r.t = t;
  r.seed = seed;
  r.acc_clean = accuracy(ctx.clean, ctx.test);
  r.acc_backdoor = accuracy(backdoored, ctx.test);
  r.asr = compute_asr(backdoored, attack_encoded, target_label_);
  r.clean_asr = compute_asr(ctx.clean, attack_encoded, target_label_);
  return r;
}

MetricsRow ExperimentRunner::run_cell(Architecture arch, AttackKind attack, double p, std::size_t t) {
  MetricsRow row;
  row.dataset = dataset_.name;
  row.model = std::string(to_string(arch));
  row.attack = attack;
  row.p = p;
  row.t = t;
  for (std::uint64_t seed : config_.seeds) {
    try {
      row.per_seed.push_back(run_seed(arch, attack, p, t, seed, &row.skipped_graphs));
    } catch (const Error& e) {
      const std::string context = "cell " + dataset_.name + "/" + row.model + "/" +
                                  std::string(to_string(attack)) + " p=" + format_double(p) +
                                  " t=" + std::to_string(t) + " seed=" + std::to_string(seed) +
                                  ": " + e.what();
      switch (e.kind()) {
        case ErrorKind::kUsage: throw ConfigError(context);
        case ErrorKind::kData: throw DataError(context);
        case ErrorKind::kNumerical: throw NumericalError(context);
      }
      throw;
    }
  }
  if (row.skipped_graphs > 0) {
    log(std::to_string(row.skipped_graphs) + " graphs smaller than the ER pattern were left unpoisoned");
  }
  return row;
}

std::vector<std::string> monotonicity_warnings(std::span<const MetricsRow> rows) {
  std::vector<const MetricsRow*> ordered;
  for (const MetricsRow& r : rows) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const MetricsRow* a, const MetricsRow* b) { return a->p < b->p; });
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const double prev = ordered[i - 1]->asr().mean;
    const double cur = ordered[i]->asr().mean;
    if (cur < prev) {
      warnings.push_back("ASR decreases from " + format_double(prev) + " at p=" +
                         format_double(ordered[i - 1]->p) + " to " + format_double(cur) +
                         " at p=" + format_double(ordered[i]->p));
    }
  }
  return warnings;
}

SweepTable sweep_poisoning_rates(ExperimentRunner& runner, Architecture arch) {
  const auto& cfg = runner.config();
  std::vector<double> rates = cfg.poisoning_rates;
  if (rates.empty()) rates.assign(kDefaultRates.begin(), kDefaultRates.end());
  const std::size_t t = cfg.trigger_sizes.empty() ? 1 : cfg.trigger_sizes.front();
  SweepTable table;
  for (double p : rates) table.rows.push_back(runner.run_cell(arch, AttackKind::kSclba, p, t));
  table.warnings = monotonicity_warnings(table.rows);
  return table;
}

SweepTable sweep_trigger_sizes(ExperimentRunner& runner, Architecture arch) {
  const auto& cfg = runner.config();
  std::vector<std::size_t> sizes = cfg.trigger_sizes;
  if (sizes.empty()) sizes.assign(kDefaultTriggerSizes.begin(), kDefaultTriggerSizes.end());
  const double p = cfg.poisoning_rates.empty() ? 0.03 : cfg.poisoning_rates.front();
  SweepTable table;
  for (std::size_t t : sizes) table.rows.push_back(runner.run_cell(arch, AttackKind::kSclba, p, t));
  return table;
}

BaselineComparison run_baseline_comparison(ExperimentRunner& runner) {
  const auto& cfg = runner.config();
  const double p = cfg.poisoning_rates.empty() ? 0.03 : cfg.poisoning_rates.front();
  const std::size_t t = cfg.trigger_sizes.empty() ? 3 : cfg.trigger_sizes.front();
  const Architecture arch = cfg.models.front();
  BaselineComparison out;
  out.sclba = runner.run_cell(arch, AttackKind::kSclba, p, t);
  out.baseline = runner.run_cell(arch, AttackKind::kErBaseline, p, cfg.er_nodes);
  return out;
}

MetricsRow run_transferability(ExperimentRunner& runner) {
  const auto& cfg = runner.config();
  const double p = cfg.poisoning_rates.empty() ? 0.03 : cfg.poisoning_rates.front();
  const std::size_t t = cfg.trigger_sizes.empty() ? 3 : cfg.trigger_sizes.front();
  return runner.run_cell(Architecture::kSage, AttackKind::kSclba, p, t);
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

namespace {

void check_csv_field(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw DataError("CSV field '" + s + "' contains a separator");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_number) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("CSV line " + std::to_string(line_number) + ": bad number '" + text + "'");
  }
  return value;
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

std::string pct_spread(const Spread& s) {
  return pct(s.mean) + " [" + pct(s.min) + ", " + pct(s.max) + "]";
}

}  // namespace

void write_per_seed_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << kPerSeedHeader << '\n';
  for (const MetricsRow& row : rows) {
    for (const SeedResult& r : row.per_seed) {
      check_csv_field(r.dataset);
      check_csv_field(r.model);
      out << r.dataset << ',' << r.model << ',' << format_double(r.p) << ',' << r.t << ','
          << r.seed << ',' << format_double(r.acc_clean) << ',' << format_double(r.acc_backdoor)
          << ',' << format_double(r.asr) << ',' << format_double(r.cad()) << '\n';
    }
  }
}

std::vector<SeedResult> read_per_seed_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kPerSeedHeader) {
    throw DataError("per-seed CSV: missing header '" + std::string(kPerSeedHeader) + "'");
  }
  std::vector<SeedResult> out;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) {
      throw DataError("per-seed CSV line " + std::to_string(line_number) + ": expected 9 fields");
    }
    SeedResult r;
    r.dataset = f[0];
    r.model = f[1];
    r.p = parse_number<double>(f[2], line_number);
    r.t = parse_number<std::size_t>(f[3], line_number);
    r.seed = parse_number<std::uint64_t>(f[4], line_number);
    r.acc_clean = parse_number<double>(f[5], line_number);
    r.acc_backdoor = parse_number<double>(f[6], line_number);
    r.asr = parse_number<double>(f[7], line_number);
    const double cad = parse_number<double>(f[8], line_number);
    if (cad != r.cad()) {
      throw DataError("per-seed CSV line " + std::to_string(line_number) +
                      ": cad does not equal acc_clean - acc_backdoor");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MetricsRow> group_seed_results(std::span<const SeedResult> results, AttackKind attack) {
  std::vector<MetricsRow> rows;
  for (const SeedResult& r : results) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricsRow& m) {
      return m.dataset == r.dataset && m.model == r.model && m.p == r.p && m.t == r.t;
    });
    if (it == rows.end()) {
      MetricsRow m;
      m.dataset = r.dataset;
      m.model = r.model;
      m.attack = attack;
      m.p = r.p;
      m.t = r.t;
      rows.push_back(std::move(m));
      it = rows.end() - 1;
    }
    it->per_seed.push_back(r);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "dataset,model,attack,p,t,seeds";
  for (const char* metric : {"acc_clean", "acc_backdoor", "asr", "cad", "clean_asr"}) {
    out << ',' << metric << "_mean," << metric << "_min," << metric << "_max";
  }
  out << '\n';
  for (const MetricsRow& row : rows) {
    check_csv_field(row.dataset);
    check_csv_field(row.model);
    out << row.dataset << ',' << row.model << ',' << to_string(row.attack) << ','
        << format_double(row.p) << ',' << row.t << ',' << row.seed_count();
    for (const Spread& s : {row.acc_clean(), row.acc_backdoor(), row.asr(), row.cad(), row.clean_asr()}) {
      out << ',' << format_double(s.mean) << ',' << format_double(s.min) << ','
          << format_double(s.max);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Markdown

void write_poisoning_rate_markdown(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "| Dataset | Model | ACC_c (%) | p (%) | ACC_b (%) | ASR (%) | CAD (%) |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const MetricsRow& r : rows) {
    out << "| " << r.dataset << " | " << r.model << " | " << pct_spread(r.acc_clean()) << " | "
        << pct(r.p) << " | " << pct_spread(r.acc_backdoor()) << " | " << pct_spread(r.asr())
        << " | " << pct_spread(r.cad()) << " |\n";
  }
}

void write_trigger_size_markdown(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "| Dataset | Model | ACC_c (%) | t | ACC_b (%) | ASR (%) | CAD (%) |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const MetricsRow& r : rows) {
    out << "| " << r.dataset << " | " << r.model << " | " << pct_spread(r.acc_clean()) << " | "
        << r.t << " | " << pct_spread(r.acc_backdoor()) << " | " << pct_spread(r.asr())
        << " | " << pct_spread(r.cad()) << " |\n";
  }
}

void write_baseline_markdown(std::ostream& out, std::span<const BaselineComparison> rows) {
  out << "| Dataset | ASR SCLBA (%) | ASR baseline (%) | CAD SCLBA (%) | CAD baseline (%) |\n";
  out << "|---|---|---|---|---|\n";
  for (const BaselineComparison& r : rows) {
    out << "| " << r.sclba.dataset << " | " << pct_spread(r.sclba.asr()) << " | "
        << pct_spread(r.baseline.asr()) << " | " << pct_spread(r.sclba.cad()) << " | "
        << pct_spread(r.baseline.cad()) << " |\n";
  }
}

void write_transfer_markdown(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "| Dataset | Model | ACC_c (%) | ACC_b (%) | ASR (%) | CAD (%) |\n";
  out << "|---|---|---|---|---|---|\n";
  std::vector<std::string> seen;
  for (const MetricsRow& r : rows) {
    if (std::find(seen.begin(), seen.end(), r.dataset) == seen.end()) {
      seen.push_back(r.dataset);
      out << "| " << r.dataset << " | GAT | not implemented | not implemented | not implemented"
          << " | not implemented |\n";
    }
    out << "| " << r.dataset << " | " << (r.model == "sage" ? "GraphSAGE" : r.model) << " | "
        << pct_spread(r.acc_clean()) << " | " << pct_spread(r.acc_backdoor()) << " | "
        << pct_spread(r.asr()) << " | " << pct_spread(r.cad()) << " |\n";
  }
}

std::size_t write_report(std::ostream& out, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  auto load = [&](const char* name) -> std::optional<std::vector<SeedResult>> {
    const fs::path p = directory / name;
    if (!fs::exists(p)) return std::nullopt;
    std::ifstream in(p);
    if (!in) throw DataError("cannot read " + p.string());
    try {
      return read_per_seed_csv(in);
    } catch (const DataError& e) {
      throw DataError(p.filename().string() + ": " + e.what());
    }
  };

  std::size_t tables = 0;
  out << "# Experiment report\n\n"
      << "Values are means over seeds in percent, with [min, max] across seeds.\n";
  if (auto rows = load("attack_per_seed.csv")) {
    out << "\n## Single attack cells\n\n";
    write_poisoning_rate_markdown(out, group_seed_results(*rows, AttackKind::kSclba));
    ++tables;
  }
  if (auto rows = load("sweep_p_per_seed.csv")) {
    const auto grouped = group_seed_results(*rows, AttackKind::kSclba);
    out << "\n## Impact of poisoning rate\n\n";
    write_poisoning_rate_markdown(out, grouped);
    for (const auto& w : monotonicity_warnings(grouped)) out << "\n> warning: " << w << '\n';
    ++tables;
  }
  if (auto rows = load("sweep_t_per_seed.csv")) {
    out << "\n## Impact of trigger size\n\n";
    write_trigger_size_markdown(out, group_seed_results(*rows, AttackKind::kSclba));
    ++tables;
  }
  auto sclba = load("baseline_sclba_per_seed.csv");
  auto er = load("baseline_er_per_seed.csv");
  if (sclba && er) {
    const auto a = group_seed_results(*sclba, AttackKind::kSclba);
    const auto b = group_seed_results(*er, AttackKind::kErBaseline);
    std::vector<BaselineComparison> pairs;
    for (const MetricsRow& row : a) {
      auto it = std::find_if(b.begin(), b.end(), [&](const MetricsRow& m) {
        return m.dataset == row.dataset && m.model == row.model && m.p == row.p;
      });
      if (it != b.end()) pairs.push_back({row, *it});
    }
    out << "\n## Comparison with the ER baseline\n\n";
    write_baseline_markdown(out, pairs);
    ++tables;
  }
  if (auto rows = load("transfer_per_seed.csv")) {
    out << "\n## Transferability\n\n";
    write_transfer_markdown(out, group_seed_results(*rows, AttackKind::kSclba));
    ++tables;
  }
  return tables;
}

}  // namespace sclba
