#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sclba/attack.hpp"
#include "sclba/error.hpp"
#include "sclba/experiment.hpp"
#include "sclba/graph.hpp"
#include "sclba/model.hpp"
#include "sclba/rng.hpp"

namespace sclba::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string dataset;
  std::optional<long long> target_label;
  std::string p;
  std::string t;
  std::string seeds;
  std::string model;
  std::string out = "results";
  std::string config;
  std::optional<std::size_t> epochs;
  std::optional<double> train_fraction;
  std::optional<std::size_t> er_nodes;
  std::optional<double> er_prob;
  std::string dump;
  bool quiet = false;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    T v{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError(std::string("--") + flag + ": cannot parse '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError(std::string("--") + flag + ": empty list");
  return values;
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg;
  if (!f.dataset.empty()) cfg.dataset_path = f.dataset;
  if (f.target_label) {
    if (*f.target_label < 0) throw ConfigError("--target-label must be non-negative");
    cfg.target_label = static_cast<GraphLabel>(*f.target_label);
  }
  if (!f.p.empty()) {
    for (double pct : parse_list<double>(f.p, "p")) cfg.poisoning_rates.push_back(pct / 100.0);
  }
  if (!f.t.empty()) cfg.trigger_sizes = parse_list<std::size_t>(f.t, "t");
  if (!f.seeds.empty()) cfg.seeds = parse_list<std::uint64_t>(f.seeds, "seeds");
  if (!f.model.empty()) {
    cfg.models.clear();
    std::stringstream ss(f.model);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.models.push_back(parse_architecture(item));
  }
  cfg.output_dir = f.out;
  if (f.epochs) cfg.train.max_epochs = *f.epochs;
  if (f.train_fraction) cfg.train_fraction = *f.train_fraction;
  if (f.er_nodes) cfg.er_nodes = *f.er_nodes;
  if (f.er_prob) cfg.er_edge_prob = *f.er_prob;

  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file " + f.config);
    std::stringstream buf;
    buf << in.rdbuf();
    apply_json_config(cfg, buf.str());
  }
  cfg.validate();
  if (cfg.dataset_path.empty()) throw ConfigError("--dataset is required");
  return cfg;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw DataError("cannot write " + (dir / name).string());
  return out;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

void print_row(std::ostream& out, const MetricsRow& row) {
  out << row.dataset << " " << row.model << " " << to_string(row.attack) << " p="
      << percent(row.p) << " t=" << row.t << ": ACC_c=" << percent(row.acc_clean().mean)
      << " ACC_b=" << percent(row.acc_backdoor().mean) << " ASR=" << percent(row.asr().mean)
      << " [" << percent(row.asr().min) << ", " << percent(row.asr().max) << "]"
      << " CAD=" << percent(row.cad().mean) << " clean-model ASR=" << percent(row.clean_asr().mean)
      << " (" << row.seed_count() << " seeds)\n";
}

void write_cell_files(const fs::path& dir, const std::string& stem, std::span<const MetricsRow> rows) {
  auto per_seed = open_output(dir, stem + "_per_seed.csv");
  write_per_seed_csv(per_seed, rows);
  auto summary = open_output(dir, stem + "_summary.csv");
  write_summary_csv(summary, rows);
}

// --- subcommands ---------------------------------------------------------

int cmd_inspect(const Flags& f, std::ostream& out) {
  if (f.dataset.empty()) throw ConfigError("--dataset is required");
  const Dataset ds = parse_tudataset(f.dataset);
  std::size_t nodes = 0;
  std::size_t edges = 0;
  for (const Graph& g : ds.graphs) {
    nodes += g.node_count;
    edges += g.edges.size();
  }
  const double n = static_cast<double>(ds.graphs.size());
  const auto hist = ds.label_histogram();
  char buf[64];
  out << "dataset            " << ds.name << '\n';
  out << "graphs             " << ds.graphs.size() << '\n';
  std::snprintf(buf, sizeof buf, "%.2f", static_cast<double>(nodes) / n);
  out << "avg nodes          " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.2f", static_cast<double>(edges) / n);
  out << "avg edges          " << buf << '\n';
  out << "label count        " << ds.num_graph_labels() << '\n';
  out << "graphs per label   ";
  for (std::size_t l = 0; l < hist.size(); ++l) {
    out << (l ? ", " : "") << hist[l] << '[' << l << ']';
  }
  out << '\n';
  out << "raw graph labels   ";
  for (std::size_t l = 0; l < ds.raw_graph_labels.size(); ++l) {
    out << (l ? ", " : "") << ds.raw_graph_labels[l] << "->" << l;
  }
  out << '\n';
  out << "node classes (d)   " << ds.node_class_vocab_size() << '\n';
  out << "target label       " << (f.target_label ? static_cast<GraphLabel>(*f.target_label)
                                                  : default_target_label(ds.name))
      << '\n';
  if (ds.dropped_self_loops > 0) out << "self-loops dropped " << ds.dropped_self_loops << '\n';
  if (!f.dump.empty()) {
    std::ofstream dump(f.dump);
    if (!dump) throw DataError("cannot write " + f.dump);
    write_canonical(dump, ds);
  }
  return 0;
}

int cmd_train_clean(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out) {
  auto csv = open_output(cfg.output_dir, "train_clean.csv");
  csv << "dataset,model,seed,train_loss,train_acc,test_acc\n";
  for (Architecture arch : cfg.models) {
    for (std::uint64_t seed : cfg.seeds) {
      ExperimentRunner runner(ds, cfg);
      const DataSplit split = runner.split_for_seed(seed);
      std::vector<Graph> train_graphs;
      for (std::size_t i : split.train_indices) train_graphs.push_back(ds.graphs[i]);
      const auto train_set = encode_graphs(train_graphs, ds.node_class_vocab_size(), arch);
      std::vector<Graph> test_graphs;
      for (std::size_t i : split.test_indices) test_graphs.push_back(ds.graphs[i]);
      const auto test_set = encode_graphs(test_graphs, ds.node_class_vocab_size(), arch);
      Model init = Model::create(arch, ds.node_class_vocab_size(), ds.num_graph_labels(),
                                 derive_seed(seed, {seed_stream::kInitStream}), cfg.hidden_channels);
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(seed, {seed_stream::kTrainStream});
      std::vector<std::size_t> all(train_set.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      const TrainResult result = train(std::move(init), train_set, all, tc);
      const double test_acc = accuracy(result.model, test_set);
      csv << ds.name << ',' << to_string(arch) << ',' << seed << ','
          << format_double(result.history.epoch_loss.back()) << ','
          << format_double(result.history.epoch_accuracy.back()) << ','
          << format_double(test_acc) << '\n';
      out << ds.name << ' ' << to_string(arch) << " seed " << seed
          << ": final train loss " << result.history.epoch_loss.back() << ", test accuracy "
          << percent(test_acc) << '\n';
      auto ckpt = open_output(cfg.output_dir, "model_" + std::string(to_string(arch)) + "_seed" +
                                                  std::to_string(seed) + ".ckpt");
      save_checkpoint(ckpt, result.model);
    }
  }
  return 0;
}

int cmd_select_trigger(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out) {
  ExperimentRunner runner(ds, cfg);
  for (std::uint64_t seed : cfg.seeds) {
    const auto start = std::chrono::steady_clock::now();
    const TriggerReport report =
        select_semantic_trigger(ds, runner.split_for_seed(seed), runner.target_label());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "seed " << seed << ": trigger class " << report.trigger_class << " (raw label "
        << ds.raw_node_labels[report.trigger_class] << "), total DC "
        << report.totals[report.trigger_class] << ", " << report.nontarget_graphs
        << " nontarget graphs, " << secs << " s\n";
    auto file = open_output(cfg.output_dir, "trigger_report_seed" + std::to_string(seed) + ".txt");
    write_trigger_report(file, report);
  }
  return 0;
}

int cmd_attack(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out,
               const ExperimentRunner::Progress& progress) {
  ExperimentRunner runner(ds, cfg, progress);
  const double p = cfg.poisoning_rates.empty() ? 0.03 : cfg.poisoning_rates.front();
  const std::size_t t = cfg.trigger_sizes.empty() ? 1 : cfg.trigger_sizes.front();

  // Audit files for every seed: chosen trigger and the exact replacements.
  for (std::uint64_t seed : cfg.seeds) {
    const DataSplit split = runner.split_for_seed(seed);
    const TriggerReport report = select_semantic_trigger(ds, split, runner.target_label());
    AttackConfig ac;
    ac.target_label = runner.target_label();
    ac.poisoning_rate = p;
    ac.trigger_size = t;
    ac.trigger_class = report.trigger_class;
    ac.seed = derive_seed(seed, {seed_stream::kPoisonStream});
    const auto poisoned = generate_poisoned_trainset(ds, split, ac);
    auto tr = open_output(cfg.output_dir, "trigger_report_seed" + std::to_string(seed) + ".txt");
    write_trigger_report(tr, report);
    auto pr = open_output(cfg.output_dir, "poison_record_seed" + std::to_string(seed) + ".txt");
    write_poison_record(pr, poisoned.record);
  }

  std::vector<MetricsRow> rows;
  for (Architecture arch : cfg.models) rows.push_back(runner.run_cell(arch, AttackKind::kSclba, p, t));
  if (cfg.baseline) {
    std::vector<MetricsRow> er;
    for (Architecture arch : cfg.models) {
      er.push_back(runner.run_cell(arch, AttackKind::kErBaseline, p, cfg.er_nodes));
    }
    write_cell_files(cfg.output_dir, "attack_er", er);
    for (const auto& r : er) print_row(out, r);
  }
  write_cell_files(cfg.output_dir, "attack", rows);
  for (const auto& r : rows) print_row(out, r);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out,
              const ExperimentRunner::Progress& progress, bool over_p) {
  ExperimentRunner runner(ds, cfg, progress);
  std::vector<MetricsRow> rows;
  std::vector<std::string> warnings;
  for (Architecture arch : cfg.models) {
    SweepTable table = over_p ? sweep_poisoning_rates(runner, arch) : sweep_trigger_sizes(runner, arch);
    rows.insert(rows.end(), table.rows.begin(), table.rows.end());
    warnings.insert(warnings.end(), table.warnings.begin(), table.warnings.end());
  }
  const std::string stem = over_p ? "sweep_p" : "sweep_t";
  write_cell_files(cfg.output_dir, stem, rows);
  auto md = open_output(cfg.output_dir, stem + ".md");
  if (over_p) {
    write_poisoning_rate_markdown(md, rows);
  } else {
    write_trigger_size_markdown(md, rows);
  }
  for (const auto& w : warnings) md << "\n> warning: " << w << '\n';
  for (const auto& r : rows) print_row(out, r);
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return 0;
}

int cmd_baseline(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out,
                 const ExperimentRunner::Progress& progress) {
  ExperimentRunner runner(ds, cfg, progress);
  const BaselineComparison cmp = run_baseline_comparison(runner);
  write_cell_files(cfg.output_dir, "baseline_sclba", std::span(&cmp.sclba, 1));
  write_cell_files(cfg.output_dir, "baseline_er", std::span(&cmp.baseline, 1));
  auto md = open_output(cfg.output_dir, "baseline.md");
  write_baseline_markdown(md, std::span(&cmp, 1));
  print_row(out, cmp.sclba);
  print_row(out, cmp.baseline);
  if (cmp.baseline.skipped_graphs > 0) {
    out << cmp.baseline.skipped_graphs << " graphs were smaller than the ER pattern and skipped\n";
  }
  return 0;
}

int cmd_transfer(const ExperimentConfig& cfg, const Dataset& ds, std::ostream& out,
                 const ExperimentRunner::Progress& progress) {
  ExperimentRunner runner(ds, cfg, progress);
  const MetricsRow row = run_transferability(runner);
  write_cell_files(cfg.output_dir, "transfer", std::span(&row, 1));
  auto md = open_output(cfg.output_dir, "transfer.md");
  write_transfer_markdown(md, std::span(&row, 1));
  print_row(out, row);
  out << "GAT: not implemented\n";
  return 0;
}

int cmd_report(const Flags& f, std::ostream& out) {
  const fs::path dir = f.out;
  if (!fs::is_directory(dir)) throw DataError("results directory " + dir.string() + " does not exist");
  std::ostringstream md;
  const std::size_t tables = write_report(md, dir);
  if (tables == 0) throw DataError("no result CSV files found in " + dir.string());
  auto file = open_output(dir, "report.md");
  file << md.str();
  out << md.str();
  return 0;
}

void add_common(CLI::App* cmd, Flags& f, bool experiment) {
  cmd->add_option("--dataset", f.dataset, "TUDataset directory");
  cmd->add_option("--target-label", f.target_label, "Target graph label (0-based)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--config", f.config, "JSON config file; its fields override flags");
  cmd->add_option("--seeds", f.seeds, "Comma-separated seeds (default 0,1,2,3,4)");
  cmd->add_option("--model", f.model, "gcn or sage (comma-separated for several)");
  cmd->add_option("--epochs", f.epochs, "Training epochs (default 100)");
  cmd->add_option("--train-fraction", f.train_fraction, "Training split fraction (default 0.8)");
  cmd->add_flag("--quiet", f.quiet, "Suppress progress messages");
  if (experiment) {
    cmd->add_option("--p", f.p, "Poisoning rate(s) in percent, comma-separated");
    cmd->add_option("--t", f.t, "Trigger size(s), comma-separated");
    cmd->add_option("--er-nodes", f.er_nodes, "ER baseline subgraph size (default 4)");
    cmd->add_option("--er-prob", f.er_prob, "ER baseline edge probability (default 0.8)");
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic clean-label backdoor attack on graph classifiers"};
  app.require_subcommand(1);
  Flags f;
  bool baseline_flag = false;

  auto* inspect = app.add_subcommand("inspect", "Dataset statistics");
  inspect->add_option("--dataset", f.dataset, "TUDataset directory")->required();
  inspect->add_option("--target-label", f.target_label, "Target graph label (0-based)");
  inspect->add_option("--dump", f.dump, "Write the canonical dataset dump to this file");

  auto* train_clean = app.add_subcommand("train-clean", "Train and evaluate clean models");
  add_common(train_clean, f, false);
  auto* select = app.add_subcommand("select-trigger", "Degree-centrality trigger selection");
  add_common(select, f, false);
  auto* attack = app.add_subcommand("attack", "One experiment cell (default p=3%, t=1)");
  add_common(attack, f, true);
  attack->add_flag("--baseline", baseline_flag, "Also run the ER subgraph baseline");
  auto* sweep_p = app.add_subcommand("sweep-p", "Poisoning-rate sweep (default 1,3,5,7 %, t=1)");
  add_common(sweep_p, f, true);
  auto* sweep_t = app.add_subcommand("sweep-t", "Trigger-size sweep (default t=1,2,3, p=3%)");
  add_common(sweep_t, f, true);
  auto* baseline = app.add_subcommand("baseline", "SCLBA vs ER baseline (p=3%, t=3)");
  add_common(baseline, f, true);
  auto* transfer = app.add_subcommand("transfer", "GraphSAGE transferability (p=3%, t=3)");
  add_common(transfer, f, true);
  auto* report = app.add_subcommand("report", "Markdown report from result CSVs");
  report->add_option("--out", f.out, "Results directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  const ExperimentRunner::Progress progress = [&](const std::string& msg) {
    if (!f.quiet) err << "[sclba] " << msg << '\n';
  };

  try {
    if (inspect->parsed()) return cmd_inspect(f, out);
    if (report->parsed()) return cmd_report(f, out);

    ExperimentConfig cfg = build_config(f);
    if (baseline_flag) cfg.baseline = true;
    const Dataset ds = parse_tudataset(cfg.dataset_path);
    if (train_clean->parsed()) return cmd_train_clean(cfg, ds, out);
    if (select->parsed()) return cmd_select_trigger(cfg, ds, out);
    if (attack->parsed()) return cmd_attack(cfg, ds, out, progress);
    if (sweep_p->parsed()) return cmd_sweep(cfg, ds, out, progress, true);
    if (sweep_t->parsed()) return cmd_sweep(cfg, ds, out, progress, false);
    if (baseline->parsed()) return cmd_baseline(cfg, ds, out, progress);
    if (transfer->parsed()) return cmd_transfer(cfg, ds, out, progress);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kData);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace sclba::cli
