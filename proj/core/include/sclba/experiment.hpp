#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "sclba/attack.hpp"
#include "sclba/graph.hpp"
#include "sclba/model.hpp"

namespace sclba {

/// Tags passed to derive_seed(seed, {tag}) for each random stream of a run.
namespace seed_stream {
inline constexpr std::uint64_t kSplitStream = 0x5b1;
inline constexpr std::uint64_t kInitStream = 0x1417;
inline constexpr std::uint64_t kTrainStream = 0x77a1;
inline constexpr std::uint64_t kPoisonStream = 0xb015;
inline constexpr std::uint64_t kAttackStream = 0xa7;
inline constexpr std::uint64_t kPatternStream = 0xe7;
}  // namespace seed_stream

// --- Metrics ---------------------------------------------------------------

/// Fraction of attacking samples classified as `target_label`.
double compute_asr(const Model& model, std::span<const EncodedGraph> attack_set,
                   GraphLabel target_label);

/// acc_clean - acc_backdoor, sign preserved.
double compute_cad(double acc_clean, double acc_backdoor);

enum class AttackKind { kSclba, kErBaseline };
std::string_view to_string(AttackKind kind);

/// One seed of one experiment cell. Serialized as a row of
/// `dataset,model,p,t,seed,acc_clean,acc_backdoor,asr,cad`.
struct SeedResult {
  std::string dataset;
  std::string model;
  double p = 0.0;
  std::size_t t = 0;
  std::uint64_t seed = 0;
  double acc_clean = 0.0;
  double acc_backdoor = 0.0;
  double asr = 0.0;
  /// Clean model on the attack set. Kept for context, not part of the CSV.
  double clean_asr = 0.0;

  double cad() const { return compute_cad(acc_clean, acc_backdoor); }

  friend bool operator==(const SeedResult&, const SeedResult&) = default;
};

struct Spread {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Aggregate over the seeds of one (dataset, model, attack, p, t) cell.
struct MetricsRow {
  std::string dataset;
  std::string model;
  AttackKind attack = AttackKind::kSclba;
  double p = 0.0;
  std::size_t t = 0;
  std::vector<SeedResult> per_seed;
  /// Graphs skipped by the ER baseline because they were smaller than the pattern.
  std::size_t skipped_graphs = 0;

  std::size_t seed_count() const { return per_seed.size(); }
  Spread acc_clean() const;
  Spread acc_backdoor() const;
  Spread asr() const;
  Spread clean_asr() const;
  /// mean is acc_clean().mean - acc_backdoor().mean; min/max over seeds.
  Spread cad() const;
};

// --- Configuration ---------------------------------------------------------

/// Default target label per known dataset, 0 otherwise.
GraphLabel default_target_label(const std::string& dataset_name);

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  std::optional<GraphLabel> target_label;
  /// Empty lists mean "use the command's default grid".
  std::vector<double> poisoning_rates;  // fractions
  std::vector<std::size_t> trigger_sizes;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<Architecture> models = {Architecture::kGcn};
  bool baseline = false;
  std::filesystem::path output_dir = "results";
  double train_fraction = 0.8;
  std::size_t hidden_channels = 32;
  TrainConfig train;
  std::size_t er_nodes = 4;
  double er_edge_prob = 0.8;

  void validate() const;
};

/// Applies the fields present in a JSON object on top of `config`.
/// Percentages (`p`) are given in percent, as on the command line.
void apply_json_config(ExperimentConfig& config, const std::string& json_text);

// --- Running experiments ---------------------------------------------------

/// Runs experiment cells on one dataset. Clean models are cached per
/// (architecture, seed) so sweeps train each clean baseline only once; the
/// cache does not change any result.
class ExperimentRunner {
 public:
  using Progress = std::function<void(const std::string&)>;

  ExperimentRunner(const Dataset& dataset, ExperimentConfig config, Progress progress = {});

  GraphLabel target_label() const { return target_label_; }
  const ExperimentConfig& config() const { return config_; }

  /// Split, trigger selection and clean model for one seed.
  DataSplit split_for_seed(std::uint64_t seed) const;

  SeedResult run_seed(Architecture arch, AttackKind attack, double p, std::size_t t,
                      std::uint64_t seed, std::size_t* skipped = nullptr);

  MetricsRow run_cell(Architecture arch, AttackKind attack, double p, std::size_t t);

 private:
  struct CleanContext {
    DataSplit split;
    std::vector<EncodedGraph> train;
    std::vector<EncodedGraph> test;
    Model init;
    TrainConfig train_config;
    Model clean;
  };

  const CleanContext& clean_context(Architecture arch, std::uint64_t seed);
  void log(const std::string& message) const;

  const Dataset& dataset_;
  ExperimentConfig config_;
  GraphLabel target_label_;
  Progress progress_;
  std::map<std::pair<Architecture, std::uint64_t>, CleanContext> clean_cache_;
};

struct SweepTable {
  std::vector<MetricsRow> rows;
  /// Human-readable notes, e.g. ASR decreasing as p grows.
  std::vector<std::string> warnings;
};

SweepTable sweep_poisoning_rates(ExperimentRunner& runner, Architecture arch);
SweepTable sweep_trigger_sizes(ExperimentRunner& runner, Architecture arch);

struct BaselineComparison {
  MetricsRow sclba;
  MetricsRow baseline;
};

BaselineComparison run_baseline_comparison(ExperimentRunner& runner);
MetricsRow run_transferability(ExperimentRunner& runner);

/// Flags each adjacent pair of rows (ordered by p) where mean ASR drops.
std::vector<std::string> monotonicity_warnings(std::span<const MetricsRow> rows);

// --- Reporting -------------------------------------------------------------

inline constexpr const char* kPerSeedHeader = "dataset,model,p,t,seed,acc_clean,acc_backdoor,asr,cad";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

void write_per_seed_csv(std::ostream& out, std::span<const MetricsRow> rows);
/// Parses a per-seed CSV. Throws DataError when a row's cad column differs
/// from acc_clean - acc_backdoor.
std::vector<SeedResult> read_per_seed_csv(std::istream& in);
/// Groups seed rows into cells keyed by (dataset, model, p, t), in order of
/// first appearance.
std::vector<MetricsRow> group_seed_results(std::span<const SeedResult> results, AttackKind attack);

void write_summary_csv(std::ostream& out, std::span<const MetricsRow> rows);

void write_poisoning_rate_markdown(std::ostream& out, std::span<const MetricsRow> rows);
void write_trigger_size_markdown(std::ostream& out, std::span<const MetricsRow> rows);
void write_baseline_markdown(std::ostream& out, std::span<const BaselineComparison> rows);
void write_transfer_markdown(std::ostream& out, std::span<const MetricsRow> rows);

/// Builds a combined markdown report from every known CSV in `directory`.
/// Returns the number of tables written.
std::size_t write_report(std::ostream& out, const std::filesystem::path& directory);

}  // namespace sclba
