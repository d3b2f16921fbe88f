// Seeded recovery sweeps over signal length and noise level, with CSV/SVG output.

#pragma once

#include "dmra/mra_sim.hpp"
#include "dmra/recovery.hpp"
#include "dmra/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dmra {

enum class SweepKind { length_sweep, noise_sweep };

/// per_trial: every trial draws its own ground truth (shared by all groups).
/// per_length: one ground truth per length, trials differ only in the
/// initialization; the aligned estimates are also averaged.
enum class TruthMode { per_trial, per_length };

std::string to_string(SweepKind k);
std::string to_string(TruthMode m);

struct SweepSpec {
    SweepKind kind = SweepKind::length_sweep;
    int n_min = 5;
    int n_max = 120;
    int n_step = 5;
    /// When nonempty, replaces the (n_min, n_max, n_step) range.
    std::vector<int> n_values;
    int trials = 100;
    std::vector<GroupKind> groups{GroupKind::cyclic, GroupKind::dihedral};
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir;
    /// Worker threads; 0 picks the hardware concurrency, 1 runs serially.
    int threads = 1;
    TruthMode truth = TruthMode::per_trial;
    /// Objective used by the sweeps; see RecoveryConfig::third_only.
    bool third_only = true;
    /// Initializations per trial; the lowest final loss is kept.
    int inits = 1;

    // Noise sweep only. sigma = 0 uses the exact moments.
    std::vector<double> sigmas;
    std::vector<int> sample_counts;
    /// Across-trial repetitions for the estimator standard deviation table.
    int scaling_trials = 20;

    /// Throws std::invalid_argument describing the first bad field.
    void validate() const;
    std::vector<int> lengths() const;
};

struct SweepRow {
    GroupKind group = GroupKind::cyclic;
    int n = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double aligned_error = 0.0;  // NaN for failed trials
    int iterations = 0;
};

struct SweepAggregate {
    GroupKind group = GroupKind::cyclic;
    int n = 0;
    double mean_error = 0.0;  // over non-failed trials; NaN if none
    double std_error = 0.0;   // sample standard deviation of those errors
    int failed_trials = 0;
};

struct AveragedSignalError {
    GroupKind group = GroupKind::cyclic;
    int n = 0;
    double error = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (group, n, trial)
    std::vector<SweepAggregate> aggregates;
    /// Only filled in TruthMode::per_length.
    std::vector<AveragedSignalError> averaged;
};

/// Per (n, trial) base seed s: truth from derive_seed(s, 0), initialization
/// from derive_seed(s, 1). The same s is used for every group.
std::uint64_t trial_seed(std::uint64_t master_seed, int n, int trial);

/// Exact moments, quasi-Newton recovery, aligned error per trial.
SweepResult run_length_sweep(const SweepSpec& spec);

/// Groups rows by (group, n) in order of first appearance.
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

struct NoiseSweepRow {
    GroupKind group = GroupKind::dihedral;
    int n = 0;
    double sigma = 0.0;
    int samples = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double aligned_error = 0.0;
    int iterations = 0;
};

struct NoiseSweepAggregate {
    GroupKind group = GroupKind::dihedral;
    double sigma = 0.0;
    int samples = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    int failed_trials = 0;
};

struct NoiseSweepResult {
    /// Estimator standard deviations for the sigmas >= 1 (per group).
    std::vector<std::pair<GroupKind, NoiseScalingRow>> scaling;
    std::vector<NoiseSweepRow> rows;
    std::vector<NoiseSweepAggregate> aggregates;
};

/// Uses n_min as the signal length. Observation sets are seeded from the
/// trial seed, so every (sigma, N) cell of a trial sees the same ground truth.
NoiseSweepResult run_noise_sweep(const SweepSpec& spec);

// rows.csv: group,n,trial,seed,aligned_error,iterations
// aggregates.csv: group,n,mean_error,std_error,failed_trials
void emit_csv(const SweepResult& result, const std::filesystem::path& rows_path,
              const std::filesystem::path& aggregates_path);
std::vector<SweepRow> read_rows_csv(const std::filesystem::path& path);
std::vector<SweepAggregate> read_aggregates_csv(const std::filesystem::path& path);

/// Line chart of mean error against n, one polyline per group.
/// Throws std::invalid_argument when there is nothing to draw.
std::string render_svg(const std::vector<SweepAggregate>& aggregates);
void emit_svg(const SweepResult& result, const std::filesystem::path& path);

/// Plotted y-range: data min/max widened by 5% of the span on each side.
std::pair<double, double> svg_y_range(const std::vector<SweepAggregate>& aggregates);

/// Writes manifest.json, rows.csv, aggregates.csv, figure.svg (and
/// averaged.csv in per_length mode) into spec.output_dir.
void write_length_sweep(const SweepSpec& spec, const SweepResult& result, const std::string& version);

/// Writes manifest.json, scaling.csv, rows.csv, aggregates.csv into spec.output_dir.
void write_noise_sweep(const SweepSpec& spec, const NoiseSweepResult& result, const std::string& version);

}  // namespace dmra
