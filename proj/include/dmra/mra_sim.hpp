// Noisy multi-reference alignment observations and debiased moment estimation.

#pragma once

#include "dmra/invariants.hpp"
#include "dmra/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dmra {

/// y_i = g_i . x + eps_i with g_i uniform over the group and eps_i ~ N(0, sigma^2 I).
struct ObservationSet {
    int n = 0;
    GroupKind group = GroupKind::dihedral;
    double sigma = 0.0;
    std::uint64_t master_seed = 0;
    /// Samples are the exact orbit (every group element once, no noise).
    bool enumerated = false;
    std::vector<std::vector<double>> samples;
};

/// Sample i is drawn from the stream derive_seed(master_seed, i), so the set
/// does not depend on generation order.
ObservationSet sample_observations(const Signal& x, double sigma, int count, GroupKind group,
                                   std::uint64_t master_seed);

/// Noiseless enumeration mode: one sample per group element in canonical order.
ObservationSet enumerate_orbit(const Signal& x, GroupKind group);

/// Running sums of the per-sample debiased Fourier statistics.
class MomentAccumulator {
public:
    MomentAccumulator(int n, GroupKind group, double sigma);

    void add(std::span<const double> sample);
    std::int64_t count() const { return count_; }

    /// Debiased estimates; requires count() >= 1.
    InvariantMoments estimate() const;
    /// Standard errors of estimate(): sqrt(E|z - mean|^2 / N) per entry, 0 when N < 2.
    InvariantMoments standard_errors() const;

private:
    int n_;
    GroupKind group_;
    double sigma_;
    DftPlan plan_;
    std::vector<TripleIndex> indices_;
    std::vector<int> zero_count_;  // indices equal to 0 mod n, per third entry
    std::int64_t count_ = 0;
    double m1_sum_ = 0.0, m1_sq_ = 0.0;
    std::vector<double> power_sum_, power_sq_;
    std::vector<Complex> third_sum_;
    std::vector<double> third_sq_;
    std::vector<Complex> spectrum_;
};

/// Debiased invariants: mean y^[0]; mean |y^[l]|^2 - sigma^2; mean third-order
/// product minus sigma^2 * m1 for each index that is 0 mod n.
InvariantMoments estimate_moments(const ObservationSet& obs);

struct MomentEstimate {
    InvariantMoments value;
    InvariantMoments standard_error;  // same layout; third holds real-valued errors
};
MomentEstimate estimate_moments_with_errors(const ObservationSet& obs);

struct NoiseScalingRow {
    double sigma = 0.0;
    double third_std = 0.0;
};

/// Pooled across-trial standard deviation of the debiased third-moment entries
/// for each sigma. `sigmas` must be increasing and >= 1.
std::vector<NoiseScalingRow> estimator_noise_scaling(const Signal& x, std::span<const double> sigmas, int samples,
                                                     int trials, std::uint64_t seed,
                                                     GroupKind group = GroupKind::dihedral);

/// Least-squares slope of log(third_std) against log(sigma).
double loglog_slope(std::span<const NoiseScalingRow> rows);

/// One sample per CSV row plus a JSON sidecar {n, group, sigma, N, master_seed}.
void write_observations(const ObservationSet& obs, const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path);
ObservationSet read_observations(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

}  // namespace dmra
