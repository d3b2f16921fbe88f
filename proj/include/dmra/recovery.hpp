// Recovering a signal orbit from its invariant moments.

#pragma once

#include "dmra/invariants.hpp"
#include "dmra/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace dmra {

struct RecoveryConfig {
    GroupKind group = GroupKind::dihedral;
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 1.0;
    /// Drop the degree-1 and degree-2 terms, keeping only the third moment.
    bool third_only = false;
    int max_iters = 5000;
    double grad_tol = 1e-10;
    // Limited-memory quasi-Newton with Armijo backtracking.
    int memory = 10;
    double initial_step = 1.0;
    double step_shrink = 0.5;
    double armijo_c1 = 1e-4;
    int max_backtracks = 60;
    std::uint64_t init_seed = 0;

    /// Throws std::invalid_argument on w3 <= 0, negative weights, grad_tol <= 0, etc.
    void validate() const;
};

struct RecoveryResult {
    Signal estimate{std::vector<double>{0.0, 0.0}};
    std::vector<double> loss_trace;
    int iterations = 0;
    double final_loss = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    /// Non-finite loss encountered; the trial is reported as failed.
    bool failed = false;
    std::optional<double> aligned_error;
    GroupElement best_group_element;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};

/// Weighted least-squares moment mismatch and its gradient with respect to
/// the time-domain samples. Reusable across evaluations for one target.
class MomentObjective {
public:
    MomentObjective(const InvariantMoments& target, const RecoveryConfig& cfg);

    int size() const { return n_; }
    double evaluate(std::span<const double> x, std::span<double> grad) const;

private:
    InvariantMoments target_;
    double w1_, w2_, w3_;
    int n_;
    DftPlan plan_;
};

LossGradient loss_and_gradient(const Signal& x, const InvariantMoments& target, const RecoveryConfig& cfg);

/// Quasi-Newton descent from random_unit_signal(n, cfg.init_seed).
RecoveryResult recover(const InvariantMoments& target, const RecoveryConfig& cfg,
                       const std::optional<Signal>& truth = std::nullopt);

/// Runs recover() from `inits` starting points. Run 0 uses cfg.init_seed,
/// run i > 0 uses derive_seed(cfg.init_seed, i).
std::vector<RecoveryResult> recover_multi(const InvariantMoments& target, const RecoveryConfig& cfg, int inits,
                                          const std::optional<Signal>& truth = std::nullopt);

/// Index of the lowest final loss, preferring runs that did not fail.
std::size_t best_by_loss(const std::vector<RecoveryResult>& runs);

/// Same as recover() but starting from a given point.
RecoveryResult recover_from(const InvariantMoments& target, const RecoveryConfig& cfg, const Signal& init,
                            const std::optional<Signal>& truth = std::nullopt);

/// Exact phase chase for cyclic moments. Requires power[l] > 1e-9 for
/// l = 1..floor(n/2); otherwise throws std::domain_error naming the frequency.
Signal frequency_marching_cyclic(const InvariantMoments& moments);

struct SignSearchResult {
    /// Number of sign assignments over the canonical (i, j) pairs.
    std::uint64_t enumerated = 0;
    /// Distinct candidates that reproduce every target moment within 1e-8.
    std::vector<Signal> candidates;
    /// One representative per dihedral orbit among the candidates.
    std::vector<Signal> orbits;
};

/// Pairs (i, j), 1 <= i <= j, i + j <= k, with k = floor((n - 1) / 2).
std::vector<std::pair<int, int>> conjugate_pairs(int n);

/// Exhaustive conjugate-sign search over dihedral moments. Throws
/// std::invalid_argument when n > n_max.
SignSearchResult dihedral_sign_search(const InvariantMoments& moments, int n_max = 14);

struct Alignment {
    GroupElement element;
    double error = 0.0;
};

/// argmin_g ||truth - g.estimate|| / ||truth|| over the group.
Alignment align_and_error(const Signal& truth, const Signal& estimate, GroupKind group);

// JSON: {estimate:[...], loss_trace:[...], iterations, aligned_error, group_element:{rot,refl}}
void write_recovery_json(const RecoveryResult& r, const std::filesystem::path& path);
RecoveryResult read_recovery_json(const std::filesystem::path& path);

}  // namespace dmra
