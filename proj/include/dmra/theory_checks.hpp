// Exact checks of the combinatorial facts behind dihedral orbit recovery, plus
// bounded probes of the genericity condition on bispectrum phases.

#pragma once

#include "dmra/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dmra {

/// Linear forms x_i + x_j - x_{i+j} over x_1..x_k, one row per pair
/// 1 <= i <= j, i + j <= k.
struct FormMatrix {
    int k = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> rows;
};

/// Throws std::invalid_argument for k < 2.
FormMatrix form_matrix(int k);

struct FormRank {
    int rank = 0;
    bool spans_hyperplane = false;  // rank == k - 1
    bool orthogonal = false;        // every row is orthogonal to (1, 2, ..., k)
};

/// Exact rank by fraction-free elimination over big integers.
FormRank xij_rank(int k);

/// True iff deleting any single row leaves rank k - 1.
bool is_excessive(int k);

/// Result of looking for an integer vector m with every entry nonzero and
/// sum_p m_p * row_p = 0.
struct AnnihilatorSearch {
    bool exists = false;
    int nullity = 0;
    std::vector<std::int64_t> m;  // empty unless exists
    std::string reason;           // why no vector exists
};

/// Works for any k >= 2. Nonexistence is decided exactly: it happens iff some
/// coordinate vanishes on the whole nullspace.
AnnihilatorSearch search_nonzero_annihilator(int k);

/// Requires k >= 4 (std::invalid_argument otherwise). The returned vector is
/// verified exactly before it is handed back.
std::vector<std::int64_t> find_nonzero_annihilator(int k);

/// Exact check that m annihilates the rows of form_matrix(k).
bool annihilates(const FormMatrix& forms, const std::vector<std::int64_t>& m);

/// One multiplicative relation prod a_ij^(2 n_ij) = 1 among phase triples.
struct PhaseRelation {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> exponents;
    double residual = 0.0;  // |sum 2 n_ij phi_ij| wrapped to (-pi, pi]
};

/// Bounded search over nonempty subsets of the pairs (i, j), i <= j,
/// i + j <= floor((n - 1) / 2), of size <= subset_bound, with exponents in
/// [-exp_bound, exp_bound] \ {0}. Each relation is reported once, with its
/// first exponent positive. An empty result is not a proof of genericity.
std::vector<PhaseRelation> condition_star_probe(const FourierSignal& f, int exp_bound, int subset_bound);

struct TheoryCheck {
    std::string name;
    std::optional<int> k;
    std::string pair;  // set for counterexample checks
    bool pass = false;
    std::string witness;
};

/// The two length-5 signal pairs that share dihedral invariants of degree <= 3.
std::vector<TheoryCheck> verify_counterexamples();

/// Rank and orthogonality for 2 <= k <= k_max, excessiveness (false at k = 3,
/// true from 4 on), annihilators from k = 4 on, and the counterexamples.
std::vector<TheoryCheck> verify_theory(int k_max);

/// JSON array of {name, k | pair, pass, witness}.
void write_theory_report(const std::vector<TheoryCheck>& checks, const std::filesystem::path& path);

}  // namespace dmra
