// Degree 1-3 invariant moments under Z_n and D_n in Fourier coordinates,
// plus dense group-averaged tensors used as test oracles.

#pragma once

#include "dmra/signal.hpp"

#include <filesystem>
#include <vector>

namespace dmra {

/// A third-moment index (k1, k2); the third index is k3 = (-k1 - k2) mod n.
struct TripleIndex {
    int k1 = 0;
    int k2 = 0;

    int k3(int n) const { return ((-k1 - k2) % n + n) % n; }
    friend bool operator==(const TripleIndex&, const TripleIndex&) = default;
    friend auto operator<=>(const TripleIndex&, const TripleIndex&) = default;
};

/// Canonical deduplicated index set, sorted lexicographically.
///
/// Cyclic: one representative per multiset {k1,k2,k3} with k1+k2+k3 = 0 mod n,
/// chosen as the sorted triple k1 <= k2 <= k3. Dihedral: additionally one
/// representative per pair {k, -k}, the lexicographically smaller sorted triple.
std::vector<TripleIndex> distinct_indices(GroupKind group, int n);

/// Maps any (k1, k2) onto its position in distinct_indices(group, n).
class IndexTable {
public:
    IndexTable(GroupKind group, int n);

    const std::vector<TripleIndex>& indices() const { return indices_; }
    int position(int k1, int k2) const;

private:
    int n_;
    std::vector<TripleIndex> indices_;
    std::vector<int> lookup_;  // n*n table over (k1 mod n, k2 mod n)
};

struct InvariantMoments {
    GroupKind group = GroupKind::cyclic;
    int n = 0;
    double sigma_used = 0.0;
    double m1 = 0.0;                    // f[0]
    std::vector<double> power;          // |f[l]|^2
    std::vector<TripleIndex> indices;   // distinct_indices(group, n)
    std::vector<Complex> third;         // parallel to indices

    /// Third-moment entry for arbitrary (k1, k2), mapped to its canonical slot.
    Complex third_at(int k1, int k2) const;
};

std::vector<double> power_spectrum(const FourierSignal& f);

/// f[l] f[-l]; equals the power spectrum for conjugate-symmetric input and is
/// the polynomial degree-2 invariant for arbitrary complex coefficients.
std::vector<Complex> polynomial_power(const FourierSignal& f);

/// f[k1] f[k2] conj(f[k1 + k2]) over the canonical cyclic index set.
std::vector<Complex> cyclic_bispectrum(const FourierSignal& f);

/// Group-averaged dihedral third moment
/// 1/2 (f[k1] f[k2] f[k3] + f[-k1] f[-k2] f[-k3]) over the canonical dihedral set.
std::vector<Complex> dihedral_third_moment(const FourierSignal& f);

InvariantMoments compute_moments(const FourierSignal& f, GroupKind group);
InvariantMoments compute_moments(const Signal& x, GroupKind group);

/// Largest absolute entrywise difference over m1, power and third. Throws on
/// mismatched (group, n).
double max_abs_difference(const InvariantMoments& a, const InvariantMoments& b);

/// a_{i,j} = exp(i (theta_i + theta_j - theta_{i+j})); throws if any of the
/// three moduli is below 1e-9.
Complex phase_triple(const FourierSignal& f, int i, int j);
/// alpha_{i,j} = cos(theta_i + theta_j - theta_{i+j}).
double phase_cosine(const FourierSignal& f, int i, int j);

/// Dense order-d tensor with n^d entries in row-major order.
struct DenseTensor {
    int n = 0;
    int order = 0;
    std::vector<Complex> data;

    Complex& at(std::span<const int> idx);
    const Complex& at(std::span<const int> idx) const;
};

inline constexpr int kOracleMaxLength = 64;

/// (1/|G|) sum_g (g.x)^{tensor d}; test oracle, rejects n > kOracleMaxLength.
DenseTensor brute_force_moment(const Signal& x, int order, GroupKind group);
/// (1/|G|) sum_g (g.x)^{tensor d-1} tensor conj(g.x) for complex input.
DenseTensor unitary_moment(std::span<const Complex> x, int order, GroupKind group);
DenseTensor unitary_moment(const Signal& x, int order, GroupKind group);

// JSON: {group, n, sigma_used, m1, power:[...], third:[{k1,k2,re,im},...]}
void write_moments_json(const InvariantMoments& m, const std::filesystem::path& path);
InvariantMoments read_moments_json(const std::filesystem::path& path);

}  // namespace dmra
