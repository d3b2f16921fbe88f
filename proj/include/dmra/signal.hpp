// Real signals, the unitary DFT, and the dihedral group action on both domains.
//
// Conventions used throughout the library:
//   f[l] = n^{-1/2} sum_j x[j] exp(-2 pi i j l / n)        (unitary DFT)
//   (r . x)[i] = x[(i + 1) mod n]                          (left rotation)
//   (s . x)[i] = x[(-i) mod n]                             (reflection fixing x[0])
//   g = r^rot s^refl, so the reflection is applied first.
// Under these conventions r multiplies f[l] by exp(+2 pi i l / n) and s maps
// f[l] to f[n - l].

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dmra {

using Complex = std::complex<double>;

enum class GroupKind { cyclic, dihedral };

std::string to_string(GroupKind kind);
GroupKind parse_group(const std::string& name);

/// Order of Z_n or D_n.
inline int group_order(GroupKind kind, int n) { return kind == GroupKind::cyclic ? n : 2 * n; }

/// A real signal of fixed length n >= 2 with finite entries.
class Signal {
public:
    explicit Signal(std::vector<double> values);

    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const { return values_; }
    double norm() const;

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> values_;
};

/// Fourier coefficients indexed l = 0..n-1. When `real_origin` is set the
/// coefficients are the transform of a real signal (conjugate symmetric).
struct FourierSignal {
    std::vector<Complex> coeffs;
    bool real_origin = false;

    int size() const { return static_cast<int>(coeffs.size()); }
    const Complex& operator[](int l) const { return coeffs[static_cast<std::size_t>(l)]; }
    /// Coefficient at index l reduced mod n (negative indices allowed).
    const Complex& at_mod(int l) const;

    /// True when coeffs[n-l] == conj(coeffs[l]) within `rel_tol` of the largest modulus.
    bool is_conjugate_symmetric(double rel_tol = 1e-12) const;
};

/// r^rot s^refl in D_n (or r^rot in Z_n when refl is false).
struct GroupElement {
    int rot = 0;
    bool refl = false;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Product g*h, i.e. the element acting as g(h(x)).
GroupElement compose(GroupElement g, GroupElement h, int n);
GroupElement inverse(GroupElement g, int n);

/// All elements in canonical order: rot ascending, refl=false before refl=true.
std::vector<GroupElement> group_elements(GroupKind kind, int n);

Signal apply_group(GroupElement g, const Signal& x);
FourierSignal apply_group_fourier(GroupElement g, const FourierSignal& f);

/// Twiddle table for a fixed length; reuse it when transforming many vectors.
class DftPlan {
public:
    explicit DftPlan(int n);

    int size() const { return n_; }

    void forward(std::span<const double> x, std::span<Complex> out) const;
    void forward(std::span<const Complex> x, std::span<Complex> out) const;
    void inverse(std::span<const Complex> f, std::span<Complex> out) const;

private:
    int n_;
    double scale_;
    std::vector<Complex> twiddle_;  // exp(-2 pi i k / n)
};

FourierSignal dft(const Signal& x);
/// Inverse transform; the imaginary residue is discarded, so `f` should be
/// conjugate symmetric for an exact round trip.
Signal idft(const FourierSignal& f);

/// i.i.d. standard normal entries from a seeded stream, scaled to unit l2 norm.
Signal random_unit_signal(int n, std::uint64_t seed);

/// Deterministic 64-bit mixing used to derive independent per-task streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// CSV formats: signals as `index,value`, Fourier coefficients as `index,re,im`.
void write_signal_csv(const Signal& x, const std::filesystem::path& path);
Signal read_signal_csv(const std::filesystem::path& path);
void write_fourier_csv(const FourierSignal& f, const std::filesystem::path& path);
FourierSignal read_fourier_csv(const std::filesystem::path& path);

}  // namespace dmra
