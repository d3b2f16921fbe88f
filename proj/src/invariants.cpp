#include "dmra/invariants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace dmra {

namespace {

using Triple = std::array<int, 3>;

Triple sorted_triple(int a, int b, int c)
{
    Triple t{a, b, c};
    std::sort(t.begin(), t.end());
    return t;
}

int mod(int a, int n) { return ((a % n) + n) % n; }

Triple canonical_triple(GroupKind group, int n, int k1, int k2)
{
    k1 = mod(k1, n);
    k2 = mod(k2, n);
    const int k3 = mod(-k1 - k2, n);
    Triple t = sorted_triple(k1, k2, k3);
    if (group == GroupKind::dihedral) {
        const Triple neg = sorted_triple(mod(-k1, n), mod(-k2, n), mod(-k3, n));
        t = std::min(t, neg);
    }
    return t;
}

void check_length(int n)
{
    if (n < 2) throw std::invalid_argument("signal length must be at least 2, got " + std::to_string(n));
}

}  // namespace

std::vector<TripleIndex> distinct_indices(GroupKind group, int n)
{
    check_length(n);
    std::vector<TripleIndex> out;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            const int c = mod(-a - b, n);
            if (c < b) continue;
            if (group == GroupKind::dihedral) {
                const Triple t{a, b, c};
                if (sorted_triple(mod(-a, n), mod(-b, n), mod(-c, n)) < t) continue;
            }
            out.push_back({a, b});
        }
    }
    return out;
}

IndexTable::IndexTable(GroupKind group, int n)
    : n_(n), indices_(distinct_indices(group, n)), lookup_(static_cast<std::size_t>(n) * n, -1)
{
    std::map<std::pair<int, int>, int> pos;
    for (std::size_t i = 0; i < indices_.size(); ++i) pos[{indices_[i].k1, indices_[i].k2}] = static_cast<int>(i);
    for (int k1 = 0; k1 < n; ++k1) {
        for (int k2 = 0; k2 < n; ++k2) {
            const Triple t = canonical_triple(group, n, k1, k2);
            lookup_[static_cast<std::size_t>(k1) * n + k2] = pos.at({t[0], t[1]});
        }
    }
}

int IndexTable::position(int k1, int k2) const
{
    return lookup_[static_cast<std::size_t>(mod(k1, n_)) * n_ + mod(k2, n_)];
}

Complex InvariantMoments::third_at(int k1, int k2) const
{
    const Triple t = canonical_triple(group, n, k1, k2);
    const auto it = std::lower_bound(indices.begin(), indices.end(), TripleIndex{t[0], t[1]});
    if (it == indices.end() || *it != TripleIndex{t[0], t[1]}) {
        throw std::logic_error("third-moment index missing from canonical set");
    }
    return third[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<double> power_spectrum(const FourierSignal& f)
{
    std::vector<double> p(f.coeffs.size());
    std::transform(f.coeffs.begin(), f.coeffs.end(), p.begin(), [](const Complex& c) { return std::norm(c); });
    return p;
}

std::vector<Complex> polynomial_power(const FourierSignal& f)
{
    const int n = f.size();
    std::vector<Complex> p(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) p[static_cast<std::size_t>(l)] = f[l] * f.at_mod(-l);
    return p;
}

std::vector<Complex> cyclic_bispectrum(const FourierSignal& f)
{
    const int n = f.size();
    const auto idx = distinct_indices(GroupKind::cyclic, n);
    std::vector<Complex> out;
    out.reserve(idx.size());
    for (const auto& k : idx) out.push_back(f[k.k1] * f[k.k2] * std::conj(f.at_mod(k.k1 + k.k2)));
    return out;
}

std::vector<Complex> dihedral_third_moment(const FourierSignal& f)
{
    const int n = f.size();
    const auto idx = distinct_indices(GroupKind::dihedral, n);
    std::vector<Complex> out;
    out.reserve(idx.size());
    for (const auto& k : idx) {
        const int k3 = k.k3(n);
        out.push_back(0.5 * (f[k.k1] * f[k.k2] * f[k3] + f.at_mod(-k.k1) * f.at_mod(-k.k2) * f.at_mod(-k3)));
    }
    return out;
}

InvariantMoments compute_moments(const FourierSignal& f, GroupKind group)
{
    check_length(f.size());
    InvariantMoments m;
    m.group = group;
    m.n = f.size();
    m.m1 = f[0].real();
    m.power = power_spectrum(f);
    m.indices = distinct_indices(group, m.n);
    m.third = group == GroupKind::cyclic ? cyclic_bispectrum(f) : dihedral_third_moment(f);
    return m;
}

InvariantMoments compute_moments(const Signal& x, GroupKind group) { return compute_moments(dft(x), group); }

double max_abs_difference(const InvariantMoments& a, const InvariantMoments& b)
{
    if (a.group != b.group || a.n != b.n) throw std::invalid_argument("moments describe different (group, n)");
    double d = std::abs(a.m1 - b.m1);
    for (std::size_t i = 0; i < a.power.size(); ++i) d = std::max(d, std::abs(a.power[i] - b.power[i]));
    for (std::size_t i = 0; i < a.third.size(); ++i) d = std::max(d, std::abs(a.third[i] - b.third[i]));
    return d;
}

Complex phase_triple(const FourierSignal& f, int i, int j)
{
    const Complex fi = f.at_mod(i), fj = f.at_mod(j), fij = f.at_mod(i + j);
    constexpr double zero_tol = 1e-9;
    if (std::abs(fi) <= zero_tol || std::abs(fj) <= zero_tol || std::abs(fij) <= zero_tol) {
        throw std::domain_error("phase triple (" + std::to_string(i) + "," + std::to_string(j) +
                                ") undefined: vanishing Fourier coefficient");
    }
    const Complex v = fi * fj * std::conj(fij);
    return v / std::abs(v);
}

double phase_cosine(const FourierSignal& f, int i, int j) { return phase_triple(f, i, j).real(); }

Complex& DenseTensor::at(std::span<const int> idx)
{
    std::size_t flat = 0;
    for (int k : idx) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(k);
    return data[flat];
}

const Complex& DenseTensor::at(std::span<const int> idx) const
{
    return const_cast<DenseTensor*>(this)->at(idx);
}

namespace {

std::vector<Complex> act(GroupElement g, std::span<const Complex> x)
{
    const int n = static_cast<int>(x.size());
    std::vector<Complex> out(x.size());
    for (int i = 0; i < n; ++i) {
        const int shifted = (i + g.rot) % n;
        out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(g.refl ? (n - shifted) % n : shifted)];
    }
    return out;
}

DenseTensor group_average(std::span<const Complex> x, int order, GroupKind group, bool conjugate_last)
{
    const int n = static_cast<int>(x.size());
    if (order < 1 || order > 3) throw std::invalid_argument("oracle tensors support orders 1..3");
    if (n > kOracleMaxLength) {
        throw std::invalid_argument("oracle tensors are limited to n <= " + std::to_string(kOracleMaxLength));
    }
    check_length(n);
    std::size_t total = 1;
    for (int d = 0; d < order; ++d) total *= static_cast<std::size_t>(n);
    DenseTensor t{n, order, std::vector<Complex>(total)};
    const auto elements = group_elements(group, n);
    for (const auto& g : elements) {
        const auto y = act(g, x);
        auto last = [&](int k) { return conjugate_last ? std::conj(y[static_cast<std::size_t>(k)]) : y[static_cast<std::size_t>(k)]; };
        if (order == 1) {
            for (int i = 0; i < n; ++i) t.data[static_cast<std::size_t>(i)] += last(i);
        } else if (order == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) t.data[static_cast<std::size_t>(i * n + j)] += y[static_cast<std::size_t>(i)] * last(j);
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Complex yij = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
                    const std::size_t base = (static_cast<std::size_t>(i) * n + j) * n;
                    for (int k = 0; k < n; ++k) t.data[base + static_cast<std::size_t>(k)] += yij * last(k);
                }
        }
    }
    const double inv = 1.0 / static_cast<double>(elements.size());
    for (auto& v : t.data) v *= inv;
    return t;
}

std::vector<Complex> to_complex(const Signal& x)
{
    return {x.values().begin(), x.values().end()};
}

}  // namespace

DenseTensor brute_force_moment(const Signal& x, int order, GroupKind group)
{
    const auto cx = to_complex(x);
    return group_average(cx, order, group, false);
}

DenseTensor unitary_moment(std::span<const Complex> x, int order, GroupKind group)
{
    return group_average(x, order, group, true);
}

DenseTensor unitary_moment(const Signal& x, int order, GroupKind group)
{
    const auto cx = to_complex(x);
    return group_average(cx, order, group, true);
}

void write_moments_json(const InvariantMoments& m, const std::filesystem::path& path)
{
    nlohmann::ordered_json j;
    j["group"] = to_string(m.group);
    j["n"] = m.n;
    j["sigma_used"] = m.sigma_used;
    j["m1"] = m.m1;
    j["power"] = m.power;
    auto third = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.indices.size(); ++i) {
        third.push_back({{"k1", m.indices[i].k1}, {"k2", m.indices[i].k2}, {"re", m.third[i].real()}, {"im", m.third[i].imag()}});
    }
    j["third"] = std::move(third);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

InvariantMoments read_moments_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "' for reading");
    InvariantMoments m;
    try {
        const auto j = nlohmann::json::parse(in);
        m.group = parse_group(j.at("group").get<std::string>());
        m.n = j.at("n").get<int>();
        check_length(m.n);
        m.sigma_used = j.value("sigma_used", 0.0);
        m.m1 = j.at("m1").get<double>();
        m.power = j.at("power").get<std::vector<double>>();
        m.indices = distinct_indices(m.group, m.n);
        const auto& third = j.at("third");
        if (m.power.size() != static_cast<std::size_t>(m.n) || third.size() != m.indices.size()) {
            throw std::invalid_argument("dimension mismatch for n=" + std::to_string(m.n));
        }
        for (std::size_t i = 0; i < third.size(); ++i) {
            const TripleIndex k{third[i].at("k1").get<int>(), third[i].at("k2").get<int>()};
            if (k != m.indices[i]) throw std::invalid_argument("third-moment entries out of canonical order");
            m.third.emplace_back(third[i].at("re").get<double>(), third[i].at("im").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("'" + path.string() + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("'" + path.string() + "': " + e.what());
    }
    return m;
}

}  // namespace dmra
