#include "dmra/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dmra {

std::string to_string(GroupKind kind) { return kind == GroupKind::cyclic ? "cyclic" : "dihedral"; }

GroupKind parse_group(const std::string& name)
{
    if (name == "cyclic") return GroupKind::cyclic;
    if (name == "dihedral") return GroupKind::dihedral;
    throw std::invalid_argument("unknown group '" + name + "' (expected cyclic or dihedral)");
}

Signal::Signal(std::vector<double> values) : values_(std::move(values))
{
    if (values_.size() < 2) throw std::invalid_argument("signal length must be at least 2");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("signal entries must be finite");
    }
}

double Signal::norm() const
{
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

const Complex& FourierSignal::at_mod(int l) const
{
    const int n = size();
    const int idx = ((l % n) + n) % n;
    return coeffs[static_cast<std::size_t>(idx)];
}

bool FourierSignal::is_conjugate_symmetric(double rel_tol) const
{
    const int n = size();
    double scale = 0.0;
    for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
    const double tol = rel_tol * std::max(scale, 1.0);
    for (int l = 0; l < n; ++l) {
        if (std::abs(at_mod(n - l) - std::conj(coeffs[static_cast<std::size_t>(l)])) > tol) return false;
    }
    return true;
}

GroupElement compose(GroupElement g, GroupElement h, int n)
{
    // r^a s^e r^b s^f = r^{a + (-1)^e b} s^{e xor f}
    const int b = g.refl ? -h.rot : h.rot;
    return {((g.rot + b) % n + n) % n, g.refl != h.refl};
}

GroupElement inverse(GroupElement g, int n)
{
    if (g.refl) return g;  // reflections are involutions
    return {(n - g.rot) % n, false};
}

std::vector<GroupElement> group_elements(GroupKind kind, int n)
{
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(group_order(kind, n)));
    for (int rot = 0; rot < n; ++rot) {
        out.push_back({rot, false});
        if (kind == GroupKind::dihedral) out.push_back({rot, true});
    }
    return out;
}

Signal apply_group(GroupElement g, const Signal& x)
{
    const int n = x.size();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int shifted = (i + g.rot) % n;
        const int src = g.refl ? (n - shifted) % n : shifted;
        out[static_cast<std::size_t>(i)] = x[src];
    }
    return Signal(std::move(out));
}

FourierSignal apply_group_fourier(GroupElement g, const FourierSignal& f)
{
    const int n = f.size();
    FourierSignal out{std::vector<Complex>(static_cast<std::size_t>(n)), f.real_origin};
    for (int l = 0; l < n; ++l) {
        const Complex src = g.refl ? f.at_mod(n - l) : f[l];
        const int k = static_cast<int>((static_cast<long long>(g.rot) * l) % n);
        out.coeffs[static_cast<std::size_t>(l)] = std::polar(1.0, 2.0 * std::numbers::pi * k / n) * src;
    }
    return out;
}

DftPlan::DftPlan(int n) : n_(n), scale_(1.0 / std::sqrt(static_cast<double>(n))), twiddle_(static_cast<std::size_t>(n))
{
    if (n < 1) throw std::invalid_argument("DFT length must be positive");
    for (int k = 0; k < n; ++k) twiddle_[static_cast<std::size_t>(k)] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);
}

void DftPlan::forward(std::span<const double> x, std::span<Complex> out) const
{
    for (int l = 0; l < n_; ++l) {
        Complex acc{0.0, 0.0};
        int k = 0;
        for (int j = 0; j < n_; ++j) {
            acc += x[static_cast<std::size_t>(j)] * twiddle_[static_cast<std::size_t>(k)];
            k += l;
            if (k >= n_) k -= n_;
        }
        out[static_cast<std::size_t>(l)] = acc * scale_;
    }
}

void DftPlan::forward(std::span<const Complex> x, std::span<Complex> out) const
{
    for (int l = 0; l < n_; ++l) {
        Complex acc{0.0, 0.0};
        int k = 0;
        for (int j = 0; j < n_; ++j) {
            acc += x[static_cast<std::size_t>(j)] * twiddle_[static_cast<std::size_t>(k)];
            k += l;
            if (k >= n_) k -= n_;
        }
        out[static_cast<std::size_t>(l)] = acc * scale_;
    }
}

void DftPlan::inverse(std::span<const Complex> f, std::span<Complex> out) const
{
    for (int j = 0; j < n_; ++j) {
        Complex acc{0.0, 0.0};
        int k = 0;
        for (int l = 0; l < n_; ++l) {
            acc += f[static_cast<std::size_t>(l)] * std::conj(twiddle_[static_cast<std::size_t>(k)]);
            k += j;
            if (k >= n_) k -= n_;
        }
        out[static_cast<std::size_t>(j)] = acc * scale_;
    }
}

FourierSignal dft(const Signal& x)
{
    DftPlan plan(x.size());
    FourierSignal f{std::vector<Complex>(static_cast<std::size_t>(x.size())), true};
    plan.forward(x.values(), f.coeffs);
    return f;
}

Signal idft(const FourierSignal& f)
{
    DftPlan plan(f.size());
    std::vector<Complex> tmp(static_cast<std::size_t>(f.size()));
    plan.inverse(f.coeffs, tmp);
    std::vector<double> out(tmp.size());
    std::transform(tmp.begin(), tmp.end(), out.begin(), [](const Complex& c) { return c.real(); });
    return Signal(std::move(out));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 finalizer applied to a combination of both words
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Signal random_unit_signal(int n, std::uint64_t seed)
{
    if (n < 2) throw std::invalid_argument("signal length must be at least 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    double norm = 0.0;
    while (norm == 0.0) {
        for (auto& e : v) e = normal(rng);
        double s = 0.0;
        for (double e : v) s += e * e;
        norm = std::sqrt(s);
    }
    for (auto& e : v) e /= norm;
    return Signal(std::move(v));
}

namespace {

std::ifstream open_for_read(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path, const std::string& header)
{
    auto in = open_for_read(path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("'" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
        throw std::invalid_argument("'" + path.string() + "': expected header '" + header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

double parse_double(const std::string& s, const std::filesystem::path& path)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("'" + path.string() + "': malformed number '" + s + "'");
    }
}

void check_index(const std::string& field, int expected, const std::filesystem::path& path)
{
    if (parse_double(field, path) != expected) {
        throw std::invalid_argument("'" + path.string() + "': row " + std::to_string(expected) + " has index " + field);
    }
}

}  // namespace

void write_signal_csv(const Signal& x, const std::filesystem::path& path)
{
    auto out = open_for_write(path);
    out << "index,value\n";
    for (int i = 0; i < x.size(); ++i) out << i << ',' << format_double(x[i]) << '\n';
}

Signal read_signal_csv(const std::filesystem::path& path)
{
    const auto rows = read_csv_rows(path, "index,value");
    std::vector<double> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw std::invalid_argument("'" + path.string() + "': expected 2 fields per row");
        check_index(rows[i][0], static_cast<int>(i), path);
        values.push_back(parse_double(rows[i][1], path));
    }
    try {
        return Signal(std::move(values));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("'" + path.string() + "': " + e.what());
    }
}

void write_fourier_csv(const FourierSignal& f, const std::filesystem::path& path)
{
    auto out = open_for_write(path);
    out << "index,re,im\n";
    for (int l = 0; l < f.size(); ++l) {
        out << l << ',' << format_double(f[l].real()) << ',' << format_double(f[l].imag()) << '\n';
    }
}

FourierSignal read_fourier_csv(const std::filesystem::path& path)
{
    const auto rows = read_csv_rows(path, "index,re,im");
    FourierSignal f;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw std::invalid_argument("'" + path.string() + "': expected 3 fields per row");
        check_index(rows[i][0], static_cast<int>(i), path);
        f.coeffs.emplace_back(parse_double(rows[i][1], path), parse_double(rows[i][2], path));
    }
    if (f.coeffs.size() < 2) throw std::invalid_argument("'" + path.string() + "': need at least 2 coefficients");
    f.real_origin = f.is_conjugate_symmetric();
    return f;
}

}  // namespace dmra
