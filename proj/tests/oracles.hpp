// Independent reference computations used only by the tests.

#pragma once

#include "dmra/invariants.hpp"
#include "dmra/signal.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using C = std::complex<double>;

// Textbook unitary DFT written out as a direct double sum.
inline std::vector<C> dft(const std::vector<C>& x)
{
    const std::size_t n = x.size();
    std::vector<C> f(n);
    for (std::size_t l = 0; l < n; ++l) {
        C acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>((j * l) % n) / static_cast<double>(n);
            acc += x[j] * C(std::cos(ang), std::sin(ang));
        }
        f[l] = acc / std::sqrt(static_cast<double>(n));
    }
    return f;
}

inline std::vector<C> dft(const dmra::Signal& x)
{
    return dft(std::vector<C>(x.values().begin(), x.values().end()));
}

// (r^a s^e x)[i] = x[(-1)^e i + a] read straight off the definition.
inline std::vector<double> act(int rot, bool refl, const std::vector<double>& x)
{
    const int n = static_cast<int>(x.size());
    std::vector<double> y(x.size());
    for (int i = 0; i < n; ++i) {
        const int src = ((refl ? -i - rot : i + rot) % n + n) % n;
        y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(src)];
    }
    return y;
}

// Applies the unitary DFT along every axis of a dense n^order tensor.
inline std::vector<C> fourier_tensor(const dmra::DenseTensor& t)
{
    const int n = t.n;
    std::vector<C> data(t.data.begin(), t.data.end());
    std::size_t stride = 1;
    for (int axis = t.order - 1; axis >= 0; --axis) {
        std::vector<C> out(data.size());
        const std::size_t block = stride * static_cast<std::size_t>(n);
        for (std::size_t base = 0; base < data.size(); base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                std::vector<C> line(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) line[static_cast<std::size_t>(i)] = data[base + off + stride * static_cast<std::size_t>(i)];
                const auto f = dft(line);
                for (int i = 0; i < n; ++i) out[base + off + stride * static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)];
            }
        }
        data.swap(out);
        stride = block;
    }
    return data;
}

// Largest deviation of the Fourier-domain invariants from the transformed
// tensors, relative to the largest tensor entry compared.
inline double tensor_rel_error(const dmra::InvariantMoments& got, const std::vector<C>& t1, const std::vector<C>& t2, const std::vector<C>& t3)
{
    const int n = got.n;
    double scale = 0.0, err = 0.0;
    auto upd = [&](C a, C b) {
        err = std::max(err, std::abs(a - b));
        scale = std::max(scale, std::abs(b));
    };
    upd(got.m1, t1[0]);
    for (int l = 0; l < n; ++l) upd(got.power[static_cast<std::size_t>(l)], t2[static_cast<std::size_t>(l * n + (n - l) % n)]);
    for (std::size_t i = 0; i < got.indices.size(); ++i) {
        const auto k = got.indices[i];
        const std::size_t flat = (static_cast<std::size_t>(k.k1) * n + k.k2) * n + k.k3(n);
        upd(got.third[i], t3[flat]);
    }
    return err / scale;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace oracle
