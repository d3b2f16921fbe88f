#include "dmra/invariants.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

using namespace dmra;

namespace {

using oracle::C;

// Number of third-moment index orbits by brute force over all (k1, k2).
std::size_t orbit_count(GroupKind group, int n)
{
    std::set<std::array<int, 3>> seen;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            std::array<int, 3> t{a, b, ((-a - b) % n + n) % n};
            std::sort(t.begin(), t.end());
            if (group == GroupKind::dihedral) {
                std::array<int, 3> neg{(n - t[0]) % n, (n - t[1]) % n, (n - t[2]) % n};
                std::sort(neg.begin(), neg.end());
                t = std::min(t, neg);
            }
            seen.insert(t);
        }
    }
    return seen.size();
}

}  // namespace

TEST_CASE("canonical index counts at n = 5")
{
    CHECK(distinct_indices(GroupKind::cyclic, 5).size() == 7);
    CHECK(distinct_indices(GroupKind::dihedral, 5).size() == 5);
}

TEST_CASE("index counts match brute-force orbit counting and the Burnside formula")
{
    for (int n = 2; n <= 40; ++n) {
        const auto cyc = distinct_indices(GroupKind::cyclic, n).size();
        CHECK(cyc == orbit_count(GroupKind::cyclic, n));
        CHECK(cyc == static_cast<std::size_t>((n * n + 3 * n + 2 * std::gcd(3, n)) / 6));
        CHECK(distinct_indices(GroupKind::dihedral, n).size() == orbit_count(GroupKind::dihedral, n));
    }
    const double n = 100.0;
    CHECK(distinct_indices(GroupKind::cyclic, 100).size() / (n * n / 6) == doctest::Approx(1.0).epsilon(0.2));
    CHECK(distinct_indices(GroupKind::dihedral, 100).size() / (n * n / 12) == doctest::Approx(1.0).epsilon(0.2));
    CHECK_THROWS_AS(distinct_indices(GroupKind::cyclic, 1), std::invalid_argument);
}

TEST_CASE("index table maps every permutation and negation consistently")
{
    const int n = 11;
    const IndexTable cyc(GroupKind::cyclic, n), dih(GroupKind::dihedral, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int c = ((-a - b) % n + n) % n;
            CHECK(cyc.position(a, b) == cyc.position(b, a));
            CHECK(cyc.position(a, b) == cyc.position(b, c));
            CHECK(dih.position(a, b) == dih.position(-a, -b));
            const auto k = cyc.indices()[static_cast<std::size_t>(cyc.position(a, b))];
            std::array<int, 3> lhs{a, b, c}, rhs{k.k1, k.k2, k.k3(n)};
            std::sort(lhs.begin(), lhs.end());
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("third_at evaluates the defining formula at any index")
{
    const int n = 10;
    const auto x = random_unit_signal(n, 77);
    const auto f = oracle::dft(x);
    auto F = [&](int l) { return f[static_cast<std::size_t>((l % n + n) % n)]; };
    const auto cyc = compute_moments(x, GroupKind::cyclic);
    const auto dih = compute_moments(x, GroupKind::dihedral);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            CHECK(std::abs(cyc.third_at(a, b) - F(a) * F(b) * std::conj(F(a + b))) < 1e-13);
            const C d = 0.5 * (F(a) * F(b) * F(-a - b) + F(-a) * F(-b) * F(a + b));
            CHECK(std::abs(dih.third_at(a, b) - d) < 1e-13);
        }
    }
    for (int l = 0; l < n; ++l) CHECK(cyc.power[static_cast<std::size_t>(l)] == doctest::Approx(std::norm(F(l))));
    CHECK(cyc.m1 == doctest::Approx(F(0).real()));
}

TEST_CASE("Fourier invariants equal group-averaged tensors after a change of basis")
{
    for (int n : {4, 5, 6, 9}) {
        for (int s = 0; s < 3; ++s) {
            const auto x = random_unit_signal(n, derive_seed(n, s));
            for (auto g : {GroupKind::cyclic, GroupKind::dihedral}) {
                const auto t1 = oracle::fourier_tensor(brute_force_moment(x, 1, g));
                const auto t2 = oracle::fourier_tensor(brute_force_moment(x, 2, g));
                const auto t3 = oracle::fourier_tensor(brute_force_moment(x, 3, g));
                CHECK(oracle::tensor_rel_error(compute_moments(x, g), t1, t2, t3) < 1e-10);
            }
        }
    }
}

TEST_CASE("off-diagonal Fourier tensor entries vanish for the cyclic average")
{
    const int n = 6;
    const auto x = random_unit_signal(n, 4);
    const auto t3 = oracle::fourier_tensor(brute_force_moment(x, 3, GroupKind::cyclic));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if ((a + b + c) % n != 0) CHECK(std::abs(t3[static_cast<std::size_t>((a * n + b) * n + c)]) < 1e-12);
}

TEST_CASE("the conjugated-slot oracle is Hermitian with a flat diagonal")
{
    const int n = 5;
    const auto f = oracle::dft(random_unit_signal(n, 6));
    // Averaging y y^* over all cyclic index shifts of a complex vector.
    const auto u = unitary_moment(std::span<const C>(f), 2, GroupKind::cyclic);
    double energy = 0.0;
    for (const auto& c : f) energy += std::norm(c);
    for (int a = 0; a < n; ++a) {
        CHECK(std::abs(u.data[static_cast<std::size_t>(a * n + a)] - C(energy / n, 0.0)) < 1e-14);
        for (int b = 0; b < n; ++b) {
            CHECK(std::abs(u.data[static_cast<std::size_t>(a * n + b)] - std::conj(u.data[static_cast<std::size_t>(b * n + a)])) < 1e-14);
        }
    }
    // On a real signal the conjugated slot changes nothing.
    const auto x = random_unit_signal(n, 6);
    const auto plain = unitary_moment(x, 3, GroupKind::dihedral);
    const auto bf = brute_force_moment(x, 3, GroupKind::dihedral);
    for (std::size_t i = 0; i < plain.data.size(); ++i) CHECK(std::abs(plain.data[i] - bf.data[i]) < 1e-14);
    CHECK_THROWS_AS(brute_force_moment(random_unit_signal(65, 0), 2, GroupKind::cyclic), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_moment(x, 4, GroupKind::cyclic), std::invalid_argument);
}

TEST_CASE("moments are invariant under the group")
{
    for (int n : {4, 7, 12}) {
        const auto x = random_unit_signal(n, 100 + n);
        const auto dm = compute_moments(x, GroupKind::dihedral);
        const auto cm = compute_moments(x, GroupKind::cyclic);
        for (const auto& g : group_elements(GroupKind::dihedral, n)) {
            const auto y = apply_group(g, x);
            CHECK(max_abs_difference(compute_moments(y, GroupKind::dihedral), dm) < 1e-12);
            if (!g.refl) CHECK(max_abs_difference(compute_moments(y, GroupKind::cyclic), cm) < 1e-12);
        }
    }
}

TEST_CASE("reflection conjugates the cyclic bispectrum")
{
    const int n = 9;
    const auto x = random_unit_signal(n, 12);
    const auto a = compute_moments(x, GroupKind::cyclic);
    const auto b = compute_moments(apply_group({0, true}, x), GroupKind::cyclic);
    for (std::size_t i = 0; i < a.third.size(); ++i) CHECK(std::abs(b.third[i] - std::conj(a.third[i])) < 1e-13);
}

TEST_CASE("dihedral third moments of a real signal are real")
{
    const auto m = compute_moments(random_unit_signal(14, 2), GroupKind::dihedral);
    for (const auto& v : m.third) CHECK(std::abs(v.imag()) < 1e-14);
}

TEST_CASE("polynomial power agrees with the power spectrum on real signals only")
{
    const auto f = dft(random_unit_signal(8, 1));
    const auto pp = polynomial_power(f);
    const auto ps = power_spectrum(f);
    for (std::size_t l = 0; l < pp.size(); ++l) CHECK(std::abs(pp[l] - ps[l]) < 1e-14);
    const FourierSignal g{{1.0, 0.5, 0.0, 0.0, 2.0}, false};
    CHECK(std::abs(polynomial_power(g)[1] - C(1.0, 0.0)) < 1e-15);
    CHECK(power_spectrum(g)[1] == doctest::Approx(0.25));
}

TEST_CASE("phase triples need nonvanishing coefficients")
{
    const FourierSignal f{{1.0, 1.0, 0.0, 0.0, 1.0}, true};
    CHECK_THROWS_AS(phase_triple(f, 1, 1), std::domain_error);
    const auto g = dft(random_unit_signal(9, 3));
    CHECK(std::abs(std::abs(phase_triple(g, 1, 2)) - 1.0) < 1e-14);
    CHECK(phase_cosine(g, 1, 2) == doctest::Approx(phase_triple(g, 1, 2).real()));
}

TEST_CASE("moments json round trip and validation")
{
    const auto dir = std::filesystem::temp_directory_path() / "dmra_test_inv";
    std::filesystem::create_directories(dir);
    const auto m = compute_moments(random_unit_signal(13, 5), GroupKind::dihedral);
    write_moments_json(m, dir / "m.json");
    const auto r = read_moments_json(dir / "m.json");
    CHECK(r.group == m.group);
    CHECK(r.n == m.n);
    CHECK(r.m1 == m.m1);
    CHECK(r.power == m.power);
    CHECK(r.third == m.third);

    std::ofstream(dir / "bad.json") << R"({"group":"dihedral","n":5,"m1":0,"power":[1,2],"third":[]})";
    CHECK_THROWS_AS(read_moments_json(dir / "bad.json"), std::invalid_argument);
    std::ofstream(dir / "junk.json") << "{not json";
    CHECK_THROWS_AS(read_moments_json(dir / "junk.json"), std::invalid_argument);
    CHECK_THROWS_AS(max_abs_difference(m, compute_moments(random_unit_signal(13, 5), GroupKind::cyclic)),
                    std::invalid_argument);
}
