#include "dmra/signal.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace dmra;

namespace {

std::filesystem::path temp_path(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "dmra_test_signal";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::vector<double> values(const Signal& x) { return {x.values().begin(), x.values().end()}; }

}  // namespace

TEST_CASE("dft matches the direct-sum definition")
{
    for (int n : {2, 3, 5, 8, 17, 64}) {
        const Signal x = random_unit_signal(n, 11 + n);
        const auto f = dft(x);
        const auto ref = oracle::dft(x);
        CHECK(f.real_origin);
        for (int l = 0; l < n; ++l) CHECK(std::abs(f[l] - ref[static_cast<std::size_t>(l)]) < 1e-13);
    }
}

TEST_CASE("dft is unitary and inverts")
{
    const Signal x = random_unit_signal(37, 5);
    const auto f = dft(x);
    double energy = 0.0;
    for (const auto& c : f.coeffs) energy += std::norm(c);
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(f.is_conjugate_symmetric());
    const Signal back = idft(f);
    for (int i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-13));
}

TEST_CASE("a delta at 0 has a flat spectrum")
{
    const Signal d(std::vector<double>{1.0, 0.0, 0.0, 0.0});
    for (const auto& c : dft(d).coeffs) CHECK(std::abs(c - Complex(0.5, 0.0)) < 1e-15);
}

TEST_CASE("group action follows the index formula")
{
    const Signal x = random_unit_signal(9, 3);
    for (const auto& g : group_elements(GroupKind::dihedral, 9)) {
        CHECK(values(apply_group(g, x)) == oracle::act(g.rot, g.refl, values(x)));
    }
}

TEST_CASE("compose and inverse agree with repeated action")
{
    const int n = 7;
    const Signal x = random_unit_signal(n, 8);
    const auto els = group_elements(GroupKind::dihedral, n);
    CHECK(els.size() == 14);
    CHECK(group_elements(GroupKind::cyclic, n).size() == 7);
    for (const auto& g : els) {
        for (const auto& h : els) {
            CHECK(apply_group(compose(g, h, n), x) == apply_group(g, apply_group(h, x)));
        }
        CHECK(apply_group(compose(g, inverse(g, n), n), x) == x);
        if (g.refl) CHECK(inverse(g, n) == g);
    }
}

TEST_CASE("the Fourier action matches transforming the acted signal")
{
    const int n = 12;
    const Signal x = random_unit_signal(n, 21);
    const auto f = dft(x);
    for (const auto& g : group_elements(GroupKind::dihedral, n)) {
        const auto lhs = dft(apply_group(g, x));
        const auto rhs = apply_group_fourier(g, f);
        for (int l = 0; l < n; ++l) CHECK(std::abs(lhs[l] - rhs[l]) < 1e-13);
    }
}

TEST_CASE("random unit signals are seeded and normalized")
{
    const auto a = random_unit_signal(50, 42);
    const auto b = random_unit_signal(50, 42);
    const auto c = random_unit_signal(50, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("signal validation")
{
    CHECK_THROWS_AS(Signal(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Signal(std::vector<double>{1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(Signal(std::vector<double>{1.0, INFINITY}), std::invalid_argument);
    CHECK_THROWS_AS(random_unit_signal(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(parse_group("octahedral"), std::invalid_argument);
    CHECK(parse_group("cyclic") == GroupKind::cyclic);
    CHECK(to_string(GroupKind::dihedral) == "dihedral");
}

TEST_CASE("signal csv round trip is exact")
{
    const auto x = random_unit_signal(23, 9);
    const auto p = temp_path("x.csv");
    write_signal_csv(x, p);
    CHECK(read_signal_csv(p) == x);

    const auto f = dft(x);
    const auto q = temp_path("f.csv");
    write_fourier_csv(f, q);
    const auto g = read_fourier_csv(q);
    CHECK(g.coeffs == f.coeffs);
}

TEST_CASE("malformed signal csv is rejected with the path in the message")
{
    const auto p = temp_path("bad.csv");
    {
        std::ofstream(p) << "index,value\n0,1.0\n2,0.5\n";
    }
    try {
        read_signal_csv(p);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
    }
    {
        std::ofstream(p) << "idx,val\n0,1\n1,2\n";
    }
    CHECK_THROWS_AS(read_signal_csv(p), std::invalid_argument);
    {
        std::ofstream(p) << "index,value\n0,abc\n1,2\n";
    }
    CHECK_THROWS_AS(read_signal_csv(p), std::invalid_argument);
    CHECK_THROWS_AS(read_signal_csv(temp_path("missing.csv")), std::invalid_argument);
}
