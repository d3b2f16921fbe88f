#include "dmra/theory_checks.hpp"
#include "dmra/invariants.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

using namespace dmra;

TEST_CASE("form rows encode x_i + x_j - x_{i+j}")
{
    const auto fm = form_matrix(4);
    CHECK(fm.pairs == std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}, {2, 2}});
    CHECK(fm.rows[0] == std::vector<int>{2, -1, 0, 0});
    CHECK(fm.rows[1] == std::vector<int>{1, 1, -1, 0});
    CHECK(fm.rows[2] == std::vector<int>{1, 0, 1, -1});
    CHECK(fm.rows[3] == std::vector<int>{0, 2, 0, -1});
    for (int k = 2; k <= 20; ++k) {
        for (const auto& row : form_matrix(k).rows) {
            long dot = 0;
            for (std::size_t c = 0; c < row.size(); ++c) {
                CHECK(row[c] >= -1);
                CHECK(row[c] <= 2);
                dot += static_cast<long>(c + 1) * row[c];
            }
            CHECK(dot == 0);
        }
    }
    CHECK_THROWS_AS(form_matrix(1), std::invalid_argument);
}

TEST_CASE("rank is k - 1")
{
    CHECK(xij_rank(2).rank == 1);
    CHECK(xij_rank(3).rank == 2);
    for (int k = 2; k <= 50; ++k) {
        const auto r = xij_rank(k);
        CHECK(r.rank == k - 1);
        CHECK(r.spans_hyperplane);
        CHECK(r.orthogonal);
    }
}

TEST_CASE("excessive spanning holds from k = 4 and fails at k = 3")
{
    CHECK_FALSE(is_excessive(2));
    CHECK_FALSE(is_excessive(3));
    for (int k = 4; k <= 16; ++k) CHECK(is_excessive(k));
}

TEST_CASE("all-nonzero annihilators")
{
    for (int k = 4; k <= 20; ++k) {
        const auto m = find_nonzero_annihilator(k);
        const auto fm = form_matrix(k);
        REQUIRE(m.size() == fm.rows.size());
        for (auto v : m) CHECK(v != 0);
        CHECK(annihilates(fm, m));
    }
    CHECK(find_nonzero_annihilator(10).size() == 25);
    CHECK_THROWS_AS(find_nonzero_annihilator(3), std::invalid_argument);
    const auto k3 = search_nonzero_annihilator(3);
    CHECK_FALSE(k3.exists);
    CHECK(k3.nullity == 0);
}

TEST_CASE("annihilators kill the forms on random integer points")
{
    const int k = 9;
    const auto m = find_nonzero_annihilator(k);
    const auto fm = form_matrix(k);
    std::mt19937 rng(1);
    std::uniform_int_distribution<long long> d(-1000, 1000);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<long long> t(static_cast<std::size_t>(k));
        for (auto& v : t) v = d(rng);
        long long total = 0;
        for (std::size_t p = 0; p < fm.pairs.size(); ++p) {
            const auto [i, j] = fm.pairs[p];
            total += m[p] * (t[static_cast<std::size_t>(i - 1)] + t[static_cast<std::size_t>(j - 1)] -
                             t[static_cast<std::size_t>(i + j - 1)]);
        }
        CHECK(total == 0);
    }
    auto broken = m;
    broken[0] += 1;
    CHECK_FALSE(annihilates(fm, broken));
}

TEST_CASE("condition probe on generic signals finds nothing")
{
    int hits = 0;
    for (int s = 0; s < 50; ++s) {
        const auto f = dft(random_unit_signal(13, derive_seed(900, s)));
        if (!condition_star_probe(f, 3, 3).empty()) ++hits;
    }
    CHECK(hits <= 1);
}

TEST_CASE("condition probe flags rational phases")
{
    std::vector<Complex> c(13, Complex(1.0, 0.0));
    const FourierSignal f{c, true};
    const auto rel = condition_star_probe(f, 2, 2);
    CHECK_FALSE(rel.empty());
    for (const auto& r : rel) CHECK(r.exponents.front() > 0);
}

TEST_CASE("condition probe reports a planted relation")
{
    // Choose theta_1 and theta_2 so that a_{1,1} = conj(a_{1,2}):
    // 2 t1 - t2 = -(t1 + t2 - t3), i.e. t3 = 3 t1.
    const int n = 13;
    std::vector<Complex> c(n);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::vector<double> theta(7);
    for (auto& t : theta) t = u(rng);
    theta[3] = 3.0 * theta[1];
    c[0] = 0.4;
    for (int l = 1; l <= 6; ++l) {
        c[static_cast<std::size_t>(l)] = std::polar(1.0 + 0.1 * l, theta[static_cast<std::size_t>(l)]);
        c[static_cast<std::size_t>(n - l)] = std::conj(c[static_cast<std::size_t>(l)]);
    }
    const FourierSignal f{c, true};
    CHECK(std::abs(phase_triple(f, 1, 1) - std::conj(phase_triple(f, 1, 2))) < 1e-12);
    const auto rel = condition_star_probe(f, 1, 2);
    bool found = false;
    for (const auto& r : rel) {
        found = found || (r.pairs == std::vector<std::pair<int, int>>{{1, 1}, {1, 2}} && r.exponents == std::vector<int>{1, 1});
    }
    CHECK(found);
}

TEST_CASE("probe requires nonvanishing coefficients")
{
    const FourierSignal f{{1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0}, false};
    CHECK_THROWS_AS(condition_star_probe(f, 1, 1), std::domain_error);
}

TEST_CASE("counterexample checks pass")
{
    const auto checks = verify_counterexamples();
    CHECK(checks.size() == 6);
    for (const auto& c : checks) {
        INFO(c.name << " " << c.pair << ": " << c.witness);
        CHECK(c.pass);
    }
}

TEST_CASE("theory report json")
{
    const auto checks = verify_theory(6);
    for (const auto& c : checks) CHECK(c.pass);
    const auto p = std::filesystem::temp_directory_path() / "dmra_theory.json";
    write_theory_report(checks, p);
    std::ifstream in(p);
    const auto j = nlohmann::json::parse(in);
    REQUIRE(j.size() == checks.size());
    CHECK(j[0].at("name") == "hyperplane_span");
    CHECK(j[0].at("k") == 2);
    CHECK(j.back().contains("pair"));
    CHECK(j.back().at("pass") == true);
}
