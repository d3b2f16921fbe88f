#include "dmra/recovery.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace dmra;

namespace {

RecoveryConfig config(GroupKind g, bool third_only = false)
{
    RecoveryConfig c;
    c.group = g;
    c.third_only = third_only;
    return c;
}

double fd_rel_error(const Signal& x, const InvariantMoments& target, const RecoveryConfig& cfg)
{
    const auto analytic = loss_and_gradient(x, target, cfg).gradient;
    const double h = 1e-6;
    double num = 0.0, den = 0.0;
    std::vector<double> v(x.values().begin(), x.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double keep = v[i];
        v[i] = keep + h;
        const double up = loss_and_gradient(Signal(v), target, cfg).loss;
        v[i] = keep - h;
        const double down = loss_and_gradient(Signal(v), target, cfg).loss;
        v[i] = keep;
        const double fd = (up - down) / (2 * h);
        num += (fd - analytic[i]) * (fd - analytic[i]);
        den += analytic[i] * analytic[i];
    }
    return std::sqrt(num / den);
}

Signal scaled(const Signal& x, double s)
{
    std::vector<double> v(x.values().begin(), x.values().end());
    for (auto& e : v) e *= s;
    return Signal(v);
}

}  // namespace

TEST_CASE("loss matches the weighted moment mismatch")
{
    const auto x = random_unit_signal(9, 1);
    const auto y = random_unit_signal(9, 2);
    for (auto g : {GroupKind::cyclic, GroupKind::dihedral}) {
        const auto target = compute_moments(y, g);
        const auto mx = compute_moments(x, g);
        RecoveryConfig cfg = config(g);
        cfg.w1 = 0.5;
        cfg.w2 = 2.0;
        cfg.w3 = 3.0;
        double want = 0.5 * std::pow(mx.m1 - target.m1, 2);
        for (std::size_t l = 0; l < mx.power.size(); ++l) want += 2.0 * std::pow(mx.power[l] - target.power[l], 2);
        for (std::size_t i = 0; i < mx.third.size(); ++i) want += 3.0 * std::norm(mx.third[i] - target.third[i]);
        CHECK(loss_and_gradient(x, target, cfg).loss == doctest::Approx(want).epsilon(1e-12));
        cfg.third_only = true;
        double third = 0.0;
        for (std::size_t i = 0; i < mx.third.size(); ++i) third += 3.0 * std::norm(mx.third[i] - target.third[i]);
        CHECK(loss_and_gradient(x, target, cfg).loss == doctest::Approx(third).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradient agrees with central differences")
{
    for (int n : {5, 8, 21}) {
        for (auto g : {GroupKind::cyclic, GroupKind::dihedral}) {
            for (bool third_only : {false, true}) {
                const auto target = compute_moments(random_unit_signal(n, derive_seed(n, 1)), g);
                const auto x = random_unit_signal(n, derive_seed(n, 2));
                CHECK(fd_rel_error(x, target, config(g, third_only)) < 1e-6);
            }
        }
    }
}

TEST_CASE("loss and gradient vanish at the truth and its orbit")
{
    const auto x = random_unit_signal(12, 3);
    const auto target = compute_moments(x, GroupKind::dihedral);
    for (const auto& g : group_elements(GroupKind::dihedral, 12)) {
        const auto lg = loss_and_gradient(apply_group(g, x), target, config(GroupKind::dihedral));
        CHECK(lg.loss < 1e-28);
        for (double v : lg.gradient) CHECK(std::abs(v) < 1e-13);
    }
}

TEST_CASE("cyclic recovery from exact moments is exact")
{
    const auto x = random_unit_signal(21, 7);
    const auto res = recover(compute_moments(x, GroupKind::cyclic), config(GroupKind::cyclic), x);
    REQUIRE(res.aligned_error);
    CHECK(*res.aligned_error < 1e-6);
    CHECK(res.converged);
    CHECK_FALSE(res.failed);
    for (std::size_t i = 1; i < res.loss_trace.size(); ++i) CHECK(res.loss_trace[i] <= res.loss_trace[i - 1]);
}

TEST_CASE("dihedral recovery with best-of-k initializations")
{
    const auto x = random_unit_signal(21, 11);
    const auto target = compute_moments(x, GroupKind::dihedral);
    const auto runs = recover_multi(target, config(GroupKind::dihedral), 20, x);
    CHECK(runs.size() == 20);
    const auto& best = runs[best_by_loss(runs)];
    REQUIRE(best.aligned_error);
    CHECK(*best.aligned_error < 1e-6);
    // Run 0 uses the configured seed itself.
    CHECK(runs[0].estimate == recover(target, config(GroupKind::dihedral), x).estimate);
}

TEST_CASE("non-finite targets mark the run as failed")
{
    auto target = compute_moments(random_unit_signal(6, 1), GroupKind::cyclic);
    target.m1 = NAN;
    const auto res = recover(target, config(GroupKind::cyclic));
    CHECK(res.failed);
    CHECK_FALSE(res.aligned_error.has_value());
}

TEST_CASE("config validation")
{
    RecoveryConfig c;
    c.w3 = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.w1 = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.grad_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.step_shrink = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    const auto target = compute_moments(random_unit_signal(6, 1), GroupKind::cyclic);
    CHECK_THROWS_AS(recover(target, config(GroupKind::dihedral)), std::invalid_argument);
    CHECK_THROWS_AS(loss_and_gradient(random_unit_signal(7, 1), target, config(GroupKind::cyclic)), std::invalid_argument);
    CHECK_THROWS_AS(recover_multi(target, config(GroupKind::cyclic), 0), std::invalid_argument);
}

TEST_CASE("frequency marching recovers generic signals exactly")
{
    std::mt19937 pick(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(pick() % 63);
        const auto x = random_unit_signal(n, derive_seed(77, trial));
        const auto est = frequency_marching_cyclic(compute_moments(x, GroupKind::cyclic));
        CHECK(align_and_error(x, est, GroupKind::cyclic).error < 1e-8);
    }
}

TEST_CASE("frequency marching names the vanishing frequency")
{
    const Signal x = idft(FourierSignal{{1.0, 1.0, 0.0, 0.0, 1.0}, true});
    try {
        frequency_marching_cyclic(compute_moments(x, GroupKind::cyclic));
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("=2") != std::string::npos);
    }
    CHECK_THROWS_AS(frequency_marching_cyclic(compute_moments(random_unit_signal(6, 0), GroupKind::dihedral)),
                    std::invalid_argument);
}

TEST_CASE("conjugate pairs")
{
    CHECK(conjugate_pairs(7) == std::vector<std::pair<int, int>>{{1, 1}, {1, 2}});
    CHECK(conjugate_pairs(4).empty());
    CHECK(conjugate_pairs(13).size() == 9);
}

TEST_CASE("sign search finds the truth among its orbits")
{
    for (int n : {5, 6, 7, 8, 9, 10}) {
        const auto x = random_unit_signal(n, derive_seed(300, n));
        const auto res = dihedral_sign_search(compute_moments(x, GroupKind::dihedral));
        CHECK(res.enumerated == (std::uint64_t{1} << conjugate_pairs(n).size()));
        REQUIRE_FALSE(res.orbits.empty());
        double best = INFINITY;
        for (const auto& o : res.orbits) best = std::min(best, align_and_error(x, o, GroupKind::dihedral).error);
        CHECK(best < 1e-6);
        for (const auto& c : res.candidates) {
            CHECK(max_abs_difference(compute_moments(c, GroupKind::dihedral), compute_moments(x, GroupKind::dihedral)) < 1e-8);
        }
    }
}

TEST_CASE("sign search separates the two orbits sharing dihedral moments")
{
    const Complex I{0.0, 1.0};
    const Signal a = idft(FourierSignal{{1.0, I, -I, I, -I}, true});
    const Signal b = idft(FourierSignal{{1.0, -I, -I, I, I}, true});
    const auto res = dihedral_sign_search(compute_moments(a, GroupKind::dihedral));
    CHECK(res.orbits.size() == 2);
    bool has_a = false, has_b = false;
    for (const auto& o : res.orbits) {
        has_a = has_a || align_and_error(a, o, GroupKind::dihedral).error < 1e-8;
        has_b = has_b || align_and_error(b, o, GroupKind::dihedral).error < 1e-8;
    }
    CHECK(has_a);
    CHECK(has_b);
}

TEST_CASE("sign search input validation")
{
    const auto x = random_unit_signal(16, 1);
    CHECK_THROWS_AS(dihedral_sign_search(compute_moments(x, GroupKind::dihedral)), std::invalid_argument);
    CHECK_THROWS_AS(dihedral_sign_search(compute_moments(x, GroupKind::cyclic), 20), std::invalid_argument);
    const Signal deg = idft(FourierSignal{{1.0, 1.0, 0.0, 0.0, 1.0}, true});
    CHECK_THROWS_AS(dihedral_sign_search(compute_moments(deg, GroupKind::dihedral)), std::domain_error);
}

TEST_CASE("alignment undoes any group element")
{
    const int n = 10;
    const auto x = random_unit_signal(n, 4);
    for (const auto& g : group_elements(GroupKind::dihedral, n)) {
        const auto y = apply_group(g, x);
        const auto a = align_and_error(x, y, GroupKind::dihedral);
        CHECK(a.error < 1e-14);
        CHECK(a.element == inverse(g, n));
    }
    const auto a = align_and_error(x, scaled(x, 2.0), GroupKind::cyclic);
    CHECK(a.error == doctest::Approx(1.0));
    CHECK(align_and_error(x, apply_group({3, true}, x), GroupKind::cyclic).error > 1e-3);
    CHECK_THROWS_AS(align_and_error(Signal(std::vector<double>(n, 0.0)), x, GroupKind::cyclic), std::invalid_argument);
    CHECK_THROWS_AS(align_and_error(x, random_unit_signal(n + 1, 0), GroupKind::cyclic), std::invalid_argument);
}

TEST_CASE("recovery json round trip")
{
    const auto x = random_unit_signal(7, 2);
    const auto res = recover(compute_moments(x, GroupKind::cyclic), config(GroupKind::cyclic), x);
    const auto p = std::filesystem::temp_directory_path() / "dmra_test_recovery.json";
    write_recovery_json(res, p);
    const auto back = read_recovery_json(p);
    CHECK(back.estimate == res.estimate);
    CHECK(back.loss_trace == res.loss_trace);
    CHECK(back.iterations == res.iterations);
    CHECK(back.aligned_error == res.aligned_error);
    CHECK(back.best_group_element == res.best_group_element);
}
