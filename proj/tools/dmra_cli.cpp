// Command-line front end: simulation, invariants, recovery, sweeps, theory checks, plots.

#include "dmra/experiments.hpp"
#include "dmra/invariants.hpp"
#include "dmra/mra_sim.hpp"
#include "dmra/recovery.hpp"
#include "dmra/signal.hpp"
#include "dmra/theory_checks.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#ifndef DMRA_VERSION
#define DMRA_VERSION "dev"
#endif

namespace {

using namespace dmra;
namespace fs = std::filesystem;

// Failure while doing the work itself (as opposed to bad input).
struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_json(const nlohmann::ordered_json& j, const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

std::vector<GroupKind> parse_groups(const std::vector<std::string>& names)
{
    std::vector<GroupKind> out;
    for (const auto& s : names) out.push_back(parse_group(s));
    return out;
}

void make_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

struct SimulateArgs {
    int n = 21;
    double sigma = 0.0;
    int samples = 1000;
    std::string group = "dihedral";
    std::uint64_t seed = 0;
    std::string signal = "random";
    fs::path out;
    bool enumerate = false;
};

int run_simulate(const SimulateArgs& a)
{
    const auto group = parse_group(a.group);
    const Signal x = a.signal == "random" ? random_unit_signal(a.n, derive_seed(a.seed, 0)) : read_signal_csv(a.signal);
    if (a.signal != "random" && x.size() != a.n) {
        throw std::invalid_argument("--signal has length " + std::to_string(x.size()) + " but --n is " + std::to_string(a.n));
    }
    if (a.enumerate && a.sigma != 0.0) throw std::invalid_argument("--enumerate requires --sigma 0");
    const auto obs = a.enumerate ? enumerate_orbit(x, group) : sample_observations(x, a.sigma, a.samples, group, derive_seed(a.seed, 1));
    make_dir(a.out);
    write_signal_csv(x, a.out / "signal.csv");
    write_observations(obs, a.out / "observations.csv", a.out / "observations.json");
    write_moments_json(estimate_moments(obs), a.out / "moments.json");
    nlohmann::ordered_json m;
    m["tool_version"] = DMRA_VERSION;
    m["command"] = "simulate";
    m["n"] = a.n;
    m["sigma"] = a.sigma;
    m["samples"] = obs.samples.size();
    m["group"] = to_string(group);
    m["seed"] = a.seed;
    m["signal"] = a.signal;
    m["enumerate"] = a.enumerate;
    write_json(m, a.out / "manifest.json");
    std::printf("wrote %zu observations to %s\n", obs.samples.size(), a.out.string().c_str());
    return 0;
}

struct RecoverArgs {
    fs::path moments;
    std::string group;
    int inits = 1;
    std::uint64_t seed = 0;
    bool third_only = false;
    std::string report = "best";
    fs::path truth;
    fs::path out;
};

int run_recover(const RecoverArgs& a)
{
    const auto target = read_moments_json(a.moments);
    if (!a.group.empty() && parse_group(a.group) != target.group) {
        throw std::invalid_argument("--group " + a.group + " does not match moments group " + to_string(target.group));
    }
    std::optional<Signal> truth;
    if (!a.truth.empty()) {
        truth = read_signal_csv(a.truth);
        if (truth->size() != target.n) throw std::invalid_argument("--truth length does not match moments n");
    }
    RecoveryConfig cfg;
    cfg.group = target.group;
    cfg.third_only = a.third_only;
    cfg.init_seed = a.seed;
    const auto runs = recover_multi(target, cfg, a.inits, truth);
    const auto& best = runs[best_by_loss(runs)];
    write_recovery_json(best, a.out);

    std::ifstream in(a.out);
    auto j = nlohmann::ordered_json::parse(in);
    in.close();
    j["report"] = a.report;
    j["inits"] = a.inits;
    j["seed"] = a.seed;
    if (a.report == "mean") {
        double loss = 0.0, err = 0.0;
        int ok = 0;
        for (const auto& r : runs) {
            if (r.failed) continue;
            loss += r.final_loss;
            if (r.aligned_error) err += *r.aligned_error;
            ++ok;
        }
        j["mean_final_loss"] = ok ? loss / ok : NAN;
        if (truth) j["mean_aligned_error"] = ok ? err / ok : NAN;
        j["failed_runs"] = static_cast<int>(runs.size()) - ok;
    }
    write_json(j, a.out);
    if (best.failed) throw RuntimeFailure("recovery diverged (non-finite loss) in every run");
    std::printf("final loss %.6g after %d iterations", best.final_loss, best.iterations);
    if (best.aligned_error) std::printf(", aligned error %.6g", *best.aligned_error);
    std::printf("\n");
    return 0;
}

int run_march(const fs::path& moments, const fs::path& out)
{
    const auto m = read_moments_json(moments);
    const Signal x = frequency_marching_cyclic(m);
    nlohmann::ordered_json j;
    j["method"] = "frequency_marching";
    j["estimate"] = std::vector<double>(x.values().begin(), x.values().end());
    j["moment_residual"] = max_abs_difference(compute_moments(x, GroupKind::cyclic), m);
    write_json(j, out);
    std::printf("recovered n=%d signal, moment residual %.3g\n", m.n, j["moment_residual"].get<double>());
    return 0;
}

int run_sign_search(const fs::path& moments, int n_max, const fs::path& out)
{
    const auto m = read_moments_json(moments);
    const auto res = dihedral_sign_search(m, n_max);
    std::printf("enumerated %llu sign patterns, %zu candidates, %zu orbits\n",
                static_cast<unsigned long long>(res.enumerated), res.candidates.size(), res.orbits.size());
    if (!out.empty()) {
        nlohmann::ordered_json j;
        j["enumerated"] = res.enumerated;
        j["candidates"] = res.candidates.size();
        auto orbits = nlohmann::ordered_json::array();
        for (const auto& o : res.orbits) orbits.push_back(std::vector<double>(o.values().begin(), o.values().end()));
        j["orbits"] = orbits;
        write_json(j, out);
    }
    return 0;
}

int run_verify(int k_max, const fs::path& out)
{
    const auto checks = verify_theory(k_max);
    int failed = 0;
    for (const auto& c : checks) {
        if (!c.pass) {
            ++failed;
            std::fprintf(stderr, "FAIL %s %s: %s\n", c.name.c_str(),
                         c.k ? ("k=" + std::to_string(*c.k)).c_str() : ("pair " + c.pair).c_str(), c.witness.c_str());
        }
    }
    if (!out.empty()) write_theory_report(checks, out);
    std::printf("%zu checks, %d failed\n", checks.size(), failed);
    if (failed) throw RuntimeFailure(std::to_string(failed) + " theory checks failed");
    return 0;
}

int run_plot(const fs::path& in, const fs::path& out)
{
    std::ifstream probe(in);
    if (!probe) throw std::invalid_argument("cannot open '" + in.string() + "' for reading");
    std::string header;
    std::getline(probe, header);
    probe.close();
    SweepResult r;
    if (header.rfind("group,n,trial,", 0) == 0) {
        r.rows = read_rows_csv(in);
        r.aggregates = aggregate_rows(r.rows);
    } else {
        r.aggregates = read_aggregates_csv(in);
    }
    if (r.aggregates.empty()) throw std::invalid_argument("'" + in.string() + "' has no data rows");
    emit_svg(r, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Orbit recovery from invariant moments under cyclic and dihedral actions"};
    app.set_version_flag("--version", std::string("dmra ") + DMRA_VERSION);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Draw noisy observations and their debiased moments");
    simulate->add_option("--n", sim.n, "Signal length")->check(CLI::Range(2, 1 << 20));
    simulate->add_option("--sigma", sim.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    simulate->add_option("--samples", sim.samples, "Number of observations")->check(CLI::PositiveNumber);
    simulate->add_option("--group", sim.group, "cyclic or dihedral")->check(CLI::IsMember({"cyclic", "dihedral"}));
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--signal", sim.signal, "Signal CSV (index,value) or 'random'");
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_flag("--enumerate", sim.enumerate, "Emit the exact orbit instead of random draws");

    fs::path inv_signal, inv_out;
    std::string inv_group = "dihedral";
    auto* invariants = app.add_subcommand("invariants", "Exact invariant moments of a signal");
    invariants->add_option("--signal", inv_signal, "Signal CSV (index,value)")->required();
    invariants->add_option("--group", inv_group, "cyclic or dihedral")->check(CLI::IsMember({"cyclic", "dihedral"}));
    invariants->add_option("--out", inv_out, "Moments JSON")->required();

    RecoverArgs rec;
    auto* recover_cmd = app.add_subcommand("recover", "Recover a signal from moments by quasi-Newton descent");
    recover_cmd->add_option("--moments", rec.moments, "Moments JSON")->required();
    recover_cmd->add_option("--group", rec.group, "Expected group of the moments")->check(CLI::IsMember({"cyclic", "dihedral"}));
    recover_cmd->add_option("--inits", rec.inits, "Random initializations")->check(CLI::PositiveNumber);
    recover_cmd->add_option("--seed", rec.seed, "Initialization seed");
    recover_cmd->add_flag("--third-only", rec.third_only, "Fit the third moment only");
    recover_cmd->add_option("--report", rec.report, "best or mean")->check(CLI::IsMember({"best", "mean"}));
    recover_cmd->add_option("--truth", rec.truth, "Ground-truth signal CSV for the aligned error");
    recover_cmd->add_option("--out", rec.out, "Result JSON")->required();

    fs::path march_in, march_out;
    auto* march = app.add_subcommand("march", "Cyclic frequency marching");
    march->add_option("--moments", march_in, "Cyclic moments JSON")->required();
    march->add_option("--out", march_out, "Result JSON")->required();

    fs::path ss_in, ss_out;
    int ss_nmax = 14;
    auto* sign = app.add_subcommand("sign-search", "Enumerate sign patterns consistent with dihedral moments");
    sign->add_option("--moments", ss_in, "Dihedral moments JSON")->required();
    sign->add_option("--n-max", ss_nmax, "Refuse lengths above this")->check(CLI::Range(2, 40));
    sign->add_option("--out", ss_out, "Optional result JSON");

    auto* experiment = app.add_subcommand("experiment", "Seeded recovery sweeps");
    experiment->require_subcommand(1);

    SweepSpec ls;
    std::vector<std::string> ls_groups{"cyclic", "dihedral"};
    std::string ls_truth = "per_trial";
    bool ls_full = false;
    auto* length = experiment->add_subcommand("length-sweep", "Aligned error against signal length");
    length->add_option("--n-min", ls.n_min, "Smallest length")->check(CLI::Range(2, 1 << 16));
    length->add_option("--n-max", ls.n_max, "Largest length")->check(CLI::Range(2, 1 << 16));
    length->add_option("--step", ls.n_step, "Length increment")->check(CLI::PositiveNumber);
    length->add_option("--n-values", ls.n_values, "Explicit lengths (overrides the range)")->delimiter(',');
    length->add_option("--trials", ls.trials, "Trials per length")->check(CLI::PositiveNumber);
    length->add_option("--groups", ls_groups, "Comma-separated groups")->delimiter(',')->check(CLI::IsMember({"cyclic", "dihedral"}));
    length->add_option("--seed", ls.master_seed, "Master seed");
    length->add_option("--threads", ls.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    length->add_option("--inits", ls.inits, "Initializations per trial")->check(CLI::PositiveNumber);
    length->add_option("--truth", ls_truth, "per_trial or per_length")->check(CLI::IsMember({"per_trial", "per_length"}));
    length->add_flag("--full-objective", ls_full, "Also fit the first and second moments");
    length->add_option("--out", ls.output_dir, "Output directory")->required();

    SweepSpec ns;
    ns.kind = SweepKind::noise_sweep;
    ns.n_min = 21;
    ns.trials = 5;
    ns.sigmas = {0.5, 1.0};
    ns.sample_counts = {1000, 10000};
    ns.inits = 10;
    std::vector<std::string> ns_groups{"dihedral"};
    bool ns_third = false;
    auto* noise = experiment->add_subcommand("noise-sweep", "Estimator noise scaling and recovery from estimated moments");
    noise->add_option("--n", ns.n_min, "Signal length")->check(CLI::Range(2, 1 << 16));
    noise->add_option("--sigmas", ns.sigmas, "Comma-separated noise levels")->delimiter(',')->check(CLI::NonNegativeNumber);
    noise->add_option("--samples", ns.sample_counts, "Comma-separated observation counts")->delimiter(',')->check(CLI::PositiveNumber);
    noise->add_option("--trials", ns.trials, "Trials per cell")->check(CLI::PositiveNumber);
    noise->add_option("--scaling-trials", ns.scaling_trials, "Repetitions for the estimator spread")->check(CLI::Range(2, 1 << 20));
    noise->add_option("--groups", ns_groups, "Comma-separated groups")->delimiter(',')->check(CLI::IsMember({"cyclic", "dihedral"}));
    noise->add_option("--seed", ns.master_seed, "Master seed");
    noise->add_option("--threads", ns.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    noise->add_option("--inits", ns.inits, "Initializations per trial")->check(CLI::PositiveNumber);
    noise->add_flag("--third-only", ns_third, "Fit the third moment only");
    noise->add_option("--out", ns.output_dir, "Output directory")->required();

    int k_max = 30;
    fs::path theory_out;
    auto* verify = app.add_subcommand("verify-theory", "Exact rank, spanning and counterexample checks");
    verify->add_option("--k-max", k_max, "Largest k")->check(CLI::Range(2, 200));
    verify->add_option("--out", theory_out, "Report JSON");

    fs::path plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "SVG line chart from rows.csv or aggregates.csv");
    plot->add_option("--in", plot_in, "Sweep CSV")->required();
    plot->add_option("--out", plot_out, "SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*invariants) {
            const Signal x = read_signal_csv(inv_signal);
            write_moments_json(compute_moments(x, parse_group(inv_group)), inv_out);
            return 0;
        }
        if (*recover_cmd) return run_recover(rec);
        if (*march) return run_march(march_in, march_out);
        if (*sign) return run_sign_search(ss_in, ss_nmax, ss_out);
        if (*length) {
            ls.groups = parse_groups(ls_groups);
            ls.truth = ls_truth == "per_length" ? TruthMode::per_length : TruthMode::per_trial;
            ls.third_only = !ls_full;
            ls.validate();
            const auto result = run_length_sweep(ls);
            write_length_sweep(ls, result, DMRA_VERSION);
            int failed = 0;
            for (const auto& a : result.aggregates) failed += a.failed_trials;
            std::printf("%zu trials written to %s (%d failed)\n", result.rows.size(), ls.output_dir.string().c_str(), failed);
            return 0;
        }
        if (*noise) {
            ns.groups = parse_groups(ns_groups);
            ns.third_only = ns_third;
            ns.validate();
            const auto result = run_noise_sweep(ns);
            write_noise_sweep(ns, result, DMRA_VERSION);
            std::printf("%zu trials written to %s\n", result.rows.size(), ns.output_dir.string().c_str());
            return 0;
        }
        if (*verify) return run_verify(k_max, theory_out);
        if (*plot) return run_plot(plot_in, plot_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
