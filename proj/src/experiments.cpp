#include "dmra/experiments.hpp"

#include "dmra/invariants.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace dmra {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(0..count-1) on a small pool. Each index writes only its own slot,
// so the outcome does not depend on scheduling.
void run_indexed(std::size_t count, int threads, const std::function<void(std::size_t)>& fn)
{
    unsigned workers = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : static_cast<unsigned>(threads);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path)
{
    if (s == "nan") return kNaN;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("'" + path.string() + "': malformed number '" + s + "'");
    }
}

long long parse_int(const std::string& s, const std::filesystem::path& path)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("'" + path.string() + "': malformed integer '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, const std::filesystem::path& path)
{
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("'" + path.string() + "': malformed seed '" + s + "'");
    }
}

struct MeanStd {
    double mean = kNaN;
    double std = kNaN;
    int failed = 0;
};

MeanStd summarize(const std::vector<double>& errors)
{
    MeanStd out;
    std::vector<double> ok;
    for (double e : errors) {
        if (std::isnan(e)) ++out.failed;
        else ok.push_back(e);
    }
    if (ok.empty()) return out;
    double s = 0.0;
    for (double e : ok) s += e;
    out.mean = s / static_cast<double>(ok.size());
    double v = 0.0;
    for (double e : ok) v += (e - out.mean) * (e - out.mean);
    out.std = ok.size() > 1 ? std::sqrt(v / static_cast<double>(ok.size() - 1)) : 0.0;
    return out;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

struct TrialOutcome {
    double error = kNaN;
    int iterations = 0;
    std::optional<Signal> aligned;
};

TrialOutcome run_trial(const InvariantMoments& target, const Signal& truth, const SweepSpec& spec, GroupKind group,
                       std::uint64_t init_seed, bool keep_aligned)
{
    TrialOutcome out;
    try {
        RecoveryConfig cfg;
        cfg.group = group;
        cfg.third_only = spec.third_only;
        cfg.init_seed = init_seed;
        const auto runs = recover_multi(target, cfg, spec.inits, truth);
        const auto& best = runs[best_by_loss(runs)];
        out.iterations = best.iterations;
        if (best.failed || !best.aligned_error) return out;
        out.error = *best.aligned_error;
        if (keep_aligned) out.aligned = apply_group(best.best_group_element, best.estimate);
    } catch (const std::exception&) {
        out.error = kNaN;
    }
    return out;
}

}  // namespace

std::string to_string(SweepKind k) { return k == SweepKind::length_sweep ? "length_sweep" : "noise_sweep"; }
std::string to_string(TruthMode m) { return m == TruthMode::per_trial ? "per_trial" : "per_length"; }

void SweepSpec::validate() const
{
    if (n_values.empty()) {
        if (n_min < 2) throw std::invalid_argument("n_min must be at least 2");
        if (n_step < 1) throw std::invalid_argument("n_step must be at least 1");
        if (n_max < n_min) throw std::invalid_argument("n_max must be >= n_min");
    }
    for (int n : n_values)
        if (n < 2) throw std::invalid_argument("every n value must be at least 2, got " + std::to_string(n));
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (groups.empty()) throw std::invalid_argument("at least one group is required");
    for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = i + 1; j < groups.size(); ++j)
            if (groups[i] == groups[j]) throw std::invalid_argument("group listed twice: " + to_string(groups[i]));
    if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
    if (inits < 1) throw std::invalid_argument("inits must be at least 1");
    if (kind == SweepKind::noise_sweep) {
        if (sigmas.empty()) throw std::invalid_argument("noise sweep needs at least one sigma");
        for (double s : sigmas)
            if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("sigmas must be finite and nonnegative");
        if (sample_counts.empty()) throw std::invalid_argument("noise sweep needs at least one sample count");
        for (int N : sample_counts)
            if (N < 1) throw std::invalid_argument("sample counts must be at least 1");
        if (scaling_trials < 2) throw std::invalid_argument("scaling_trials must be at least 2");
    }
}

std::vector<int> SweepSpec::lengths() const
{
    if (!n_values.empty()) return n_values;
    std::vector<int> out;
    for (int n = n_min; n <= n_max; n += n_step) out.push_back(n);
    return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int n, int trial)
{
    return derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
}

SweepResult run_length_sweep(const SweepSpec& spec)
{
    spec.validate();
    const auto ns = spec.lengths();
    const bool averaging = spec.truth == TruthMode::per_length;
    struct Task {
        GroupKind group;
        int n;
        int trial;
    };
    std::vector<Task> tasks;
    for (auto g : spec.groups)
        for (int n : ns)
            for (int t = 0; t < spec.trials; ++t) tasks.push_back({g, n, t});

    SweepResult result;
    result.rows.resize(tasks.size());
    std::vector<std::optional<Signal>> aligned(tasks.size());
    run_indexed(tasks.size(), spec.threads, [&](std::size_t i) {
        const auto& task = tasks[i];
        const auto s = trial_seed(spec.master_seed, task.n, task.trial);
        const auto truth_seed = averaging ? derive_seed(trial_seed(spec.master_seed, task.n, 0), 0) : derive_seed(s, 0);
        const Signal truth = random_unit_signal(task.n, truth_seed);
        const auto target = compute_moments(truth, task.group);
        auto out = run_trial(target, truth, spec, task.group, derive_seed(s, 1), averaging);
        result.rows[i] = {task.group, task.n, task.trial, s, out.error, out.iterations};
        aligned[i] = std::move(out.aligned);
    });
    result.aggregates = aggregate_rows(result.rows);

    if (averaging) {
        for (std::size_t start = 0; start < tasks.size(); start += static_cast<std::size_t>(spec.trials)) {
            const int n = tasks[start].n;
            const Signal truth = random_unit_signal(n, derive_seed(trial_seed(spec.master_seed, n, 0), 0));
            std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
            int used = 0;
            for (int t = 0; t < spec.trials; ++t) {
                const auto& a = aligned[start + static_cast<std::size_t>(t)];
                if (!a) continue;
                for (int j = 0; j < n; ++j) sum[static_cast<std::size_t>(j)] += (*a)[j];
                ++used;
            }
            double err = kNaN;
            if (used > 0) {
                double d = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double diff = truth[j] - sum[static_cast<std::size_t>(j)] / used;
                    d += diff * diff;
                }
                err = std::sqrt(d) / truth.norm();
            }
            result.averaged.push_back({tasks[start].group, n, err});
        }
    }
    return result;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows)
{
    std::vector<std::pair<GroupKind, int>> keys;
    std::map<std::pair<GroupKind, int>, std::vector<double>> errors;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.group, r.n);
        if (!errors.count(key)) keys.push_back(key);
        errors[key].push_back(r.aligned_error);
    }
    std::vector<SweepAggregate> out;
    for (const auto& key : keys) {
        const auto s = summarize(errors[key]);
        out.push_back({key.first, key.second, s.mean, s.std, s.failed});
    }
    return out;
}

NoiseSweepResult run_noise_sweep(const SweepSpec& spec)
{
    SweepSpec checked = spec;
    checked.kind = SweepKind::noise_sweep;
    checked.validate();
    const int n = spec.n_values.empty() ? spec.n_min : spec.n_values.front();
    const std::size_t n_sigma = spec.sigmas.size(), n_count = spec.sample_counts.size();

    NoiseSweepResult result;
    std::vector<double> scaling_sigmas;
    for (double s : spec.sigmas)
        if (s >= 1.0) scaling_sigmas.push_back(s);
    std::sort(scaling_sigmas.begin(), scaling_sigmas.end());
    scaling_sigmas.erase(std::unique(scaling_sigmas.begin(), scaling_sigmas.end()), scaling_sigmas.end());
    if (!scaling_sigmas.empty()) {
        const Signal x = random_unit_signal(n, derive_seed(trial_seed(spec.master_seed, n, 0), 0));
        for (auto g : spec.groups) {
            const auto rows = estimator_noise_scaling(x, scaling_sigmas, spec.sample_counts.front(), spec.scaling_trials,
                                                      derive_seed(spec.master_seed, 3), g);
            for (const auto& r : rows) result.scaling.emplace_back(g, r);
        }
    }

    struct Task {
        GroupKind group;
        std::size_t si, ni;
        int trial;
    };
    std::vector<Task> tasks;
    for (auto g : spec.groups)
        for (std::size_t si = 0; si < n_sigma; ++si)
            for (std::size_t ni = 0; ni < n_count; ++ni)
                for (int t = 0; t < spec.trials; ++t) tasks.push_back({g, si, ni, t});

    result.rows.resize(tasks.size());
    run_indexed(tasks.size(), spec.threads, [&](std::size_t i) {
        const auto& task = tasks[i];
        const double sigma = spec.sigmas[task.si];
        const int N = spec.sample_counts[task.ni];
        const auto s = trial_seed(spec.master_seed, n, task.trial);
        const Signal truth = random_unit_signal(n, derive_seed(s, 0));
        InvariantMoments target;
        if (sigma == 0.0) {
            // Noiseless observations reproduce the invariants exactly.
            target = compute_moments(truth, task.group);
        } else {
            const auto obs_seed = derive_seed(derive_seed(s, 2), task.si * n_count + task.ni);
            target = estimate_moments(sample_observations(truth, sigma, N, task.group, obs_seed));
        }
        const auto out = run_trial(target, truth, spec, task.group, derive_seed(s, 1), false);
        result.rows[i] = {task.group, n, sigma, N, task.trial, s, out.error, out.iterations};
    });

    for (std::size_t start = 0; start < tasks.size(); start += static_cast<std::size_t>(spec.trials)) {
        std::vector<double> errors;
        for (int t = 0; t < spec.trials; ++t) errors.push_back(result.rows[start + static_cast<std::size_t>(t)].aligned_error);
        const auto s = summarize(errors);
        const auto& r = result.rows[start];
        result.aggregates.push_back({r.group, r.sigma, r.samples, s.mean, s.std, s.failed});
    }
    return result;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& rows_path,
              const std::filesystem::path& aggregates_path)
{
    auto rows = open_out(rows_path);
    rows << "group,n,trial,seed,aligned_error,iterations\n";
    for (const auto& r : result.rows) {
        rows << to_string(r.group) << ',' << r.n << ',' << r.trial << ',' << r.seed << ',' << num(r.aligned_error) << ','
             << r.iterations << '\n';
    }
    if (!rows) throw std::runtime_error("failed writing '" + rows_path.string() + "'");
    auto agg = open_out(aggregates_path);
    agg << "group,n,mean_error,std_error,failed_trials\n";
    for (const auto& a : result.aggregates) {
        agg << to_string(a.group) << ',' << a.n << ',' << num(a.mean_error) << ',' << num(a.std_error) << ','
            << a.failed_trials << '\n';
    }
    if (!agg) throw std::runtime_error("failed writing '" + aggregates_path.string() + "'");
}

namespace {

std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path, const std::string& header)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw std::invalid_argument("'" + path.string() + "': expected header '" + header + "'");
    }
    const auto width = split_csv(header).size();
    std::vector<std::vector<std::string>> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != width) {
            throw std::invalid_argument("'" + path.string() + "' line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(width) + " fields");
        }
        out.push_back(std::move(fields));
    }
    return out;
}

int parse_n(const std::string& s, const std::filesystem::path& path)
{
    const auto v = parse_int(s, path);
    if (v < 2 || v > std::numeric_limits<int>::max()) throw std::invalid_argument("'" + path.string() + "': bad n " + s);
    return static_cast<int>(v);
}

}  // namespace

std::vector<SweepRow> read_rows_csv(const std::filesystem::path& path)
{
    std::vector<SweepRow> rows;
    for (const auto& f : read_table(path, "group,n,trial,seed,aligned_error,iterations")) {
        SweepRow r;
        try {
            r.group = parse_group(f[0]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("'" + path.string() + "': " + e.what());
        }
        r.n = parse_n(f[1], path);
        r.trial = static_cast<int>(parse_int(f[2], path));
        r.seed = parse_u64(f[3], path);
        r.aligned_error = parse_double(f[4], path);
        r.iterations = static_cast<int>(parse_int(f[5], path));
        rows.push_back(r);
    }
    return rows;
}

std::vector<SweepAggregate> read_aggregates_csv(const std::filesystem::path& path)
{
    std::vector<SweepAggregate> out;
    for (const auto& f : read_table(path, "group,n,mean_error,std_error,failed_trials")) {
        SweepAggregate a;
        try {
            a.group = parse_group(f[0]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("'" + path.string() + "': " + e.what());
        }
        a.n = parse_n(f[1], path);
        a.mean_error = parse_double(f[2], path);
        a.std_error = parse_double(f[3], path);
        a.failed_trials = static_cast<int>(parse_int(f[4], path));
        out.push_back(a);
    }
    return out;
}

std::pair<double, double> svg_y_range(const std::vector<SweepAggregate>& aggregates)
{
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& a : aggregates) {
        if (!std::isfinite(a.mean_error)) continue;
        lo = std::min(lo, a.mean_error);
        hi = std::max(hi, a.mean_error);
    }
    if (!(lo <= hi)) throw std::invalid_argument("no finite mean errors to plot");
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : 0.05 * std::max(std::abs(hi), 1.0);
    return {lo - pad, hi + pad};
}

std::string render_svg(const std::vector<SweepAggregate>& aggregates)
{
    if (aggregates.empty()) throw std::invalid_argument("cannot plot an empty result");
    const auto [ylo, yhi] = svg_y_range(aggregates);
    int nlo = aggregates.front().n, nhi = aggregates.front().n;
    std::vector<GroupKind> groups;
    for (const auto& a : aggregates) {
        nlo = std::min(nlo, a.n);
        nhi = std::max(nhi, a.n);
        if (std::find(groups.begin(), groups.end(), a.group) == groups.end()) groups.push_back(a.group);
    }
    const double xlo = nhi > nlo ? nlo : nlo - 1.0, xhi = nhi > nlo ? nhi : nhi + 1.0;

    constexpr double W = 640, H = 400, left = 70, right = 20, top = 20, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double y) { return top + (yhi - y) / (yhi - ylo) * ph; };
    char buf[256];
    std::string s;
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        s += buf;
    };

    add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n", W, H, W, H);
    add("<rect x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n", W, H);
    s += "<g stroke=\"black\" stroke-width=\"1\">\n";
    add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n", left, top + ph, left + pw, top + ph);
    add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n", left, top, left, top + ph);
    s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    constexpr int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        const double xv = xlo + (xhi - xlo) * t / ticks;
        add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", px(xv), top + ph, px(xv), top + ph + 5);
        add("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%.4g</text>\n", px(xv), top + ph + 18, xv);
        const double yv = ylo + (yhi - ylo) * t / ticks;
        add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", left - 5, py(yv), left, py(yv));
        add("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%.3g</text>\n", left - 8, py(yv) + 4, yv);
    }
    add("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">signal length n</text>\n", left + pw / 2, H - 10);
    add("<text x=\"15\" y=\"%.2f\" text-anchor=\"middle\" transform=\"rotate(-90 15 %.2f)\">mean aligned error</text>\n",
        top + ph / 2, top + ph / 2);
    s += "</g>\n";

    const char* colors[] = {"#1f77b4", "#d62728"};
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        std::vector<std::pair<int, double>> pts;
        for (const auto& a : aggregates)
            if (a.group == groups[gi] && std::isfinite(a.mean_error)) pts.emplace_back(a.n, a.mean_error);
        std::sort(pts.begin(), pts.end());
        const char* color = colors[static_cast<int>(groups[gi]) % 2];
        s += "<polyline fill=\"none\" stroke=\"";
        s += color;
        s += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t p = 0; p < pts.size(); ++p) add("%s%.2f,%.2f", p ? " " : "", px(pts[p].first), py(pts[p].second));
        s += "\"/>\n";
        const double ly = top + 12 + 16 * static_cast<double>(gi);
        add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"1.5\"/>\n", left + pw - 110, ly,
            left + pw - 85, ly, color);
        add("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\">%s</text>\n", left + pw - 80, ly + 4,
            to_string(groups[gi]).c_str());
    }
    s += "</svg>\n";
    return s;
}

void emit_svg(const SweepResult& result, const std::filesystem::path& path)
{
    const auto svg = render_svg(result.aggregates);
    auto out = open_out(path);
    out << svg;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

namespace {

nlohmann::ordered_json manifest(const SweepSpec& spec, const std::string& version)
{
    nlohmann::ordered_json j;
    j["tool_version"] = version;
    j["kind"] = to_string(spec.kind);
    j["master_seed"] = spec.master_seed;
    j["n_min"] = spec.n_min;
    j["n_max"] = spec.n_max;
    j["n_step"] = spec.n_step;
    j["n_values"] = spec.lengths();
    j["trials"] = spec.trials;
    auto groups = nlohmann::ordered_json::array();
    for (auto g : spec.groups) groups.push_back(to_string(g));
    j["groups"] = groups;
    j["threads"] = spec.threads;
    j["truth"] = to_string(spec.truth);
    j["third_only"] = spec.third_only;
    j["inits"] = spec.inits;
    if (spec.kind == SweepKind::noise_sweep) {
        j["sigmas"] = spec.sigmas;
        j["sample_counts"] = spec.sample_counts;
        j["scaling_trials"] = spec.scaling_trials;
    }
    const RecoveryConfig cfg;
    j["optimizer"] = {{"max_iters", cfg.max_iters}, {"grad_tol", cfg.grad_tol}, {"memory", cfg.memory},
                      {"armijo_c1", cfg.armijo_c1}, {"step_shrink", cfg.step_shrink}};
    return j;
}

void prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

}  // namespace

void write_length_sweep(const SweepSpec& spec, const SweepResult& result, const std::string& version)
{
    prepare_dir(spec.output_dir);
    open_out(spec.output_dir / "manifest.json") << manifest(spec, version).dump(2) << '\n';
    emit_csv(result, spec.output_dir / "rows.csv", spec.output_dir / "aggregates.csv");
    emit_svg(result, spec.output_dir / "figure.svg");
    if (!result.averaged.empty()) {
        auto out = open_out(spec.output_dir / "averaged.csv");
        out << "group,n,average_signal_error\n";
        for (const auto& a : result.averaged) out << to_string(a.group) << ',' << a.n << ',' << num(a.error) << '\n';
    }
}

void write_noise_sweep(const SweepSpec& spec, const NoiseSweepResult& result, const std::string& version)
{
    prepare_dir(spec.output_dir);
    SweepSpec s = spec;
    s.kind = SweepKind::noise_sweep;
    open_out(spec.output_dir / "manifest.json") << manifest(s, version).dump(2) << '\n';
    auto sc = open_out(spec.output_dir / "scaling.csv");
    sc << "group,sigma,third_std\n";
    for (const auto& [g, r] : result.scaling) sc << to_string(g) << ',' << num(r.sigma) << ',' << num(r.third_std) << '\n';
    auto rows = open_out(spec.output_dir / "rows.csv");
    rows << "group,n,sigma,samples,trial,seed,aligned_error,iterations\n";
    for (const auto& r : result.rows) {
        rows << to_string(r.group) << ',' << r.n << ',' << num(r.sigma) << ',' << r.samples << ',' << r.trial << ','
             << r.seed << ',' << num(r.aligned_error) << ',' << r.iterations << '\n';
    }
    auto agg = open_out(spec.output_dir / "aggregates.csv");
    agg << "group,sigma,samples,mean_error,std_error,failed_trials\n";
    for (const auto& a : result.aggregates) {
        agg << to_string(a.group) << ',' << num(a.sigma) << ',' << a.samples << ',' << num(a.mean_error) << ','
            << num(a.std_error) << ',' << a.failed_trials << '\n';
    }
}

}  // namespace dmra
