#include "dmra/mra_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dmra {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

std::vector<double> act(GroupElement g, const Signal& x)
{
    const auto y = apply_group(g, x);
    return {y.values().begin(), y.values().end()};
}

// One observation from its own stream: a uniform group element, then noise.
void draw_sample(const Signal& x, double sigma, GroupKind group, std::uint64_t stream_seed, std::span<double> out)
{
    const int n = x.size();
    std::mt19937_64 rng(stream_seed);
    std::uniform_int_distribution<int> pick(0, group_order(group, n) - 1);
    const int e = pick(rng);
    const GroupElement g = group == GroupKind::cyclic ? GroupElement{e, false} : GroupElement{e / 2, e % 2 == 1};
    for (int j = 0; j < n; ++j) {
        const int shifted = (j + g.rot) % n;
        out[static_cast<std::size_t>(j)] = x[g.refl ? (n - shifted) % n : shifted];
    }
    if (sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, sigma);
        for (auto& v : out) v += noise(rng);
    }
}

}  // namespace

ObservationSet sample_observations(const Signal& x, double sigma, int count, GroupKind group,
                                   std::uint64_t master_seed)
{
    if (count < 1) throw std::invalid_argument("number of observations must be at least 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    const int n = x.size();
    ObservationSet obs{n, group, sigma, master_seed, false, {}};
    obs.samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::vector<double> y(static_cast<std::size_t>(n));
        draw_sample(x, sigma, group, derive_seed(master_seed, static_cast<std::uint64_t>(i)), y);
        obs.samples.push_back(std::move(y));
    }
    return obs;
}

ObservationSet enumerate_orbit(const Signal& x, GroupKind group)
{
    ObservationSet obs{x.size(), group, 0.0, 0, true, {}};
    for (const auto& g : group_elements(group, x.size())) obs.samples.push_back(act(g, x));
    return obs;
}

MomentAccumulator::MomentAccumulator(int n, GroupKind group, double sigma)
    : n_(n),
      group_(group),
      sigma_(sigma),
      plan_(n),
      indices_(distinct_indices(group, n)),
      power_sum_(static_cast<std::size_t>(n)),
      power_sq_(static_cast<std::size_t>(n)),
      third_sum_(indices_.size()),
      third_sq_(indices_.size()),
      spectrum_(static_cast<std::size_t>(n))
{
    for (const auto& k : indices_) {
        zero_count_.push_back(int(k.k1 == 0) + int(k.k2 == 0) + int(k.k3(n) == 0));
    }
}

void MomentAccumulator::add(std::span<const double> sample)
{
    if (static_cast<int>(sample.size()) != n_) throw std::invalid_argument("observation has wrong length");
    plan_.forward(sample, spectrum_);
    auto Y = [&](int l) { return spectrum_[static_cast<std::size_t>(mod(l, n_))]; };
    const double s2 = sigma_ * sigma_;
    const double y0 = Y(0).real();
    m1_sum_ += y0;
    m1_sq_ += y0 * y0;
    for (int l = 0; l < n_; ++l) {
        const double p = std::norm(Y(l)) - s2;
        power_sum_[static_cast<std::size_t>(l)] += p;
        power_sq_[static_cast<std::size_t>(l)] += p * p;
    }
    for (std::size_t t = 0; t < indices_.size(); ++t) {
        const int a = indices_[t].k1, b = indices_[t].k2, c = indices_[t].k3(n_);
        Complex z = group_ == GroupKind::cyclic ? Y(a) * Y(b) * std::conj(Y(a + b))
                                                : 0.5 * (Y(a) * Y(b) * Y(c) + Y(-a) * Y(-b) * Y(-c));
        // E[eps^[p] eps^[q]] = sigma^2 exactly when the remaining index is 0.
        z -= static_cast<double>(zero_count_[t]) * s2 * y0;
        third_sum_[t] += z;
        third_sq_[t] += std::norm(z);
    }
    ++count_;
}

InvariantMoments MomentAccumulator::estimate() const
{
    if (count_ < 1) throw std::invalid_argument("cannot estimate moments from an empty observation set");
    const double inv = 1.0 / static_cast<double>(count_);
    InvariantMoments m;
    m.group = group_;
    m.n = n_;
    m.sigma_used = sigma_;
    m.m1 = m1_sum_ * inv;
    m.indices = indices_;
    for (double p : power_sum_) m.power.push_back(p * inv);
    for (const auto& t : third_sum_) m.third.push_back(t * inv);
    return m;
}

InvariantMoments MomentAccumulator::standard_errors() const
{
    InvariantMoments se = estimate();
    const double N = static_cast<double>(count_);
    auto stderr_of = [&](double sq_sum, double mean_norm) {
        if (count_ < 2) return 0.0;
        const double var = std::max(0.0, (sq_sum / N - mean_norm) * N / (N - 1.0));
        return std::sqrt(var / N);
    };
    se.m1 = stderr_of(m1_sq_, se.m1 * se.m1);
    for (std::size_t l = 0; l < se.power.size(); ++l) se.power[l] = stderr_of(power_sq_[l], se.power[l] * se.power[l]);
    for (std::size_t t = 0; t < se.third.size(); ++t) se.third[t] = stderr_of(third_sq_[t], std::norm(se.third[t]));
    return se;
}

MomentEstimate estimate_moments_with_errors(const ObservationSet& obs)
{
    if (obs.samples.empty()) throw std::invalid_argument("cannot estimate moments from an empty observation set");
    MomentAccumulator acc(obs.n, obs.group, obs.sigma);
    for (const auto& s : obs.samples) acc.add(s);
    return {acc.estimate(), acc.standard_errors()};
}

InvariantMoments estimate_moments(const ObservationSet& obs) { return estimate_moments_with_errors(obs).value; }

std::vector<NoiseScalingRow> estimator_noise_scaling(const Signal& x, std::span<const double> sigmas, int samples,
                                                     int trials, std::uint64_t seed, GroupKind group)
{
    if (trials < 2) throw std::invalid_argument("noise scaling needs at least 2 trials");
    if (samples < 1) throw std::invalid_argument("noise scaling needs at least 1 sample per trial");
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas[i] >= 1.0)) throw std::invalid_argument("noise scaling sigmas must be >= 1");
        if (i > 0 && !(sigmas[i] > sigmas[i - 1])) throw std::invalid_argument("noise scaling sigmas must increase");
    }
    const int n = x.size();
    std::vector<NoiseScalingRow> rows;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma = sigmas[si];
        std::vector<std::vector<Complex>> estimates;
        for (int t = 0; t < trials; ++t) {
            const auto trial_seed = derive_seed(derive_seed(seed, si), static_cast<std::uint64_t>(t));
            MomentAccumulator acc(n, group, sigma);
            std::vector<double> y(static_cast<std::size_t>(n));
            for (int i = 0; i < samples; ++i) {
                draw_sample(x, sigma, group, derive_seed(trial_seed, static_cast<std::uint64_t>(i)), y);
                acc.add(y);
            }
            estimates.push_back(acc.estimate().third);
        }
        const std::size_t entries = estimates.front().size();
        double pooled = 0.0;
        for (std::size_t e = 0; e < entries; ++e) {
            Complex mean{0.0, 0.0};
            for (const auto& est : estimates) mean += est[e];
            mean /= static_cast<double>(trials);
            double var = 0.0;
            for (const auto& est : estimates) var += std::norm(est[e] - mean);
            pooled += var / (trials - 1);
        }
        rows.push_back({sigma, std::sqrt(pooled / static_cast<double>(entries))});
    }
    return rows;
}

double loglog_slope(std::span<const NoiseScalingRow> rows)
{
    if (rows.size() < 2) throw std::invalid_argument("slope needs at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& r : rows) {
        mx += std::log(r.sigma);
        my += std::log(r.third_std);
    }
    mx /= static_cast<double>(rows.size());
    my /= static_cast<double>(rows.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log(r.sigma) - mx;
        sxy += dx * (std::log(r.third_std) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

void write_observations(const ObservationSet& obs, const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path)
{
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open '" + csv_path.string() + "' for writing");
    char buf[32];
    for (const auto& s : obs.samples) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", s[j]);
            csv << (j ? "," : "") << buf;
        }
        csv << '\n';
    }
    nlohmann::ordered_json j;
    j["n"] = obs.n;
    j["group"] = to_string(obs.group);
    j["sigma"] = obs.sigma;
    j["N"] = obs.samples.size();
    j["master_seed"] = obs.master_seed;
    j["enumerated"] = obs.enumerated;
    std::ofstream side(json_path);
    if (!side) throw std::runtime_error("cannot open '" + json_path.string() + "' for writing");
    side << j.dump(2) << '\n';
}

ObservationSet read_observations(const std::filesystem::path& csv_path, const std::filesystem::path& json_path)
{
    std::ifstream side(json_path);
    if (!side) throw std::invalid_argument("cannot open '" + json_path.string() + "' for reading");
    ObservationSet obs;
    std::size_t expected = 0;
    try {
        const auto j = nlohmann::json::parse(side);
        obs.n = j.at("n").get<int>();
        obs.group = parse_group(j.at("group").get<std::string>());
        obs.sigma = j.at("sigma").get<double>();
        obs.master_seed = j.at("master_seed").get<std::uint64_t>();
        obs.enumerated = j.value("enumerated", false);
        expected = j.at("N").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("'" + json_path.string() + "': " + e.what());
    }
    std::ifstream csv(csv_path);
    if (!csv) throw std::invalid_argument("cannot open '" + csv_path.string() + "' for reading");
    std::string line;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw std::invalid_argument("'" + csv_path.string() + "': malformed number '" + field + "'");
            }
        }
        if (static_cast<int>(row.size()) != obs.n) {
            throw std::invalid_argument("'" + csv_path.string() + "': row length " + std::to_string(row.size()) +
                                        " does not match n=" + std::to_string(obs.n));
        }
        obs.samples.push_back(std::move(row));
    }
    if (obs.samples.size() != expected) {
        throw std::invalid_argument("'" + csv_path.string() + "': sample count does not match sidecar N");
    }
    return obs;
}

}  // namespace dmra
