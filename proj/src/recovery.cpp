#include "dmra/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace dmra {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

int mod(int a, int n) { return ((a % n) + n) % n; }

void require_nonvanishing(const InvariantMoments& m)
{
    constexpr double zero_tol = 1e-9;
    for (int l = 1; l <= m.n / 2; ++l) {
        if (!(m.power[static_cast<std::size_t>(l)] > zero_tol)) {
            throw std::domain_error("vanishing Fourier coefficient at ℓ=" + std::to_string(l));
        }
    }
}

/// Real signal whose spectrum has f[0] = m1, |f[l]| = magnitudes[l], and the
/// given phases for l = 1..floor(n/2). For even n, `nyquist` is f[n/2].
Signal synthesize(int n, double m1, std::span<const double> magnitudes, std::span<const double> phases,
                  double nyquist)
{
    FourierSignal f{std::vector<Complex>(static_cast<std::size_t>(n)), true};
    f.coeffs[0] = m1;
    const int half = (n - 1) / 2;
    for (int l = 1; l <= half; ++l) {
        const Complex c = std::polar(magnitudes[static_cast<std::size_t>(l)], phases[static_cast<std::size_t>(l)]);
        f.coeffs[static_cast<std::size_t>(l)] = c;
        f.coeffs[static_cast<std::size_t>(n - l)] = std::conj(c);
    }
    if (n % 2 == 0) f.coeffs[static_cast<std::size_t>(n / 2)] = nyquist;
    return idft(f);
}

}  // namespace

void RecoveryConfig::validate() const
{
    if (!(w3 > 0.0)) throw std::invalid_argument("w3 must be positive");
    if (w1 < 0.0 || w2 < 0.0) throw std::invalid_argument("weights must be nonnegative");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
    if (memory < 1) throw std::invalid_argument("memory must be at least 1");
    if (!(step_shrink > 0.0 && step_shrink < 1.0)) throw std::invalid_argument("step_shrink must lie in (0, 1)");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw std::invalid_argument("armijo_c1 must lie in (0, 1)");
    if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
}

MomentObjective::MomentObjective(const InvariantMoments& target, const RecoveryConfig& cfg)
    : target_(target),
      w1_(cfg.third_only ? 0.0 : cfg.w1),
      w2_(cfg.third_only ? 0.0 : cfg.w2),
      w3_(cfg.w3),
      n_(target.n),
      plan_(target.n)
{
    cfg.validate();
    if (cfg.group != target.group) {
        throw std::invalid_argument("config group " + to_string(cfg.group) + " does not match moments group " +
                                    to_string(target.group));
    }
}

double MomentObjective::evaluate(std::span<const double> x, std::span<double> grad) const
{
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(grad.size()) != n_) {
        throw std::invalid_argument("signal length does not match moments (n=" + std::to_string(n_) + ")");
    }
    const int n = n_;
    std::vector<Complex> f(static_cast<std::size_t>(n));
    plan_.forward(x, f);
    // Wirtinger derivative dL/df[l], treating f and conj(f) as independent.
    std::vector<Complex> g(static_cast<std::size_t>(n));
    auto F = [&](int l) { return f[static_cast<std::size_t>(l)]; };
    auto G = [&](int l) -> Complex& { return g[static_cast<std::size_t>(l)]; };
    double loss = 0.0;

    if (w1_ > 0.0) {
        const Complex d = F(0) - target_.m1;
        loss += w1_ * std::norm(d);
        G(0) += w1_ * std::conj(d);
    }
    if (w2_ > 0.0) {
        for (int l = 0; l < n; ++l) {
            const double r = std::norm(F(l)) - target_.power[static_cast<std::size_t>(l)];
            loss += w2_ * r * r;
            G(l) += w2_ * 2.0 * r * std::conj(F(l));
        }
    }
    const auto& idx = target_.indices;
    if (target_.group == GroupKind::cyclic) {
        for (std::size_t t = 0; t < idx.size(); ++t) {
            const int a = idx[t].k1, b = idx[t].k2, c = mod(a + b, n);
            const Complex B = F(a) * F(b) * std::conj(F(c));
            const Complex D = B - target_.third[t];
            loss += w3_ * std::norm(D);
            const Complex cd = w3_ * std::conj(D);
            G(a) += cd * F(b) * std::conj(F(c));
            G(b) += cd * F(a) * std::conj(F(c));
            G(c) += w3_ * D * std::conj(F(a)) * std::conj(F(b));
        }
    } else {
        for (std::size_t t = 0; t < idx.size(); ++t) {
            const int a = idx[t].k1, b = idx[t].k2, c = idx[t].k3(n);
            const int na = mod(-a, n), nb = mod(-b, n), nc = mod(-c, n);
            const Complex T = 0.5 * (F(a) * F(b) * F(c) + F(na) * F(nb) * F(nc));
            const Complex D = T - target_.third[t];
            loss += w3_ * std::norm(D);
            const Complex cd = 0.5 * w3_ * std::conj(D);
            G(a) += cd * F(b) * F(c);
            G(b) += cd * F(a) * F(c);
            G(c) += cd * F(a) * F(b);
            G(na) += cd * F(nb) * F(nc);
            G(nb) += cd * F(na) * F(nc);
            G(nc) += cd * F(na) * F(nb);
        }
    }
    // dL/dx = 2 Re(F^T g) and the unitary DFT matrix is symmetric.
    std::vector<Complex> fg(static_cast<std::size_t>(n));
    plan_.forward(std::span<const Complex>(g), fg);
    for (int j = 0; j < n; ++j) grad[static_cast<std::size_t>(j)] = 2.0 * fg[static_cast<std::size_t>(j)].real();
    return loss;
}

LossGradient loss_and_gradient(const Signal& x, const InvariantMoments& target, const RecoveryConfig& cfg)
{
    if (x.size() != target.n) {
        throw std::invalid_argument("dimension mismatch: signal length " + std::to_string(x.size()) +
                                    " vs moments n=" + std::to_string(target.n));
    }
    MomentObjective objective(target, cfg);
    LossGradient out;
    out.gradient.resize(static_cast<std::size_t>(x.size()));
    out.loss = objective.evaluate(x.values(), out.gradient);
    return out;
}

RecoveryResult recover_from(const InvariantMoments& target, const RecoveryConfig& cfg, const Signal& init,
                            const std::optional<Signal>& truth)
{
    const MomentObjective objective(target, cfg);
    const int n = target.n;
    if (init.size() != n) throw std::invalid_argument("initial point has wrong length");
    const auto un = static_cast<std::size_t>(n);

    std::vector<double> x(init.values().begin(), init.values().end());
    std::vector<double> g(un), x_new(un), g_new(un), d(un);
    double loss = objective.evaluate(x, g);

    RecoveryResult result;
    result.loss_trace.push_back(loss);
    if (!std::isfinite(loss)) result.failed = true;

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> history;

    int iter = 0;
    for (; iter < cfg.max_iters && !result.failed; ++iter) {
        if (std::sqrt(dot(g, g)) < cfg.grad_tol) {
            result.converged = true;
            break;
        }
        // Two-loop recursion for d = -H g.
        std::vector<double> q = g;
        std::vector<double> alpha(history.size());
        for (std::size_t i = history.size(); i-- > 0;) {
            alpha[i] = history[i].rho * dot(history[i].s, q);
            for (std::size_t k = 0; k < un; ++k) q[k] -= alpha[i] * history[i].y[k];
        }
        if (!history.empty()) {
            const auto& last = history.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (auto& v : q) v *= gamma;
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const double beta = history[i].rho * dot(history[i].y, q);
            for (std::size_t k = 0; k < un; ++k) q[k] += history[i].s[k] * (alpha[i] - beta);
        }
        for (std::size_t k = 0; k < un; ++k) d[k] = -q[k];
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            history.clear();
            for (std::size_t k = 0; k < un; ++k) d[k] = -g[k];
            slope = -dot(g, g);
        }

        bool accepted = false;
        double new_loss = loss;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double step = cfg.initial_step;
            for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
                for (std::size_t k = 0; k < un; ++k) x_new[k] = x[k] + step * d[k];
                new_loss = objective.evaluate(x_new, g_new);
                if (std::isfinite(new_loss) && new_loss <= loss + cfg.armijo_c1 * step * slope) {
                    accepted = true;
                    break;
                }
                step *= cfg.step_shrink;
            }
            if (!accepted && !history.empty()) {
                // Retry once along steepest descent with a fresh memory.
                history.clear();
                for (std::size_t k = 0; k < un; ++k) d[k] = -g[k];
                slope = -dot(g, g);
            } else {
                break;
            }
        }
        if (!accepted) break;  // no further decrease representable

        Pair p{std::vector<double>(un), std::vector<double>(un), 0.0};
        for (std::size_t k = 0; k < un; ++k) {
            p.s[k] = x_new[k] - x[k];
            p.y[k] = g_new[k] - g[k];
        }
        const double sy = dot(p.s, p.y);
        if (sy > 1e-300 && std::isfinite(sy)) {
            p.rho = 1.0 / sy;
            history.push_back(std::move(p));
            if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
        }
        x.swap(x_new);
        g.swap(g_new);
        loss = new_loss;
        result.loss_trace.push_back(loss);
    }
    if (!result.failed && std::sqrt(dot(g, g)) < cfg.grad_tol) result.converged = true;

    result.iterations = iter;
    result.final_loss = loss;
    result.grad_norm = std::sqrt(dot(g, g));
    bool finite = std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
    if (!finite || !std::isfinite(loss)) {
        result.failed = true;
        result.estimate = init;
    } else {
        result.estimate = Signal(std::move(x));
    }
    if (truth && !result.failed) {
        const auto a = align_and_error(*truth, result.estimate, cfg.group);
        result.aligned_error = a.error;
        result.best_group_element = a.element;
    }
    return result;
}

RecoveryResult recover(const InvariantMoments& target, const RecoveryConfig& cfg, const std::optional<Signal>& truth)
{
    cfg.validate();
    return recover_from(target, cfg, random_unit_signal(target.n, cfg.init_seed), truth);
}

std::vector<RecoveryResult> recover_multi(const InvariantMoments& target, const RecoveryConfig& cfg, int inits,
                                          const std::optional<Signal>& truth)
{
    if (inits < 1) throw std::invalid_argument("number of initializations must be at least 1");
    std::vector<RecoveryResult> runs;
    for (int i = 0; i < inits; ++i) {
        RecoveryConfig c = cfg;
        if (i > 0) c.init_seed = derive_seed(cfg.init_seed, static_cast<std::uint64_t>(i));
        runs.push_back(recover(target, c, truth));
    }
    return runs;
}

std::size_t best_by_loss(const std::vector<RecoveryResult>& runs)
{
    if (runs.empty()) throw std::invalid_argument("no recovery runs to choose from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const bool better = runs[best].failed ? !runs[i].failed : (!runs[i].failed && runs[i].final_loss < runs[best].final_loss);
        if (better) best = i;
    }
    return best;
}

Signal frequency_marching_cyclic(const InvariantMoments& moments)
{
    if (moments.group != GroupKind::cyclic) throw std::invalid_argument("frequency marching needs cyclic moments");
    require_nonvanishing(moments);
    const int n = moments.n;
    const int half = n / 2;
    std::vector<double> mag(static_cast<std::size_t>(half + 1)), phase(static_cast<std::size_t>(half + 1), 0.0);
    for (int l = 1; l <= half; ++l) mag[static_cast<std::size_t>(l)] = std::sqrt(moments.power[static_cast<std::size_t>(l)]);

    // Gauge theta_1 := 0, then theta_l = theta_1 + theta_{l-1} - arg B(1, l-1).
    for (int l = 2; l <= half; ++l) {
        phase[static_cast<std::size_t>(l)] =
            phase[1] + phase[static_cast<std::size_t>(l - 1)] - std::arg(moments.third_at(1, l - 1));
    }
    // The chase fixes phases up to theta_l -> theta_l + l*shift; a degree-3
    // invariant whose indices wrap around n pins exp(i n shift).
    double shift = 0.0;
    if (n % 2 == 0) {
        shift = -phase[static_cast<std::size_t>(half)] / half;  // makes f[n/2] real positive
    } else if (n >= 3) {
        const int k = (n - 1) / 2;
        const double wrapped = std::arg(moments.third_at(1, k));
        shift = (wrapped - phase[1] - 2.0 * phase[static_cast<std::size_t>(k)]) / n;
    }
    for (int l = 1; l <= half; ++l) phase[static_cast<std::size_t>(l)] += l * shift;
    const double nyquist = n % 2 == 0 ? mag[static_cast<std::size_t>(half)] : 0.0;
    return synthesize(n, moments.m1, mag, phase, nyquist);
}

std::vector<std::pair<int, int>> conjugate_pairs(int n)
{
    const int k = (n - 1) / 2;
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= k; ++i)
        for (int j = i; i + j <= k; ++j) out.emplace_back(i, j);
    return out;
}

SignSearchResult dihedral_sign_search(const InvariantMoments& moments, int n_max)
{
    if (moments.group != GroupKind::dihedral) throw std::invalid_argument("sign search needs dihedral moments");
    const int n = moments.n;
    if (n > n_max) {
        throw std::invalid_argument("sign search limited to n <= " + std::to_string(n_max) + ", got n=" + std::to_string(n));
    }
    require_nonvanishing(moments);
    const int half = n / 2;
    const int k = (n - 1) / 2;
    std::vector<double> mag(static_cast<std::size_t>(half + 1));
    for (int l = 1; l <= half; ++l) mag[static_cast<std::size_t>(l)] = std::sqrt(moments.power[static_cast<std::size_t>(l)]);
    auto M = [&](int l) { return mag[static_cast<std::size_t>(l)]; };

    const auto pairs = conjugate_pairs(n);
    std::vector<double> cosines;
    for (const auto& [i, j] : pairs) {
        const double c = moments.third_at(i, j).real() / (M(i) * M(j) * M(i + j));
        cosines.push_back(std::clamp(c, -1.0, 1.0));
    }

    SignSearchResult result;
    result.enumerated = std::uint64_t{1} << pairs.size();
    constexpr double consistency_tol = 1e-6;
    constexpr double residual_tol = 1e-8;

    auto try_candidate = [&](std::span<const double> phases, double nyquist) {
        Signal cand = synthesize(n, moments.m1, mag, phases, nyquist);
        const auto cm = compute_moments(cand, GroupKind::dihedral);
        if (max_abs_difference(cm, moments) >= residual_tol) return;
        for (const auto& seen : result.candidates) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) d = std::max(d, std::abs(seen[i] - cand[i]));
            if (d < 1e-6) return;
        }
        result.candidates.push_back(std::move(cand));
    };

    for (std::uint64_t mask = 0; mask < result.enumerated; ++mask) {
        std::vector<Complex> a(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double c = cosines[p];
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            a[p] = Complex(c, (mask >> p) & 1U ? -s : s);
        }
        auto pair_index = [&](int i, int j) {
            return static_cast<std::size_t>(std::find(pairs.begin(), pairs.end(), std::make_pair(std::min(i, j), std::max(i, j))) -
                                            pairs.begin());
        };
        std::vector<double> phase(static_cast<std::size_t>(half + 1), 0.0);
        for (int l = 2; l <= k; ++l) {
            phase[static_cast<std::size_t>(l)] = phase[1] + phase[static_cast<std::size_t>(l - 1)] - std::arg(a[pair_index(1, l - 1)]);
        }
        bool consistent = true;
        for (std::size_t p = 0; p < pairs.size() && consistent; ++p) {
            const auto [i, j] = pairs[p];
            const Complex implied = std::polar(1.0, phase[static_cast<std::size_t>(i)] + phase[static_cast<std::size_t>(j)] -
                                                        phase[static_cast<std::size_t>(i + j)]);
            consistent = std::abs(implied - a[p]) < consistency_tol;
        }
        if (!consistent) continue;

        auto with_shift = [&](double shift) {
            std::vector<double> out = phase;
            for (int l = 1; l <= half; ++l) out[static_cast<std::size_t>(l)] += l * shift;
            return out;
        };
        if (n == 2) {
            try_candidate(phase, M(1));
        } else if (n == 4) {
            // Only invariant tying the phases: Re(f1^2 f2) = |f1|^2 f2 cos(2 theta_1).
            for (double h : {M(2), -M(2)}) {
                const double c = std::clamp(moments.third_at(1, 1).real() / (M(1) * M(1) * h), -1.0, 1.0);
                for (double sgn : {1.0, -1.0}) try_candidate(with_shift(sgn * std::acos(c) / 2.0), h);
            }
        } else {
            // Wrap-around triple (p, k, k) with p + 2k = n pins cos(n * shift + const).
            const int p = n % 2 == 1 ? 1 : 2;
            const double c = std::clamp(moments.third_at(p, k).real() / (M(p) * M(k) * M(k)), -1.0, 1.0);
            const double base = phase[static_cast<std::size_t>(p)] + 2.0 * phase[static_cast<std::size_t>(k)];
            for (double sgn : {1.0, -1.0}) {
                const auto shifted = with_shift((sgn * std::acos(c) - base) / n);
                if (n % 2 == 1) {
                    try_candidate(shifted, 0.0);
                } else {
                    try_candidate(shifted, M(half));
                    try_candidate(shifted, -M(half));
                }
            }
        }
    }

    for (const auto& cand : result.candidates) {
        const bool known = std::any_of(result.orbits.begin(), result.orbits.end(), [&](const Signal& rep) {
            return align_and_error(rep, cand, GroupKind::dihedral).error < 1e-6;
        });
        if (!known) result.orbits.push_back(cand);
    }
    return result;
}

Alignment align_and_error(const Signal& truth, const Signal& estimate, GroupKind group)
{
    if (truth.size() != estimate.size()) throw std::invalid_argument("alignment needs signals of equal length");
    const double norm = truth.norm();
    if (norm == 0.0) throw std::invalid_argument("alignment error undefined for a zero truth signal");
    const int n = truth.size();
    Alignment best{{0, false}, std::numeric_limits<double>::infinity()};
    for (const auto& g : group_elements(group, n)) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const int shifted = (i + g.rot) % n;
            const double diff = truth[i] - estimate[g.refl ? (n - shifted) % n : shifted];
            s += diff * diff;
        }
        const double err = std::sqrt(s) / norm;
        if (err < best.error) best = {g, err};
    }
    return best;
}

void write_recovery_json(const RecoveryResult& r, const std::filesystem::path& path)
{
    nlohmann::ordered_json j;
    j["estimate"] = std::vector<double>(r.estimate.values().begin(), r.estimate.values().end());
    j["loss_trace"] = r.loss_trace;
    j["iterations"] = r.iterations;
    j["final_loss"] = r.final_loss;
    j["converged"] = r.converged;
    j["failed"] = r.failed;
    if (r.aligned_error) {
        j["aligned_error"] = *r.aligned_error;
    } else {
        j["aligned_error"] = nullptr;
    }
    j["group_element"] = {{"rot", r.best_group_element.rot}, {"refl", r.best_group_element.refl}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

RecoveryResult read_recovery_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "' for reading");
    try {
        const auto j = nlohmann::json::parse(in);
        RecoveryResult r;
        r.estimate = Signal(j.at("estimate").get<std::vector<double>>());
        r.loss_trace = j.at("loss_trace").get<std::vector<double>>();
        r.iterations = j.at("iterations").get<int>();
        r.final_loss = j.value("final_loss", r.loss_trace.empty() ? 0.0 : r.loss_trace.back());
        r.converged = j.value("converged", false);
        r.failed = j.value("failed", false);
        if (!j.at("aligned_error").is_null()) r.aligned_error = j.at("aligned_error").get<double>();
        r.best_group_element = {j.at("group_element").at("rot").get<int>(), j.at("group_element").at("refl").get<bool>()};
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("'" + path.string() + "': " + e.what());
    }
}

}  // namespace dmra
