#include "dmra/theory_checks.hpp"

#include "dmra/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <gmpxx.h>
#include <json.hpp>

namespace dmra {

namespace {

using IntMatrix = std::vector<std::vector<mpz_class>>;

void check_k(int k)
{
    if (k < 2) throw std::invalid_argument("k must be at least 2, got " + std::to_string(k));
}

// Fraction-free Gaussian elimination; every division is exact.
int bareiss_rank(IntMatrix a)
{
    const std::size_t rows = a.size();
    if (rows == 0) return 0;
    const std::size_t cols = a.front().size();
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t p = rank;
        while (p < rows && a[p][col] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            for (std::size_t c = col + 1; c < cols; ++c) {
                mpz_class v = a[rank][col] * a[r][c] - a[r][col] * a[rank][c];
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a[r][c] = std::move(v);
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return static_cast<int>(rank);
}

IntMatrix to_mpz(const std::vector<std::vector<int>>& rows)
{
    IntMatrix out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(r.begin(), r.end());
    return out;
}

// Index of the first row whose removal drops the rank, if any.
std::optional<std::size_t> first_essential_row(const FormMatrix& forms)
{
    const IntMatrix full = to_mpz(forms.rows);
    const int rank = bareiss_rank(full);
    for (std::size_t skip = 0; skip < full.size(); ++skip) {
        IntMatrix reduced;
        reduced.reserve(full.size() - 1);
        for (std::size_t r = 0; r < full.size(); ++r)
            if (r != skip) reduced.push_back(full[r]);
        if (bareiss_rank(std::move(reduced)) < rank) return skip;
    }
    return std::nullopt;
}

// Basis of {m : sum_p m_p rows[p] = 0} from the reduced row echelon form of rows^T.
std::vector<std::vector<mpq_class>> left_nullspace(const FormMatrix& forms)
{
    const std::size_t P = forms.rows.size();
    const std::size_t K = static_cast<std::size_t>(forms.k);
    std::vector<std::vector<mpq_class>> a(K, std::vector<mpq_class>(P));
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t c = 0; c < K; ++c) a[c][p] = forms.rows[p][c];

    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t col = 0; col < P && r < K; ++col) {
        std::size_t p = r;
        while (p < K && a[p][col] == 0) ++p;
        if (p == K) continue;
        std::swap(a[p], a[r]);
        const mpq_class inv = 1 / a[r][col];
        for (auto& v : a[r]) v *= inv;
        for (std::size_t o = 0; o < K; ++o) {
            if (o == r || a[o][col] == 0) continue;
            const mpq_class factor = a[o][col];
            for (std::size_t c = col; c < P; ++c) a[o][c] -= factor * a[r][c];
        }
        pivot_cols.push_back(col);
        ++r;
    }

    std::vector<bool> is_pivot(P, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<mpq_class>> basis;
    for (std::size_t free = 0; free < P; ++free) {
        if (is_pivot[free]) continue;
        std::vector<mpq_class> v(P);
        v[free] = 1;
        for (std::size_t row = 0; row < pivot_cols.size(); ++row) v[pivot_cols[row]] = -a[row][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<int> small_primes(std::size_t count)
{
    std::vector<int> primes;
    for (int c = 2; primes.size() < count; ++c) {
        if (std::none_of(primes.begin(), primes.end(), [c](int p) { return c % p == 0; })) primes.push_back(c);
    }
    return primes;
}

std::string pair_name(std::pair<int, int> p)
{
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt(Complex z)
{
    return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

}  // namespace

FormMatrix form_matrix(int k)
{
    check_k(k);
    FormMatrix fm;
    fm.k = k;
    for (int i = 1; i <= k; ++i) {
        for (int j = i; i + j <= k; ++j) {
            std::vector<int> row(static_cast<std::size_t>(k), 0);
            row[static_cast<std::size_t>(i - 1)] += 1;
            row[static_cast<std::size_t>(j - 1)] += 1;
            row[static_cast<std::size_t>(i + j - 1)] -= 1;
            fm.pairs.emplace_back(i, j);
            fm.rows.push_back(std::move(row));
        }
    }
    return fm;
}

FormRank xij_rank(int k)
{
    const FormMatrix fm = form_matrix(k);
    FormRank out;
    out.rank = bareiss_rank(to_mpz(fm.rows));
    out.spans_hyperplane = out.rank == k - 1;
    out.orthogonal = std::all_of(fm.rows.begin(), fm.rows.end(), [](const std::vector<int>& row) {
        long long dot = 0;
        for (std::size_t c = 0; c < row.size(); ++c) dot += static_cast<long long>(c + 1) * row[c];
        return dot == 0;
    });
    return out;
}

bool is_excessive(int k)
{
    const FormMatrix fm = form_matrix(k);
    return !first_essential_row(fm).has_value();
}

bool annihilates(const FormMatrix& forms, const std::vector<std::int64_t>& m)
{
    if (m.size() != forms.rows.size()) return false;
    for (int c = 0; c < forms.k; ++c) {
        mpz_class sum = 0;
        for (std::size_t p = 0; p < m.size(); ++p) {
            sum += mpz_class(static_cast<long>(m[p])) * forms.rows[p][static_cast<std::size_t>(c)];
        }
        if (sum != 0) return false;
    }
    return true;
}

AnnihilatorSearch search_nonzero_annihilator(int k)
{
    const FormMatrix fm = form_matrix(k);
    const auto basis = left_nullspace(fm);
    const std::size_t P = fm.rows.size();
    AnnihilatorSearch out;
    out.nullity = static_cast<int>(basis.size());
    if (basis.empty()) {
        out.reason = "the forms are linearly independent, so only m = 0 annihilates them";
        return out;
    }
    for (std::size_t p = 0; p < P; ++p) {
        const bool dead = std::all_of(basis.begin(), basis.end(), [p](const auto& v) { return v[p] == 0; });
        if (dead) {
            out.reason = "coordinate for pair " + pair_name(fm.pairs[p]) + " vanishes on the whole nullspace";
            return out;
        }
    }

    // Each coordinate is a nonzero linear form in the coefficients, so all but
    // finitely many coefficient choices avoid every zero.
    const auto primes = small_primes(basis.size() + 64);
    for (std::size_t attempt = 0; attempt < 64; ++attempt) {
        std::vector<mpq_class> m(P);
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const mpq_class coeff = (b % 2 == 0 ? 1 : -1) * primes[b + attempt];
            for (std::size_t p = 0; p < P; ++p) m[p] += coeff * basis[b][p];
        }
        if (std::any_of(m.begin(), m.end(), [](const mpq_class& v) { return v == 0; })) continue;
        mpz_class den = 1, num_gcd = 0;
        for (const auto& v : m) den = lcm(den, v.get_den());
        std::vector<mpz_class> ints;
        for (const auto& v : m) {
            ints.push_back(v.get_num() * (den / v.get_den()));
            num_gcd = gcd(num_gcd, ints.back());
        }
        out.m.clear();
        for (auto& v : ints) {
            v /= num_gcd;
            if (!v.fits_slong_p()) throw std::overflow_error("annihilator entry exceeds 64 bits");
            out.m.push_back(v.get_si());
        }
        if (!annihilates(fm, out.m)) throw std::logic_error("annihilator failed exact verification");
        out.exists = true;
        return out;
    }
    throw std::logic_error("no all-nonzero annihilator found after 64 coefficient choices");
}

std::vector<std::int64_t> find_nonzero_annihilator(int k)
{
    if (k < 4) throw std::invalid_argument("an all-nonzero annihilator needs k >= 4, got " + std::to_string(k));
    auto res = search_nonzero_annihilator(k);
    if (!res.exists) throw std::logic_error("no all-nonzero annihilator for k=" + std::to_string(k) + ": " + res.reason);
    return res.m;
}

std::vector<PhaseRelation> condition_star_probe(const FourierSignal& f, int exp_bound, int subset_bound)
{
    if (exp_bound < 1 || subset_bound < 1) throw std::invalid_argument("probe bounds must be positive");
    const int n = f.size();
    const int k = (n - 1) / 2;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= k; ++i)
        for (int j = i; i + j <= k; ++j) pairs.emplace_back(i, j);
    std::vector<double> phi;
    for (const auto& [i, j] : pairs) phi.push_back(std::arg(phase_triple(f, i, j)));

    constexpr double tol = 1e-9;
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<PhaseRelation> found;
    const int max_size = std::min<int>(subset_bound, static_cast<int>(pairs.size()));
    for (int size = 1; size <= max_size; ++size) {
        std::vector<int> pick(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
        while (true) {
            // Exponents: first in [1, b], rest in [-b, b] \ {0}.
            std::vector<int> e(static_cast<std::size_t>(size), -exp_bound);
            e[0] = 1;
            while (true) {
                double s = 0.0;
                for (int i = 0; i < size; ++i) s += 2.0 * e[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
                const double r = std::abs(std::remainder(s, two_pi));
                if (r < tol) {
                    PhaseRelation rel;
                    for (int i = 0; i < size; ++i) rel.pairs.push_back(pairs[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]);
                    rel.exponents = e;
                    rel.residual = r;
                    found.push_back(std::move(rel));
                }
                int pos = size - 1;
                for (; pos >= 0; --pos) {
                    auto& v = e[static_cast<std::size_t>(pos)];
                    v = v == -1 ? 1 : v + 1;
                    if (v <= exp_bound) break;
                    v = pos == 0 ? 1 : -exp_bound;
                }
                if (pos < 0) break;
            }
            int i = size - 1;
            while (i >= 0 && pick[static_cast<std::size_t>(i)] == static_cast<int>(pairs.size()) - size + i) --i;
            if (i < 0) break;
            ++pick[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < size; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return found;
}

namespace {

// Degree <= 3 dihedral polynomial invariants: f[0], f[l] f[-l], and the
// symmetrized triple products. Valid for complex as well as real signals.
std::vector<Complex> dihedral_polynomials(const FourierSignal& f)
{
    std::vector<Complex> out{f[0]};
    const auto pp = polynomial_power(f);
    out.insert(out.end(), pp.begin(), pp.end());
    const auto third = dihedral_third_moment(f);
    out.insert(out.end(), third.begin(), third.end());
    return out;
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double orbit_distance(const FourierSignal& f, const FourierSignal& g, GroupKind group)
{
    double best = INFINITY;
    for (const auto& el : group_elements(group, f.size())) {
        const auto moved = apply_group_fourier(el, f);
        double s = 0.0;
        for (int l = 0; l < f.size(); ++l) s += std::norm(g[l] - moved[l]);
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

FourierSignal fourier(std::vector<Complex> c) { return FourierSignal{std::move(c), false}; }

}  // namespace

std::vector<TheoryCheck> verify_counterexamples()
{
    constexpr Complex I{0.0, 1.0};
    std::vector<TheoryCheck> out;

    const auto a1 = fourier({1.0, 1.0, 0.0, 0.0, 1.0});
    const auto a2 = fourier({1.0, 0.5, 0.0, 0.0, 2.0});
    const double da = max_diff(dihedral_polynomials(a1), dihedral_polynomials(a2));
    out.push_back({"counterexample_invariants_agree", std::nullopt, "a", da < 1e-12, "max difference " + fmt(da)});
    const double sa = orbit_distance(a1, a2, GroupKind::dihedral);
    out.push_back({"counterexample_orbits_distinct", std::nullopt, "a", sa > 0.1, "orbit distance " + fmt(sa)});

    const auto b1 = fourier({1.0, I, -I, I, -I});
    const auto b2 = fourier({1.0, -I, -I, I, I});
    const double db = max_diff(dihedral_polynomials(b1), dihedral_polynomials(b2));
    out.push_back({"counterexample_invariants_agree", std::nullopt, "b", db < 1e-12, "max difference " + fmt(db)});
    const double sb = orbit_distance(b1, b2, GroupKind::dihedral);
    out.push_back({"counterexample_orbits_distinct", std::nullopt, "b", sb > 0.1, "orbit distance " + fmt(sb)});
    const Complex c1 = b1[1] * b1[2] * std::conj(b1[3]);
    const Complex c2 = b2[1] * b2[2] * std::conj(b2[3]);
    out.push_back({"counterexample_cyclic_bispectrum_differs", std::nullopt, "b", std::abs(c1 - c2) > 0.1,
                   "entry (1,2): " + fmt(c1) + " vs " + fmt(c2)});
    double low = INFINITY;
    for (const auto* f : {&b1, &b2}) {
        low = std::min(low, std::abs((*f)[0]));
        for (const auto& p : polynomial_power(*f)) low = std::min(low, std::abs(p));
    }
    out.push_back({"counterexample_low_degree_nonvanishing", std::nullopt, "b", low > 0.1,
                   "smallest degree 1-2 invariant modulus " + fmt(low)});
    return out;
}

std::vector<TheoryCheck> verify_theory(int k_max)
{
    check_k(k_max);
    std::vector<TheoryCheck> out;
    for (int k = 2; k <= k_max; ++k) {
        const auto r = xij_rank(k);
        out.push_back({"hyperplane_span", k, "", r.spans_hyperplane && r.orthogonal,
                       "rank " + std::to_string(r.rank) + (r.orthogonal ? ", orthogonal to (1..k)" : ", NOT orthogonal")});
    }
    for (int k = 3; k <= k_max; ++k) {
        const FormMatrix fm = form_matrix(k);
        const auto essential = first_essential_row(fm);
        const bool expected = k >= 4;
        out.push_back({"excessive_spanning", k, "", essential.has_value() != expected,
                       essential ? "removing row " + pair_name(fm.pairs[*essential]) + " drops the rank"
                                 : "every single deletion keeps rank " + std::to_string(k - 1)});
    }
    for (int k = 3; k <= k_max; ++k) {
        const auto res = search_nonzero_annihilator(k);
        std::string witness;
        if (res.exists) {
            witness = "m = (";
            for (std::size_t i = 0; i < res.m.size(); ++i) witness += (i ? "," : "") + std::to_string(res.m[i]);
            witness += ")";
        } else {
            witness = res.reason;
        }
        out.push_back({"nonzero_annihilator", k, "", res.exists == (k >= 4), witness});
    }
    auto ce = verify_counterexamples();
    out.insert(out.end(), ce.begin(), ce.end());
    return out;
}

void write_theory_report(const std::vector<TheoryCheck>& checks, const std::filesystem::path& path)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json j;
        j["name"] = c.name;
        if (c.k) j["k"] = *c.k;
        else j["pair"] = c.pair;
        j["pass"] = c.pass;
        j["witness"] = c.witness;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << arr.dump(2) << '\n';
}

}  // namespace dmra
