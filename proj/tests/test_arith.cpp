#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "heckelab/character.hpp"
#include "heckelab/finite_field.hpp"
#include "json.hpp"

using namespace heckelab;

namespace {

// order of the subgroup generated by gens, by closure
i64 generated_order(const std::vector<i64>& gens, i64 q) {
    std::set<i64> seen{1 % q};
    std::vector<i64> frontier{1 % q};
    while (!frontier.empty()) {
        i64 x = frontier.back();
        frontier.pop_back();
        for (i64 g : gens) {
            i64 y = mulmod(x, g, q);
            if (seen.insert(y).second) frontier.push_back(y);
        }
    }
    return static_cast<i64>(seen.size());
}

// Conrey's definition evaluated directly: angle of chi_j(m) as a fraction of a full turn
double conrey_angle_prime_power(i64 p, int e, i64 j, i64 m) {
    const i64 q = ipow(p, e);
    j = mod(j, q);
    m = mod(m, q);
    if (p != 2) {
        i64 g = 2;
        // brute-force least primitive root mod p that stays primitive mod p^2
        for (;; ++g) {
            if (gcd(g, p) != 1) continue;
            if (multiplicative_order(g, p) == p - 1 && multiplicative_order(g, p * p) == p * (p - 1)) break;
        }
        const i64 ph = euler_phi(q);
        i64 aj = -1, am = -1, x = 1;
        for (i64 a = 0; a < ph; ++a, x = mulmod(x, g, q)) {
            if (x == j) aj = a;
            if (x == m) am = a;
        }
        return static_cast<double>(mulmod(aj, am, ph)) / static_cast<double>(ph);
    }
    if (e == 1) return 0.0;
    auto split = [&](i64 v, int& eps, i64& a) {
        eps = v % 4 == 1 ? 1 : -1;
        i64 t = eps == 1 ? v : q - v;
        a = -1;
        i64 x = 1;
        for (i64 k = 0; k < std::max<i64>(1, q / 4); ++k, x = mulmod(x, 5, q))
            if (x == t) a = k;
    };
    int ej, em;
    i64 aj, am;
    split(j, ej, aj);
    split(m, em, am);
    double v = (1 - ej) * (1 - em) / 8.0;
    if (e >= 3) v += static_cast<double>(aj * am) / static_cast<double>(q / 4);
    return v - std::floor(v);
}

double conrey_angle(i64 N, i64 j, i64 m) {
    double s = 0;
    for (auto [p, e] : factorize(N)) s += conrey_angle_prime_power(p, e, j, m);
    return s - std::floor(s);
}

double angle_of(const DirChar& chi, i64 u) { return static_cast<double>(chi.exponent(u)) / static_cast<double>(chi.order()); }

}  // namespace

TEST_CASE("unit generators") {
    CHECK(unit_generators(3, 2) == std::vector<i64>{2});
    CHECK(generated_order({2}, 9) == 6);
    CHECK(unit_generators(2, 1).empty());
    CHECK(unit_generators(2, 4) == std::vector<i64>{15, 5});
    CHECK(multiplicative_order(15, 16) == 2);
    CHECK(multiplicative_order(5, 16) == 4);
    CHECK_THROWS_AS(unit_generators(9, 1), std::invalid_argument);
    for (i64 p : {2, 3, 5, 7, 11, 13})
        for (int n = 1; ipow(p, n) <= 2000; ++n) CHECK(generated_order(unit_generators(p, n), ipow(p, n)) == euler_phi(ipow(p, n)));
}

TEST_CASE("Conrey labels agree with the direct definition") {
    for (i64 N : {3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 27, 32, 44, 45, 63, 64, 100}) {
        for (i64 j = 1; j < N; ++j) {
            if (gcd(j, N) != 1) continue;
            DirChar chi = DirChar::from_conrey(N, j);
            for (i64 m = 1; m < N; ++m) {
                if (gcd(m, N) != 1) continue;
                double d = angle_of(chi, m) - conrey_angle(N, j, m);
                d -= std::round(d);
                CHECK_MESSAGE(std::abs(d) < 1e-12, "N=" << N << " j=" << j << " m=" << m);
            }
        }
    }
}

TEST_CASE("Conrey labels agree with the fixture character tables") {
    namespace fs = std::filesystem;
    int seen = 0;
    for (const auto& ent : fs::directory_iterator(HECKELAB_FIXTURE_DIR)) {
        if (ent.path().filename().string().rfind("S", 0) != 0) continue;
        auto js = nlohmann::json::parse(std::ifstream(ent.path()));
        i64 N = js["character"]["modulus"], j = js["character"]["conrey"];
        i64 ord = js["character_check"]["order"];
        DirChar chi = DirChar::from_conrey(N, j);
        CHECK(chi.order() == ord);
        for (const auto& pr : js["character_check"]["exponents"]) {
            i64 u = pr[0], e = pr[1];
            CHECK(chi.exponent(u) * ord == e * chi.order());
        }
        ++seen;
    }
    CHECK(seen > 10);
}

TEST_CASE("characters are homomorphisms, exhaustively for p^n <= 512") {
    for (i64 q : {8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 243, 256, 343, 512}) {
        auto pf = factorize(q);
        auto chars = all_pchars(pf[0].first, pf[0].second);
        CHECK(static_cast<i64>(chars.size()) == euler_phi(q));
        for (const auto& [j, chi] : chars) {
            const auto& D = chi.dirichlet();
            bool ok = D.exponent(1) == 0;
            for (i64 u = 1; u < q && ok; ++u) {
                if (u % pf[0].first == 0) continue;
                for (i64 v = u; v < q; ++v) {
                    if (v % pf[0].first == 0) continue;
                    if (mod(D.exponent(u) + D.exponent(v) - D.exponent(mulmod(u, v, q)), D.order()) != 0) {
                        ok = false;
                        break;
                    }
                }
            }
            CHECK_MESSAGE(ok, "q=" << q << " j=" << j);
        }
    }
}

TEST_CASE("conductor") {
    CHECK(PChar::trivial(3, 2).r() == 0);
    CHECK(PChar::trivial(2, 3).r() == 0);
    // label 2 mod 9 is faithful of order 6
    PChar faithful = PChar::from_conrey(3, 2, 2);
    CHECK(faithful.order() == 6);
    CHECK(faithful.r() == 2);
    // label 8 = -1 mod 9 has order 2 and factors through mod 3
    PChar quad = PChar::from_conrey(3, 2, 8);
    CHECK(quad.order() == 2);
    CHECK(quad.r() == 1);
    // faithful characters mod p^n have conductor exponent n
    for (auto [p, n] : std::vector<std::pair<i64, int>>{{3, 3}, {5, 2}, {7, 2}, {2, 4}}) {
        for (const auto& [j, chi] : all_pchars(p, n)) {
            std::set<int> values;
            for (i64 u = 1; u < chi.q(); ++u)
                if (u % p) values.insert(chi.exponent(u));
            // exhaustive triviality test on 1 + p^r
            int r = 0;
            for (; r <= n; ++r) {
                bool triv = true;
                for (i64 u = 1; u < chi.q(); u += ipow(p, r))
                    if (u % p && chi.exponent(u) != 0) triv = false;
                if (triv) break;
            }
            CHECK(chi.r() == r);
            if (static_cast<i64>(values.size()) == euler_phi(chi.q())) CHECK(chi.r() == n);
        }
    }
    std::vector<int> bad(9, -1);
    for (int u : {1, 2, 4, 5, 7, 8}) bad[static_cast<size_t>(u)] = 0;
    bad[2] = 1;
    CHECK_THROWS_AS(conductor(3, 2, bad, 6), std::invalid_argument);
}

TEST_CASE("crt decomposition") {
    DirChar t12 = DirChar::trivial(12);
    auto comps = crt_decompose(t12);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].modulus() == 4);
    CHECK(comps[0].is_trivial());
    CHECK(comps[1].modulus() == 3);
    CHECK(comps[1].is_trivial());

    int found = 0;
    for (i64 j = 1; j < 15; ++j) {
        if (gcd(j, 15) != 1) continue;
        DirChar chi = DirChar::from_conrey(15, j);
        auto cs = crt_decompose(chi);
        for (i64 u = 1; u < 15; ++u) {
            if (gcd(u, 15) != 1) continue;
            double s = angle_of(cs[0], u % 3) + angle_of(cs[1], u % 5) - angle_of(chi, u);
            CHECK(std::abs(s - std::round(s)) < 1e-12);
        }
        if (chi.order() == 4 && cs[0].is_trivial()) {
            ++found;
            CHECK(cs[1].order() == 4);
        }
    }
    CHECK(found == 2);
    DirChar c9 = DirChar::from_conrey(9, 2);
    auto single = crt_decompose(c9);
    REQUIRE(single.size() == 1);
    CHECK(single[0].same_values(c9));
}

TEST_CASE("char_eval") {
    DirChar chi = DirChar::from_conrey(9, 2);
    auto F = CyclotomicField::get(6);
    CHECK(char_eval(chi, 1, F) == CycNum::one(F));
    CycNum z = char_eval(chi, 2, F);
    CycNum z2 = z * z, z3 = z2 * z, z6 = z3 * z3;
    CHECK(z6 == CycNum::one(F));
    CHECK(z2 != CycNum::one(F));
    CHECK(z3 != CycNum::one(F));
    CHECK(char_eval(chi, 3, F).is_zero());
    CHECK_THROWS_AS(PChar::from_conrey(3, 2, 2).value(3, F), std::domain_error);
    for (i64 N : {5, 7, 12, 16, 45}) {
        for (i64 j = 1; j < N; ++j) {
            if (gcd(j, N) != 1) continue;
            DirChar c = DirChar::from_conrey(N, j);
            CycNum v = c.value(-1);
            CHECK((v == CycNum(v.field(), 1) || v == CycNum(v.field(), -1)));
        }
    }
}

TEST_CASE("with_modulus, conj and flipped components") {
    DirChar chi = DirChar::from_conrey(44, 1);
    CHECK(chi.with_modulus(11).is_trivial());
    DirChar c27 = DirChar::from_conrey(27, 8);
    CHECK(c27.conductor() == 9);
    DirChar c9 = c27.with_modulus(9);
    for (i64 u = 1; u < 27; ++u)
        if (u % 3) CHECK(c9.exponent(u % 9) * c27.order() == c27.exponent(u) * c9.order());
    CHECK((c27 * c27.conj()).is_trivial());
    DirChar c45 = DirChar::from_conrey(45, 28);
    DirChar flipped = c45.component(3).conj().with_modulus(45) * c45.away_from(3).with_modulus(45);
    CHECK(flipped.modulus() == 45);
    CHECK(flipped.component(3).same_values(c45.component(3).conj()));
}

TEST_CASE("cyclotomic arithmetic") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<i64> U(-9, 9);
    for (int m : {1, 2, 3, 4, 5, 6, 8, 12, 15, 20, 24, 30, 48}) {
        auto F = CyclotomicField::get(m);
        auto rnd = [&] {
            std::vector<i64> c(static_cast<size_t>(F->degree()));
            for (auto& x : c) x = U(rng);
            i64 d = std::abs(U(rng)) + 1;
            return CycNum::from_coeffs(F, c, d);
        };
        double worst = 0;
        for (int t = 0; t < 1000 / 13 + 1; ++t) {
            CycNum a = rnd(), b = rnd(), c = rnd();
            CHECK(a * b == b * a);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK((a + b) - b == a);
            auto ea = a.embed(), eb = b.embed();
            worst = std::max(worst, std::abs((a * b).embed() - ea * eb) / std::max(1.0, std::abs(ea * eb)));
            worst = std::max(worst, std::abs((a + b).embed() - (ea + eb)) / std::max(1.0, std::abs(ea + eb)));
            // beyond degree 8 the norm of a random element no longer fits in 64 bits
            if (!a.is_zero() && F->degree() <= 8) CHECK(a * a.inverse() == CycNum::one(F));
            CHECK(std::abs(a.conj().embed() - std::conj(ea)) < 1e-9);
            CHECK(CycNum::from_coeff_strings(F, a.coeff_strings()) == a);
        }
        CHECK(worst < 1e-12);
        CHECK(CycNum::root(F, m) == CycNum::one(F));
    }
    auto F = CyclotomicField::get(7);
    CycNum big(F, INT64_MAX / 2);
    CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("prime field reduction is a ring map") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<i64> U(-20, 20);
    for (int m : {1, 4, 6, 20, 100}) {
        PrimeField P = make_prime_field(m);
        CHECK((P.ell - 1) % static_cast<u64>(m) == 0);
        CHECK(powmod_u(P.omega, static_cast<u64>(m), P.ell) == 1);
        for (auto [q, e] : (m == 1 ? std::vector<std::pair<i64, int>>{} : factorize(m))) CHECK(powmod_u(P.omega, static_cast<u64>(m / q), P.ell) != 1);
        auto F = CyclotomicField::get(m);
        for (int t = 0; t < 50; ++t) {
            std::vector<i64> c1(static_cast<size_t>(F->degree())), c2(c1.size());
            for (auto& x : c1) x = U(rng);
            for (auto& x : c2) x = U(rng);
            CycNum a = CycNum::from_coeffs(F, c1, 3), b = CycNum::from_coeffs(F, c2, 1);
            CHECK((a * b).reduce(P) == mulmod_u(a.reduce(P), b.reduce(P), P.ell));
            CHECK((a + b).reduce(P) == addmod_u(a.reduce(P), b.reduce(P), P.ell));
        }
    }
    CHECK(rank_mod({{1, 2}, {2, 4}}, 1000003) == 1);
    CHECK(rank_mod({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, 1000003) == 2);
}
