#include "heckelab/character.hpp"

#include <map>
#include <numbers>
#include <sstream>

namespace heckelab {

i64 conrey_generator(i64 p) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("conrey_generator: odd prime required");
    for (i64 g = 2;; ++g) {
        if (multiplicative_order(g, p) != p - 1) continue;
        if (powmod(g, p - 1, p * p) != 1) return g;
    }
}

std::vector<i64> unit_generators(i64 p, int n) {
    if (!is_prime(p)) throw std::invalid_argument("unit_generators: " + std::to_string(p) + " is not prime");
    if (n < 1) throw std::invalid_argument("unit_generators: exponent must be >= 1");
    if (p != 2) return {conrey_generator(p) % ipow(p, n)};
    if (n == 1) return {};
    if (n == 2) return {3};
    return {ipow(2, n) - 1, 5};
}

std::vector<i64> unit_generator_orders(i64 p, int n) {
    if (p != 2) return {ipow(p, n - 1) * (p - 1)};
    if (n == 1) return {};
    if (n == 2) return {2};
    return {2, ipow(2, n - 2)};
}

namespace {

// u mod q -> exponent vector on the component generators
std::vector<std::vector<i64>> discrete_logs(const CharComponent& c) {
    std::vector<std::vector<i64>> dl(static_cast<size_t>(c.q));
    if (c.gens.empty()) {
        dl[1 % c.q] = {};
        return dl;
    }
    if (c.gens.size() == 1) {
        i64 x = 1;
        for (i64 a = 0; a < c.orders[0]; ++a, x = mulmod(x, c.gens[0], c.q)) dl[static_cast<size_t>(x)] = {a};
        return dl;
    }
    i64 x = 1;
    for (i64 a = 0; a < c.orders[0]; ++a, x = mulmod(x, c.gens[0], c.q)) {
        i64 y = x;
        for (i64 b = 0; b < c.orders[1]; ++b, y = mulmod(y, c.gens[1], c.q)) dl[static_cast<size_t>(y)] = {a, b};
    }
    return dl;
}

CharComponent make_component(i64 p, int e) {
    CharComponent c;
    c.p = p;
    c.e = e;
    c.q = ipow(p, e);
    c.gens = unit_generators(p, e);
    c.orders = unit_generator_orders(p, e);
    c.exps.assign(c.gens.size(), 0);
    return c;
}

}  // namespace

void DirChar::build_table() {
    i64 L = 1;
    for (const auto& c : comps_)
        for (auto o : c.orders) L = lcm(L, o);
    std::vector<std::vector<std::vector<i64>>> dls;
    for (const auto& c : comps_) dls.push_back(discrete_logs(c));
    std::vector<i64> t(static_cast<size_t>(N_), -1);
    i64 g = L;
    for (i64 u = 0; u < N_; ++u) {
        if (gcd(u, N_) != 1) continue;
        i64 s = 0;
        for (size_t k = 0; k < comps_.size(); ++k) {
            const auto& c = comps_[k];
            const auto& dl = dls[k][static_cast<size_t>(u % c.q)];
            for (size_t i = 0; i < c.gens.size(); ++i) s = mod(s + mulmod(c.exps[i] * dl[i], L / c.orders[i], L), L);
        }
        t[static_cast<size_t>(u)] = s;
        g = gcd(g, s);
    }
    order_ = L / g;
    table_.assign(static_cast<size_t>(N_), -1);
    for (i64 u = 0; u < N_; ++u)
        if (t[static_cast<size_t>(u)] >= 0) table_[static_cast<size_t>(u)] = static_cast<int>(t[static_cast<size_t>(u)] / g);
}

DirChar DirChar::trivial(i64 N) {
    return from_exponents(N, {});
}

DirChar DirChar::from_exponents(i64 N, const std::vector<std::vector<i64>>& exps) {
    if (N < 1) throw std::invalid_argument("character modulus must be positive");
    DirChar chi;
    chi.N_ = N;
    chi.comps_.clear();
    auto fac = N == 1 ? std::vector<std::pair<i64, int>>{} : factorize(N);
    if (!exps.empty() && exps.size() != fac.size())
        throw std::invalid_argument("exponent form: expected one exponent vector per prime-power factor of " + std::to_string(N));
    for (size_t k = 0; k < fac.size(); ++k) {
        auto c = make_component(fac[k].first, fac[k].second);
        if (!exps.empty()) {
            if (exps[k].size() != c.gens.size())
                throw std::invalid_argument("exponent form: wrong number of generator exponents for modulus " + std::to_string(c.q));
            for (size_t i = 0; i < c.gens.size(); ++i) c.exps[i] = mod(exps[k][i], c.orders[i]);
        }
        chi.comps_.push_back(c);
    }
    chi.build_table();
    return chi;
}

DirChar DirChar::from_conrey(i64 N, i64 j) {
    if (N < 1) throw std::invalid_argument("character modulus must be positive");
    j = mod(j, N);
    if (gcd(j, N) != 1) throw std::invalid_argument("Conrey label " + std::to_string(j) + " is not a unit mod " + std::to_string(N));
    std::vector<std::vector<i64>> exps;
    for (auto [p, e] : (N == 1 ? std::vector<std::pair<i64, int>>{} : factorize(N))) {
        auto c = make_component(p, e);
        i64 jj = j % c.q;
        auto dl = discrete_logs(c);
        if (p != 2) {
            exps.push_back(dl[static_cast<size_t>(jj)]);
        } else if (e == 1) {
            exps.push_back({});
        } else if (e == 2) {
            exps.push_back({jj == 3 ? 1 : 0});
        } else {
            bool neg = jj % 4 == 3;
            i64 pos = neg ? c.q - jj : jj;
            // dl over (-1, 5); pos lies in <5>
            exps.push_back({neg ? 1 : 0, dl[static_cast<size_t>(pos)][1]});
        }
    }
    return from_exponents(N, exps);
}

DirChar DirChar::from_value_table(i64 N, const std::vector<int>& values, i64 L) {
    if (static_cast<i64>(values.size()) != N) throw std::invalid_argument("value table size does not match modulus");
    auto fac = N == 1 ? std::vector<std::pair<i64, int>>{} : factorize(N);
    for (i64 u = 0; u < N; ++u) {
        bool unit = gcd(u, N) == 1;
        if (unit != (values[static_cast<size_t>(u)] >= 0)) throw std::invalid_argument("value table: wrong unit pattern");
    }
    if (values[static_cast<size_t>(1 % N)] != 0) throw std::invalid_argument("value table: chi(1) != 1");
    std::vector<std::vector<i64>> exps;
    std::vector<i64> lifted;
    for (auto [p, e] : fac) {
        auto c = make_component(p, e);
        std::vector<i64> ex;
        for (size_t i = 0; i < c.gens.size(); ++i) {
            // u = gen mod q, 1 mod N/q
            i64 rest = N / c.q;
            i64 t = mulmod(mod(c.gens[i] - 1, c.q), *inv_mod(rest, c.q), c.q);
            i64 u = mod(1 + rest * t, N);
            lifted.push_back(u);
            i64 v = values[static_cast<size_t>(u)];
            if ((v * c.orders[i]) % L != 0) throw std::invalid_argument("value table: generator value has wrong order");
            ex.push_back(v * c.orders[i] / L);
        }
        exps.push_back(ex);
    }
    for (i64 u = 0; u < N; ++u) {
        if (values[static_cast<size_t>(u)] < 0) continue;
        for (i64 g : lifted) {
            i64 ug = mulmod(u, g, N);
            if (mod(values[static_cast<size_t>(u)] + values[static_cast<size_t>(g)] - values[static_cast<size_t>(ug)], L) != 0)
                throw std::invalid_argument("value table is not multiplicative");
        }
    }
    return from_exponents(N, exps);
}

CycNum DirChar::value(i64 u, const FieldPtr& f) const {
    int t = exponent(u);
    if (t < 0) return CycNum::zero(f);
    if (f->order() % order_ != 0) throw std::invalid_argument("field does not contain the character values");
    return CycNum::root(f, static_cast<i64>(t) * (f->order() / order_));
}

std::complex<double> DirChar::complex_value(i64 u) const {
    int t = exponent(u);
    if (t < 0) return 0.0;
    return std::polar(1.0, 2 * std::numbers::pi * t / static_cast<double>(order_));
}

int DirChar::conductor_exponent(i64 p) const {
    for (const auto& c : comps_) {
        if (c.p != p) continue;
        DirChar cp = component(p);
        return heckelab::conductor(p, c.e, cp.table_, cp.order_);
    }
    return 0;
}

i64 DirChar::conductor() const {
    i64 f = 1;
    for (const auto& c : comps_) f *= ipow(c.p, conductor_exponent(c.p));
    return f;
}

int DirChar::parity() const {
    int t = exponent(-1);
    return (2 * static_cast<i64>(t)) % order_ == 0 && t != 0 ? -1 : 1;
}

DirChar DirChar::conj() const {
    std::vector<std::vector<i64>> ex;
    for (const auto& c : comps_) {
        std::vector<i64> v;
        for (size_t i = 0; i < c.exps.size(); ++i) v.push_back(mod(-c.exps[i], c.orders[i]));
        ex.push_back(v);
    }
    return from_exponents(N_, ex);
}

DirChar DirChar::operator*(const DirChar& o) const {
    if (o.N_ != N_) throw std::invalid_argument("character product: moduli differ");
    std::vector<std::vector<i64>> ex;
    for (size_t k = 0; k < comps_.size(); ++k) {
        std::vector<i64> v;
        for (size_t i = 0; i < comps_[k].exps.size(); ++i) v.push_back(comps_[k].exps[i] + o.comps_[k].exps[i]);
        ex.push_back(v);
    }
    return from_exponents(N_, ex);
}

DirChar DirChar::component(i64 p) const {
    for (const auto& c : comps_)
        if (c.p == p) return from_exponents(c.q, {c.exps});
    return trivial(1);
}

DirChar DirChar::away_from(i64 p) const {
    i64 M = N_;
    std::vector<std::vector<i64>> ex;
    for (const auto& c : comps_) {
        if (c.p == p) M /= c.q;
        else ex.push_back(c.exps);
    }
    return from_exponents(M, ex);
}

DirChar DirChar::with_modulus(i64 M) const {
    if (M == N_) return *this;
    const i64 f = conductor();
    if (M % f != 0) throw std::invalid_argument("with_modulus: " + std::to_string(M) + " is not a multiple of the conductor " + std::to_string(f));
    // primitive values mod f, through lifts coprime to N
    std::vector<int> prim(static_cast<size_t>(f), -1);
    for (i64 u = 0; u < f; ++u) {
        if (gcd(u, f) != 1) continue;
        i64 v = u;
        while (gcd(v, N_) != 1) v += f;
        prim[static_cast<size_t>(u)] = exponent(v);
    }
    std::vector<int> vals(static_cast<size_t>(M), -1);
    for (i64 u = 0; u < M; ++u)
        if (gcd(u, M) == 1) vals[static_cast<size_t>(u)] = prim[static_cast<size_t>(u % f)];
    return from_value_table(M, vals, order_);
}

bool DirChar::same_values(const DirChar& o) const {
    if (o.N_ != N_) return false;
    for (i64 u = 0; u < N_; ++u) {
        i64 a = table_[static_cast<size_t>(u)], b = o.table_[static_cast<size_t>(u)];
        if ((a < 0) != (b < 0)) return false;
        if (a >= 0 && a * o.order_ != b * order_) return false;
    }
    return true;
}

std::string DirChar::to_string() const {
    std::ostringstream os;
    os << "chi mod " << N_ << " [";
    for (size_t k = 0; k < comps_.size(); ++k) {
        if (k) os << "; ";
        os << comps_[k].q << ":";
        for (size_t i = 0; i < comps_[k].exps.size(); ++i) os << (i ? "," : "") << comps_[k].exps[i];
    }
    os << "] order " << order_;
    return os.str();
}

std::vector<DirChar> crt_decompose(const DirChar& chi) {
    std::vector<DirChar> out;
    for (const auto& c : chi.components()) out.push_back(chi.component(c.p));
    return out;
}

CycNum char_eval(const DirChar& chi, i64 u, const FieldPtr& f) { return chi.value(u, f); }

int conductor(i64 p, int n, const std::vector<int>& exps, i64 L) {
    const i64 q = ipow(p, n);
    if (static_cast<i64>(exps.size()) != q) throw std::invalid_argument("conductor: table size is not p^n");
    for (i64 u = 0; u < q; ++u)
        if ((u % p != 0) != (exps[static_cast<size_t>(u)] >= 0)) throw std::invalid_argument("conductor: wrong unit pattern");
    if (exps[1 % q] != 0) throw std::invalid_argument("conductor: chi(1) != 1");
    for (i64 u = 1; u < q; ++u) {
        if (u % p == 0) continue;
        for (i64 v = u; v < q; ++v) {
            if (v % p == 0) continue;
            i64 uv = mulmod(u, v, q);
            if (mod(exps[static_cast<size_t>(u)] + exps[static_cast<size_t>(v)] - exps[static_cast<size_t>(uv)], L) != 0)
                throw std::invalid_argument("conductor: value table is not multiplicative");
        }
    }
    for (int r = 0; r <= n; ++r) {
        const i64 pr = ipow(p, r);
        bool trivial = true;
        for (i64 u = 1; trivial && u < q; u += pr)
            if (u % p != 0 && exps[static_cast<size_t>(u)] != 0) trivial = false;
        if (trivial) return r;
    }
    return n;
}

PChar::PChar(i64 p, int n, DirChar chi) : p_(p), n_(n), q_(ipow(p, n)), chi_(std::move(chi)) {
    if (!is_prime(p)) throw std::invalid_argument("PChar: p must be prime");
    if (n < 1) throw std::invalid_argument("PChar: n must be >= 1");
    if (chi_.modulus() != q_) throw std::invalid_argument("PChar: character modulus must be p^n");
    r_ = conductor(p_, n_, chi_.exponent_table(), chi_.order());
}

int PChar::exponent(i64 u) const {
    int t = chi_.exponent(u);
    if (t < 0) throw std::domain_error("PChar evaluated at a non-unit");
    return t;
}

CycNum PChar::value(i64 u, const FieldPtr& f) const {
    exponent(u);
    return chi_.value(u, f);
}

std::vector<std::pair<i64, PChar>> all_pchars(i64 p, int n) {
    const i64 q = ipow(p, n);
    std::vector<std::pair<i64, PChar>> out;
    if (q == 2) {
        out.emplace_back(1, PChar::from_conrey(p, n, 1));
        return out;
    }
    for (i64 j = 1; j < q; ++j)
        if (j % p != 0) out.emplace_back(j, PChar::from_conrey(p, n, j));
    return out;
}

}  // namespace heckelab
