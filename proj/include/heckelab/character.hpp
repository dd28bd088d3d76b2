#pragma once

#include <complex>
#include <string>
#include <vector>

#include "heckelab/cyclotomic.hpp"

namespace heckelab {

// Generators of (Z/p^n)^x: one primitive root for odd p (the Conrey generator,
// primitive mod p^2), {} for 2, {3} for 4, {-1, 5} for 2^n with n >= 3.
std::vector<i64> unit_generators(i64 p, int n);
std::vector<i64> unit_generator_orders(i64 p, int n);

// least g primitive mod p with g^(p-1) != 1 mod p^2
i64 conrey_generator(i64 p);

struct CharComponent {
    i64 p = 0;
    int e = 0;
    i64 q = 1;                // p^e
    std::vector<i64> gens;    // residues mod q
    std::vector<i64> orders;  // generator orders
    std::vector<i64> exps;    // chi(gens[i]) = e(exps[i] / orders[i])
};

// Dirichlet character mod N, stored by exponents on fixed generators of each
// prime-power factor. Values are tabulated as exponents of zeta_order.
class DirChar {
public:
    DirChar() : table_{0} {}

    static DirChar trivial(i64 N);
    static DirChar from_conrey(i64 N, i64 j);
    // one exponent vector per prime-power factor, primes increasing
    static DirChar from_exponents(i64 N, const std::vector<std::vector<i64>>& exps);
    // values[u] = exponent in Z/L of chi(u) (-1 on non-units); validated multiplicative
    static DirChar from_value_table(i64 N, const std::vector<int>& values, i64 L);

    i64 modulus() const { return N_; }
    i64 order() const { return order_; }
    const std::vector<CharComponent>& components() const { return comps_; }

    // exponent t with chi(u) = zeta_order^t; -1 if gcd(u, N) > 1
    int exponent(i64 u) const { return table_[static_cast<size_t>(mod(u, N_))]; }
    const std::vector<int>& exponent_table() const { return table_; }
    bool is_unit(i64 u) const { return exponent(u) >= 0; }
    // zero on non-units
    CycNum value(i64 u, const FieldPtr& f) const;
    CycNum value(i64 u) const { return value(u, CyclotomicField::get(static_cast<int>(order_))); }
    std::complex<double> complex_value(i64 u) const;

    bool is_trivial() const { return order_ == 1; }
    i64 conductor() const;
    int conductor_exponent(i64 p) const;
    bool is_primitive() const { return conductor() == N_; }
    int parity() const;  // chi(-1) = +-1

    DirChar conj() const;
    DirChar operator*(const DirChar& o) const;
    // chi^{(p^a)} as a character mod p^a
    DirChar component(i64 p) const;
    // the character mod N / p^a given by the remaining components
    DirChar away_from(i64 p) const;
    // same values, different modulus; the new modulus must be a multiple of the conductor
    DirChar with_modulus(i64 M) const;
    bool same_values(const DirChar& o) const;

    std::string to_string() const;

private:
    void build_table();
    i64 N_ = 1;
    std::vector<CharComponent> comps_;
    std::vector<int> table_;
    i64 order_ = 1;
};

std::vector<DirChar> crt_decompose(const DirChar& chi);
CycNum char_eval(const DirChar& chi, i64 u, const FieldPtr& f);

// minimal r with chi trivial on 1 + p^r Z/p^n; exps indexed by u mod p^n (-1 on non-units),
// exponents in Z/L. Throws std::invalid_argument if the table is not a character.
int conductor(i64 p, int n, const std::vector<int>& exps, i64 L);

// A character of (Z/p^n)^x, extended to K0(p^n) through the lower-right entry.
class PChar {
public:
    PChar(i64 p, int n, DirChar chi);
    static PChar from_conrey(i64 p, int n, i64 j) { return PChar(p, n, DirChar::from_conrey(ipow(p, n), j)); }
    static PChar trivial(i64 p, int n) { return PChar(p, n, DirChar::trivial(ipow(p, n))); }

    i64 p() const { return p_; }
    int n() const { return n_; }
    i64 q() const { return q_; }
    int r() const { return r_; }
    i64 order() const { return chi_.order(); }
    const DirChar& dirichlet() const { return chi_; }
    // throws on non-units
    int exponent(i64 u) const;
    CycNum value(i64 u, const FieldPtr& f) const;
    bool operator==(const PChar& o) const { return p_ == o.p_ && n_ == o.n_ && chi_.same_values(o.chi_); }

private:
    i64 p_;
    int n_;
    i64 q_;
    int r_;
    DirChar chi_;
};

// all characters mod p^n as PChars, in Conrey-label order
std::vector<std::pair<i64, PChar>> all_pchars(i64 p, int n);

}  // namespace heckelab
