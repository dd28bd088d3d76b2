#pragma once

// Brute-force computations on GL2(Z/p^n) used as independent checks.
// Nothing here goes through the coset tables of the library.

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using i64 = std::int64_t;

struct Group {
    i64 p;
    int n;
    i64 q;
    Group(i64 p, int n);
    i64 encode(i64 a, i64 b, i64 c, i64 d) const;
    void decode(i64 x, i64& a, i64& b, i64& c, i64& d) const;
    bool invertible(i64 x) const;
    i64 mul(i64 x, i64 y) const;
    i64 inv(i64 x) const;
    i64 lower_right(i64 x) const;
    i64 order() const;  // |GL2(Z/q)|
    i64 k0_order() const;
    std::vector<i64> k0() const;

private:
    std::vector<i64> unit_inv;  // 0 on non-units
};

// A function on the group with values zeta^e (e >= 0) or 0 (e = -1).
struct Twisted {
    std::vector<int> exp;
    bool consistent = true;
};

// f(k1 g k2) = chi(k1) chi(k2) on K0 g K0 and 0 elsewhere, chi(k) = zeta^{chi_exp[d(k)]}.
// consistent == false when no such function exists; exp is then partial and must not be used.
Twisted twisted_indicator(const Group& G, i64 g, const std::vector<int>& chi_exp, int m);

// (f1 * f2)(h) = (1/|K0|) sum_x f1(x) f2(x^{-1} h), as counts of each root of unity:
// result[e] / |K0| is the coefficient of zeta^e.
std::vector<i64> convolve_at(const Group& G, const Twisted& f1, const Twisted& f2, i64 h, int m);

// partition of the group into K0 double cosets: sizes keyed by a representative
std::vector<std::pair<i64, i64>> double_coset_census(const Group& G);

// orbits of K0 acting on P^1(Z/q) on the right, with points normalized by
// minimizing the row (c, d) over unit scalings. Returns orbit sizes keyed by a
// normalized representative row.
std::vector<std::pair<std::pair<i64, i64>, i64>> p1_orbit_census(i64 p, int n);

// dim of { v in I(n) : v(g k) = chi(d(k)) v(g) for k in K0(p^level) }, where I(n) is
// functions with v(k0 g) = chi(d(k0)) v(g). Uses its own coset representatives
// (1, 0; c, 1) and (0, -1; 1, d) and propagates values along generator orbits.
// chi_exp[u] is the exponent of zeta_m at a unit u mod p^n.
int fixed_dimension(i64 p, int n, const std::vector<int>& chi_exp, int m, int level);

}  // namespace oracle
