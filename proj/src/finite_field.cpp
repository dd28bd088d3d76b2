#include "heckelab/finite_field.hpp"

#include <stdexcept>

namespace heckelab {

u64 addmod_u(u64 a, u64 b, u64 p) {
    u64 s = a + b;
    return s >= p ? s - p : s;
}

u64 mulmod_u(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % p); }

u64 powmod_u(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod_u(r, a, p);
        a = mulmod_u(a, a, p);
        e >>= 1;
    }
    return r;
}

u64 invmod_u(u64 a, u64 p) {
    if (a % p == 0) throw std::domain_error("inverse of zero in F_ell");
    return powmod_u(a, p - 2, p);
}

PrimeField make_prime_field(int m, int k) {
    if (m < 1) throw std::invalid_argument("make_prime_field: m must be positive");
    const u64 start = (1ULL << 30);
    u64 ell = start - start % static_cast<u64>(m) + 1;
    if (ell <= start) ell += static_cast<u64>(m);
    int found = -1;
    for (;; ell += static_cast<u64>(m)) {
        if (!is_prime(static_cast<i64>(ell))) continue;
        if (++found == k) break;
    }
    auto mf = factorize(m);
    auto ellf = factorize(static_cast<i64>(ell - 1));
    for (u64 g = 2;; ++g) {
        bool gen = true;
        for (auto [q, e] : ellf) {
            (void)e;
            if (powmod_u(g, (ell - 1) / static_cast<u64>(q), ell) == 1) {
                gen = false;
                break;
            }
        }
        if (!gen) continue;
        PrimeField F;
        F.ell = ell;
        F.m = m;
        F.omega = powmod_u(g, (ell - 1) / static_cast<u64>(m), ell);
        return F;
    }
}

int rank_mod(std::vector<std::vector<u64>> a, u64 p) {
    if (a.empty()) return 0;
    const size_t rows = a.size(), cols = a[0].size();
    size_t rank = 0;
    for (size_t c = 0; c < cols && rank < rows; ++c) {
        size_t piv = rank;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rank]);
        u64 inv = invmod_u(a[rank][c], p);
        for (size_t j = c; j < cols; ++j) a[rank][j] = mulmod_u(a[rank][j], inv, p);
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][c] == 0) continue;
            u64 f = p - a[i][c];
            for (size_t j = c; j < cols; ++j)
                if (a[rank][j]) a[i][j] = addmod_u(a[i][j], mulmod_u(f, a[rank][j], p), p);
        }
        ++rank;
    }
    return static_cast<int>(rank);
}

}  // namespace heckelab
