#pragma once

#include <vector>

#include "heckelab/number_theory.hpp"

namespace heckelab {

// F_ell with ell = 1 mod m and a fixed primitive m-th root of unity omega.
// Reducing Z[zeta_m, 1/den] -> F_ell through zeta -> omega is a ring map, so ranks
// can only drop; for idempotent matrices rank = trace and the reduction is exact.
struct PrimeField {
    u64 ell = 0;
    u64 omega = 0;
    int m = 1;
};

// k-th prime ell = 1 mod m above 2^30 (k = 0, 1, ...)
PrimeField make_prime_field(int m, int k = 0);

u64 addmod_u(u64 a, u64 b, u64 p);
u64 mulmod_u(u64 a, u64 b, u64 p);
u64 powmod_u(u64 a, u64 e, u64 p);
u64 invmod_u(u64 a, u64 p);

// rank of a dense matrix over F_ell; rows are consumed
int rank_mod(std::vector<std::vector<u64>> rows, u64 ell);

}  // namespace heckelab
