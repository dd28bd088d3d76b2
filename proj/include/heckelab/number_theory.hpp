#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heckelab {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

// Narrow a 128-bit intermediate, throwing instead of wrapping.
inline i64 narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("int64 overflow in exact arithmetic");
    return static_cast<i64>(v);
}

inline i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>(static_cast<i128>(mod(a, m)) * mod(b, m) % m); }

i64 powmod(i64 a, i64 e, i64 m);
i64 ipow(i64 b, int e);  // checked
i64 gcd(i64 a, i64 b);
i128 gcd128(i128 a, i128 b);
i64 lcm(i64 a, i64 b);

struct Egcd {
    i64 g, x, y;  // a*x + b*y = g
};
Egcd egcd(i64 a, i64 b);
std::optional<i64> inv_mod(i64 a, i64 m);

bool is_prime(i64 n);
std::vector<std::pair<i64, int>> factorize(i64 n);
i64 euler_phi(i64 n);
int valuation(i64 x, i64 p);  // x != 0
i64 multiplicative_order(i64 a, i64 m);

}  // namespace heckelab
