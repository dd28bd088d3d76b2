#include "heckelab/number_theory.hpp"

#include <cstdlib>

namespace heckelab {

i64 powmod(i64 a, i64 e, i64 m) {
    if (m == 1) return 0;
    i64 r = 1;
    a = mod(a, m);
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

i64 ipow(i64 b, int e) {
    i128 r = 1;
    for (int i = 0; i < e; ++i) r = narrow(r * b);
    return static_cast<i64>(r);
}

i64 gcd(i64 a, i64 b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i64 lcm(i64 a, i64 b) {
    if (a == 0 || b == 0) return 0;
    return narrow(static_cast<i128>(a / gcd(a, b)) * b);
}

Egcd egcd(i64 a, i64 b) {
    i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        i64 q = a / b;
        i64 t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) return {-a, -x0, -y0};
    return {a, x0, y0};
}

std::optional<i64> inv_mod(i64 a, i64 m) {
    if (m == 1) return 0;
    Egcd e = egcd(mod(a, m), m);
    if (e.g != 1) return std::nullopt;
    return mod(e.x, m);
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    std::vector<std::pair<i64, int>> out;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        out.emplace_back(d, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

i64 euler_phi(i64 n) {
    i64 r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

int valuation(i64 x, i64 p) {
    if (x == 0) throw std::invalid_argument("valuation of zero");
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

i64 multiplicative_order(i64 a, i64 m) {
    if (gcd(a, m) != 1) throw std::invalid_argument("multiplicative_order: not a unit");
    i64 ph = euler_phi(m);
    i64 ord = ph;
    for (auto [q, e] : factorize(ph)) {
        (void)e;
        while (ord % q == 0 && powmod(a, ord / q, m) == 1) ord /= q;
    }
    return ord;
}

}  // namespace heckelab
