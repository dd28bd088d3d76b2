#include <cmath>
#include <stdexcept>

#include "heckelab/classical.hpp"

namespace heckelab {

namespace {

double lambda_local(int r, int s, i64 p) {
    if (2 * s <= r) {
        if (r % 2 == 0) return static_cast<double>(ipow(p, r / 2) + ipow(p, r / 2 - 1));
        return 2.0 * static_cast<double>(ipow(p, (r - 1) / 2));
    }
    return 2.0 * static_cast<double>(ipow(p, r - s));
}

double gamma_k(int k) {
    switch (k % 3) {
        case 1: return 0;
        case 2: return -1.0 / 3;
        default: return 1.0 / 3;
    }
}

double mu_k(int k) {
    if (k % 2 == 1) return 0;
    return k % 4 == 2 ? -0.25 : 0.25;
}

// beta(p^e) in the Moebius-type inversion from all forms to new forms
i64 beta(i64 m) {
    i64 b = 1;
    for (auto [p, e] : factorize(m)) {
        if (e == 1) b *= -2;
        else if (e >= 3) return 0;
    }
    return b;
}

}  // namespace

i64 cusp_dimension(i64 N, int k, const DirChar& chi) {
    if (k < 2) throw std::invalid_argument("cusp_dimension: weight must be at least 2");
    if (chi.modulus() != N) throw std::invalid_argument("cusp_dimension: character modulus differs from the level");
    if (chi.parity() != (k % 2 == 0 ? 1 : -1)) return 0;
    const i64 f = chi.conductor();
    double index = static_cast<double>(N), prod = 1;
    for (auto [p, r] : factorize(N)) {
        index *= 1.0 + 1.0 / static_cast<double>(p);
        prod *= lambda_local(r, valuation(f, p), p);
    }
    cplx s3 = 0, s4 = 0;
    for (i64 x = 0; x < N; ++x) {
        if (mod(x * x + x + 1, N) == 0) s3 += chi.complex_value(x);
        if (mod(x * x + 1, N) == 0) s4 += chi.complex_value(x);
    }
    const double v = (k - 1) / 12.0 * index - 0.5 * prod + gamma_k(k) * s3.real() + mu_k(k) * s4.real() + ((k == 2 && chi.is_trivial()) ? 1 : 0);
    const double rv = std::round(v);
    if (std::abs(v - rv) > 1e-6 || std::abs(s3.imag()) > 1e-6 || std::abs(s4.imag()) > 1e-6)
        throw std::logic_error("cusp_dimension: non-integral value " + std::to_string(v));
    return static_cast<i64>(rv);
}

i64 new_dimension(i64 N, int k, const DirChar& chi) {
    const i64 f = chi.conductor();
    i64 total = 0;
    for (i64 M = f; M <= N; M += f) {
        if (N % M != 0) continue;
        const i64 b = beta(N / M);
        if (b == 0) continue;
        total += b * cusp_dimension(M, k, chi.with_modulus(M));
    }
    return total;
}

}  // namespace heckelab
