#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "heckelab/number_theory.hpp"

namespace heckelab {

// Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1).
class CyclotomicField {
public:
    static std::shared_ptr<const CyclotomicField> get(int m);

    int order() const { return m_; }
    int degree() const { return deg_; }
    // Phi_m, low to high, monic
    const std::vector<i64>& modulus_poly() const { return phi_; }
    // reduced coefficients of zeta^e, e taken mod m
    const std::vector<i64>& root_power(i64 e) const { return powers_[static_cast<size_t>(mod(e, m_))]; }
    std::complex<double> root_embedding(i64 e) const { return emb_[static_cast<size_t>(mod(e, m_))]; }

    explicit CyclotomicField(int m);

private:
    int m_;
    int deg_;
    std::vector<i64> phi_;
    std::vector<std::vector<i64>> powers_;
    std::vector<std::complex<double>> emb_;
};

using FieldPtr = std::shared_ptr<const CyclotomicField>;

struct PrimeField;

// Exact element of Q(zeta_m): integer numerators over a common positive denominator.
// All arithmetic is checked; an int64 overflow throws std::overflow_error.
class CycNum {
public:
    CycNum();  // rational zero
    explicit CycNum(FieldPtr f);
    CycNum(FieldPtr f, i64 num, i64 den = 1);

    static CycNum zero(FieldPtr f) { return CycNum(std::move(f)); }
    static CycNum one(FieldPtr f) { return CycNum(std::move(f), 1); }
    static CycNum root(FieldPtr f, i64 e);
    // sum_e counts[e] * zeta^e
    static CycNum from_root_counts(FieldPtr f, const std::vector<i64>& counts);
    static CycNum from_coeffs(FieldPtr f, std::vector<i64> num, i64 den);

    const FieldPtr& field() const { return f_; }
    int order() const { return f_->order(); }
    const std::vector<i64>& numerators() const { return num_; }
    i64 denominator() const { return den_; }

    bool is_zero() const;
    bool is_rational() const;
    // numerator/denominator of a rational value; throws if not rational
    std::pair<i64, i64> rational_value() const;

    CycNum operator-() const;
    CycNum& operator+=(const CycNum& o);
    CycNum& operator-=(const CycNum& o);
    CycNum& operator*=(const CycNum& o);
    CycNum& operator*=(i64 s);
    CycNum operator+(const CycNum& o) const { return CycNum(*this) += o; }
    CycNum operator-(const CycNum& o) const { return CycNum(*this) -= o; }
    CycNum operator*(const CycNum& o) const { return CycNum(*this) *= o; }
    CycNum operator*(i64 s) const { return CycNum(*this) *= s; }
    CycNum operator/(const CycNum& o) const { return *this * o.inverse(); }
    bool operator==(const CycNum& o) const;
    bool operator!=(const CycNum& o) const { return !(*this == o); }

    CycNum scaled(i64 num, i64 den) const;
    CycNum inverse() const;
    CycNum galois(i64 t) const;  // zeta -> zeta^t, gcd(t, m) = 1
    CycNum conj() const { return galois(-1); }
    CycNum in_field(FieldPtr target) const;  // re-express in Q(zeta_M), m | M

    std::complex<double> embed() const;
    u64 reduce(const PrimeField& F) const;

    std::string to_string() const;
    // coefficient strings "num/den" (or "num"), one per basis element
    std::vector<std::string> coeff_strings() const;
    static CycNum from_coeff_strings(FieldPtr f, const std::vector<std::string>& s);

private:
    void normalize();
    void align(CycNum& o);
    FieldPtr f_;
    std::vector<i64> num_;
    i64 den_ = 1;
};

inline CycNum operator*(i64 s, const CycNum& a) { return a * s; }

std::string rational_string(i64 num, i64 den);
std::pair<i64, i64> parse_rational(const std::string& s);

}  // namespace heckelab
