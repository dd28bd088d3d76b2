#include "heckelab/cyclotomic.hpp"

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "heckelab/finite_field.hpp"

namespace heckelab {

namespace {

using Poly = std::vector<i64>;

// exact quotient a / b, b monic
Poly poly_divide(Poly a, const Poly& b) {
    const size_t db = b.size() - 1;
    if (a.size() < b.size()) return {0};
    Poly q(a.size() - db, 0);
    for (size_t i = a.size(); i-- > db;) {
        i64 c = a[i];
        q[i - db] = c;
        if (!c) continue;
        for (size_t j = 0; j <= db; ++j) a[i - db + j] = narrow(static_cast<i128>(a[i - db + j]) - static_cast<i128>(c) * b[j]);
    }
    for (size_t i = 0; i < db; ++i)
        if (a[i] != 0) throw std::logic_error("cyclotomic polynomial division not exact");
    return q;
}

Poly cyclotomic_poly(int m) {
    static std::map<int, Poly> cache;
    static std::mutex mu;
    {
        std::lock_guard lk(mu);
        auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }
    Poly p(static_cast<size_t>(m) + 1, 0);
    p[0] = -1;
    p[static_cast<size_t>(m)] = 1;
    for (int d = 1; d < m; ++d)
        if (m % d == 0) p = poly_divide(p, cyclotomic_poly(d));
    std::lock_guard lk(mu);
    cache[m] = p;
    return p;
}

}  // namespace

CyclotomicField::CyclotomicField(int m) : m_(m) {
    if (m < 1) throw std::invalid_argument("cyclotomic order must be positive");
    phi_ = cyclotomic_poly(m);
    deg_ = static_cast<int>(phi_.size()) - 1;
    powers_.resize(static_cast<size_t>(m));
    std::vector<i64> cur(static_cast<size_t>(deg_), 0);
    cur[0] = 1;
    for (int e = 0; e < m; ++e) {
        powers_[static_cast<size_t>(e)] = cur;
        // multiply by zeta and reduce
        i64 top = cur.back();
        for (int i = deg_ - 1; i > 0; --i) cur[static_cast<size_t>(i)] = cur[static_cast<size_t>(i - 1)];
        cur[0] = 0;
        for (int i = 0; i < deg_; ++i) cur[static_cast<size_t>(i)] -= top * phi_[static_cast<size_t>(i)];
    }
    emb_.resize(static_cast<size_t>(m));
    for (int e = 0; e < m; ++e) emb_[static_cast<size_t>(e)] = std::polar(1.0, 2 * std::numbers::pi * e / m);
}

std::shared_ptr<const CyclotomicField> CyclotomicField::get(int m) {
    static std::map<int, std::shared_ptr<const CyclotomicField>> fields;
    static std::mutex mu;
    std::lock_guard lk(mu);
    auto& slot = fields[m];
    if (!slot) slot = std::make_shared<const CyclotomicField>(m);
    return slot;
}

CycNum::CycNum() : CycNum(CyclotomicField::get(1)) {}

CycNum::CycNum(FieldPtr f) : f_(std::move(f)), num_(static_cast<size_t>(f_->degree()), 0), den_(1) {}

CycNum::CycNum(FieldPtr f, i64 num, i64 den) : CycNum(std::move(f)) {
    if (den == 0) throw std::domain_error("zero denominator");
    num_[0] = num;
    den_ = den;
    normalize();
}

CycNum CycNum::root(FieldPtr f, i64 e) {
    CycNum r(f);
    r.num_ = f->root_power(e);
    return r;
}

CycNum CycNum::from_root_counts(FieldPtr f, const std::vector<i64>& counts) {
    std::vector<i128> acc(static_cast<size_t>(f->degree()), 0);
    for (size_t e = 0; e < counts.size(); ++e) {
        if (!counts[e]) continue;
        const auto& pw = f->root_power(static_cast<i64>(e));
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += static_cast<i128>(counts[e]) * pw[i];
    }
    CycNum r(f);
    for (size_t i = 0; i < acc.size(); ++i) r.num_[i] = narrow(acc[i]);
    r.normalize();
    return r;
}

CycNum CycNum::from_coeffs(FieldPtr f, std::vector<i64> num, i64 den) {
    if (num.size() != static_cast<size_t>(f->degree())) throw std::invalid_argument("coefficient count does not match field degree");
    if (den == 0) throw std::domain_error("zero denominator");
    CycNum r(f);
    r.num_ = std::move(num);
    r.den_ = den;
    r.normalize();
    return r;
}

void CycNum::normalize() {
    if (den_ < 0) {
        den_ = -den_;
        for (auto& c : num_) c = -c;
    }
    i64 g = den_;
    for (auto c : num_) g = gcd(g, c);
    if (g > 1) {
        den_ /= g;
        for (auto& c : num_) c /= g;
    }
    if (is_zero()) den_ = 1;
}

bool CycNum::is_zero() const {
    for (auto c : num_)
        if (c) return false;
    return true;
}

bool CycNum::is_rational() const {
    for (size_t i = 1; i < num_.size(); ++i)
        if (num_[i]) return false;
    return true;
}

std::pair<i64, i64> CycNum::rational_value() const {
    if (!is_rational()) throw std::domain_error("cyclotomic number is not rational");
    return {num_[0], den_};
}

void CycNum::align(CycNum& o) {
    if (f_ == o.f_) return;
    if (f_->degree() == 1) {
        *this = CycNum(o.f_, num_[0], den_);
        return;
    }
    if (o.f_->degree() == 1) {
        o = CycNum(f_, o.num_[0], o.den_);
        return;
    }
    throw std::invalid_argument("cyclotomic numbers from different fields");
}

CycNum CycNum::operator-() const {
    CycNum r(*this);
    for (auto& c : r.num_) c = -c;
    return r;
}

CycNum& CycNum::operator+=(const CycNum& o_in) {
    CycNum o(o_in);
    align(o);
    i64 g = gcd(den_, o.den_);
    i128 fa = o.den_ / g, fb = den_ / g;
    for (size_t i = 0; i < num_.size(); ++i) num_[i] = narrow(num_[i] * fa + o.num_[i] * fb);
    den_ = narrow(static_cast<i128>(den_) * fa);
    normalize();
    return *this;
}

CycNum& CycNum::operator-=(const CycNum& o) { return *this += -o; }

CycNum& CycNum::operator*=(i64 s) {
    for (auto& c : num_) c = narrow(static_cast<i128>(c) * s);
    normalize();
    return *this;
}

CycNum& CycNum::operator*=(const CycNum& o_in) {
    CycNum o(o_in);
    align(o);
    const size_t d = num_.size();
    if (d == 1) {
        i128 n = static_cast<i128>(num_[0]) * o.num_[0];
        i128 dd = static_cast<i128>(den_) * o.den_;
        i128 g = gcd128(n, dd);
        if (g > 1) {
            n /= g;
            dd /= g;
        }
        num_[0] = narrow(n);
        den_ = narrow(dd);
        if (num_[0] == 0) den_ = 1;
        return *this;
    }
    std::vector<i128> t(2 * d - 1, 0);
    for (size_t i = 0; i < d; ++i) {
        if (!num_[i]) continue;
        for (size_t j = 0; j < d; ++j) t[i + j] += static_cast<i128>(num_[i]) * o.num_[j];
    }
    const auto& phi = f_->modulus_poly();
    for (size_t i = 2 * d - 1; i-- > d;) {
        i128 c = t[i];
        if (!c) continue;
        for (size_t j = 0; j < d; ++j) t[i - d + j] -= c * phi[j];
        t[i] = 0;
    }
    i128 dd = static_cast<i128>(den_) * o.den_;
    i128 g = dd;
    for (size_t i = 0; i < d; ++i) g = gcd128(g, t[i]);
    for (size_t i = 0; i < d; ++i) num_[i] = narrow(t[i] / g);
    den_ = narrow(dd / g);
    normalize();
    return *this;
}

bool CycNum::operator==(const CycNum& o_in) const {
    CycNum a(*this), o(o_in);
    if (a.f_ != o.f_) {
        try {
            a.align(o);
        } catch (const std::invalid_argument&) {
            return false;
        }
    }
    return a.den_ == o.den_ && a.num_ == o.num_;
}

CycNum CycNum::scaled(i64 num, i64 den) const {
    return *this * CycNum(f_, num, den);
}

CycNum CycNum::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    const size_t d = num_.size();
    // columns: coefficients of this * zeta^j
    std::vector<std::vector<mpq_class>> M(d, std::vector<mpq_class>(d + 1));
    for (size_t j = 0; j < d; ++j) {
        CycNum col = *this * CycNum::root(f_, static_cast<i64>(j));
        for (size_t i = 0; i < d; ++i) M[i][j] = mpq_class(col.num_[i], col.den_);
    }
    M[0][d] = 1;
    for (size_t c = 0; c < d; ++c) {
        size_t piv = c;
        while (M[piv][c] == 0) ++piv;
        std::swap(M[piv], M[c]);
        mpq_class inv = 1 / M[c][c];
        for (size_t j = c; j <= d; ++j) M[c][j] *= inv;
        for (size_t i = 0; i < d; ++i) {
            if (i == c || M[i][c] == 0) continue;
            mpq_class f = M[i][c];
            for (size_t j = c; j <= d; ++j) M[i][j] -= f * M[c][j];
        }
    }
    mpz_class L = 1;
    for (size_t i = 0; i < d; ++i) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), M[i][d].get_den_mpz_t());
    if (!L.fits_slong_p()) throw std::overflow_error("inverse denominator overflow");
    std::vector<i64> num(d);
    for (size_t i = 0; i < d; ++i) {
        mpz_class v = M[i][d].get_num() * (L / M[i][d].get_den());
        if (!v.fits_slong_p()) throw std::overflow_error("inverse numerator overflow");
        num[i] = v.get_si();
    }
    return from_coeffs(f_, std::move(num), L.get_si());
}

CycNum CycNum::galois(i64 t) const {
    const int m = f_->order();
    if (gcd(t, m) != 1) throw std::invalid_argument("galois: exponent not coprime to the order");
    std::vector<i128> acc(num_.size(), 0);
    for (size_t i = 0; i < num_.size(); ++i) {
        if (!num_[i]) continue;
        const auto& pw = f_->root_power(mulmod(static_cast<i64>(i), t, m));
        for (size_t j = 0; j < acc.size(); ++j) acc[j] += static_cast<i128>(num_[i]) * pw[j];
    }
    CycNum r(f_);
    for (size_t j = 0; j < acc.size(); ++j) r.num_[j] = narrow(acc[j]);
    r.den_ = den_;
    r.normalize();
    return r;
}

CycNum CycNum::in_field(FieldPtr target) const {
    if (target == f_) return *this;
    const int m = f_->order(), M = target->order();
    if (M % m != 0) throw std::invalid_argument("target field does not contain this field");
    std::vector<i128> acc(static_cast<size_t>(target->degree()), 0);
    for (size_t i = 0; i < num_.size(); ++i) {
        if (!num_[i]) continue;
        const auto& pw = target->root_power(static_cast<i64>(i) * (M / m));
        for (size_t j = 0; j < acc.size(); ++j) acc[j] += static_cast<i128>(num_[i]) * pw[j];
    }
    CycNum r(target);
    for (size_t j = 0; j < acc.size(); ++j) r.num_[j] = narrow(acc[j]);
    r.den_ = den_;
    r.normalize();
    return r;
}

std::complex<double> CycNum::embed() const {
    std::complex<double> s = 0;
    for (size_t i = 0; i < num_.size(); ++i)
        if (num_[i]) s += static_cast<double>(num_[i]) * f_->root_embedding(static_cast<i64>(i));
    return s / static_cast<double>(den_);
}

u64 CycNum::reduce(const PrimeField& F) const {
    if (F.m % f_->order() != 0) throw std::invalid_argument("prime field does not contain the required roots of unity");
    const u64 p = F.ell;
    u64 w = powmod_u(F.omega, static_cast<u64>(F.m / f_->order()), p);
    u64 acc = 0, wp = 1;
    for (size_t i = 0; i < num_.size(); ++i) {
        u64 c = static_cast<u64>(mod(num_[i], static_cast<i64>(p)));
        acc = addmod_u(acc, mulmod_u(c, wp, p), p);
        wp = mulmod_u(wp, w, p);
    }
    return mulmod_u(acc, invmod_u(static_cast<u64>(mod(den_, static_cast<i64>(p))), p), p);
}

std::string rational_string(i64 num, i64 den) {
    i64 g = gcd(num, den);
    if (g == 0) g = 1;
    num /= g;
    den /= g;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

std::pair<i64, i64> parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return {std::stoll(s), 1};
        i64 n = std::stoll(s.substr(0, slash)), d = std::stoll(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("zero denominator");
        return {n, d};
    } catch (const std::logic_error&) {
        throw std::invalid_argument("malformed rational '" + s + "'");
    }
}

std::vector<std::string> CycNum::coeff_strings() const {
    std::vector<std::string> out;
    out.reserve(num_.size());
    for (auto c : num_) out.push_back(rational_string(c, den_));
    return out;
}

CycNum CycNum::from_coeff_strings(FieldPtr f, const std::vector<std::string>& s) {
    if (s.size() != static_cast<size_t>(f->degree())) throw std::invalid_argument("coefficient count does not match field degree");
    CycNum r(f);
    for (size_t i = 0; i < s.size(); ++i) {
        auto [n, d] = parse_rational(s[i]);
        CycNum t(f);
        t.num_[i] = n;
        t.den_ = d;
        t.normalize();
        r += t;
    }
    return r;
}

std::string CycNum::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < num_.size(); ++i) {
        if (!num_[i]) continue;
        if (!first) os << " + ";
        first = false;
        os << rational_string(num_[i], den_);
        if (i == 1) os << "*z";
        else if (i > 1) os << "*z^" << i;
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace heckelab
