#include "heckelab/cosets.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

namespace heckelab {

MatPn::MatPn(i64 p, int n, i64 a, i64 b, i64 c, i64 d) : p_(p), n_(n), q_(ipow(p, n)) {
    if (n < 1) throw std::invalid_argument("MatPn: n must be >= 1");
    e_ = {mod(a, q_), mod(b, q_), mod(c, q_), mod(d, q_)};
    if (det() % p_ == 0) throw std::invalid_argument("MatPn: determinant is not a unit: " + to_string());
}

i64 MatPn::det() const { return mod(mulmod(e_[0], e_[3], q_) - mulmod(e_[1], e_[2], q_), q_); }

MatPn MatPn::operator*(const MatPn& o) const {
    if (o.q_ != q_) throw std::invalid_argument("MatPn product: different moduli");
    const i64 q = q_;
    const auto& x = e_;
    const auto& y = o.e_;
    return MatPn(p_, n_, q,
                 {(x[0] * y[0] + x[1] * y[2]) % q, (x[0] * y[1] + x[1] * y[3]) % q, (x[2] * y[0] + x[3] * y[2]) % q,
                  (x[2] * y[1] + x[3] * y[3]) % q});
}

MatPn MatPn::inverse() const {
    i64 di = *inv_mod(det(), q_);
    return MatPn(p_, n_, q_,
                 {mulmod(e_[3], di, q_), mulmod(q_ - e_[1], di, q_) % q_, mulmod(q_ - e_[2], di, q_) % q_, mulmod(e_[0], di, q_)});
}

std::string MatPn::to_string() const {
    std::ostringstream os;
    os << "(" << e_[0] << "," << e_[1] << ";" << e_[2] << "," << e_[3] << ") mod " << q_;
    return os.str();
}

MatPn MatPn::random(i64 p, int n, std::mt19937_64& rng) {
    const i64 q = ipow(p, n);
    std::uniform_int_distribution<i64> U(0, q - 1);
    for (;;) {
        i64 a = U(rng), b = U(rng), c = U(rng), d = U(rng);
        if (mod(a * d - b * c, p) != 0) return MatPn(p, n, a, b, c, d);
    }
}

MatPn MatPn::random_K0(i64 p, int n, std::mt19937_64& rng) {
    const i64 q = ipow(p, n);
    std::uniform_int_distribution<i64> U(0, q - 1);
    i64 a, d;
    do a = U(rng);
    while (a % p == 0);
    do d = U(rng);
    while (d % p == 0);
    return MatPn(p, n, a, U(rng), 0, d);
}

bool in_K0(const MatPn& g) { return g.c() == 0; }

std::string label_name(i64 p, Label j) {
    if (j == 0) return "w";
    return "y(" + std::to_string(p) + (j == 1 ? "" : "^" + std::to_string(j)) + ")";
}

MatPn label_rep(i64 p, int n, Label j) {
    if (j < 0 || j > n) throw std::invalid_argument("double coset label out of range");
    if (j == 0) return MatPn::w1(p, n);
    return MatPn::y(p, n, ipow(p, j));
}

CosetSpace::CosetSpace(i64 p, int n) : p_(p), n_(n), q_(ipow(p, n)) {
    if (!is_prime(p)) throw std::invalid_argument("CosetSpace: p must be prime");
    if (n < 1) throw std::invalid_argument("CosetSpace: n must be >= 1");
    inv_.assign(static_cast<size_t>(q_), 0);
    for (i64 u = 1; u < q_; ++u)
        if (u % p_) inv_[static_cast<size_t>(u)] = *inv_mod(u, q_);
    if (q_ == 1) inv_[0] = 0;
    for (i64 t = 0; t < q_; ++t) {
        reps_.push_back(MatPn(p_, n_, 0, -1, 1, t));
        labels_.push_back(0);
    }
    for (i64 c = 0; c < q_; c += p_) {
        reps_.push_back(MatPn::y(p_, n_, c));
        labels_.push_back(c == 0 ? n_ : valuation(c, p_));
    }
}

CosetIndex CosetSpace::index_at(size_t i) const {
    if (i < static_cast<size_t>(q_)) return {true, static_cast<i64>(i)};
    return {false, static_cast<i64>(i - static_cast<size_t>(q_)) * p_};
}

size_t CosetSpace::position(const CosetIndex& ix) const {
    if (ix.unit_c) return static_cast<size_t>(mod(ix.value, q_));
    return static_cast<size_t>(q_ + mod(ix.value, q_) / p_);
}

std::pair<size_t, i64> CosetSpace::decompose_d(i64 c, i64 d) const {
    if (c % p_ != 0) {
        i64 t = mulmod(d, inv_[static_cast<size_t>(c)], q_);
        // g R^{-1} with R^{-1} = (t, 1; -1, 0): lower-right entry is c
        return {static_cast<size_t>(t), c};
    }
    i64 v = mulmod(c, inv_[static_cast<size_t>(d)], q_);
    return {static_cast<size_t>(q_ + v / p_), d};
}

CosetSpace::Decomp CosetSpace::decompose(const MatPn& g) const {
    auto [pos, dd] = decompose_d(g.c(), g.d());
    (void)dd;
    MatPn k0 = g * reps_[pos].inverse();
    if (!in_K0(k0)) throw std::logic_error("coset decomposition produced k0 outside K0");
    return {pos, k0};
}

std::vector<MatPn> right_coset_reps(i64 p, int n) { return CosetSpace(p, n).reps(); }

std::pair<CosetIndex, MatPn> coset_decompose(const MatPn& g) {
    CosetSpace cs(g.p(), g.n());
    auto dec = cs.decompose(g);
    return {cs.index_at(dec.coset), dec.k0};
}

Label double_coset_label(const MatPn& g) {
    const i64 p = g.p(), q = g.q();
    if (g.c() % p != 0) return 0;
    i64 v = mulmod(g.c(), *inv_mod(g.d(), q), q);
    return v == 0 ? g.n() : valuation(v, p);
}

std::vector<MatPn> single_cosets_of_double(i64 p, int n, int j) {
    if (j < 1 || j > n - 1) throw std::invalid_argument("single_cosets_of_double: j must satisfy 1 <= j <= n-1");
    std::vector<MatPn> out;
    const i64 m = ipow(p, n - j);
    for (i64 s = 1; s < m; ++s)
        if (s % p) out.push_back(MatPn::d(p, n, s) * MatPn::y(p, n, ipow(p, j)));
    return out;
}

CosetTables::CosetTables(i64 p, int n) : space_(p, n) {
    const size_t D = space_.size();
    inv_.reserve(D);
    mul_.reserve(D * D);
    for (size_t i = 0; i < D; ++i) {
        MatPn ri = space_.rep(i).inverse();
        inv_.push_back(space_.decompose_d(ri.c(), ri.d()));
        for (size_t h = 0; h < D; ++h) {
            MatPn x = space_.rep(i) * space_.rep(h);
            mul_.push_back(space_.decompose_d(x.c(), x.d()));
        }
    }
}

std::shared_ptr<const CosetTables> CosetTables::get(i64 p, int n) {
    static std::map<std::pair<i64, int>, std::shared_ptr<const CosetTables>> tables;
    static std::shared_mutex mu;
    {
        std::shared_lock lk(mu);
        auto it = tables.find({p, n});
        if (it != tables.end()) return it->second;
    }
    auto built = std::make_shared<const CosetTables>(p, n);
    std::unique_lock lk(mu);
    auto& slot = tables[{p, n}];
    if (!slot) slot = built;
    return slot;
}

size_t CosetTables::label_position(Label j) const {
    const i64 q = space_.q(), p = space_.p();
    if (j == 0) return 0;
    if (j == space_.n()) return static_cast<size_t>(q);
    return static_cast<size_t>(q + ipow(p, j) / p);
}

void for_each_K0(i64 p, int n, const std::function<void(const MatPn&)>& fn) {
    const i64 q = ipow(p, n);
    for (i64 a = 1; a < q; ++a) {
        if (a % p == 0) continue;
        for (i64 d = 1; d < q; ++d) {
            if (d % p == 0) continue;
            for (i64 b = 0; b < q; ++b) fn(MatPn(p, n, a, b, 0, d));
        }
    }
}

std::vector<MatPn> enumerate_Kg(const MatPn& g) {
    if (g.q() > 128) throw std::invalid_argument("enumerate_Kg: K0 is only materialized for p^n <= 128");
    const MatPn gi = g.inverse();
    std::vector<MatPn> out;
    for_each_K0(g.p(), g.n(), [&](const MatPn& k) {
        if (in_K0(g * k * gi)) out.push_back(k);
    });
    return out;
}

bool in_Kg_closed_form(Label j, const MatPn& k) {
    if (!in_K0(k)) return false;
    const i64 p = k.p();
    const int n = k.n();
    if (j == 0) return k.b() == 0;
    if (j == n) return true;
    const i64 pj = ipow(p, j), m = ipow(p, n - j);
    return mod(k.a() - k.d() - pj * k.b(), m) == 0;
}

}  // namespace heckelab
