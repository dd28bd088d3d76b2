#include "heckelab/hecke.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

namespace heckelab {

const char* source_name(Source s) {
    switch (s) {
        case Source::Formula: return "published-formula";
        case Source::Definition: return "definition";
        case Source::Oracle: return "independent-oracle";
    }
    return "?";
}

namespace {

using Pairs = std::vector<std::pair<i64, i64>>;

// (d(g k g^{-1}), d(k)) for k in K_g, deduplicated
Pairs compute_kg_pairs(const MatPn& g) {
    const i64 p = g.p(), q = g.q();
    const int n = g.n();
    std::vector<char> seen(static_cast<size_t>(q * q), 0);
    auto mark = [&](i64 d2, i64 d) { seen[static_cast<size_t>(mod(d2, q) * q + mod(d, q))] = 1; };
    if (q <= 128) {
        const MatPn gi = g.inverse();
        for_each_K0(p, n, [&](const MatPn& k) {
            MatPn c = g * k * gi;
            if (in_K0(c)) mark(c.d(), k.d());
        });
    } else {
        Label j = double_coset_label(g);
        if (g != label_rep(p, n, j)) throw std::invalid_argument("is_supported: for p^n > 128 only double-coset representatives are accepted");
        // closed-form parametrization of K_g; a is determined up to terms not affecting the pair
        for (i64 d = 1; d < q; ++d) {
            if (d % p == 0) continue;
            if (j == 0) {
                for (i64 a = 1; a < q; ++a)
                    if (a % p) mark(a, d);
            } else if (j == n) {
                mark(d, d);
            } else {
                const i64 s = ipow(p, j);
                for (i64 b = 0; b < q; ++b) mark(s * b + d, d);
            }
        }
    }
    Pairs out;
    for (i64 i = 0; i < q * q; ++i)
        if (seen[static_cast<size_t>(i)]) out.emplace_back(i / q, i % q);
    return out;
}

const Pairs& kg_pairs(const MatPn& g) {
    using Key = std::pair<i64, std::array<i64, 5>>;
    static std::map<Key, Pairs> cache;
    static std::shared_mutex mu;
    Key key{g.p(), {g.n(), g.a(), g.b(), g.c(), g.d()}};
    {
        std::shared_lock lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Pairs computed = compute_kg_pairs(g);
    std::unique_lock lk(mu);
    auto [it, inserted] = cache.emplace(key, std::move(computed));
    return it->second;
}

std::string basis_name(Label j) { return j == 0 ? "U0" : "V" + std::to_string(j); }

}  // namespace

bool is_supported(const MatPn& g, const PChar& chi) {
    if (g.p() != chi.p() || g.n() != chi.n()) throw std::invalid_argument("is_supported: parameter mismatch");
    for (auto [d2, d] : kg_pairs(g))
        if (chi.exponent(d2) != chi.exponent(d)) return false;
    return true;
}

std::vector<Label> supported_basis(const PChar& chi) {
    std::vector<Label> out;
    for (Label j = 0; j <= chi.n(); ++j)
        if (is_supported(label_rep(chi.p(), chi.n(), j), chi)) out.push_back(j);
    return out;
}

HeckeAlgebra::HeckeAlgebra(const PChar& chi, FieldPtr field)
    : chi_(chi), field_(std::move(field)), tables_(CosetTables::get(chi.p(), chi.n())) {
    if (!field_) field_ = CyclotomicField::get(static_cast<int>(chi_.order()));
    const int m = field_->order();
    if (m % chi_.order() != 0) throw std::invalid_argument("HeckeAlgebra: field does not contain the character values");
    basis_ = supported_basis(chi_);
    exps_.assign(static_cast<size_t>(chi_.q()), -1);
    for (i64 u = 0; u < chi_.q(); ++u) {
        int t = chi_.dirichlet().exponent(u);
        if (t >= 0) exps_[static_cast<size_t>(u)] = static_cast<int>(t * (m / chi_.order()));
    }
}

std::shared_ptr<const HeckeAlgebra> HeckeAlgebra::create(const PChar& chi, FieldPtr field) {
    return std::make_shared<const HeckeAlgebra>(chi, std::move(field));
}

int HeckeAlgebra::position(Label j) const {
    auto it = std::find(basis_.begin(), basis_.end(), j);
    return it == basis_.end() ? -1 : static_cast<int>(it - basis_.begin());
}

HeckeElem::HeckeElem(AlgebraPtr alg) : alg_(std::move(alg)), coeffs_(alg_->dim(), CycNum::zero(alg_->field())) {}

HeckeElem HeckeElem::basis_element(AlgebraPtr alg, Label j) {
    HeckeElem e(std::move(alg));
    e.set_coeff(j, CycNum::one(e.alg_->field()));
    return e;
}

HeckeElem HeckeElem::identity(AlgebraPtr alg) {
    const int n = alg->n();
    return basis_element(std::move(alg), n);
}

HeckeElem HeckeElem::scalar(AlgebraPtr alg, const CycNum& c) { return identity(std::move(alg)) * c; }

CycNum HeckeElem::coeff(Label j) const {
    int pos = alg_->position(j);
    if (pos < 0) return CycNum::zero(alg_->field());
    return coeffs_[static_cast<size_t>(pos)];
}

void HeckeElem::set_coeff(Label j, const CycNum& c) {
    int pos = alg_->position(j);
    if (pos < 0) throw std::invalid_argument("label " + label_name(alg_->p(), j) + " is not in the support of the character");
    coeffs_[static_cast<size_t>(pos)] = c.in_field(alg_->field());
}

void HeckeElem::check_same(const HeckeElem& o) const {
    if (alg_ != o.alg_ && !(alg_->character() == o.alg_->character() && alg_->field() == o.alg_->field()))
        throw std::invalid_argument("Hecke elements from different algebras");
}

HeckeElem HeckeElem::operator+(const HeckeElem& o) const {
    check_same(o);
    HeckeElem r(*this);
    for (size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] += o.coeffs_[i];
    return r;
}

HeckeElem HeckeElem::operator-(const HeckeElem& o) const {
    check_same(o);
    HeckeElem r(*this);
    for (size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] -= o.coeffs_[i];
    return r;
}

HeckeElem HeckeElem::operator*(const CycNum& c) const {
    HeckeElem r(*this);
    for (auto& x : r.coeffs_) x *= c;
    return r;
}

HeckeElem HeckeElem::operator*(i64 c) const {
    HeckeElem r(*this);
    for (auto& x : r.coeffs_) x *= c;
    return r;
}

bool HeckeElem::operator==(const HeckeElem& o) const {
    check_same(o);
    return coeffs_ == o.coeffs_;
}

CosetFunction HeckeElem::to_function() const {
    const auto& cs = alg_->cosets();
    CosetFunction F(cs.size(), CycNum::zero(alg_->field()));
    for (size_t i = 0; i < cs.size(); ++i) {
        int pos = alg_->position(cs.label_of(i));
        if (pos >= 0) F[i] = coeffs_[static_cast<size_t>(pos)];
    }
    return F;
}

CycNum HeckeElem::value_at(const MatPn& x) const {
    auto [pos, d] = alg_->cosets().decompose_d(x.c(), x.d());
    int lp = alg_->position(alg_->cosets().label_of(pos));
    if (lp < 0) return CycNum::zero(alg_->field());
    return alg_->root(alg_->chi_exp(d)) * coeffs_[static_cast<size_t>(lp)];
}

std::string HeckeElem::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << coeffs_[i].to_string() << ")*" << basis_name(alg_->basis()[i]);
    }
    if (first) os << "0";
    return os.str();
}

HeckeElem y_element(const AlgebraPtr& alg, int l) {
    if (l < std::max(alg->r(), 1) || l > alg->n()) throw std::invalid_argument("y_element: need max(r, 1) <= l <= n");
    HeckeElem e(alg);
    for (int i = l; i <= alg->n(); ++i) e.set_coeff(i, CycNum::one(alg->field()));
    return e;
}

CosetFunction convolve_function(const HeckeElem& f1, const CosetFunction& F) {
    const auto& alg = *f1.algebra();
    const auto& T = alg.tables();
    const size_t D = T.size();
    if (F.size() != D) throw std::invalid_argument("convolve: function size mismatch");
    CosetFunction F1 = f1.to_function();
    CosetFunction out(D, CycNum::zero(alg.field()));
    for (size_t i = 0; i < D; ++i) {
        auto [pi, di] = T.inv(i);
        if (F1[pi].is_zero()) continue;
        CycNum a = alg.root(alg.chi_exp(di)) * F1[pi];
        for (size_t h = 0; h < D; ++h) {
            auto [g, d] = T.mul(i, h);
            if (F[g].is_zero()) continue;
            out[h] += a * alg.root(alg.chi_exp(d)) * F[g];
        }
    }
    return out;
}

CosetFunction convolve_function_mirrored(const HeckeElem& f1, const CosetFunction& F) {
    const auto& alg = *f1.algebra();
    const auto& cs = alg.cosets();
    const size_t D = cs.size();
    if (F.size() != D) throw std::invalid_argument("convolve: function size mismatch");
    std::vector<MatPn> inv;
    for (size_t i = 0; i < D; ++i) inv.push_back(cs.rep(i).inverse());
    CosetFunction out(D, CycNum::zero(alg.field()));
    for (size_t h = 0; h < D; ++h)
        for (size_t i = 0; i < D; ++i) {
            if (F[i].is_zero()) continue;
            CycNum v = f1.value_at(cs.rep(h) * inv[i]);
            if (!v.is_zero()) out[h] += v * F[i];
        }
    return out;
}

HeckeElem convolve(const HeckeElem& f1, const HeckeElem& f2) {
    if (f1.algebra() != f2.algebra() && !(f1.algebra()->character() == f2.algebra()->character()))
        throw std::invalid_argument("convolve: elements of different algebras");
    const auto& alg = *f1.algebra();
    const auto& T = alg.tables();
    const auto& cs = alg.cosets();
    const size_t D = T.size(), B = alg.dim();
    const int m = alg.field()->order();
    std::vector<int> bpos(D);
    for (size_t i = 0; i < D; ++i) bpos[i] = alg.position(cs.label_of(i));
    // counts[h][a][b][e]: number of R with f1-label a, f2-label b and root exponent e
    std::vector<i64> counts(D * B * B * static_cast<size_t>(m), 0);
    for (size_t i = 0; i < D; ++i) {
        auto [pi, di] = T.inv(i);
        int a = bpos[pi];
        if (a < 0 || f1.coeffs()[static_cast<size_t>(a)].is_zero()) continue;
        const int e1 = alg.chi_exp(di);
        for (size_t h = 0; h < D; ++h) {
            auto [g, d] = T.mul(i, h);
            int b = bpos[g];
            if (b < 0) continue;
            int e = (e1 + alg.chi_exp(d)) % m;
            ++counts[((h * B + static_cast<size_t>(a)) * B + static_cast<size_t>(b)) * static_cast<size_t>(m) + static_cast<size_t>(e)];
        }
    }
    CosetFunction out(D, CycNum::zero(alg.field()));
    std::vector<i64> slice(static_cast<size_t>(m));
    for (size_t h = 0; h < D; ++h)
        for (size_t a = 0; a < B; ++a) {
            if (f1.coeffs()[a].is_zero()) continue;
            for (size_t b = 0; b < B; ++b) {
                if (f2.coeffs()[b].is_zero()) continue;
                auto base = counts.begin() + static_cast<std::ptrdiff_t>(((h * B + a) * B + b) * static_cast<size_t>(m));
                if (std::all_of(base, base + m, [](i64 c) { return c == 0; })) continue;
                std::copy(base, base + m, slice.begin());
                out[h] += CycNum::from_root_counts(alg.field(), slice) * f1.coeffs()[a] * f2.coeffs()[b];
            }
        }
    HeckeElem res(f1.algebra());
    for (Label j : alg.basis()) res.set_coeff(j, out[T.label_position(j)]);
    CosetFunction check = res.to_function();
    for (size_t h = 0; h < D; ++h)
        if (check[h] != out[h])
            throw std::logic_error("convolution left the supported span at coset " + cs.rep(h).to_string() + ": value " + out[h].to_string());
    return res;
}

StructTable structure_table(const AlgebraPtr& alg) {
    StructTable t;
    t.alg = alg;
    const size_t B = alg->dim();
    t.c.assign(B, std::vector<std::vector<CycNum>>(B));
    for (size_t i = 0; i < B; ++i)
        for (size_t j = 0; j < B; ++j)
            t.c[i][j] = convolve(HeckeElem::basis_element(alg, alg->basis()[i]), HeckeElem::basis_element(alg, alg->basis()[j])).coeffs();
    return t;
}

HeckeElem multiply(const StructTable& t, const HeckeElem& a, const HeckeElem& b) {
    HeckeElem r(t.alg);
    const size_t B = t.alg->dim();
    std::vector<CycNum> acc(B, CycNum::zero(t.alg->field()));
    for (size_t i = 0; i < B; ++i) {
        if (a.coeffs()[i].is_zero()) continue;
        for (size_t j = 0; j < B; ++j) {
            if (b.coeffs()[j].is_zero()) continue;
            CycNum ab = a.coeffs()[i] * b.coeffs()[j];
            for (size_t k = 0; k < B; ++k)
                if (!t.c[i][j][k].is_zero()) acc[k] += ab * t.c[i][j][k];
        }
    }
    for (size_t k = 0; k < B; ++k) r.set_coeff(t.alg->basis()[k], acc[k]);
    return r;
}

bool RelationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.passed; });
}

namespace {

struct Auditor {
    RelationReport& rep;
    void equal(std::string id, std::string statement, const HeckeElem& expected, const HeckeElem& computed, Source src) {
        rep.checks.push_back({std::move(id), std::move(statement), expected == computed, expected.to_string(), computed.to_string(), src});
    }
    void flag(std::string id, std::string statement, bool ok, std::string expected, std::string computed, Source src) {
        rep.checks.push_back({std::move(id), std::move(statement), ok, std::move(expected), std::move(computed), src});
    }
};

std::string labels_string(i64 p, const std::vector<Label>& ls) {
    std::string s = "{";
    for (size_t i = 0; i < ls.size(); ++i) s += (i ? ", " : "") + label_name(p, ls[i]);
    return s + "}";
}

}  // namespace

RelationReport verify_relations(const PChar& chi) {
    RelationReport rep;
    const i64 p = chi.p();
    const int n = chi.n(), r = chi.r();
    rep.p = p;
    rep.n = n;
    rep.r = r;
    auto alg = HeckeAlgebra::create(chi);
    rep.basis = alg->basis();
    Auditor A{rep};

    std::vector<Label> predicted;
    if (r == 0) predicted.push_back(0);
    for (int j = std::max(r, 1); j <= n; ++j) predicted.push_back(j);
    A.flag("support", "supported labels are y(p^j) for j >= r, plus w iff r = 0", alg->basis() == predicted, labels_string(p, predicted),
           labels_string(p, alg->basis()), Source::Formula);
    A.flag("dimension", "dim H = n - r + 1", static_cast<int>(alg->dim()) == n - r + 1, std::to_string(n - r + 1), std::to_string(alg->dim()),
           Source::Formula);

    auto V = [&](Label j) { return HeckeElem::basis_element(alg, j); };
    auto Y = [&](int l) { return y_element(alg, l); };
    auto one = HeckeElem::identity(alg);
    auto conv = [](const HeckeElem& a, const HeckeElem& b) { return convolve(a, b); };
    const auto tag = [](const std::string& s, auto... xs) {
        std::string out = s;
        ((out += "_" + std::to_string(xs)), ...);
        return out;
    };

    bool closed = true;
    std::string closure_msg = "all products in span";
    StructTable table;
    try {
        table = structure_table(alg);
    } catch (const std::logic_error& e) {
        closed = false;
        closure_msg = e.what();
    }
    A.flag("closure", "the supported span is closed under convolution", closed, "all products in span", closure_msg, Source::Formula);
    if (!closed) return rep;

    for (Label j : alg->basis()) {
        A.equal(tag("identity_left", j), "V_n * f = f", V(j), conv(one, V(j)), Source::Definition);
        A.equal(tag("identity_right", j), "f * V_n = f", V(j), conv(V(j), one), Source::Definition);
    }

    const int lo = std::max(r, 1);
    for (int l = lo; l <= n - 1; ++l) {
        HeckeElem expect = V(l) * (ipow(p, n - l - 1) * (p - 2));
        for (int i = l + 1; i <= n; ++i) expect = expect + V(i) * (ipow(p, n - l - 1) * (p - 1));
        A.equal(tag("VV_square", l), "V_l*V_l = p^{n-l-1}(p-1) sum_{i>l} V_i + p^{n-l-1}(p-2) V_l", expect, conv(V(l), V(l)), Source::Formula);
        for (int j = l + 1; j <= n - 1; ++j) {
            HeckeElem e2 = V(l) * (ipow(p, n - j - 1) * (p - 1));
            A.equal(tag("VV_mixed", l, j), "V_l*V_j = p^{n-j-1}(p-1) V_l", e2, conv(V(l), V(j)), Source::Formula);
            A.equal(tag("VV_mixed_rev", l, j), "V_j*V_l = p^{n-j-1}(p-1) V_l", e2, conv(V(j), V(l)), Source::Formula);
        }
        HeckeElem e3 = V(l) * ipow(p, n - l - 1);
        A.equal(tag("VY_next", l), "V_l*Y_{l+1} = p^{n-l-1} V_l", e3, conv(V(l), Y(l + 1)), Source::Formula);
        A.equal(tag("YV_next", l), "Y_{l+1}*V_l = p^{n-l-1} V_l", e3, conv(Y(l + 1), V(l)), Source::Formula);
        HeckeElem quad = conv(V(l) - one * (ipow(p, n - l - 1) * (p - 1)), V(l) + Y(l + 1));
        A.equal(tag("V_quadratic", l), "(V_l - p^{n-l-1}(p-1))(V_l + Y_{l+1}) = 0", HeckeElem::zero(alg), quad, Source::Formula);
    }

    for (int l = lo; l <= n; ++l) {
        for (int j = l; j <= n; ++j) {
            HeckeElem e = Y(l) * ipow(p, n - j);
            A.equal(tag("YY", j, l), "Y_j*Y_l = p^{n-j} Y_l", e, conv(Y(j), Y(l)), Source::Formula);
            A.equal(tag("YY_rev", j, l), "Y_l*Y_j = p^{n-j} Y_l", e, conv(Y(l), Y(j)), Source::Formula);
        }
        const i64 s = ipow(p, n - l);
        HeckeElem e = Y(l) * CycNum(alg->field(), 1, s);
        A.equal(tag("idempotent", l), "(1/p^{n-l}) Y_l is idempotent", e, conv(e, e), Source::Formula);
    }

    bool comm = true;
    std::string offending = "none";
    for (size_t i = 0; i < alg->dim() && comm; ++i)
        for (size_t j = 0; j < alg->dim(); ++j)
            if (table.c[i][j] != table.c[j][i]) {
                comm = false;
                offending = basis_name(alg->basis()[i]) + "," + basis_name(alg->basis()[j]);
                break;
            }
    A.flag("commutative", "the structure table is symmetric", comm, "symmetric", comm ? "symmetric" : "asymmetric at " + offending,
           Source::Formula);

    if (r == 0) {
        auto U = V(0);
        HeckeElem uu = U * (ipow(p, n - 1) * (p - 1)) + Y(1) * ipow(p, n);
        A.equal("U0_square", "U0*U0 = p^{n-1}(p-1) U0 + p^n Y_1", uu, conv(U, U), Source::Formula);
        for (int l = 1; l <= n; ++l) {
            HeckeElem e = U * ipow(p, n - l);
            A.equal(tag("U0Y", l), "U0*Y_l = p^{n-l} U0", e, conv(U, Y(l)), Source::Formula);
            A.equal(tag("YU0", l), "Y_l*U0 = p^{n-l} U0", e, conv(Y(l), U), Source::Formula);
        }
        HeckeElem cubic = conv(conv(U, U - one * ipow(p, n)), U + one * ipow(p, n - 1));
        A.equal("U0_cubic", "U0(U0 - p^n)(U0 + p^{n-1}) = 0", HeckeElem::zero(alg), cubic, Source::Formula);
        if (n == 1) {
            HeckeElem iw = conv(U + one, U - one * p);
            A.equal("iwahori_quadratic", "(U0 + 1)(U0 - p) = 0", HeckeElem::zero(alg), iw, Source::Formula);
        }
    }

    for (Label a : alg->basis())
        for (Label b : alg->basis()) {
            CosetFunction direct = conv(V(a), V(b)).to_function();
            CosetFunction mirrored = convolve_function_mirrored(V(a), V(b).to_function());
            A.flag(tag("mirrored", a, b), "coset-sum convolution agrees with the mirrored coset sum", direct == mirrored, "equal",
                   direct == mirrored ? "equal" : "different", Source::Oracle);
        }
    return rep;
}

}  // namespace heckelab
