#include "heckelab/induced.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace heckelab {

CycMatrix::CycMatrix(FieldPtr f, size_t n) : f_(std::move(f)), n_(n), a_(n * n, CycNum::zero(f_)) {}

CycMatrix CycMatrix::identity(FieldPtr f, size_t n) {
    CycMatrix m(f, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = CycNum::one(f);
    return m;
}

CycMatrix CycMatrix::operator*(const CycMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("CycMatrix: size mismatch");
    CycMatrix r(f_, n_);
    for (size_t i = 0; i < n_; ++i)
        for (size_t k = 0; k < n_; ++k) {
            const CycNum& x = at(i, k);
            if (x.is_zero()) continue;
            for (size_t j = 0; j < n_; ++j) {
                const CycNum& y = o.at(k, j);
                if (!y.is_zero()) r.at(i, j) += x * y;
            }
        }
    return r;
}

CycMatrix CycMatrix::operator+(const CycMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("CycMatrix: size mismatch");
    CycMatrix r(*this);
    for (size_t i = 0; i < a_.size(); ++i)
        if (!o.a_[i].is_zero()) r.a_[i] += o.a_[i];
    return r;
}

CycMatrix CycMatrix::operator-(const CycMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("CycMatrix: size mismatch");
    CycMatrix r(*this);
    for (size_t i = 0; i < a_.size(); ++i)
        if (!o.a_[i].is_zero()) r.a_[i] -= o.a_[i];
    return r;
}

CycMatrix CycMatrix::operator*(const CycNum& c) const {
    CycMatrix r(*this);
    for (auto& x : r.a_)
        if (!x.is_zero()) x *= c;
    return r;
}

std::vector<CycNum> CycMatrix::apply(const std::vector<CycNum>& v) const {
    if (v.size() != n_) throw std::invalid_argument("CycMatrix: vector size mismatch");
    std::vector<CycNum> out(n_, CycNum::zero(f_));
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j)
            if (!at(i, j).is_zero() && !v[j].is_zero()) out[i] += at(i, j) * v[j];
    return out;
}

CycNum CycMatrix::trace() const {
    CycNum t = CycNum::zero(f_);
    for (size_t i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

size_t CycMatrix::nonzeros() const {
    return static_cast<size_t>(std::count_if(a_.begin(), a_.end(), [](const CycNum& x) { return !x.is_zero(); }));
}

int CycMatrix::rank_mod(const PrimeField& F) const {
    std::vector<std::vector<u64>> rows(n_, std::vector<u64>(n_, 0));
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j)
            if (!at(i, j).is_zero()) rows[i][j] = at(i, j).reduce(F);
    return heckelab::rank_mod(std::move(rows), F.ell);
}

Monomial Monomial::operator*(const Monomial& o) const {
    if (o.col.size() != col.size() || o.m != m) throw std::invalid_argument("Monomial: size mismatch");
    Monomial r;
    r.m = m;
    r.col.resize(col.size());
    r.exp.resize(col.size());
    for (size_t h = 0; h < col.size(); ++h) {
        r.col[h] = o.col[col[h]];
        r.exp[h] = (exp[h] + o.exp[col[h]]) % m;
    }
    return r;
}

CycMatrix Monomial::dense(const FieldPtr& f) const {
    CycMatrix d(f, col.size());
    for (size_t h = 0; h < col.size(); ++h) d.at(h, col[h]) = CycNum::root(f, exp[h] * (f->order() / m));
    return d;
}

InducedRep::InducedRep(const PChar& chi) : alg_(HeckeAlgebra::create(chi)) {}

Monomial InducedRep::pi_R(const MatPn& k) const {
    const auto& cs = alg_->cosets();
    if (k.p() != cs.p() || k.n() != cs.n()) throw std::invalid_argument("pi_R: parameter mismatch");
    Monomial M;
    M.m = alg_->field()->order();
    M.col.resize(cs.size());
    M.exp.resize(cs.size());
    for (size_t h = 0; h < cs.size(); ++h) {
        MatPn x = cs.rep(h) * k;
        auto [g, d] = cs.decompose_d(x.c(), x.d());
        M.col[h] = g;
        M.exp[h] = alg_->chi_exp(d);
    }
    return M;
}

CycMatrix InducedRep::pi_L(const HeckeElem& phi) const {
    if (!(phi.algebra()->character() == alg_->character())) throw std::invalid_argument("pi_L: element of a different algebra");
    const auto& T = alg_->tables();
    const auto& cs = alg_->cosets();
    const size_t D = T.size(), B = alg_->dim();
    const int m = alg_->field()->order();
    std::vector<int> bpos(D);
    for (size_t i = 0; i < D; ++i) bpos[i] = alg_->position(cs.label_of(i));
    CycMatrix M(alg_->field(), D);
    // counts[(g * B + a) * m + e]: contributions to M[h][g] from phi-label a with root exponent e
    std::vector<i64> counts(D * B * static_cast<size_t>(m));
    std::vector<i64> slice(static_cast<size_t>(m));
    for (size_t h = 0; h < D; ++h) {
        std::fill(counts.begin(), counts.end(), 0);
        for (size_t i = 0; i < D; ++i) {
            auto [pi, di] = T.inv(i);
            const int a = bpos[pi];
            if (a < 0 || phi.coeffs()[static_cast<size_t>(a)].is_zero()) continue;
            auto [g, d] = T.mul(i, h);
            const int e = (alg_->chi_exp(di) + alg_->chi_exp(d)) % m;
            ++counts[(g * B + static_cast<size_t>(a)) * static_cast<size_t>(m) + static_cast<size_t>(e)];
        }
        for (size_t g = 0; g < D; ++g)
            for (size_t a = 0; a < B; ++a) {
                auto base = counts.begin() + static_cast<std::ptrdiff_t>((g * B + a) * static_cast<size_t>(m));
                if (std::all_of(base, base + m, [](i64 c) { return c == 0; })) continue;
                std::copy(base, base + m, slice.begin());
                M.at(h, g) += CycNum::from_root_counts(alg_->field(), slice) * phi.coeffs()[a];
            }
    }
    return M;
}

std::vector<CosetFunction> InducedRep::fixed_subspace(int m) const {
    const auto& cs = alg_->cosets();
    const i64 p = cs.p();
    const int n = cs.n();
    if (m < 0 || m > n) throw std::invalid_argument("fixed_subspace: level out of range");
    if (m < alg_->r()) return {};
    const int M = alg_->field()->order();
    // generators of K0(p^m) with the exponent of chi on each
    std::vector<std::pair<MatPn, int>> gens;
    for (i64 u : unit_generators(p, n)) {
        gens.push_back({MatPn::d(p, n, u), 0});
        gens.push_back({MatPn(p, n, 1, 0, 0, u), alg_->chi_exp(u)});
    }
    gens.push_back({MatPn::x(p, n, 1), 0});
    if (m < n) gens.push_back({MatPn::y(p, n, ipow(p, m)), 0});

    const size_t D = cs.size();
    std::vector<int> val(D, -1);
    std::vector<CosetFunction> out;
    for (size_t start = 0; start < D; ++start) {
        if (val[start] >= 0) continue;
        std::vector<size_t> orbit{start}, stack{start};
        val[start] = 0;
        bool consistent = true;
        while (!stack.empty()) {
            size_t x = stack.back();
            stack.pop_back();
            for (const auto& [k, ek] : gens) {
                MatPn y = cs.rep(x) * k;
                auto [g, d] = cs.decompose_d(y.c(), y.d());
                // v(R_x k) = chi(k) v(R_x) and v(R_x k) = chi(k0) v(R_g)
                const int want = static_cast<int>(mod(val[x] + ek - alg_->chi_exp(d), M));
                if (val[g] < 0) {
                    val[g] = want;
                    orbit.push_back(g);
                    stack.push_back(g);
                } else if (val[g] != want) {
                    consistent = false;
                }
            }
        }
        if (!consistent) continue;
        CosetFunction v(D, CycNum::zero(alg_->field()));
        for (size_t x : orbit) v[x] = alg_->root(val[x]);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<std::pair<int, HeckeElem>> eigenvector_basis(const InducedRep& rep) {
    const auto& alg = rep.algebra();
    const int r = alg->r(), n = alg->n();
    if (r < 1) throw std::invalid_argument("eigenvector_basis: requires a ramified character (r >= 1)");
    std::vector<std::pair<int, HeckeElem>> out;
    out.emplace_back(r, y_element(alg, r));
    for (int k = r + 1; k <= n; ++k) out.emplace_back(k, y_element(alg, k - 1) - y_element(alg, k) * alg->p());
    return out;
}

bool SpectralReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.passed; });
}

namespace {

struct LBasis {
    std::vector<CycMatrix> V;  // pi_L(V_j), j = r..n (index j - lo)
    std::vector<CycMatrix> Y;  // pi_L(Y_j)
    int lo;
};

LBasis l_basis(const InducedRep& rep) {
    const auto& alg = rep.algebra();
    const int n = alg->n();
    LBasis b;
    b.lo = std::max(alg->r(), 1);
    for (int j = b.lo; j <= n; ++j) b.V.push_back(rep.pi_L(HeckeElem::basis_element(alg, j)));
    b.Y.assign(b.V.size(), CycMatrix(alg->field(), rep.dim()));
    b.Y.back() = b.V.back();
    for (int j = n - 1; j >= b.lo; --j) b.Y[static_cast<size_t>(j - b.lo)] = b.Y[static_cast<size_t>(j - b.lo + 1)] + b.V[static_cast<size_t>(j - b.lo)];
    return b;
}

std::optional<CycNum> eigenvalue(const CycMatrix& A, const CosetFunction& v) {
    auto w = A.apply(v);
    size_t pos = 0;
    while (pos < v.size() && v[pos].is_zero()) ++pos;
    if (pos == v.size()) return std::nullopt;
    CycNum lambda = w[pos] / v[pos];
    for (size_t i = 0; i < v.size(); ++i)
        if (w[i] != lambda * v[i]) return std::nullopt;
    return lambda;
}

i64 y_expected(i64 p, int n, int i, int j) { return j >= i ? ipow(p, n - j) : 0; }

i64 v_expected(i64 p, int n, int i, int j) {
    if (j == n) return 1;
    if (i <= j) return ipow(p, n - j - 1) * (p - 1);
    if (i == j + 1) return -ipow(p, n - j - 1);
    return 0;
}

i64 dim_expected(i64 p, int r, int k) { return k == r ? ipow(p, r - 1) * (p + 1) : ipow(p, k - 2) * (p * p - 1); }

std::vector<i64> dims_from_trace(const InducedRep& rep, const LBasis& L) {
    auto basis = eigenvector_basis(rep);
    const size_t K = basis.size();
    std::vector<std::vector<mpq_class>> A(K, std::vector<mpq_class>(K + 1));
    for (size_t jj = 0; jj < K; ++jj) {
        for (size_t i = 0; i < K; ++i) {
            auto lam = eigenvalue(L.V[jj], basis[i].second.to_function());
            if (!lam || !lam->is_rational()) throw std::runtime_error("trace system: V-eigenvalue is not rational");
            auto [a, b] = lam->rational_value();
            A[jj][i] = mpq_class(a, b);
        }
        CycNum t = L.V[jj].trace();
        if (!t.is_rational()) throw std::runtime_error("trace system: trace is not rational");
        auto [a, b] = t.rational_value();
        A[jj][K] = mpq_class(a, b);
        A[jj][K].canonicalize();
        for (auto& x : A[jj]) x.canonicalize();
    }
    for (size_t c = 0; c < K; ++c) {
        size_t piv = c;
        while (piv < K && A[piv][c] == 0) ++piv;
        if (piv == K) throw std::runtime_error("trace system is singular");
        std::swap(A[piv], A[c]);
        for (size_t i = 0; i < K; ++i) {
            if (i == c || A[i][c] == 0) continue;
            mpq_class f = A[i][c] / A[c][c];
            for (size_t j = c; j <= K; ++j) A[i][j] -= f * A[c][j];
        }
    }
    std::vector<i64> d;
    for (size_t i = 0; i < K; ++i) {
        mpq_class x = A[i][K] / A[i][i];
        if (x.get_den() != 1 || !x.get_num().fits_slong_p()) throw std::runtime_error("trace system: non-integral solution");
        d.push_back(x.get_num().get_si());
    }
    return d;
}

std::vector<i64> dims_from_projectors(const InducedRep& rep, const LBasis& L) {
    const auto& alg = rep.algebra();
    const i64 p = alg->p();
    const int n = alg->n(), r = alg->r();
    if (r < 1) throw std::invalid_argument("component dimensions: requires r >= 1");
    PrimeField F = make_prime_field(alg->field()->order());
    auto e = [&](int l) { return L.Y[static_cast<size_t>(l - L.lo)] * CycNum(alg->field(), 1, ipow(p, n - l)); };
    std::vector<i64> d;
    d.push_back(e(r).rank_mod(F));
    for (int k = r + 1; k <= n; ++k) d.push_back((e(k) - e(k - 1)).rank_mod(F));
    return d;
}

std::string vec_string(const std::vector<i64>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "]";
}

bool commutes(const CycMatrix& P, const Monomial& R, const FieldPtr& f) {
    // (P R)[h][col[i]] = P[h][i] z^{exp[i]},  (R P)[h][col[i]] = z^{exp[h]} P[col[h]][col[i]]
    const size_t D = P.size();
    const int scale = f->order() / R.m;
    for (size_t h = 0; h < D; ++h)
        for (size_t i = 0; i < D; ++i) {
            const CycNum& a = P.at(h, i);
            const CycNum& b = P.at(R.col[h], R.col[i]);
            if (a.is_zero() != b.is_zero()) return false;
            if (a.is_zero()) continue;
            if (b != a * CycNum::root(f, (R.exp[i] - R.exp[h]) * scale)) return false;
        }
    return true;
}

}  // namespace

std::vector<i64> component_dimensions_projector(const InducedRep& rep) { return dims_from_projectors(rep, l_basis(rep)); }

std::vector<i64> component_dimensions_trace(const InducedRep& rep) { return dims_from_trace(rep, l_basis(rep)); }

SpectralReport verify_induced(const PChar& chi, const InducedOptions& opt) {
    InducedRep rep(chi);
    const auto& alg = rep.algebra();
    const auto& F = alg->field();
    const i64 p = chi.p();
    const int n = chi.n(), r = chi.r();
    SpectralReport S;
    S.p = p;
    S.n = n;
    S.r = r;
    S.dim = rep.dim();
    auto add = [&](std::string id, std::string statement, bool ok, std::string expected, std::string computed, Source src) {
        S.checks.push_back({std::move(id), std::move(statement), ok, std::move(expected), std::move(computed), src});
    };
    const auto tag = [](const std::string& s, auto... xs) {
        std::string out = s;
        ((out += "_" + std::to_string(xs)), ...);
        return out;
    };

    const i64 D = ipow(p, n - 1) * (p + 1);
    add("induced_dim", "dim I(n) = p^{n-1}(p+1)", static_cast<i64>(S.dim) == D, std::to_string(D), std::to_string(S.dim), Source::Formula);

    std::mt19937_64 rng(opt.seed);
    std::vector<MatPn> ks;
    for (int t = 0; t < opt.samples; ++t) ks.push_back(MatPn::random(p, n, rng));
    bool hom = true, monomial = true;
    for (int t = 0; t < opt.samples; ++t) {
        const MatPn& k1 = ks[static_cast<size_t>(t)];
        const MatPn& k2 = ks[static_cast<size_t>((t + 1) % opt.samples)];
        Monomial a = rep.pi_R(k1);
        std::vector<char> hit(a.col.size(), 0);
        for (size_t c : a.col) hit[c] = 1;
        monomial = monomial && std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
        hom = hom && (a * rep.pi_R(k2) == rep.pi_R(k1 * k2));
    }
    add("pi_R_monomial", "each pi_R(k) has one root of unity per row and column", monomial, "true", monomial ? "true" : "false", Source::Definition);
    add("pi_R_hom", "pi_R(k) pi_R(k') = pi_R(k k') on sampled pairs", hom, "true", hom ? "true" : "false", Source::Definition);

    // fixed vectors
    for (int m = 0; m <= n; ++m) S.fixed_dims.push_back(static_cast<int>(rep.fixed_subspace(m).size()));
    bool chain = true;
    for (int m = 0; m <= n; ++m) chain = chain && S.fixed_dims[static_cast<size_t>(m)] == std::max(0, m - r + 1);
    {
        std::string got;
        for (int m = 0; m <= n; ++m) got += (m ? "," : "") + std::to_string(S.fixed_dims[static_cast<size_t>(m)]);
        std::string want;
        for (int m = 0; m <= n; ++m) want += (m ? "," : "") + std::to_string(std::max(0, m - r + 1));
        add("fixed_chain", "dim fixed(m) - dim fixed(m-1) = 1 for r <= m <= n, 0 below r", chain, want, got, Source::Formula);
    }
    {
        auto fixed = rep.fixed_subspace(n);
        bool same = fixed.size() == alg->dim();
        for (Label j : alg->basis()) {
            CosetFunction f = HeckeElem::basis_element(alg, j).to_function();
            // the fixed basis has disjoint supports, so membership is a per-support proportionality test
            bool in_span = true;
            std::vector<char> covered(f.size(), 0);
            for (const auto& b : fixed) {
                std::optional<CycNum> ratio;
                for (size_t i = 0; i < b.size(); ++i) {
                    if (b[i].is_zero()) continue;
                    covered[i] = 1;
                    if (!ratio) ratio = f[i] / b[i];
                    else if (f[i] != *ratio * b[i]) in_span = false;
                }
            }
            for (size_t i = 0; i < f.size(); ++i)
                if (!covered[i] && !f[i].is_zero()) in_span = false;
            same = same && in_span;
        }
        add("fixed_is_algebra", "the fixed vectors at level n are the span of the V-basis", same, "equal spans", same ? "equal spans" : "different spans",
            Source::Formula);
    }

    // pi_L of the whole algebra basis
    std::vector<CycMatrix> P;
    for (Label j : alg->basis()) P.push_back(rep.pi_L(HeckeElem::basis_element(alg, j)));
    add("pi_L_identity", "pi_L(V_n) is the identity", P.back() == CycMatrix::identity(F, rep.dim()), "identity",
        P.back() == CycMatrix::identity(F, rep.dim()) ? "identity" : "not identity", Source::Definition);
    for (size_t a = 0; a < P.size(); ++a)
        for (size_t b = 0; b < P.size(); ++b) {
            HeckeElem prod = convolve(HeckeElem::basis_element(alg, alg->basis()[a]), HeckeElem::basis_element(alg, alg->basis()[b]));
            bool ok = P[a] * P[b] == rep.pi_L(prod);
            add(tag("pi_L_hom", alg->basis()[a], alg->basis()[b]), "pi_L(f1) pi_L(f2) = pi_L(f1 * f2)", ok, "equal", ok ? "equal" : "different",
                Source::Oracle);
        }
    bool comm = true;
    for (const auto& k : ks) {
        Monomial R = rep.pi_R(k);
        for (const auto& M : P) comm = comm && commutes(M, R, F);
        if (!comm) break;
    }
    add("pi_L_pi_R_commute", "pi_L(f) commutes with sampled pi_R(k)", comm, "true", comm ? "true" : "false", Source::Definition);

    if (r == 0) {
        S.note = "unramified character: the eigenvalue tables and component dimensions apply to r >= 1 only";
        return S;
    }

    LBasis L = l_basis(rep);
    auto basis = eigenvector_basis(rep);
    S.row_convention = "row v_k uses the absolute index k in r..n (v_r = Y_r, v_k = Y_{k-1} - p Y_k); column j is Y_j or V_j";
    for (const auto& [k, v] : basis) S.rows.push_back(k);
    for (int j = r; j <= n; ++j) S.cols.push_back(j);
    const size_t K = basis.size();
    S.y_computed.assign(K, std::vector<std::string>(K));
    S.y_expected = S.v_computed = S.v_expected = S.y_computed;
    bool ytab = true, vtab = true;
    for (size_t i = 0; i < K; ++i) {
        CosetFunction vf = basis[i].second.to_function();
        for (size_t jj = 0; jj < K; ++jj) {
            const int ki = S.rows[i], j = S.cols[jj];
            auto ly = eigenvalue(L.Y[jj], vf), lv = eigenvalue(L.V[jj], vf);
            const i64 ey = y_expected(p, n, ki, j), ev = v_expected(p, n, ki, j);
            S.y_expected[i][jj] = std::to_string(ey);
            S.v_expected[i][jj] = std::to_string(ev);
            S.y_computed[i][jj] = ly ? ly->to_string() : "";
            S.v_computed[i][jj] = lv ? lv->to_string() : "";
            bool oky = ly && *ly == CycNum(F, ey), okv = lv && *lv == CycNum(F, ev);
            ytab = ytab && oky;
            vtab = vtab && okv;
            add(tag("y_table", ki, j), "eigenvalue of pi_L(Y_j) on v_k", oky, S.y_expected[i][jj], ly ? S.y_computed[i][jj] : "not an eigenvector",
                Source::Formula);
            add(tag("v_table", ki, j), "eigenvalue of pi_L(V_j) on v_k", okv, S.v_expected[i][jj], lv ? S.v_computed[i][jj] : "not an eigenvector",
                Source::Formula);
        }
    }
    for (size_t jj = 0; jj < K; ++jj) {
        const int j = S.cols[jj];
        CycNum t = L.V[jj].trace();
        S.traces.push_back(t.to_string());
        if (j < n) {
            add(tag("trace_zero", j), "trace pi_L(V_j) = 0 for r <= j <= n-1", t.is_zero(), "0", t.to_string(), Source::Formula);
            bool diag = true;
            for (size_t h = 0; h < rep.dim(); ++h) diag = diag && L.V[jj].at(h, h).is_zero();
            add(tag("diagonal_zero", j), "pi_L(V_j) phi_g vanishes at g", diag, "0", diag ? "0" : "nonzero diagonal entry", Source::Formula);
        }
    }

    for (int k = r; k <= n; ++k) S.dims_expected.push_back(dim_expected(p, r, k));
    S.dims_projector = dims_from_projectors(rep, L);
    std::string trace_err;
    try {
        S.dims_trace_system = dims_from_trace(rep, L);
    } catch (const std::exception& e) {
        trace_err = e.what();
    }
    add("dims_projector", "component dimensions from projector ranks", S.dims_projector == S.dims_expected, vec_string(S.dims_expected),
        vec_string(S.dims_projector), Source::Formula);
    add("dims_trace_system", "component dimensions from the trace system", trace_err.empty() && S.dims_trace_system == S.dims_expected,
        vec_string(S.dims_expected), trace_err.empty() ? vec_string(S.dims_trace_system) : trace_err, Source::Formula);
    add("dims_methods_agree", "the two dimension computations agree", trace_err.empty() && S.dims_projector == S.dims_trace_system,
        vec_string(S.dims_projector), trace_err.empty() ? vec_string(S.dims_trace_system) : trace_err, Source::Oracle);
    i64 sum = 0;
    for (i64 d : S.dims_projector) sum += d;
    add("dims_sum", "sum of component dimensions = p^{n-1}(p+1)", sum == D, std::to_string(D), std::to_string(sum), Source::Formula);
    return S;
}

}  // namespace heckelab
