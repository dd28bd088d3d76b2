#include <cmath>
#include <stdexcept>

#include "heckelab/classical.hpp"

namespace heckelab {

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double f = 1, r = 0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

double frob(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

std::vector<IntMat> matrices_of(const SlashSum& T) {
    std::vector<IntMat> out;
    for (const auto& t : T) out.push_back(t.m);
    return out;
}

}  // namespace

CMatrix basis_values(const CuspSpace& S, const std::vector<cplx>& pts, const EvalConfig& cfg) {
    CMatrix V(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(S.dim()));
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = 0; j < S.dim(); ++j) V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = S.value(j, pts[i], cfg);
    return V;
}

CMatrix slash_values(const SlashSum& T, const CuspSpace& S, const std::vector<cplx>& pts, const EvalConfig& cfg) {
    CMatrix W = CMatrix::Zero(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(S.dim()));
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = 0; j < S.dim(); ++j) {
            cplx acc = 0;
            for (const auto& t : T) acc += t.coeff * S.slash(j, t.m, pts[i], cfg);
            W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
        }
    return W;
}

namespace {

int exponent_of(i64 N, i64 p) {
    int e = 0;
    while (N % p == 0) {
        N /= p;
        ++e;
    }
    return e;
}

}  // namespace

std::vector<cplx> sample_points(const CuspSpace& in, const std::vector<IntMat>& mats, size_t count, std::uint64_t seed, size_t offset,
                                const EvalConfig& cfg) {
    std::vector<cplx> pts;
    const std::uint64_t start = 1 + (seed % 100003) * 131 + offset;
    for (std::uint64_t i = start; pts.size() < count; ++i) {
        if (i - start > 400000) throw std::runtime_error("sample_points: not enough points keep their images above the floor");
        const cplx z(radical_inverse(i, 2) - 0.5, 0.025 + 0.575 * radical_inverse(i, 3));
        bool ok = true;
        for (const auto& A : mats)
            if (in.reduced_im(A, z, cfg.im_floor) < cfg.im_floor) {
                ok = false;
                break;
            }
        if (ok) pts.push_back(z);
    }
    return pts;
}

Membership fit_functions(const CuspSpace& space, const std::vector<cplx>& points, const CMatrix& values, const EvalConfig& cfg) {
    Membership r;
    const double scale = frob(values);
    if (space.dim() == 0) {
        r.coords = CMatrix::Zero(0, values.cols());
        r.residual = scale > 0 ? 1.0 : 0.0;
        return r;
    }
    CMatrix V = basis_values(space, points, cfg);
    Eigen::JacobiSVD<CMatrix> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    r.cond = sv(0) / sv(sv.size() - 1);
    r.coords = svd.solve(values);
    r.residual = scale > 0 ? frob(V * r.coords - values) / scale : 0.0;
    return r;
}

OpMatrix op_matrix(const std::string& name, const SlashSum& T, const CuspSpace& in, const CuspSpace& out, const OpConfig& cfg) {
    OpMatrix R;
    R.name = name;
    const auto din = static_cast<Eigen::Index>(in.dim()), dout = static_cast<Eigen::Index>(out.dim());
    R.m = CMatrix::Zero(dout, din);
    if (din == 0) return R;
    if (out.level() != in.level()) throw std::invalid_argument("op_matrix: spaces of different levels");
    std::vector<IntMat> mats = matrices_of(T);
    mats.push_back(IntMat{});
    const size_t count = static_cast<size_t>(std::max<Eigen::Index>(6, 2 * std::max(din, dout)));
    for (int attempt = 0; attempt <= cfg.redraws; ++attempt) {
        std::vector<cplx> pts;
        try {
            pts = sample_points(in, mats, count, cfg.seed, static_cast<size_t>(attempt) * count * 7, cfg.eval);
        } catch (const std::runtime_error& e) {
            R.poisoned = true;
            R.unsampleable = true;
            R.reason = e.what();
            return R;
        }
        CMatrix W = slash_values(T, in, pts, cfg.eval);
        CMatrix Vin = basis_values(in, pts, cfg.eval);
        const double scale = std::max(frob(W), frob(Vin));
        R.points = static_cast<int>(pts.size());
        if (dout == 0) {
            R.residual = frob(W) / scale;
            R.cond = 1;
            break;
        }
        CMatrix V = basis_values(out, pts, cfg.eval);
        Eigen::JacobiSVD<CMatrix> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        R.cond = sv(0) / sv(sv.size() - 1);
        R.m = svd.solve(W);
        R.residual = frob(V * R.m - W) / scale;
        if (R.cond <= cfg.max_cond) break;
    }
    if (R.cond > cfg.max_cond) {
        R.poisoned = true;
        R.reason = "ill-conditioned evaluation system";
    } else if (!(R.residual <= cfg.residual_tol)) {
        R.poisoned = true;
        R.reason = "least-squares residual above tolerance";
    }
    return R;
}

IntMat atkin_lehner_matrix(i64 p, int n, i64 N) {
    const i64 q = ipow(p, n);
    if (n < 1 || N % q != 0 || (N / q) % p == 0) throw std::invalid_argument("atkin_lehner_matrix: p^n must divide N exactly");
    const i64 M = N / q;
    i64 beta = 0;
    if (M > 1) {
        beta = *inv_mod(q % M, M);
        if (beta > M / 2) beta -= M;  // minimal |beta|, positive on ties
    }
    const i64 gamma = (q * beta - 1) / M;
    return {q * beta, 1, N * gamma, q};
}

cplx atkin_lehner_square(const DirChar& chi, i64 p) {
    const i64 N = chi.modulus();
    const int e = exponent_of(N, p);
    if (e == 0) throw std::invalid_argument("atkin_lehner_square: p does not divide the level");
    const i64 q = ipow(p, e);
    return chi.component(p).complex_value(-1) * (N / q == 1 ? cplx(1) : chi.away_from(p).complex_value(q));
}

DirChar flipped_character(const DirChar& chi, i64 p) {
    const i64 N = chi.modulus();
    return chi.component(p).conj().with_modulus(N) * chi.away_from(p).with_modulus(N);
}

IntMat coset_matrix(i64 p, int n, i64 M, int j, i64 s) {
    if (j < 1 || j > n - 1) throw std::invalid_argument("coset_matrix: need 1 <= j <= n - 1");
    const i64 c = ipow(p, j) * M, d = ipow(p, n - j) - s * M;
    auto inv = inv_mod(mod(d, c), c);
    if (!inv) throw std::invalid_argument("coset_matrix: bottom row is not coprime");
    const i64 a = *inv;
    const i64 b = narrow((static_cast<i128>(a) * d - 1) / c);
    IntMat A{a, b, c, d};
    if (A.det() != 1) throw std::logic_error("coset_matrix: determinant is not 1");
    return A;
}

SlashSum op_Up(const CuspSpace& S, i64 p) {
    if (S.level() % p != 0) throw std::invalid_argument("U_p: p must divide the level");
    SlashSum T;
    const double c = std::pow(static_cast<double>(p), S.weight() - 1);
    for (i64 s = 0; s < p; ++s) T.push_back({c, IntMat{1, s, 0, p}});
    return T;
}

SlashSum op_W(const CuspSpace& S, i64 p) {
    const int e = exponent_of(S.level(), p);
    return {{1.0, atkin_lehner_matrix(p, e, S.level())}};
}

SlashSum op_Q(const CuspSpace& S, i64 p) {
    const i64 N = S.level();
    if (exponent_of(N, p) != 1) throw std::invalid_argument("Q_p: p must divide the level exactly once");
    const IntMat W = atkin_lehner_matrix(p, 1, N);
    const cplx tw = N == p ? cplx(1) : std::conj(S.character().away_from(p).complex_value(p));
    SlashSum T;
    for (i64 s = 0; s < p; ++s) T.push_back({tw, W * IntMat{1, s, 0, p}});
    return T;
}

OpMatrix q_from_factors(const CuspSpace& S, i64 p, const OpMatrix& W) {
    const OpMatrix U = up_coefficient_matrix(S, p);
    const i64 N = S.level();
    const cplx tw = N == p ? cplx(1) : std::conj(S.character().away_from(p).complex_value(p));
    OpMatrix R;
    R.name = "Q_" + std::to_string(p);
    R.m = tw * std::pow(static_cast<double>(p), 1 - S.weight()) * U.m * W.m;
    R.residual = std::max(U.residual, W.residual);
    R.cond = std::max(U.cond, W.cond);
    R.points = W.points;
    R.poisoned = W.poisoned;
    R.reason = W.reason;
    return R;
}

SlashSum op_Qprime_direct(const CuspSpace& S, i64 p) {
    const IntMat W = atkin_lehner_matrix(p, 1, S.level());
    const cplx inv_lambda = 1.0 / atkin_lehner_square(S.character(), p);
    SlashSum T;
    for (const auto& t : op_Q(S, p)) T.push_back({t.coeff * inv_lambda, W * t.m * W});
    return T;
}

namespace {
void check_S_range(const CuspSpace& S, i64 p, int r, int& e, i64& M) {
    e = exponent_of(S.level(), p);
    if (e < 2) throw std::invalid_argument("S_{p^n,r}: needs p^n || N with n >= 2");
    const int c = S.character().conductor_exponent(p);
    if (r < std::max(c, 1) || r > e - 1)
        throw std::invalid_argument("S_{p^n,r}: need max(c, 1) <= r <= n - 1 (c = " + std::to_string(c) + ", r = " + std::to_string(r) + ")");
    M = S.level() / ipow(p, e);
}

SlashSum s_terms(const CuspSpace& S, const DirChar& chi, i64 p, int r) {
    int e;
    i64 M;
    check_S_range(S, p, r, e, M);
    SlashSum T{{1.0, IntMat{}}};
    for (int j = r; j <= e - 1; ++j) {
        const i64 m = ipow(p, e - j);
        for (i64 s = 1; s < m; ++s) {
            if (s % p == 0) continue;
            IntMat A = coset_matrix(p, e, M, j, s);
            T.push_back({std::conj(chi.complex_value(A.d)), A});
        }
    }
    return T;
}
}  // namespace

SlashSum op_S(const CuspSpace& S, i64 p, int r) { return s_terms(S, S.character(), p, r); }

SlashSum op_Sprime_direct(const CuspSpace& S, i64 p, int r) {
    const DirChar flipped = flipped_character(S.character(), p);
    const int e = exponent_of(S.level(), p);
    const IntMat W = atkin_lehner_matrix(p, e, S.level());
    const cplx inv_lambda = 1.0 / atkin_lehner_square(S.character(), p);
    SlashSum base = s_terms(S, flipped, p, r);
    // W S' W^{-1} f = f + lambda^{-1} sum conj(chi'(d_A)) f | W A W
    SlashSum T{{1.0, IntMat{}}};
    for (size_t i = 1; i < base.size(); ++i) T.push_back({base[i].coeff * inv_lambda, W * base[i].m * W});
    return T;
}

OpMatrix up_coefficient_matrix(const CuspSpace& S, i64 p) {
    OpMatrix R;
    R.name = "U_p (coefficients)";
    const auto d = static_cast<Eigen::Index>(S.dim());
    R.m = CMatrix::Zero(d, d);
    if (d == 0) return R;
    std::vector<QExpansion> images;
    for (const auto& f : S.basis()) images.push_back(coeff_Up(f, p));
    const Eigen::Index B = images[0].precision();
    CMatrix A(B, d), Y(B, d);
    for (Eigen::Index n = 1; n <= B; ++n) {
        const double w = std::pow(static_cast<double>(n), -(S.weight() - 1) / 2.0);
        for (Eigen::Index j = 0; j < d; ++j) {
            A(n - 1, j) = w * S.basis()[static_cast<size_t>(j)].a[static_cast<size_t>(n)];
            Y(n - 1, j) = w * images[static_cast<size_t>(j)].a[static_cast<size_t>(n)];
        }
    }
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    R.cond = sv(0) / sv(sv.size() - 1);
    R.m = svd.solve(Y);
    R.residual = frob(A * R.m - Y) / std::max(frob(Y), frob(A));
    R.points = static_cast<int>(B);
    return R;
}

EigenspaceResult kernel(const CMatrix& m, double tol, double min_gap) {
    EigenspaceResult R;
    const Eigen::Index cols = m.cols();
    if (cols == 0) {
        R.basis = CMatrix::Zero(0, 0);
        R.gap_ratio = 1e300;
        return R;
    }
    if (m.rows() == 0) {
        R.basis = CMatrix::Identity(cols, cols);
        R.gap_ratio = 1e300;
        return R;
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    std::vector<double> sv(static_cast<size_t>(cols), 0.0);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) sv[static_cast<size_t>(i)] = svd.singularValues()(i);
    R.singular_values = sv;
    const double thr = tol * std::max(1.0, sv[0]);
    size_t kept = 0;
    while (kept < sv.size() && sv[kept] >= thr) ++kept;
    const double lo_kept = kept > 0 ? sv[kept - 1] : 0.0;
    const double hi_disc = kept < sv.size() ? sv[kept] : 0.0;
    if (kept == 0 || kept == sv.size()) R.gap_ratio = 1e300;
    else R.gap_ratio = hi_disc > 0 ? std::min(1e300, lo_kept / hi_disc) : 1e300;
    R.ambiguous = R.gap_ratio < min_gap;
    R.basis = svd.matrixV().rightCols(cols - static_cast<Eigen::Index>(kept));
    return R;
}

EigenspaceResult eigenspace(const CMatrix& m, cplx lambda, double tol, double min_gap) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenspace: square matrix expected");
    return kernel(m - lambda * CMatrix::Identity(m.rows(), m.cols()), tol, min_gap);
}

}  // namespace heckelab
