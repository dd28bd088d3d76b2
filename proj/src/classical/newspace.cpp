#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "heckelab/classical.hpp"

namespace heckelab {

namespace {

constexpr const char* kFormula = "published-formula";
constexpr const char* kDefinition = "definition";
constexpr const char* kOracle = "independent-oracle";

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// difference relative to the larger side, floored at 1 so that two near-zero operators agree
double rel(const CMatrix& a, const CMatrix& b) {
    if (a.size() == 0) return 0.0;
    return (a - b).norm() / std::max({a.norm(), b.norm(), 1.0});
}

// |(m - a)(m - b)|_F / |m|_F^2. An operator with |m| < 1 has no eigenvalue in {a, b} \ {0} of size >= 1,
// so it can only be the zero operator; the quotient is then 0/0 and the absolute norm is used.
double quadratic(const CMatrix& m, double a, double b) {
    if (m.size() == 0) return 0.0;
    const CMatrix I = CMatrix::Identity(m.rows(), m.cols());
    const double num = ((m - a * I) * (m - b * I)).norm();
    const double n2 = m.squaredNorm();
    return n2 >= 1.0 ? num / n2 : num;
}

class Checks {
public:
    explicit Checks(std::vector<ClassicalCheck>& out) : out_(out) {}

    void exact(const std::string& id, const std::string& st, i64 expected, i64 computed, const char* src) {
        out_.push_back({id, st, expected == computed, std::to_string(expected), std::to_string(computed), src, 0});
    }
    void small(const std::string& id, const std::string& st, double value, double tol, const char* src) {
        out_.push_back({id, st, value <= tol, "<= " + fmt(tol), fmt(value), src, value});
    }
    void fail(const std::string& id, const std::string& st, const std::string& why, const char* src) {
        out_.push_back({id, st, false, "computable", why, src, 0});
    }
    void op_ok(const OpMatrix& m) {
        out_.push_back({"op_" + m.name, "operator matrix for " + m.name + " is well determined", !m.poisoned, "residual <= tolerance",
                        m.poisoned ? m.reason + " (residual " + fmt(m.residual) + ", cond " + fmt(m.cond) + ")" : "residual " + fmt(m.residual),
                        kDefinition, m.residual});
    }

private:
    std::vector<ClassicalCheck>& out_;
};

// every eigenvalue of m within tol of one of `allowed`
std::pair<bool, std::string> eigenvalues_in(const CMatrix& m, const std::vector<double>& allowed, double tol) {
    if (m.rows() == 0) return {true, "{}"};
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    std::ostringstream os;
    bool ok = true;
    os << "{";
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx mu = es.eigenvalues()(i);
        double best = 1e300;
        for (double a : allowed) best = std::min(best, std::abs(mu - a));
        ok = ok && best <= tol;
        os << (i ? ", " : "") << std::fixed;
        os.precision(6);
        os << mu.real();
        if (std::abs(mu.imag()) > 1e-9) os << (mu.imag() > 0 ? "+" : "") << mu.imag() << "i";
    }
    os << "}";
    return {ok, os.str()};
}

std::string set_string(const std::vector<double>& v) {
    std::ostringstream os;
    os << "subset of {";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "}";
    return os.str();
}

size_t nullity(const CMatrix& m, double lambda) { return static_cast<size_t>(eigenspace(m, lambda).basis.cols()); }

// fixture for the level N / p, or an empty space when the dimension formula says there is nothing there
std::optional<CuspSpace> lower_space(const CuspSpace& S, i64 p, const std::filesystem::path& dir) {
    const i64 L = S.level() / p;
    const DirChar chi = S.character().with_modulus(L);
    if (cusp_dimension(L, S.weight(), chi) == 0) return CuspSpace::empty(L, S.weight(), chi);
    return find_space(dir, L, S.weight(), chi);
}

// Forms given by values at pts lie in S and are lambda-eigenvectors of the operator with matrix m.
void eigen_membership(Checks& ck, const std::string& id, const std::string& st, const CuspSpace& S, const std::vector<cplx>& pts,
                      const CMatrix& values, const CMatrix& m, double lambda, const CharacterizeOptions& opt) {
    if (values.cols() == 0) {
        ck.small(id, st + " (no forms to test)", 0, opt.relation_tol, kDefinition);
        return;
    }
    Membership fit = fit_functions(S, pts, values, opt.op.eval);
    if (fit.residual > opt.membership_tol) {
        ck.small(id + "_membership", "the forms lie in the space", fit.residual, opt.membership_tol, kDefinition);
        return;
    }
    ck.small(id, st, rel(m * fit.coords, lambda * fit.coords), opt.relation_tol, kFormula);
}

}  // namespace

bool CharacterizationReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

std::vector<PrimeCondition> prime_conditions(i64 N, const DirChar& chi) {
    std::vector<PrimeCondition> out;
    for (auto [p, e] : factorize(N)) {
        PrimeCondition pc{p, e, chi.with_modulus(N).conductor_exponent(p), "none"};
        if (e == 1 && pc.c == 0) pc.kind = "Q";
        else if (e >= 2 && pc.c <= e - 1) pc.kind = "S";
        out.push_back(pc);
    }
    return out;
}

CharacterizationReport characterize(const CuspSpace& S, const std::filesystem::path& dir, const CharacterizeOptions& opt) {
    CharacterizationReport R;
    R.fixture = S.id();
    R.level = S.level();
    R.weight = S.weight();
    R.character = S.character().to_string();
    R.dim = S.dim();
    R.conditions = prime_conditions(S.level(), S.character());
    Checks ck(R.checks);
    const i64 N = S.level();
    const int k = S.weight();
    const DirChar& chi = S.character();
    const auto dN = static_cast<Eigen::Index>(S.dim());
    const CMatrix I = CMatrix::Identity(dN, dN);

    const i64 cd = cusp_dimension(N, k, chi);
    ck.exact("fixture_dimension", "fixture basis size equals the dimension formula", cd, static_cast<i64>(S.dim()), kFormula);
    if (S.oracle_cusp_dim) ck.exact("cusp_dim_oracle", "dimension formula agrees with the oracle", *S.oracle_cusp_dim, cd, kOracle);
    R.new_dim_computed = new_dimension(N, k, chi);
    if (S.oracle_new_dim) {
        R.new_dim_oracle = *S.oracle_new_dim;
        ck.exact("new_dim_oracle", "new dimension formula agrees with the oracle", R.new_dim_oracle, R.new_dim_computed, kOracle);
    }

    auto record = [&](OpMatrix m) {
        ck.op_ok(m);
        R.operators.push_back(m);
        return R.operators.back().m;
    };
    const auto pts = sample_points(S, {IntMat{}}, static_cast<size_t>(std::max<Eigen::Index>(8, 3 * dN)), opt.op.seed, 4099, opt.op.eval);

    std::vector<CMatrix> stacked;
    for (const auto& pc : R.conditions) {
        const i64 p = pc.p;
        const std::string ps = std::to_string(p);

        // U_p two ways
        {
            const CMatrix up = record(op_matrix("U_" + ps, op_Up(S, p), S, S, opt.op));
            const OpMatrix uc = up_coefficient_matrix(S, p);
            ck.small("U_" + ps + "_coefficients", "sampled U_p matrix matches the coefficient action", rel(up, uc.m), opt.up_tol, kDefinition);
        }
        if (pc.kind == "none") continue;
        const cplx lambda = atkin_lehner_square(chi, p);
        auto lower = lower_space(S, p, dir);
        const i64 lower_dim = cusp_dimension(N / p, k, chi.with_modulus(N / p));

        if (pc.kind == "Q") {
            const OpMatrix Wop = op_matrix("W_" + ps, op_W(S, p), S, S, opt.op);
            const CMatrix W = record(Wop);
            const CMatrix Q = record(q_from_factors(S, p, Wop));
            const CMatrix Qp = W * Q * W / lambda;
            // the slash sums themselves, where some point keeps all their images above the floor
            const OpMatrix Qs = op_matrix("Q_" + ps + "_direct", op_Q(S, p), S, S, opt.op);
            const OpMatrix Qd = op_matrix("Q'_" + ps + "_direct", op_Qprime_direct(S, p), S, S, opt.op);
            const double pd = static_cast<double>(p);
            ck.small("W_" + ps + "_square", "W_p^2 acts as chi^(p)(-1) chi^(M)(p)", rel(W * W, lambda * I), opt.relation_tol, kFormula);
            for (const auto& [direct, mat] : {std::pair{&Qs, &Q}, std::pair{&Qd, &Qp}}) {
                if (direct->unsampleable) {
                    R.notes.push_back(direct->name + " skipped: " + direct->reason);
                    continue;
                }
                record(*direct);
                ck.small(direct->name.substr(0, direct->name.size() - 7) + "_consistency", "matrix product equals the direct slash sum",
                         rel(*mat, direct->m), opt.relation_tol, kDefinition);
            }
            ck.small("Q_" + ps + "_quadratic", "|(Q + 1)(Q - p)| / |Q|^2", quadratic(Q, -1, pd), opt.relation_tol, kFormula);
            ck.small("Q'_" + ps + "_quadratic", "|(Q' + 1)(Q' - p)| / |Q'|^2", quadratic(Qp, -1, pd), opt.relation_tol, kFormula);
            auto [okq, evq] = eigenvalues_in(Q, {-1, pd}, 1e-6 * pd);
            R.checks.push_back({"Q_" + ps + "_eigenvalues", "eigenvalues of Q lie in {-1, p}", okq, set_string({-1, pd}), evq, kFormula, 0});
            auto [okq2, evq2] = eigenvalues_in(Qp, {-1, pd}, 1e-6 * pd);
            R.checks.push_back({"Q'_" + ps + "_eigenvalues", "eigenvalues of Q' lie in {-1, p}", okq2, set_string({-1, pd}), evq2, kFormula, 0});
            ck.exact("Q_" + ps + "_p_eigenspace", "p-eigenspace of Q has the dimension of the lower level", lower_dim, static_cast<i64>(nullity(Q, pd)), kFormula);
            ck.exact("Q'_" + ps + "_p_eigenspace", "p-eigenspace of Q' has the dimension of the lower level", lower_dim, static_cast<i64>(nullity(Qp, pd)),
                     kFormula);
            if (!lower) {
                ck.fail("old_" + ps, "lower-level fixture available", "no fixture for level " + std::to_string(N / p), kOracle);
            } else {
                CMatrix g(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(lower->dim()));
                CMatrix gv = g;
                for (size_t i = 0; i < pts.size(); ++i)
                    for (size_t j = 0; j < lower->dim(); ++j) {
                        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lower->value(j, pts[i], opt.op.eval);
                        gv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lower->value(j, static_cast<double>(p) * pts[i], opt.op.eval);
                    }
                eigen_membership(ck, "old_" + ps + "_Q", "lower-level forms are p-eigenvectors of Q", S, pts, g, Q, pd, opt);
                eigen_membership(ck, "oldV_" + ps + "_Q'", "V(p) of lower-level forms are p-eigenvectors of Q'", S, pts, gv, Qp, pd, opt);
            }
            stacked.push_back(Q + I);
            stacked.push_back(Qp + I);
        } else {
            const int r = pc.e - 1;
            const double top = std::pow(static_cast<double>(p), pc.e - r);
            const CMatrix Sm = record(op_matrix("S_" + ps, op_S(S, p, r), S, S, opt.op));
            const CMatrix Sd = record(op_matrix("S'_" + ps + "_direct", op_Sprime_direct(S, p, r), S, S, opt.op));
            const DirChar flipped = flipped_character(chi, p);
            CMatrix Sp = Sd;
            if (flipped.same_values(chi)) {
                const CMatrix W = record(op_matrix("W_" + ps, op_W(S, p), S, S, opt.op));
                ck.small("W_" + ps + "_square", "W^2 acts as chi^(p^n)(-1) chi^(M)(p^n)", rel(W * W, lambda * I), opt.relation_tol, kFormula);
                Sp = W * Sm * W / lambda;
                ck.small("S'_" + ps + "_consistency", "W S W^-1 from matrices equals the direct slash sum", rel(Sp, Sd), opt.relation_tol, kDefinition);
            } else if (auto T = find_space(dir, N, k, flipped)) {
                if (T->dim() != S.dim()) {
                    ck.fail("S'_" + ps + "_consistency", "flipped space has the same dimension", std::to_string(T->dim()), kOracle);
                } else {
                    const CMatrix W = record(op_matrix("W_" + ps, op_W(S, p), S, *T, opt.op));
                    const CMatrix Wb = record(op_matrix("W_" + ps + "_back", op_W(*T, p), *T, S, opt.op));
                    const CMatrix St = record(op_matrix("S_" + ps + "_flipped", op_S(*T, p, r), *T, *T, opt.op));
                    ck.small("W_" + ps + "_square", "W^2 acts as chi^(p^n)(-1) chi^(M)(p^n)", rel(Wb * W, lambda * I), opt.relation_tol, kFormula);
                    Sp = Wb * St * W / lambda;
                    ck.small("S'_" + ps + "_consistency", "W S(chi') W^-1 from matrices equals the direct slash sum", rel(Sp, Sd), opt.relation_tol,
                             kDefinition);
                }
            } else {
                ck.fail("S'_" + ps + "_consistency", "flipped-character fixture available", "no fixture for " + flipped.to_string(), kOracle);
            }
            ck.small("S_" + ps + "_quadratic", "|S (S - p^(n-r))| / |S|^2", quadratic(Sm, 0, top), opt.relation_tol, kFormula);
            ck.small("S'_" + ps + "_quadratic", "|S' (S' - p^(n-r))| / |S'|^2", quadratic(Sp, 0, top), opt.relation_tol, kFormula);
            auto [oks, evs] = eigenvalues_in(Sm, {0, top}, 1e-6 * top);
            R.checks.push_back({"S_" + ps + "_eigenvalues", "eigenvalues of S lie in {0, p^(n-r)}", oks, set_string({0, top}), evs, kFormula, 0});
            auto [oks2, evs2] = eigenvalues_in(Sp, {0, top}, 1e-6 * top);
            R.checks.push_back({"S'_" + ps + "_eigenvalues", "eigenvalues of S' lie in {0, p^(n-r)}", oks2, set_string({0, top}), evs2, kFormula, 0});
            ck.exact("S_" + ps + "_top_eigenspace", "top eigenspace of S has the dimension of the lower level", lower_dim,
                     static_cast<i64>(nullity(Sm, top)), kFormula);
            ck.exact("S'_" + ps + "_top_eigenspace", "top eigenspace of S' has the dimension of the lower level", lower_dim,
                     static_cast<i64>(nullity(Sp, top)), kFormula);
            if (!lower) {
                ck.fail("old_" + ps, "lower-level fixture available", "no fixture for level " + std::to_string(N / p), kOracle);
            } else {
                CMatrix g(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(lower->dim()));
                for (size_t i = 0; i < pts.size(); ++i)
                    for (size_t j = 0; j < lower->dim(); ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lower->value(j, pts[i], opt.op.eval);
                eigen_membership(ck, "old_" + ps + "_S", "lower-level forms are top eigenvectors of S", S, pts, g, Sm, top, opt);
                // the image of S lies in the lower level
                const SlashSum T = op_S(S, p, r);
                std::vector<IntMat> mats;
                for (const auto& t : T) mats.push_back(t.m);
                const auto ipts = sample_points(S, mats, pts.size(), opt.op.seed, 8191, opt.op.eval);
                const CMatrix img = slash_values(T, S, ipts, opt.op.eval);
                const double scale = std::max(basis_values(S, ipts, opt.op.eval).norm(), 1e-300);
                double res;
                if (lower->dim() == 0) {
                    res = img.norm() / scale;
                } else {
                    const Membership fit = fit_functions(*lower, ipts, img, opt.op.eval);
                    res = fit.residual * img.norm() / scale;
                }
                ck.small("S_" + ps + "_image_lower", "the image of S lies in the lower level", res, opt.membership_tol, kFormula);
            }
            stacked.push_back(Sm);
            stacked.push_back(Sp);
        }
    }

    // new subspace: common kernel of the stacked conditions
    Eigen::Index rows = 0;
    for (const auto& m : stacked) rows += m.rows();
    CMatrix A(rows, dN);
    rows = 0;
    for (const auto& m : stacked) {
        A.middleRows(rows, m.rows()) = m;
        rows += m.rows();
    }
    const EigenspaceResult ker = kernel(A);
    R.stacked_singular_values = ker.singular_values;
    R.gap_ratio = ker.gap_ratio;
    R.checks.push_back({"gap_ratio", "singular values separate kept from discarded", !ker.ambiguous, ">= 1.000e+03", fmt(ker.gap_ratio), kDefinition,
                        ker.gap_ratio});
    ck.exact("new_dim_characterized", "common kernel of the conditions has the new dimension", R.new_dim_computed, static_cast<i64>(ker.basis.cols()),
             kFormula);
    return R;
}

}  // namespace heckelab
