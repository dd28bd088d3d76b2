#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heckelab/character.hpp"
#include "json.hpp"

namespace heckelab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Fourier coefficients a_0..a_B of a cusp form of weight k.
struct QExpansion {
    int weight = 0;
    std::vector<cplx> a;
    // |a_n| <= growth * n^{k-1}, fitted from the coefficients
    double growth = 0;

    int precision() const { return static_cast<int>(a.size()) - 1; }
    void fit_growth();
};

struct EvalConfig {
    double im_floor = 0.02;
    double tail_tol = 1e-10;
};

struct Evaluation {
    cplx value;
    double tail = 0;  // bound on the truncated part
};

// sum_{n <= B} a_n e(n z); throws std::domain_error below the floor or when the tail bound is too large
Evaluation evaluate(const QExpansion& f, cplx z, const EvalConfig& cfg = {});
double tail_bound(const QExpansion& f, double im);

// U_p and V(p) on coefficients: b_n = p^{k/2} a_{pn}; V(p): b_{pn} = a_n
QExpansion coeff_Up(const QExpansion& f, i64 p);
QExpansion coeff_Vp(const QExpansion& f, i64 p);

// Integer 2x2 matrix with positive determinant.
struct IntMat {
    i64 a = 1, b = 0, c = 0, d = 1;
    i64 det() const { return narrow(static_cast<i128>(a) * d - static_cast<i128>(b) * c); }
    IntMat operator*(const IntMat& o) const;
    bool operator==(const IntMat& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    IntMat primitive() const;  // divided by the gcd of the entries
    cplx act(cplx z) const { return (static_cast<double>(a) * z + static_cast<double>(b)) / (static_cast<double>(c) * z + static_cast<double>(d)); }
    std::string to_string() const;
};

// gamma in Gamma_0(N) maximizing Im(gamma w), found from the bottom row alone.
// With min_im > 0 the result is only guaranteed maximal when the maximum is at least min_im.
struct Reduction {
    IntMat gamma;
    cplx image;
};
Reduction reduce_gamma0(i64 N, cplx w, double min_im = 0);

class CuspSpace {
public:
    CuspSpace(i64 level, int weight, DirChar chi, std::vector<QExpansion> basis, std::string id);
    static CuspSpace empty(i64 level, int weight, DirChar chi);

    i64 level() const { return N_; }
    int weight() const { return k_; }
    const DirChar& character() const { return chi_; }
    size_t dim() const { return basis_.size(); }
    const std::vector<QExpansion>& basis() const { return basis_; }
    const std::string& id() const { return id_; }
    std::optional<i64> oracle_cusp_dim, oracle_new_dim;

    // f_j(w), using Gamma_0(N) to move w up before summing the q-series
    cplx value(size_t j, cplx w, const EvalConfig& cfg = {}) const;
    // (f_j | A)(z) = det^{k/2} (cz + d)^{-k} f_j(A z)
    cplx slash(size_t j, const IntMat& A, cplx z, const EvalConfig& cfg = {}) const;
    // Im of the point at which the q-series is summed for f(A z)
    double reduced_im(const IntMat& A, cplx z, double min_im = 0) const;

private:
    i64 N_;
    int k_;
    DirChar chi_;
    std::vector<QExpansion> basis_;
    std::string id_;
};

// Parse a fixture; validates parity, precision and numerical independence.
CuspSpace load_space(const nlohmann::json& js, const std::string& id = "");
CuspSpace load_space(const std::filesystem::path& file);
// Fixture in dir with matching level, weight and character values; nullopt if none.
std::optional<CuspSpace> find_space(const std::filesystem::path& dir, i64 level, int weight, const DirChar& chi);
// Parse {"modulus", "conrey"} or {"modulus", "exponents"}
DirChar parse_character(const nlohmann::json& js);

// Operator f -> sum_t coeff_t f | m_t
struct SlashTerm {
    cplx coeff;
    IntMat m;
};
using SlashSum = std::vector<SlashTerm>;

struct OpConfig {
    EvalConfig eval;
    std::uint64_t seed = 1;
    double max_cond = 1e8;
    int redraws = 5;
    double residual_tol = 1e-6;
};

struct OpMatrix {
    std::string name;
    CMatrix m;
    double residual = 0;
    double cond = 0;
    int points = 0;
    bool poisoned = false;
    bool unsampleable = false;  // no point keeps every image above the floor
    std::string reason;
};

// Matrix X with T f_j = sum_l X(l, j) g_l for f in `in`, g in `out`, from V X = W at sample points.
OpMatrix op_matrix(const std::string& name, const SlashSum& T, const CuspSpace& in, const CuspSpace& out, const OpConfig& cfg = {});
// Coordinates of functions (given by their values at points) in the basis of `space`.
struct Membership {
    CMatrix coords;
    double residual = 0;
    double cond = 0;
};
Membership fit_functions(const CuspSpace& space, const std::vector<cplx>& points, const CMatrix& values, const EvalConfig& cfg = {});

// rows: points, columns: basis forms
CMatrix basis_values(const CuspSpace& S, const std::vector<cplx>& pts, const EvalConfig& cfg = {});
CMatrix slash_values(const SlashSum& T, const CuspSpace& S, const std::vector<cplx>& pts, const EvalConfig& cfg = {});

// sample points in |Re z| <= 1/2, Im z in [0.025, 0.6] whose needed images stay above the floor
std::vector<cplx> sample_points(const CuspSpace& in, const std::vector<IntMat>& mats, size_t count, std::uint64_t seed, size_t offset = 0,
                                const EvalConfig& cfg = {});

// p^n || N; p^{2n} beta - N gamma = p^n with minimal |beta|
IntMat atkin_lehner_matrix(i64 p, int n, i64 N);
// chi^{(p^n)}(-1) chi^{(M)}(p^n): the scalar by which W_{p^n} squares
cplx atkin_lehner_square(const DirChar& chi, i64 p);
// conj(chi^{(p^n)}) chi^{(M)}
DirChar flipped_character(const DirChar& chi, i64 p);
// A_{s,j} = (a, b; p^j M, p^{n-j} - s M), determinant 1, smallest nonnegative a
IntMat coset_matrix(i64 p, int n, i64 M, int j, i64 s);

SlashSum op_Up(const CuspSpace& S, i64 p);
SlashSum op_W(const CuspSpace& S, i64 p);
SlashSum op_Q(const CuspSpace& S, i64 p);
// Q_p = conj(chi^(M)(p)) p^{1-k} U_p W_p, from the coefficient U_p matrix and a W_p matrix
OpMatrix q_from_factors(const CuspSpace& S, i64 p, const OpMatrix& W);
// W Q W^{-1} written out as slash matrices
SlashSum op_Qprime_direct(const CuspSpace& S, i64 p);
// requires max(c, 1) <= r <= n - 1 with c the conductor exponent at p
SlashSum op_S(const CuspSpace& S, i64 p, int r);
SlashSum op_Sprime_direct(const CuspSpace& S, i64 p, int r);

// Coefficient-level U_p matrix on a space with p | N
OpMatrix up_coefficient_matrix(const CuspSpace& S, i64 p);

struct EigenspaceResult {
    CMatrix basis;  // orthonormal columns
    std::vector<double> singular_values;
    double gap_ratio = 0;
    bool ambiguous = false;
};
// kernel of (m - lambda I), or of a stacked matrix with lambda = 0 and nothing subtracted
EigenspaceResult eigenspace(const CMatrix& m, cplx lambda, double tol = 1e-6, double min_gap = 1e3);
EigenspaceResult kernel(const CMatrix& m, double tol = 1e-6, double min_gap = 1e3);

// Cohen-Oesterle dimension of S_k(Gamma_0(N), chi), k >= 2
i64 cusp_dimension(i64 N, int k, const DirChar& chi);
i64 new_dimension(i64 N, int k, const DirChar& chi);

struct ClassicalCheck {
    std::string id;
    std::string statement;
    bool passed = false;
    std::string expected;
    std::string computed;
    std::string source;  // published-formula / definition / independent-oracle
    double value = 0;    // residual or norm, when numeric
};

struct PrimeCondition {
    i64 p = 0;
    int e = 0;  // exponent of p in N
    int c = 0;  // conductor exponent of chi at p
    std::string kind;  // "Q" (p || N, chi^(p) trivial), "S" (e >= 2, c <= e - 1) or "none"
};

struct CharacterizationReport {
    std::string fixture;
    i64 level = 0;
    int weight = 0;
    std::string character;
    size_t dim = 0;
    std::vector<PrimeCondition> conditions;
    std::vector<OpMatrix> operators;
    std::vector<ClassicalCheck> checks;
    i64 new_dim_computed = -1;
    i64 new_dim_oracle = -1;
    std::vector<double> stacked_singular_values;
    double gap_ratio = 0;
    std::vector<std::string> notes;
    bool all_passed() const;
};

struct CharacterizeOptions {
    OpConfig op;
    double relation_tol = 1e-6;
    double membership_tol = 1e-6;
    double up_tol = 1e-8;
};

std::vector<PrimeCondition> prime_conditions(i64 N, const DirChar& chi);
// fixtures for lower levels and flipped characters are looked up in dir
CharacterizationReport characterize(const CuspSpace& S, const std::filesystem::path& dir, const CharacterizeOptions& opt = {});

}  // namespace heckelab
