#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "heckelab/finite_field.hpp"
#include "heckelab/hecke.hpp"

namespace heckelab {

// Dense square matrix over Q(zeta_m).
class CycMatrix {
public:
    CycMatrix(FieldPtr f, size_t n);
    static CycMatrix identity(FieldPtr f, size_t n);

    size_t size() const { return n_; }
    const FieldPtr& field() const { return f_; }
    const CycNum& at(size_t i, size_t j) const { return a_[i * n_ + j]; }
    CycNum& at(size_t i, size_t j) { return a_[i * n_ + j]; }

    CycMatrix operator*(const CycMatrix& o) const;
    CycMatrix operator+(const CycMatrix& o) const;
    CycMatrix operator-(const CycMatrix& o) const;
    CycMatrix operator*(const CycNum& c) const;
    bool operator==(const CycMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }
    std::vector<CycNum> apply(const std::vector<CycNum>& v) const;
    CycNum trace() const;
    size_t nonzeros() const;
    // rank over F_ell after zeta -> omega
    int rank_mod(const PrimeField& F) const;

private:
    FieldPtr f_;
    size_t n_;
    std::vector<CycNum> a_;
};

// Matrix with one entry per row and column: row h holds zeta^exp[h] in column col[h].
struct Monomial {
    std::vector<size_t> col;
    std::vector<int> exp;
    int m = 1;
    Monomial operator*(const Monomial& o) const;
    bool operator==(const Monomial& o) const { return col == o.col && exp == o.exp && m == o.m; }
    CycMatrix dense(const FieldPtr& f) const;
};

// I(n) = Ind_{K0(p^n)}^K chi_p, with basis phi_i supported on K0(p^n) R_i and phi_i(R_i) = 1.
// Vectors are coordinate lists, i.e. the values at the coset representatives.
class InducedRep {
public:
    explicit InducedRep(const PChar& chi);

    const AlgebraPtr& algebra() const { return alg_; }
    const PChar& character() const { return alg_->character(); }
    size_t dim() const { return alg_->cosets().size(); }

    // (pi_R(k) f)(x) = f(x k)
    Monomial pi_R(const MatPn& k) const;
    // pi_L(phi) f = phi * f
    CycMatrix pi_L(const HeckeElem& phi) const;

    // basis of {v : pi_R(k) v = chi(k) v for k in K0(p^m)}; empty for m < r
    std::vector<CosetFunction> fixed_subspace(int m) const;

private:
    AlgebraPtr alg_;
};

// v_r = Y_r, v_k = Y_{k-1} - p Y_k (r < k <= n), keyed by k; requires r >= 1
std::vector<std::pair<int, HeckeElem>> eigenvector_basis(const InducedRep& rep);

struct SpectralReport {
    i64 p = 0;
    int n = 0;
    int r = 0;
    size_t dim = 0;
    std::vector<int> rows;  // k of v_k, r..n
    std::vector<int> cols;  // j of Y_j / V_j, r..n
    // [row][col]; computed entries are empty strings when v_k is not an eigenvector
    std::vector<std::vector<std::string>> y_computed, y_expected, v_computed, v_expected;
    std::vector<std::string> traces;  // trace of pi_L(V_j), j in cols
    std::vector<i64> dims_projector, dims_trace_system, dims_expected;
    std::vector<int> fixed_dims;  // dim fixed(m), m = 0..n
    std::string row_convention;
    std::string note;  // set when r = 0: only the algebraic checks apply
    std::vector<RelationCheck> checks;
    bool all_passed() const;
};

struct InducedOptions {
    std::uint64_t seed = 1;
    int samples = 100;  // random k for the pi_R checks
};

// Component dimensions from ranks of the projectors e_r, e_k - e_{k-1}, e_l = p^{l-n} Y_l.
std::vector<i64> component_dimensions_projector(const InducedRep& rep);
// Component dimensions from traces: sum_k lambda(v_k, V_j) d_k = tr pi_L(V_j) for each j.
// lambda is the computed table; throws if it is not rational or the system is singular.
std::vector<i64> component_dimensions_trace(const InducedRep& rep);

SpectralReport verify_induced(const PChar& chi, const InducedOptions& opt = {});

}  // namespace heckelab
