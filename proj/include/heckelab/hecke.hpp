#pragma once

#include <memory>
#include <string>
#include <vector>

#include "heckelab/character.hpp"
#include "heckelab/cosets.hpp"
#include "heckelab/cyclotomic.hpp"

namespace heckelab {

// Where an expected value comes from: a closed formula from the theory, a definition
// or counting identity, or an independent computation.
enum class Source { Formula, Definition, Oracle };
const char* source_name(Source s);

// K_g-compatibility of chi at the double coset of g:
// chi(g k g^{-1}) = chi(k) for every k in K_g.
bool is_supported(const MatPn& g, const PChar& chi);
std::vector<Label> supported_basis(const PChar& chi);

// The twisted Hecke algebra H(K // K0(p^n), chi), with K0(p^n) of mass 1.
class HeckeAlgebra {
public:
    static std::shared_ptr<const HeckeAlgebra> create(const PChar& chi, FieldPtr field = nullptr);

    const PChar& character() const { return chi_; }
    i64 p() const { return chi_.p(); }
    int n() const { return chi_.n(); }
    int r() const { return chi_.r(); }
    const FieldPtr& field() const { return field_; }
    const CosetTables& tables() const { return *tables_; }
    const CosetSpace& cosets() const { return tables_->space(); }

    const std::vector<Label>& basis() const { return basis_; }
    size_t dim() const { return basis_.size(); }
    int position(Label j) const;  // -1 if unsupported

    // chi(u) as an exponent of zeta_m, m = field order
    int chi_exp(i64 u) const { return exps_[static_cast<size_t>(mod(u, chi_.q()))]; }
    CycNum root(int e) const { return CycNum::root(field_, e); }

    HeckeAlgebra(const PChar& chi, FieldPtr field);

private:
    PChar chi_;
    FieldPtr field_;
    std::shared_ptr<const CosetTables> tables_;
    std::vector<Label> basis_;
    std::vector<int> exps_;
};

using AlgebraPtr = std::shared_ptr<const HeckeAlgebra>;
// a function on K left-twisted by chi, by its values on the canonical coset representatives
using CosetFunction = std::vector<CycNum>;

class HeckeElem {
public:
    explicit HeckeElem(AlgebraPtr alg);

    static HeckeElem zero(AlgebraPtr alg) { return HeckeElem(std::move(alg)); }
    static HeckeElem basis_element(AlgebraPtr alg, Label j);
    static HeckeElem identity(AlgebraPtr alg);
    static HeckeElem scalar(AlgebraPtr alg, const CycNum& c);

    const AlgebraPtr& algebra() const { return alg_; }
    const std::vector<CycNum>& coeffs() const { return coeffs_; }
    CycNum coeff(Label j) const;
    void set_coeff(Label j, const CycNum& c);

    HeckeElem operator+(const HeckeElem& o) const;
    HeckeElem operator-(const HeckeElem& o) const;
    HeckeElem operator*(const CycNum& c) const;
    HeckeElem operator*(i64 c) const;
    bool operator==(const HeckeElem& o) const;
    bool operator!=(const HeckeElem& o) const { return !(*this == o); }

    CosetFunction to_function() const;
    CycNum value_at(const MatPn& x) const;
    std::string to_string() const;

private:
    void check_same(const HeckeElem& o) const;
    AlgebraPtr alg_;
    std::vector<CycNum> coeffs_;
};

// y_l = sum_{i=l}^{n} V_i
HeckeElem y_element(const AlgebraPtr& alg, int l);

// (f1 * F)(h) = sum_R f1(R^{-1}) F(R h) over coset representatives R; F any function in I(n)
CosetFunction convolve_function(const HeckeElem& f1, const CosetFunction& F);
// mirrored form sum_R f1(h R^{-1}) F(R)
CosetFunction convolve_function_mirrored(const HeckeElem& f1, const CosetFunction& F);
// throws std::logic_error if the product is not in the supported span
HeckeElem convolve(const HeckeElem& f1, const HeckeElem& f2);

struct StructTable {
    AlgebraPtr alg;
    // c[i][j][k]: V_i * V_j = sum_k c[i][j][k] V_k, positions in alg->basis()
    std::vector<std::vector<std::vector<CycNum>>> c;
    bool operator==(const StructTable& o) const { return c == o.c; }
};
StructTable structure_table(const AlgebraPtr& alg);
HeckeElem multiply(const StructTable& t, const HeckeElem& a, const HeckeElem& b);

struct RelationCheck {
    std::string id;
    std::string statement;
    bool passed = false;
    std::string expected;
    std::string computed;
    Source source = Source::Formula;
};

struct RelationReport {
    i64 p = 0;
    int n = 0;
    int r = 0;
    std::vector<Label> basis;
    std::vector<RelationCheck> checks;
    bool all_passed() const;
};

RelationReport verify_relations(const PChar& chi);

}  // namespace heckelab
