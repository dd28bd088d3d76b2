#pragma once

#include <array>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "heckelab/number_theory.hpp"

namespace heckelab {

// 2x2 matrix over Z/p^n with unit determinant.
class MatPn {
public:
    MatPn(i64 p, int n, i64 a, i64 b, i64 c, i64 d);

    static MatPn identity(i64 p, int n) { return MatPn(p, n, 1, 0, 0, 1); }
    static MatPn w1(i64 p, int n) { return MatPn(p, n, 0, -1, 1, 0); }
    static MatPn y(i64 p, int n, i64 s) { return MatPn(p, n, 1, 0, s, 1); }
    static MatPn x(i64 p, int n, i64 t) { return MatPn(p, n, 1, t, 0, 1); }
    static MatPn d(i64 p, int n, i64 s) { return MatPn(p, n, s, 0, 0, 1); }
    static MatPn z(i64 p, int n, i64 s) { return MatPn(p, n, s, 0, 0, s); }

    i64 p() const { return p_; }
    int n() const { return n_; }
    i64 q() const { return q_; }
    i64 a() const { return e_[0]; }
    i64 b() const { return e_[1]; }
    i64 c() const { return e_[2]; }
    i64 d() const { return e_[3]; }
    const std::array<i64, 4>& entries() const { return e_; }
    i64 det() const;

    MatPn operator*(const MatPn& o) const;
    MatPn inverse() const;
    bool operator==(const MatPn& o) const { return p_ == o.p_ && n_ == o.n_ && e_ == o.e_; }
    bool operator!=(const MatPn& o) const { return !(*this == o); }
    std::string to_string() const;

    static MatPn random(i64 p, int n, std::mt19937_64& rng);
    static MatPn random_K0(i64 p, int n, std::mt19937_64& rng);

private:
    MatPn(i64 p, int n, i64 q, std::array<i64, 4> e) : p_(p), n_(n), q_(q), e_(e) {}
    i64 p_;
    int n_;
    i64 q_;
    std::array<i64, 4> e_;
};

bool in_K0(const MatPn& g);

// Point of P^1(Z/p^n): (1 : value) with value mod p^n, or (value : 1) with value in pZ/p^n.
struct CosetIndex {
    bool unit_c;
    i64 value;
    bool operator==(const CosetIndex& o) const { return unit_c == o.unit_c && value == o.value; }
};

// Double-coset labels: 0 stands for w(1), j in [1, n] for y(p^j); n is the K0 class.
using Label = int;
std::string label_name(i64 p, Label j);
MatPn label_rep(i64 p, int n, Label j);

// Right cosets K0 \ K indexed 0 .. p^{n-1}(p+1) - 1.
class CosetSpace {
public:
    CosetSpace(i64 p, int n);

    i64 p() const { return p_; }
    int n() const { return n_; }
    i64 q() const { return q_; }
    size_t size() const { return reps_.size(); }
    const std::vector<MatPn>& reps() const { return reps_; }
    const MatPn& rep(size_t i) const { return reps_[i]; }
    CosetIndex index_at(size_t i) const;
    size_t position(const CosetIndex& ix) const;
    Label label_of(size_t i) const { return labels_[i]; }
    i64 unit_inverse(i64 u) const { return inv_[static_cast<size_t>(mod(u, q_))]; }

    struct Decomp {
        size_t coset;
        MatPn k0;
    };
    // g = k0 * rep(coset)
    Decomp decompose(const MatPn& g) const;
    // coset position and the lower-right entry of k0, without forming k0
    std::pair<size_t, i64> decompose_d(i64 c, i64 d) const;

private:
    i64 p_;
    int n_;
    i64 q_;
    std::vector<MatPn> reps_;
    std::vector<Label> labels_;
    std::vector<i64> inv_;  // 0 for non-units
};

std::vector<MatPn> right_coset_reps(i64 p, int n);
std::pair<CosetIndex, MatPn> coset_decompose(const MatPn& g);
Label double_coset_label(const MatPn& g);

// d(s) y(p^j) for unit lifts s mod p^{n-j}; 1 <= j <= n-1
std::vector<MatPn> single_cosets_of_double(i64 p, int n, int j);

// Products of coset representatives, shared process-wide per (p, n).
// mul(i, h) = (g, d): R_i R_h = k0 R_g with k0 having lower-right entry d.
class CosetTables {
public:
    static std::shared_ptr<const CosetTables> get(i64 p, int n);
    explicit CosetTables(i64 p, int n);

    const CosetSpace& space() const { return space_; }
    size_t size() const { return space_.size(); }
    std::pair<size_t, i64> inv(size_t i) const { return inv_[i]; }
    std::pair<size_t, i64> mul(size_t i, size_t h) const { return mul_[i * space_.size() + h]; }
    // position of the representative of each label
    size_t label_position(Label j) const;

private:
    CosetSpace space_;
    std::vector<std::pair<size_t, i64>> inv_;
    std::vector<std::pair<size_t, i64>> mul_;
};

void for_each_K0(i64 p, int n, const std::function<void(const MatPn&)>& fn);
// K_g = g^{-1} K0 g ∩ K0 by enumeration of K0 (p^n <= 128)
std::vector<MatPn> enumerate_Kg(const MatPn& g);
// membership in K_g for g = label_rep(j), from the closed form
bool in_Kg_closed_form(Label j, const MatPn& k);

}  // namespace heckelab
