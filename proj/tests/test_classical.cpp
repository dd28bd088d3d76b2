#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "doctest.h"
#include "heckelab/classical.hpp"

using namespace heckelab;

namespace {

const std::filesystem::path kDir = HECKELAB_FIXTURE_DIR;

CuspSpace fixture(const std::string& name) { return load_space(kDir / (name + ".json")); }

// brute-force orbit of the bottom row: max Im over c N, d, by scanning a box
double brute_max_im(i64 N, cplx w) {
    double best = w.imag();
    for (i64 c = N; c <= 400; c += N)
        for (i64 d = -400; d <= 400; ++d) {
            if (gcd(c, d) != 1) continue;
            best = std::max(best, w.imag() / std::norm(static_cast<double>(c) * w + static_cast<double>(d)));
        }
    return best;
}

}  // namespace

TEST_CASE("q-series evaluation") {
    QExpansion f;
    f.weight = 2;
    f.a.assign(101, 0);
    f.a[1] = 1;
    f.fit_growth();
    auto v = evaluate(f, cplx(0, 1));
    CHECK(std::abs(v.value - std::exp(-2 * M_PI)) < 1e-15);
    CHECK_THROWS_AS(evaluate(f, cplx(0.1, 0.01)), std::domain_error);

    const CuspSpace S = fixture("S2_11_1");
    const cplx z(0.23, 0.31);
    const cplx a = evaluate(S.basis()[0], z).value, b = evaluate(S.basis()[0], z + 1.0).value;
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
    CHECK(tail_bound(S.basis()[0], 0.5) < tail_bound(S.basis()[0], 0.1));
}

TEST_CASE("Gamma_0(N) reduction") {
    for (i64 N : {1, 4, 11, 27, 44}) {
        for (cplx w : {cplx(0.3, 0.01), cplx(-0.41, 0.004), cplx(0.1234, 0.02), cplx(0.5, 0.7)}) {
            Reduction r = reduce_gamma0(N, w);
            CHECK(r.gamma.det() == 1);
            CHECK(r.gamma.c % N == 0);
            CHECK(std::abs(r.gamma.act(w) - r.image) < 1e-9);
            CHECK(std::abs(r.image.real()) <= 0.5 + 1e-12);
            CHECK(r.image.imag() == doctest::Approx(brute_max_im(N, w)).epsilon(1e-9));
        }
    }
}

TEST_CASE("modularity of the fixtures") {
    for (const char* name : {"S2_11_1", "S3_27_8", "S4_14_9", "S2_44_1"}) {
        const CuspSpace S = fixture(name);
        const i64 N = S.level();
        // gamma = (1 + N, 1; N, 1) in Gamma_0(N), d = 1; and one with d = -1 + N
        for (IntMat g : {IntMat{1 + N, 1, N, 1}, IntMat{1, 0, N, 1}, IntMat{2 * N - 1, -1, N, -1 + (N == 1 ? 0 : 0)}}) {
            if (g.det() != 1) continue;
            for (size_t j = 0; j < S.dim(); ++j) {
                const cplx z(0.17, 0.35);
                const cplx lhs = S.slash(j, g, z), rhs = S.character().complex_value(g.d) * S.value(j, z);
                CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("slash action is a right action and ignores scalars") {
    const CuspSpace S = fixture("S2_11_1");
    const IntMat A{2, 1, 11, 6}, B{1, 1, 0, 3};
    const cplx z(0.05, 0.4);
    // f | (A B) at z equals (f | A) | B, computed through the cocycle
    const cplx direct = S.slash(0, A * B, z);
    const IntMat P = B.primitive();
    const cplx via = std::pow(3.0, 1.0) * std::pow(static_cast<double>(P.c) * z + static_cast<double>(P.d), -2) * S.slash(0, A, B.act(z));
    CHECK(std::abs(direct - via) < 1e-10 * std::abs(direct));
    IntMat A3{3 * A.a, 3 * A.b, 3 * A.c, 3 * A.d};
    CHECK(std::abs(S.slash(0, A3, z) - S.slash(0, A, z)) < 1e-12);
}

TEST_CASE("V(p) and U_p on coefficients versus slash matrices") {
    const CuspSpace S = fixture("S2_11_1");
    const auto Vp = coeff_Vp(S.basis()[0], 3);
    const cplx z(0.11, 0.3);
    // V(p) f (z) = f(p z) = p^{-k/2} (f | diag(p, 1))(z)
    CHECK(std::abs(evaluate(Vp, z).value - S.value(0, 3.0 * z)) < 1e-12);
    CHECK(std::abs(evaluate(Vp, z).value - S.slash(0, IntMat{3, 0, 0, 1}, z) / 3.0) < 1e-12);

    const CuspSpace T = fixture("S3_27_8");
    const OpMatrix a = op_matrix("U_3", op_Up(T, 3), T, T);
    const OpMatrix b = up_coefficient_matrix(T, 3);
    CHECK_FALSE(a.poisoned);
    CHECK((a.m - b.m).norm() < 1e-7 * b.m.norm());
}

TEST_CASE("Atkin-Lehner matrices") {
    const IntMat W = atkin_lehner_matrix(11, 1, 11);
    CHECK(W.det() == 11);
    CHECK(W.a == 0);
    CHECK(W.c == -11);
    const IntMat W2 = atkin_lehner_matrix(2, 2, 44);
    CHECK(W2.det() == 4);
    CHECK(W2.a % 4 == 0);
    CHECK(W2.c % 44 == 0);
    CHECK(W2.d == 4);
    CHECK_THROWS_AS(atkin_lehner_matrix(2, 1, 44), std::invalid_argument);

    // W^2 is a scalar times an element of Gamma_0(N)
    for (auto [p, n, N] : std::vector<std::tuple<i64, int, i64>>{{2, 2, 44}, {3, 3, 27}, {5, 2, 25}, {3, 1, 15}}) {
        const IntMat A = atkin_lehner_matrix(p, n, N);
        const IntMat B = A * A;
        const i64 q = ipow(p, n);
        CHECK(B.a % q == 0);
        CHECK(B.b % q == 0);
        CHECK(B.d % q == 0);
        CHECK((B.c / q) % N == 0);
    }
    const DirChar chi = DirChar::from_conrey(27, 8);
    CHECK(flipped_character(chi, 3).same_values(DirChar::from_conrey(27, 17)));
    CHECK(std::abs(atkin_lehner_square(chi, 3) - chi.complex_value(-1)) < 1e-15);
}

TEST_CASE("coset matrices of S") {
    for (auto [p, n, M] : std::vector<std::tuple<i64, int, i64>>{{2, 2, 11}, {3, 3, 1}, {5, 2, 1}, {3, 2, 5}, {2, 3, 5}}) {
        for (int j = 1; j < n; ++j) {
            int count = 0;
            for (i64 s = 1; s < ipow(p, n - j); ++s) {
                if (s % p == 0) continue;
                const IntMat A = coset_matrix(p, n, M, j, s);
                CHECK(A.det() == 1);
                CHECK(A.c == ipow(p, j) * M);
                CHECK(A.a >= 0);
                CHECK(A.a < A.c);
                ++count;
            }
            CHECK(count == euler_phi(ipow(p, n - j)));
        }
    }
    const CuspSpace S = fixture("S3_27_8");
    CHECK_THROWS_AS(op_S(S, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(op_S(S, 3, 1), std::invalid_argument);  // conductor exponent 2
    CHECK(op_S(S, 3, 2).size() == 3);
}

TEST_CASE("parity and empty spaces") {
    QExpansion f;
    f.a.assign(101, 0);
    f.a[1] = 1;
    CHECK_THROWS_AS(CuspSpace(11, 3, DirChar::trivial(11), {f}, "bad"), std::invalid_argument);
    CHECK(cusp_dimension(11, 3, DirChar::trivial(11)) == 0);
    const CuspSpace E = CuspSpace::empty(1, 2, DirChar::trivial(1));
    CHECK(E.dim() == 0);
    const OpMatrix m = op_matrix("T", {{1.0, IntMat{}}}, E, E);
    CHECK(m.m.size() == 0);
    CHECK_FALSE(m.poisoned);
}

TEST_CASE("eigenspace and kernel") {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = 2;
    m(1, 1) = -1;
    m(2, 2) = -1;
    auto e = eigenspace(m, -1.0);
    CHECK(e.basis.cols() == 2);
    CHECK_FALSE(e.ambiguous);
    CHECK(eigenspace(m, 2.0).basis.cols() == 1);
    CHECK(eigenspace(m, 0.5).basis.cols() == 0);
    m(1, 1) = -1 + 1e-7;
    m(2, 2) = -1 + 1e-5;
    CHECK(eigenspace(m, -1.0).ambiguous);
}

TEST_CASE("dimension formula against the tabulated oracle") {
    std::ifstream in(kDir / "dimension_table.json");
    REQUIRE(in);
    const auto js = nlohmann::json::parse(in);
    const auto& cols = js.at("columns");
    REQUIRE(cols.size() == 5);
    size_t rows = 0, bad = 0;
    for (const auto& row : js.at("rows")) {
        const i64 N = row.at(0).get<i64>();
        const int k = row.at(1).get<int>();
        const DirChar chi = DirChar::from_conrey(N, row.at(2).get<i64>());
        ++rows;
        if (cusp_dimension(N, k, chi) != row.at(3).get<i64>() || new_dimension(N, k, chi) != row.at(4).get<i64>()) {
            ++bad;
            MESSAGE("mismatch at N=" << N << " k=" << k << " conrey=" << row.at(2));
        }
    }
    CHECK(rows > 4000);
    CHECK(bad == 0);
}

TEST_CASE("characterization of the new subspace on every fixture") {
    size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kDir)) {
        if (entry.path().extension() != ".json" || entry.path().filename() == "dimension_table.json") continue;
        const CuspSpace S = load_space(entry.path());
        const auto t0 = std::chrono::steady_clock::now();
        const auto R = characterize(S, kDir);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++count;
        for (const auto& c : R.checks)
            if (!c.passed) MESSAGE(S.id() << ": " << c.id << " expected " << c.expected << " computed " << c.computed);
        MESSAGE(S.id() << " dim " << S.dim() << " new " << R.new_dim_computed << " " << secs << "s");
        CHECK_MESSAGE(R.all_passed(), S.id());
    }
    CHECK(count >= 30);
}
