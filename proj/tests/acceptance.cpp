// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "heckelab/classical.hpp"
#include "heckelab/hecke.hpp"
#include "heckelab/induced.hpp"
#include "oracles/group_oracle.hpp"

using namespace heckelab;
namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<i64, int>> kGrid = {{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}, {5, 1}, {5, 2}, {5, 3}};

std::vector<int> exps_in_field(const PChar& chi, int m) {
    std::vector<int> e(static_cast<size_t>(chi.q()), -1);
    for (i64 u = 1; u < chi.q(); ++u)
        if (u % chi.p()) e[static_cast<size_t>(u)] = static_cast<int>(chi.exponent(u) * (m / chi.order()));
    return e;
}

oracle::i64 encode(const oracle::Group& G, const MatPn& g) { return G.encode(g.a(), g.b(), g.c(), g.d()); }

std::string cell(i64 p, int n) { return "p=" + std::to_string(p) + " n=" + std::to_string(n); }
std::string cell(i64 p, int n, i64 j) { return cell(p, n) + " j=" + std::to_string(j); }

// Collects the first few failures of one criterion.
struct Tally {
    int checked = 0;
    int failed = 0;
    std::vector<std::string> first;
    void expect(bool ok, const std::string& what) {
        ++checked;
        if (ok) return;
        ++failed;
        if (first.size() < 3) first.push_back(what);
    }
};

int g_failures = 0;

void report(int id, const Tally& t, double seconds, double budget, const std::string& extra = "") {
    const bool in_time = budget <= 0 || seconds < budget;
    const bool ok = t.failed == 0 && t.checked > 0 && in_time;
    if (!ok) ++g_failures;
    std::ostringstream os;
    os << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << " (" << t.checked - t.failed << "/" << t.checked << " checks";
    char buf[64];
    std::snprintf(buf, sizeof buf, ", %.1f s", seconds);
    os << buf;
    if (budget > 0) os << " of " << budget << " s";
    os << ")";
    if (!extra.empty()) os << " " << extra;
    if (t.checked == 0) os << " no checks ran";
    if (!in_time) os << " over the time budget";
    for (const auto& f : t.first) os << "; " << f;
    std::printf("%s\n", os.str().c_str());
    std::fflush(stdout);
}

double timed(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion1() {
    Tally t;
    double s = timed([&] {
        for (auto [p, n] : kGrid) {
            CosetSpace cs(p, n);
            const i64 q = cs.q();
            // orbits of K0 on P^1 from the oracle's own normalization
            auto orbits = oracle::p1_orbit_census(p, n);
            t.expect(static_cast<int>(orbits.size()) == n + 1, cell(p, n) + " orbit count " + std::to_string(orbits.size()));
            std::set<Label> labels;
            i64 total = 0;
            for (auto [row, size] : orbits) {
                total += size;
                auto [c, d] = row;
                MatPn g = (c % p) ? MatPn(p, n, 0, -*inv_mod(c, q), c, d) : MatPn(p, n, *inv_mod(d, q), 0, c, d);
                const Label j = double_coset_label(g);
                labels.insert(j);
                i64 expect = 0;
                for (size_t i = 0; i < cs.size(); ++i) expect += cs.label_of(i) == j;
                t.expect(size == expect, cell(p, n) + " orbit size for label " + std::to_string(j));
            }
            t.expect(total == static_cast<i64>(cs.size()), cell(p, n) + " orbits do not cover P^1");
            t.expect(static_cast<int>(labels.size()) == n + 1, cell(p, n) + " orbits share a label");
            // the named representatives are pairwise non-equivalent
            std::set<Label> rep_labels;
            for (Label j = 0; j <= n; ++j) {
                const Label got = double_coset_label(label_rep(p, n, j));
                t.expect(got == j, cell(p, n) + " label_rep(" + std::to_string(j) + ") classified as " + std::to_string(got));
                rep_labels.insert(got);
            }
            t.expect(static_cast<int>(rep_labels.size()) == n + 1, cell(p, n) + " representatives collide");
            // element-level partition of the whole group where it fits in memory
            if (q <= 27) {
                oracle::Group G(p, n);
                auto census = oracle::double_coset_census(G);
                t.expect(static_cast<int>(census.size()) == n + 1, cell(p, n) + " element census count");
                std::map<Label, i64> expected;
                for (size_t i = 0; i < cs.size(); ++i) expected[cs.label_of(i)] += G.k0_order();
                i64 sum = 0;
                std::set<Label> seen;
                for (auto [x, size] : census) {
                    i64 a, b, c, d;
                    G.decode(x, a, b, c, d);
                    const Label j = double_coset_label(MatPn(p, n, a, b, c, d));
                    seen.insert(j);
                    sum += size;
                    t.expect(expected[j] == size, cell(p, n) + " element census size for label " + std::to_string(j));
                }
                t.expect(sum == G.order(), cell(p, n) + " element census does not exhaust the group");
                t.expect(static_cast<int>(seen.size()) == n + 1, cell(p, n) + " element census labels collide");
            }
        }
    });
    report(1, t, s, 30);
}

void criterion2() {
    Tally t;
    int chars = 0;
    double s = timed([&] {
        for (auto [p, n] : kGrid) {
            std::unique_ptr<oracle::Group> G;
            if (ipow(p, n) <= 27) G = std::make_unique<oracle::Group>(p, n);
            for (const auto& [j, chi] : all_pchars(p, n)) {
                ++chars;
                const int r = chi.r();
                std::vector<Label> expect;
                if (r == 0) expect.push_back(0);
                for (int l = std::max(r, 1); l <= n; ++l) expect.push_back(l);
                t.expect(supported_basis(chi) == expect, cell(p, n, j) + " supported set");
                for (Label l = 0; l <= n; ++l) {
                    const bool want = l == 0 ? r == 0 : l >= r;
                    t.expect(is_supported(label_rep(p, n, l), chi) == want, cell(p, n, j) + " is_supported at " + std::to_string(l));
                }
                if (G) {
                    // a twisted indicator exists exactly on supported double cosets
                    const int m = static_cast<int>(chi.order());
                    auto ex = exps_in_field(chi, m);
                    for (Label l = 0; l <= n; ++l) {
                        const bool want = l == 0 ? r == 0 : l >= r;
                        auto f = oracle::twisted_indicator(*G, encode(*G, label_rep(p, n, l)), ex, m);
                        t.expect(f.consistent == want, cell(p, n, j) + " oracle support at " + std::to_string(l));
                    }
                }
            }
        }
    });
    report(2, t, s, 0, std::to_string(chars) + " characters");
}

void criterion3() {
    Tally t;
    double s = timed([&] {
        for (auto [p, n] : kGrid) {
            std::unique_ptr<oracle::Group> G;
            if (ipow(p, n) <= 27) G = std::make_unique<oracle::Group>(p, n);
            for (const auto& [j, chi] : all_pchars(p, n)) {
                auto rel = verify_relations(chi);
                for (const auto& c : rel.checks)
                    t.expect(c.passed, cell(p, n, j) + " " + c.id + " expected " + c.expected + " got " + c.computed);
                if (!G) continue;
                auto alg = HeckeAlgebra::create(chi);
                const int m = alg->field()->order();
                auto ex = exps_in_field(chi, m);
                std::vector<oracle::Twisted> ind(static_cast<size_t>(n + 1));
                for (Label l : alg->basis()) ind[static_cast<size_t>(l)] = oracle::twisted_indicator(*G, encode(*G, label_rep(p, n, l)), ex, m);
                for (Label a : alg->basis())
                    for (Label b : alg->basis()) {
                        HeckeElem prod = convolve(HeckeElem::basis_element(alg, a), HeckeElem::basis_element(alg, b));
                        for (Label k = 0; k <= n; ++k) {
                            auto counts =
                                oracle::convolve_at(*G, ind[static_cast<size_t>(a)], ind[static_cast<size_t>(b)], encode(*G, label_rep(p, n, k)), m);
                            CycNum v = CycNum::from_root_counts(alg->field(), counts).scaled(1, G->k0_order());
                            t.expect(v == prod.coeff(k),
                                     cell(p, n, j) + " group convolution " + std::to_string(a) + "*" + std::to_string(b) + " at " + std::to_string(k));
                        }
                    }
            }
        }
    });
    report(3, t, s, 120);
}

void criterion4() {
    Tally t;
    double s = timed([&] {
        for (auto [p, n] : kGrid)
            for (const auto& [j, chi] : all_pchars(p, n)) {
                auto alg = HeckeAlgebra::create(chi);
                t.expect(static_cast<int>(alg->basis().size()) == n - chi.r() + 1, cell(p, n, j) + " dimension");
                for (Label a : alg->basis())
                    for (Label b : alg->basis())
                        if (a < b) {
                            auto A = HeckeElem::basis_element(alg, a), B = HeckeElem::basis_element(alg, b);
                            t.expect(convolve(A, B) == convolve(B, A), cell(p, n, j) + " V" + std::to_string(a) + " V" + std::to_string(b));
                        }
            }
    });
    report(4, t, s, 0);
}

i64 expected_component(i64 p, int r, int k) { return k == r ? ipow(p, r - 1) * (p + 1) : ipow(p, k - 2) * (p * p - 1); }

void criterion5() {
    Tally t;
    int spectral = 0;
    double s = timed([&] {
        for (auto [p, n] : kGrid)
            for (const auto& [j, chi] : all_pchars(p, n)) {
                auto S = verify_induced(chi, {.seed = 11, .samples = 20});
                t.expect(static_cast<i64>(S.dim) == ipow(p, n - 1) * (p + 1), cell(p, n, j) + " dim I(n)");
                for (const auto& c : S.checks) t.expect(c.passed, cell(p, n, j) + " " + c.id + " expected " + c.expected + " got " + c.computed);
                const int r = chi.r();
                if (r == 0) continue;
                ++spectral;
                std::vector<i64> want;
                i64 sum = 0;
                for (int k = r; k <= n; ++k) {
                    want.push_back(expected_component(p, r, k));
                    sum += want.back();
                }
                t.expect(sum == ipow(p, n - 1) * (p + 1), cell(p, n, j) + " component sum");
                t.expect(S.dims_projector == want, cell(p, n, j) + " projector dimensions");
                t.expect(S.dims_trace_system == want, cell(p, n, j) + " trace-system dimensions");
                // tables: every entry present and equal to the closed form
                for (size_t a = 0; a < S.rows.size(); ++a)
                    for (size_t b = 0; b < S.cols.size(); ++b) {
                        t.expect(!S.y_computed[a][b].empty() && S.y_computed[a][b] == S.y_expected[a][b], cell(p, n, j) + " Y table entry");
                        t.expect(!S.v_computed[a][b].empty() && S.v_computed[a][b] == S.v_expected[a][b], cell(p, n, j) + " V table entry");
                    }
                for (size_t b = 0; b < S.cols.size(); ++b)
                    if (S.cols[b] < n) t.expect(S.traces[b] == "0", cell(p, n, j) + " trace of V_" + std::to_string(S.cols[b]));
            }
    });
    report(5, t, s, 180, std::to_string(spectral) + " characters with r >= 1");
}

void criterion6() {
    Tally t;
    double s = timed([&] {
        for (auto [p, n] : kGrid)
            for (const auto& [j, chi] : all_pchars(p, n)) {
                InducedRep rep(chi);
                const int r = chi.r();
                const int m = static_cast<int>(chi.order());
                auto ex = exps_in_field(chi, m);
                int prev = 0;
                for (int lvl = 0; lvl <= n; ++lvl) {
                    const int got = static_cast<int>(rep.fixed_subspace(lvl).size());
                    const int orc = oracle::fixed_dimension(p, n, ex, m, lvl);
                    t.expect(got == orc, cell(p, n, j) + " fixed(" + std::to_string(lvl) + ") = " + std::to_string(got) + ", oracle " + std::to_string(orc));
                    const int step = got - prev;
                    t.expect(step == (lvl >= r ? 1 : 0), cell(p, n, j) + " step at m=" + std::to_string(lvl));
                    prev = got;
                }
            }
    });
    report(6, t, s, 0);
}

bool squarefree(i64 N) {
    for (i64 d = 2; d * d <= N; ++d)
        if (N % (d * d) == 0) return false;
    return true;
}

struct Characterized {
    std::string stem;
    CuspSpace space;
    CharacterizationReport rep;
};

const ClassicalCheck* find_check(const CharacterizationReport& r, const std::string& id) {
    for (const auto& c : r.checks)
        if (c.id == id) return &c;
    return nullptr;
}

void criterion7(const std::vector<Characterized>& all) {
    Tally t;
    int qualifying = 0;
    double s = timed([&] {
        for (const auto& f : all) {
            bool any = false;
            for (const auto& pc : f.rep.conditions) {
                if (pc.kind == "none" || f.space.dim() == 0) continue;
                any = true;
                const std::string ps = std::to_string(pc.p);
                std::vector<std::string> ids = pc.kind == "Q" ? std::vector<std::string>{"Q_" + ps + "_quadratic", "Q'_" + ps + "_quadratic"}
                                                              : std::vector<std::string>{"S_" + ps + "_quadratic", "S'_" + ps + "_quadratic"};
                for (const auto& id : ids) {
                    const auto* c = find_check(f.rep, id);
                    t.expect(c && c->passed && c->value <= 1e-6, f.stem + " " + id + (c ? " value " + c->computed : " missing"));
                }
                // spectral consequences of Hermitian-ness
                for (const auto& id : pc.kind == "Q" ? std::vector<std::string>{"Q_" + ps + "_eigenvalues", "Q'_" + ps + "_eigenvalues"}
                                                     : std::vector<std::string>{"S_" + ps + "_eigenvalues", "S'_" + ps + "_eigenvalues"}) {
                    const auto* c = find_check(f.rep, id);
                    t.expect(c && c->passed, f.stem + " " + id);
                }
            }
            qualifying += any;
        }
    });
    report(7, t, s, 0, std::to_string(qualifying) + " qualifying fixtures");
}

void criterion8(const std::vector<Characterized>& all, const fs::path& dir) {
    Tally t;
    std::map<std::tuple<i64, int, i64>, i64> table;
    {
        std::ifstream in(dir / "dimension_table.json");
        auto js = nlohmann::json::parse(in);
        for (const auto& row : js.at("rows")) table[{row[0].get<i64>(), row[1].get<int>(), row[2].get<i64>()}] = row[4].get<i64>();
    }
    int fam[3] = {0, 0, 0};
    double s = timed([&] {
        for (const auto& f : all) {
            const i64 N = f.space.level();
            const DirChar& chi = f.space.character();
            bool a = false, b = false, c = false;
            if (squarefree(N)) {
                a = chi.is_trivial();
                b = !chi.is_trivial() && !chi.is_primitive();
            }
            for (const auto& pc : f.rep.conditions)
                if (pc.e >= 2 && pc.c < pc.e) c = true;
            if (!(a || b || c) || f.space.dim() == 0) continue;
            std::ifstream in(dir / (f.stem + ".json"));
            const i64 conrey = nlohmann::json::parse(in).at("character").at("conrey").get<i64>();
            auto it = table.find({N, f.space.weight(), conrey});
            t.expect(it != table.end(), f.stem + " missing from the dimension table");
            if (it == table.end()) continue;
            fam[0] += a;
            fam[1] += b;
            fam[2] += c;
            t.expect(f.rep.new_dim_computed == it->second,
                     f.stem + " new dim " + std::to_string(f.rep.new_dim_computed) + ", table " + std::to_string(it->second));
            t.expect(f.rep.gap_ratio >= 1e3, f.stem + " gap ratio");
        }
        for (int k = 0; k < 3; ++k) t.expect(fam[k] > 0, "family " + std::string(1, static_cast<char>('a' + k)) + " has no fixture");
    });
    report(8, t, s, 0, "families a/b/c: " + std::to_string(fam[0]) + "/" + std::to_string(fam[1]) + "/" + std::to_string(fam[2]));
}

void criterion9(const std::vector<Characterized>& all) {
    Tally t;
    double s = timed([&] {
        for (const auto& f : all) {
            if (f.space.dim() == 0) continue;
            for (const auto& pc : f.rep.conditions) {
                const std::string ps = std::to_string(pc.p);
                std::vector<std::string> ids;
                if (pc.kind == "Q") ids = {"old_" + ps + "_Q", "oldV_" + ps + "_Q'"};
                if (pc.kind == "S") ids = {"old_" + ps + "_S", "S_" + ps + "_image_lower"};
                for (const auto& id : ids) {
                    const auto* c = find_check(f.rep, id);
                    t.expect(c && c->passed && c->value <= 1e-6, f.stem + " " + id + (c ? " residual " + c->computed : " missing"));
                }
            }
        }
    });
    report(9, t, s, 0);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();

    const fs::path dir = HECKELAB_FIXTURE_DIR;
    std::vector<Characterized> all;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json" && e.path().stem().string().rfind("S", 0) == 0) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        CuspSpace S = load_space(file);
        auto rep = characterize(S, dir);
        all.push_back({file.stem().string(), S, rep});
    }
    criterion7(all);
    criterion8(all, dir);
    criterion9(all);
    return g_failures == 0 ? 0 : 1;
}
