#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "heckelab/io/campaign.hpp"

using namespace heckelab;
using namespace heckelab::io;

namespace {

constexpr int kPass = 0, kFail = 1, kInputError = 2;

// "conrey:J", "J", or a JSON object {"conrey": J} / {"exponents": [[...]]}
PChar parse_char_spec(i64 p, int n, const std::string& spec) {
    const i64 q = ipow(p, n);
    std::string s = spec;
    if (!s.empty() && s.front() == '{') {
        json js;
        try {
            js = json::parse(s);
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("--char: ") + e.what());
        }
        json full = js;
        full["modulus"] = q;
        if (js.contains("modulus") && js["modulus"] != q) throw std::invalid_argument("--char: modulus must be p^n");
        return PChar(p, n, parse_character(full));
    }
    if (s.rfind("conrey:", 0) == 0) s = s.substr(7);
    size_t used = 0;
    i64 j = 0;
    try {
        j = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("--char: cannot parse '" + spec + "'");
    }
    if (used != s.size() || j < 1 || j >= std::max<i64>(q, 2) || gcd(j, q) != 1)
        throw std::invalid_argument("--char: " + spec + " is not a Conrey index mod " + std::to_string(q));
    return PChar::from_conrey(p, n, j);
}

std::unique_ptr<Cache> env_cache() {
    if (auto dir = Cache::env_dir()) return std::make_unique<Cache>(*dir);
    return nullptr;
}

void flush_warnings(const std::unique_ptr<Cache>& cache) {
    if (!cache) return;
    for (const auto& w : cache->take_warnings()) std::cerr << "warning: " << w << "\n";
}

int cmd_algebra(i64 p, int n, const std::string& spec, bool verify, const std::string& out) {
    const PChar chi = parse_char_spec(p, n, spec);
    auto cache = env_cache();
    auto alg = HeckeAlgebra::create(chi);
    const StructTable t = cache ? cache->structure(alg) : structure_table(alg);
    flush_warnings(cache);
    std::cout << "H(K // K0(" << p << "^" << n << "), chi) with chi = conrey " << conrey_index(chi) << ", r = " << chi.r() << "\n";
    std::cout << "basis:";
    for (Label j : alg->basis()) std::cout << " " << label_name(p, j);
    std::cout << "\nstructure table (V_a * V_b = sum_c c_abc V_c):\n";
    const auto& B = alg->basis();
    for (size_t a = 0; a < B.size(); ++a)
        for (size_t b = 0; b < B.size(); ++b) {
            std::cout << "  " << label_name(p, B[a]) << " * " << label_name(p, B[b]) << " =";
            bool any = false;
            for (size_t c = 0; c < B.size(); ++c) {
                if (t.c[a][b][c].is_zero()) continue;
                std::cout << (any ? " + " : " ") << "(" << t.c[a][b][c].to_string() << ") " << label_name(p, B[c]);
                any = true;
            }
            std::cout << (any ? "" : " 0") << "\n";
        }
    json doc = {{"schema_version", kReportSchema}, {"character", character_json(chi)}, {"structure", structure_json(t)}};
    int code = kPass;
    if (verify) {
        const RelationReport rel = verify_relations(chi);
        size_t failed = 0;
        for (const auto& c : rel.checks) {
            failed += !c.passed;
            if (!c.passed) std::cout << "FAIL " << c.id << ": expected " << c.expected << ", computed " << c.computed << "\n";
        }
        std::cout << "relations: " << rel.checks.size() - failed << "/" << rel.checks.size() << " passed\n";
        doc["relations"] = to_json(rel);
        code = rel.all_passed() ? kPass : kFail;
    }
    if (!out.empty()) write_json(out, doc);
    return code;
}

int cmd_induced(i64 p, int n, const std::string& spec, const std::string& out, std::uint64_t seed) {
    const PChar chi = parse_char_spec(p, n, spec);
    InducedOptions opt;
    opt.seed = seed;
    const SpectralReport R = verify_induced(chi, opt);
    size_t failed = 0;
    for (const auto& c : R.checks) {
        failed += !c.passed;
        if (!c.passed) std::cout << "FAIL " << c.id << ": expected " << c.expected << ", computed " << c.computed << "\n";
    }
    std::cout << "I(" << n << ") for p = " << p << ", r = " << R.r << ": dim " << R.dim << ", " << R.checks.size() - failed << "/" << R.checks.size()
              << " checks passed\n";
    if (!R.note.empty()) std::cout << "note: " << R.note << "\n";
    if (!out.empty()) {
        json doc = to_json(R);
        doc["schema_version"] = kReportSchema;
        doc["seed"] = seed;
        write_json(out, doc);
    }
    return R.all_passed() ? kPass : kFail;
}

int exponent_at(i64 N, i64 p) { return N % p == 0 ? valuation(N, p) : 0; }

// one operator on one space; nullopt with a reason when the operator does not apply
std::optional<json> single_op(const CuspSpace& S, i64 p, const std::string& op, const OpConfig& cfg, std::string& why, bool& ok) {
    const int e = exponent_at(S.level(), p);
    const cplx lambda = e ? atkin_lehner_square(S.character(), p) : cplx(1);
    json doc = {{"fixture", S.id()}, {"level", S.level()}, {"weight", S.weight()}, {"character", S.character().to_string()}, {"dim", S.dim()},
                {"prime", p}, {"op", op}};
    json ops = json::array();
    auto keep = [&](const OpMatrix& m) {
        ok = ok && !m.poisoned;
        ops.push_back(to_json(m));
    };
    if (op == "q" || op == "qprime") {
        if (e != 1) {
            why = "Q_p needs p || N";
            return std::nullopt;
        }
        const OpMatrix W = op_matrix("W_" + std::to_string(p), op_W(S, p), S, S, cfg);
        const OpMatrix Q = q_from_factors(S, p, W);
        keep(W);
        if (op == "q") {
            keep(Q);
            const OpMatrix d = op_matrix("Q_" + std::to_string(p) + "_direct", op_Q(S, p), S, S, cfg);
            if (!d.unsampleable) keep(d);
        } else {
            OpMatrix Qp = Q;
            Qp.name = "Q'_" + std::to_string(p);
            Qp.m = W.m * Q.m * W.m / lambda;
            keep(Qp);
            const OpMatrix d = op_matrix("Q'_" + std::to_string(p) + "_direct", op_Qprime_direct(S, p), S, S, cfg);
            if (!d.unsampleable) keep(d);
        }
    } else {
        if (e < 2) {
            why = "S_{p^n,n-1} needs p^2 | N";
            return std::nullopt;
        }
        if (S.character().conductor_exponent(p) > e - 1) {
            why = "chi^(p^n) is primitive; S_{p^n,n-1} is not defined";
            return std::nullopt;
        }
        if (op == "s") keep(op_matrix("S_" + std::to_string(p), op_S(S, p, e - 1), S, S, cfg));
        else keep(op_matrix("S'_" + std::to_string(p), op_Sprime_direct(S, p, e - 1), S, S, cfg));
    }
    doc["operators"] = std::move(ops);
    return doc;
}

int cmd_classical(const std::string& fixture, i64 p, const std::string& op, bool characterize_all, const std::string& out, std::uint64_t seed) {
    if (!is_prime(p)) throw std::invalid_argument("--prime must be prime");
    if (op.empty() && !characterize_all) throw std::invalid_argument("give --op or --characterize");
    std::vector<std::filesystem::path> files;
    const bool single = std::filesystem::is_regular_file(fixture);
    if (single) files.push_back(fixture);
    else if (std::filesystem::is_directory(fixture)) {
        for (const auto& e : std::filesystem::directory_iterator(fixture)) {
            if (e.path().extension() != ".json") continue;
            const json js = read_json(e.path());
            if (js.contains("basis") && js.contains("level") && js["level"].get<i64>() % p == 0) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        throw std::invalid_argument("--fixture: no such file or directory: " + fixture);
    }
    CharacterizeOptions copt;
    copt.op.seed = seed;
    bool ok = true;
    json entries = json::array();
    for (const auto& f : files) {
        const CuspSpace S = load_space(f);
        if (S.level() % p != 0) throw std::invalid_argument(f.string() + ": p does not divide the level");
        if (!op.empty()) {
            std::string why;
            auto doc = single_op(S, p, op, copt.op, why, ok);
            if (!doc) {
                if (single) throw std::invalid_argument(S.id() + ": " + why);
                std::cout << S.id() << ": skipped (" << why << ")\n";
                continue;
            }
            for (const auto& m : (*doc)["operators"])
                std::cout << S.id() << " " << m["name"].get<std::string>() << ": residual " << m["residual"].get<double>() << ", cond "
                          << m["cond"].get<double>() << (m["poisoned"].get<bool>() ? " POISONED" : "") << "\n";
            entries.push_back(std::move(*doc));
        }
        if (characterize_all) {
            const CharacterizationReport R = characterize(S, f.parent_path(), copt);
            size_t failed = 0;
            for (const auto& c : R.checks) {
                failed += !c.passed;
                if (!c.passed) std::cout << "FAIL " << S.id() << " " << c.id << ": expected " << c.expected << ", computed " << c.computed << "\n";
            }
            std::cout << S.id() << ": new dimension " << R.new_dim_computed << ", " << R.checks.size() - failed << "/" << R.checks.size()
                      << " checks passed\n";
            ok = ok && R.all_passed();
            entries.push_back(to_json(R));
        }
    }
    if (!out.empty()) write_json(out, {{"schema_version", kReportSchema}, {"seed", seed}, {"prime", p}, {"passed", ok}, {"entries", entries}});
    return ok ? kPass : kFail;
}

int cmd_verify(const std::string& campaign, std::uint64_t seed, const std::string& out, int workers) {
    Campaign c = campaign == "default" ? default_campaign() : load_campaign(campaign);
    if (workers > 0) c.workers = workers;
    auto cache = env_cache();
    const Report R = run_verify(c, seed, cache.get());
    for (const auto& w : R.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& a : R.assertions)
        if (!a.passed) std::cout << "FAIL " << a.id << ": expected " << a.expected << ", computed " << a.computed << "\n";
    std::cout << R.assertions.size() - R.failures() << "/" << R.assertions.size() << " assertions passed\n";
    if (!out.empty()) write_json(out, to_json(R));
    return exit_code(R);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twisted Hecke algebras, induced representations and newform operators"};
    app.require_subcommand(1);

    i64 p = 0;
    int n = 0;
    std::string spec, out;
    bool verify = false, characterize_all = false;
    std::uint64_t seed = 1;
    int workers = 0;

    auto* alg = app.add_subcommand("algebra", "basis, structure table and relation audit");
    alg->add_option("--p", p, "prime")->required();
    alg->add_option("--n", n, "exponent")->required()->check(CLI::PositiveNumber);
    alg->add_option("--char", spec, "character: conrey:J, J or a JSON object")->required();
    alg->add_flag("--verify", verify, "audit every relation");
    alg->add_option("--json", out, "write the structure table (and audit) as JSON");

    auto* ind = app.add_subcommand("induced", "spectral report for I(n)");
    ind->add_option("--p", p, "prime")->required();
    ind->add_option("--n", n, "exponent")->required()->check(CLI::PositiveNumber);
    ind->add_option("--char", spec, "character: conrey:J, J or a JSON object")->required();
    ind->add_option("--report", out, "report file")->required();
    ind->add_option("--seed", seed, "seed for sampled group elements");

    std::string fixture, op;
    auto* cls = app.add_subcommand("classical", "operator matrices and newspace characterization on fixtures");
    cls->add_option("--fixture", fixture, "fixture file or directory")->required();
    cls->add_option("--prime", p, "prime dividing the level")->required();
    cls->add_option("--op", op, "operator")->check(CLI::IsMember({"q", "qprime", "s", "sprime"}));
    cls->add_flag("--characterize", characterize_all, "run the full characterization");
    cls->add_option("--report", out, "report file")->required();
    cls->add_option("--seed", seed, "seed for sample points");

    std::string campaign;
    auto* ver = app.add_subcommand("verify", "run a verification campaign");
    ver->add_option("--campaign", campaign, "campaign JSON file, or 'default'")->required();
    ver->add_option("--seed", seed, "seed for every random choice")->required();
    ver->add_option("--report", out, "report file")->required();
    ver->add_option("--workers", workers, "worker threads (default: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }
    try {
        if (*alg || *ind) {
            if (!is_prime(p)) throw std::invalid_argument("--p must be prime");
            if (ipow(p, n) > 1000) throw std::invalid_argument("p^n above 1000 is outside the supported range");
        }
        if (*alg) return cmd_algebra(p, n, spec, verify, out);
        if (*ind) return cmd_induced(p, n, spec, out, seed);
        if (*cls) return cmd_classical(fixture, p, op, characterize_all, out, seed);
        return cmd_verify(campaign, seed, out, workers);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
}
