#include "heckelab/io/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace heckelab::io {

namespace {

template <class T>
T field(const json& js, const char* key, T fallback) {
    if (!js.contains(key)) return fallback;
    try {
        return js.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("campaign: bad value for ") + key + ": " + e.what());
    }
}

void only_keys(const json& js, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [k, v] : js.items())
        if (std::find_if(keys.begin(), keys.end(), [&](const char* x) { return k == x; }) == keys.end())
            throw InputError("campaign: unknown key '" + k + "' in " + where);
}

GridCell parse_cell(const json& js) {
    if (!js.is_object()) throw InputError("campaign: grid cells must be objects");
    only_keys(js, {"p", "n", "characters"}, "grid cell");
    GridCell c;
    c.p = field<i64>(js, "p", 0);
    c.n = field<int>(js, "n", 0);
    if (!is_prime(c.p) || c.n < 1) throw InputError("campaign: grid cell needs a prime p and n >= 1");
    if (ipow(c.p, c.n) > 1000) throw InputError("campaign: p^n above 1000 is outside the supported range");
    if (js.contains("characters")) {
        const json& ch = js.at("characters");
        if (ch.is_string()) {
            if (ch != "all") throw InputError("campaign: characters must be \"all\" or a list of Conrey indices");
        } else if (ch.is_array()) {
            const i64 q = ipow(c.p, c.n);
            for (const auto& j : ch) {
                if (!j.is_number_integer()) throw InputError("campaign: Conrey indices must be integers");
                const i64 v = j.get<i64>();
                if (v < 1 || v >= std::max<i64>(q, 2) || gcd(v, q) != 1) throw InputError("campaign: " + std::to_string(v) + " is not a Conrey index mod " + std::to_string(q));
                c.conrey.push_back(v);
            }
        } else {
            throw InputError("campaign: characters must be \"all\" or a list");
        }
    }
    return c;
}

bool is_fixture(const std::filesystem::path& file) {
    if (file.extension() != ".json") return false;
    try {
        const json js = read_json(file);
        return js.is_object() && js.contains("basis") && js.contains("level");
    } catch (const std::exception&) {
        return false;
    }
}

struct Job {
    std::string name;
    std::function<void(std::vector<Assertion>&, json&)> run;
};

std::string cell_name(i64 p, int n) { return "p" + std::to_string(p) + "n" + std::to_string(n); }

void add(std::vector<Assertion>& out, std::string id, bool ok, std::string expected, std::string computed, std::string source) {
    out.push_back({std::move(id), ok, std::move(expected), std::move(computed), std::move(source), 0});
}

void coset_job(i64 p, int n, Cache* cache, std::vector<Assertion>& out, json& detail) {
    const std::string pre = "cosets/" + cell_name(p, n) + "/";
    const CosetSpace& S = CosetTables::get(p, n)->space();
    std::vector<i64> counts(static_cast<size_t>(n) + 1, 0);
    for (size_t i = 0; i < S.size(); ++i) ++counts[static_cast<size_t>(S.label_of(i))];
    for (Label j = 0; j <= n; ++j) {
        const i64 expect = j == 0 ? ipow(p, n) : j == n ? 1 : ipow(p, n - j - 1) * (p - 1);
        add(out, pre + "cosets_in_" + label_name(p, j), counts[static_cast<size_t>(j)] == expect, std::to_string(expect),
            std::to_string(counts[static_cast<size_t>(j)]), "definition");
        const Label got = double_coset_label(label_rep(p, n, j));
        add(out, pre + "label_of_rep_" + std::to_string(j), got == j, std::to_string(j), std::to_string(got), "definition");
    }
    add(out, pre + "roundtrip", cosets_roundtrip(p, n), "identity", "checked", "definition");
    if (cache) {
        const json cached = cache->cosets(p, n);
        const bool same = cached == coset_table_json(p, n);
        add(out, pre + "cache_audit", same, "cached table equals recomputation", same ? "equal" : "different", "definition");
    }
    detail = {{"p", p}, {"n", n}, {"size", S.size()}, {"label_counts", counts}};
}

void algebra_job(const PChar& chi, i64 j, bool induced, std::uint64_t seed, Cache* cache, std::vector<Assertion>& out, json& detail) {
    const std::string cell = cell_name(chi.p(), chi.n()) + "/chi" + std::to_string(j);
    const RelationReport rel = verify_relations(chi);
    for (const auto& c : rel.checks) add(out, "algebra/" + cell + "/" + c.id, c.passed, c.expected, c.computed, source_name(c.source));
    detail["algebra"] = to_json(rel);
    if (cache && rel.all_passed()) {
        auto alg = HeckeAlgebra::create(chi);
        const StructTable fresh = structure_table(alg);
        const StructTable cached = cache->structure(alg);
        add(out, "algebra/" + cell + "/structure_cache_audit", cached == fresh, "cached table equals recomputation", cached == fresh ? "equal" : "different",
            "definition");
        add(out, "algebra/" + cell + "/structure_roundtrip", structure_roundtrip(fresh), "identity", "checked", "definition");
    }
    if (induced) {
        InducedOptions opt;
        opt.seed = seed;
        const SpectralReport sr = verify_induced(chi, opt);
        for (const auto& c : sr.checks) add(out, "induced/" + cell + "/" + c.id, c.passed, c.expected, c.computed, source_name(c.source));
        detail["induced"] = to_json(sr);
    }
}

void fixture_job(const std::filesystem::path& file, const Tolerances& tol, std::uint64_t seed, std::vector<Assertion>& out, json& detail) {
    const std::string pre = "classical/" + file.stem().string() + "/";
    try {
        const CuspSpace S = load_space(file);
        CharacterizeOptions opt;
        opt.op.seed = seed;
        opt.op.residual_tol = tol.relation;
        opt.relation_tol = tol.relation;
        opt.membership_tol = tol.membership;
        opt.up_tol = tol.up;
        const CharacterizationReport R = characterize(S, file.parent_path(), opt);
        for (const auto& c : R.checks) add(out, pre + c.id, c.passed, c.expected, c.computed, c.source);
        detail = to_json(R);
    } catch (const std::exception& e) {
        add(out, pre + "run", false, "characterization completes", e.what(), "definition");
        detail = {{"error", e.what()}};
    }
}

}  // namespace

Campaign parse_campaign(const json& js, const std::filesystem::path& base) {
    if (!js.is_object()) throw InputError("campaign: top level must be an object");
    only_keys(js, {"grid", "fixtures", "tolerances", "induced", "workers"}, "campaign");
    Campaign c;
    if (js.contains("grid")) {
        const json& g = js.at("grid");
        if (g.is_string() && g == "default") c.grid = default_campaign().grid;
        else if (g.is_array())
            for (const auto& cell : g) c.grid.push_back(parse_cell(cell));
        else
            throw InputError("campaign: grid must be \"default\" or a list of cells");
    }
    if (js.contains("fixtures")) {
        const json& f = js.at("fixtures");
        if (!f.is_object()) throw InputError("campaign: fixtures must be an object");
        only_keys(f, {"dirs", "names"}, "fixtures");
        for (const auto& d : field<std::vector<std::string>>(f, "dirs", {})) {
            std::filesystem::path dir = d;
            if (dir.is_relative()) dir = base / dir;
            if (!std::filesystem::is_directory(dir)) throw InputError("campaign: missing fixture directory " + dir.string());
            c.fixture_dirs.push_back(dir);
        }
        c.fixtures = field<std::vector<std::string>>(f, "names", {});
        if (!c.fixtures.empty() && c.fixture_dirs.empty()) throw InputError("campaign: fixture names given without a directory");
        for (const auto& name : c.fixtures) {
            bool found = false;
            for (const auto& d : c.fixture_dirs) found = found || std::filesystem::exists(d / (name + ".json"));
            if (!found) throw InputError("campaign: missing fixture " + name);
        }
    }
    if (js.contains("tolerances")) {
        const json& t = js.at("tolerances");
        if (!t.is_object()) throw InputError("campaign: tolerances must be an object");
        only_keys(t, {"relation", "membership", "up"}, "tolerances");
        c.tol.relation = field<double>(t, "relation", c.tol.relation);
        c.tol.membership = field<double>(t, "membership", c.tol.membership);
        c.tol.up = field<double>(t, "up", c.tol.up);
        if (!(c.tol.relation > 0 && c.tol.membership > 0 && c.tol.up > 0)) throw InputError("campaign: tolerances must be positive");
    }
    c.induced = field<bool>(js, "induced", true);
    c.workers = field<int>(js, "workers", 0);
    if (c.workers < 0) throw InputError("campaign: workers must be >= 0");
    return c;
}

Campaign load_campaign(const std::filesystem::path& file) {
    json js;
    try {
        js = read_json(file);
    } catch (const std::exception& e) {
        throw InputError(std::string("campaign: ") + e.what());
    }
    return parse_campaign(js, file.parent_path());
}

Campaign default_campaign(const std::optional<std::filesystem::path>& fixture_dir) {
    Campaign c;
    for (i64 p : {2, 3, 5})
        for (int n = 1; n <= 3; ++n) c.grid.push_back({p, n, {}});
    if (fixture_dir) {
        if (!std::filesystem::is_directory(*fixture_dir)) throw InputError("missing fixture directory " + fixture_dir->string());
        c.fixture_dirs.push_back(*fixture_dir);
    }
    return c;
}

Report run_verify(const Campaign& c, std::uint64_t seed, Cache* cache) {
    std::vector<Job> jobs;
    std::set<std::pair<i64, int>> seen;
    for (const auto& cell : c.grid) {
        if (seen.insert({cell.p, cell.n}).second)
            jobs.push_back({"cosets/" + cell_name(cell.p, cell.n),
                            [p = cell.p, n = cell.n, cache](auto& out, auto& detail) { coset_job(p, n, cache, out, detail); }});
        std::vector<std::pair<i64, PChar>> chars;
        if (cell.conrey.empty()) chars = all_pchars(cell.p, cell.n);
        else
            for (i64 j : cell.conrey) chars.emplace_back(j, PChar::from_conrey(cell.p, cell.n, j));
        for (const auto& [j, chi] : chars)
            jobs.push_back({"algebra/" + cell_name(cell.p, cell.n) + "/chi" + std::to_string(j),
                            [chi, j, seed, cache, induced = c.induced](auto& out, auto& detail) { algebra_job(chi, j, induced, seed, cache, out, detail); }});
    }
    std::vector<std::filesystem::path> files;
    if (!c.fixtures.empty()) {
        for (const auto& name : c.fixtures)
            for (const auto& d : c.fixture_dirs)
                if (std::filesystem::exists(d / (name + ".json"))) {
                    files.push_back(d / (name + ".json"));
                    break;
                }
    } else {
        for (const auto& d : c.fixture_dirs) {
            std::vector<std::filesystem::path> here;
            for (const auto& e : std::filesystem::directory_iterator(d))
                if (is_fixture(e.path())) here.push_back(e.path());
            std::sort(here.begin(), here.end());
            files.insert(files.end(), here.begin(), here.end());
        }
    }
    for (const auto& f : files)
        jobs.push_back({"classical/" + f.stem().string(), [f, tol = c.tol, seed](auto& out, auto& detail) { fixture_job(f, tol, seed, out, detail); }});

    std::vector<std::vector<Assertion>> results(jobs.size());
    std::vector<json> details(jobs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < jobs.size();) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                jobs[i].run(results[i], details[i]);
            } catch (const std::exception& e) {
                results[i].push_back({jobs[i].name + "/run", false, "cell completes", e.what(), "definition", 0});
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (auto& a : results[i]) a.runtime = secs;
        }
    };
    size_t nw = c.workers > 0 ? static_cast<size_t>(c.workers) : std::max(1u, std::thread::hardware_concurrency());
    nw = std::min(nw, std::max<size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (size_t i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    Report R;
    R.seed = seed;
    for (size_t i = 0; i < jobs.size(); ++i) {
        for (auto& a : results[i]) R.assertions.push_back(std::move(a));
        R.details[jobs[i].name] = std::move(details[i]);
    }
    if (cache) R.warnings = cache->take_warnings();
    return R;
}

}  // namespace heckelab::io
