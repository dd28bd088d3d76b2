#include "heckelab/io/cache.hpp"

#include <cstdlib>
#include <mutex>

#include "heckelab/io/serialize.hpp"

namespace heckelab::io {

Cache::Cache(std::filesystem::path dir, int format_version) : dir_(std::move(dir)), format_(format_version ? format_version : kCacheFormat) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::filesystem::path> Cache::env_dir() {
    const char* v = std::getenv("HECKE_LAB_CACHE_DIR");
    if (!v || !*v) return std::nullopt;
    return std::filesystem::path(v);
}

std::filesystem::path Cache::cosets_path(i64 p, int n) const {
    return dir_ / ("cosets_p" + std::to_string(p) + "_n" + std::to_string(n) + ".json");
}

std::filesystem::path Cache::structure_path(const PChar& chi) const {
    return dir_ / ("structure_p" + std::to_string(chi.p()) + "_n" + std::to_string(chi.n()) + "_chi" + std::to_string(conrey_index(chi)) + ".json");
}

void Cache::warn(std::string msg) {
    std::lock_guard lock(warn_mu_);
    warnings_.push_back(std::move(msg));
}

std::vector<std::string> Cache::take_warnings() {
    std::lock_guard lock(warn_mu_);
    return std::exchange(warnings_, {});
}

std::optional<json> Cache::load(const std::filesystem::path& file, const std::string& key) {
    if (!std::filesystem::exists(file)) return std::nullopt;
    json js;
    try {
        js = read_json(file);
    } catch (const std::exception& e) {
        warn("cache file " + file.string() + " is corrupt (" + e.what() + "); rebuilt");
        return std::nullopt;
    }
    if (!js.is_object() || !js.contains("format_version") || !js.contains("key") || !js.contains("data")) {
        warn("cache file " + file.string() + " has no valid envelope; rebuilt");
        return std::nullopt;
    }
    if (js["format_version"] != format_) {
        warn("cache file " + file.string() + " has format version " + js["format_version"].dump() + ", expected " + std::to_string(format_) +
             "; rebuilt");
        return std::nullopt;
    }
    if (js["key"] != key) {
        warn("cache file " + file.string() + " holds key " + js["key"].dump() + "; rebuilt");
        return std::nullopt;
    }
    return std::move(js["data"]);
}

void Cache::store(const std::filesystem::path& file, const std::string& key, const json& data) {
    write_json(file, {{"format_version", format_}, {"key", key}, {"data", data}});
}

json Cache::cosets(i64 p, int n) {
    const std::string key = "cosets/" + std::to_string(p) + "/" + std::to_string(n);
    {
        std::shared_lock lock(mu_);
        if (auto it = memo_.find(key); it != memo_.end()) {
            ++hits_;
            return it->second;
        }
    }
    std::unique_lock lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) {
        ++hits_;
        return it->second;
    }
    const auto file = cosets_path(p, n);
    const json fresh = coset_table_json(p, n);
    auto data = load(file, key);
    if (data && *data != fresh) {
        warn("cache file " + file.string() + " disagrees with the recomputed coset table; rebuilt");
        data.reset();
    }
    if (data) ++hits_;
    else {
        ++misses_;
        store(file, key, fresh);
    }
    return memo_[key] = fresh;
}

StructTable Cache::structure(const AlgebraPtr& alg) {
    const std::string key = "structure/" + std::to_string(alg->p()) + "/" + std::to_string(alg->n()) + "/" + std::to_string(conrey_index(alg->character()));
    {
        std::shared_lock lock(mu_);
        if (auto it = memo_.find(key); it != memo_.end()) {
            ++hits_;
            return structure_from_json(it->second, alg);
        }
    }
    std::unique_lock lock(mu_);
    if (auto it = memo_.find(key); it == memo_.end()) {
        const auto file = structure_path(alg->character());
        json doc;
        if (auto data = load(file, key)) {
            try {
                structure_from_json(*data, alg);
                doc = std::move(*data);
                ++hits_;
            } catch (const std::exception& e) {
                warn("cache file " + file.string() + " does not describe this algebra (" + e.what() + "); rebuilt");
            }
        }
        if (doc.is_null()) {
            ++misses_;
            doc = structure_json(structure_table(alg));
            store(file, key, doc);
        }
        memo_[key] = std::move(doc);
    } else {
        ++hits_;
    }
    return structure_from_json(memo_[key], alg);
}

bool structure_roundtrip(const StructTable& t) {
    const std::string a = structure_json(t).dump();
    const StructTable back = structure_from_json(json::parse(a), t.alg);
    return back == t && structure_json(back).dump() == a;
}

bool cosets_roundtrip(i64 p, int n) {
    const std::string a = coset_table_json(p, n).dump();
    const json back = json::parse(a);
    const CosetSpace& S = CosetTables::get(p, n)->space();
    const auto& reps = back.at("reps");
    const auto& labels = back.at("labels");
    if (reps.size() != S.size() || labels.size() != S.size()) return false;
    for (size_t i = 0; i < S.size(); ++i) {
        const MatPn m(p, n, reps[i][0].get<i64>(), reps[i][1].get<i64>(), reps[i][2].get<i64>(), reps[i][3].get<i64>());
        if (m != S.rep(i) || labels[i].get<Label>() != S.label_of(i)) return false;
    }
    return back.dump() == a;
}

}  // namespace heckelab::io
