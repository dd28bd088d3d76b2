#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "heckelab/hecke.hpp"
#include "json.hpp"

namespace heckelab::io {

// On-disk JSON cache for coset tables and structure tables.
// Files are replaced by rename, so a reader sees either the old or the new document.
// A file that does not parse, has another format version or describes another key is recomputed with a warning.
class Cache {
public:
    explicit Cache(std::filesystem::path dir, int format_version = 0);
    // HECKE_LAB_CACHE_DIR, if set and non-empty
    static std::optional<std::filesystem::path> env_dir();

    const std::filesystem::path& dir() const { return dir_; }
    int format_version() const { return format_; }

    nlohmann::json cosets(i64 p, int n);
    StructTable structure(const AlgebraPtr& alg);

    std::filesystem::path cosets_path(i64 p, int n) const;
    std::filesystem::path structure_path(const PChar& chi) const;

    std::vector<std::string> take_warnings();
    size_t hits() const { return hits_; }
    size_t misses() const { return misses_; }

private:
    // payload of a valid envelope, or nullopt after recording why the file was rejected
    std::optional<nlohmann::json> load(const std::filesystem::path& file, const std::string& key);
    void store(const std::filesystem::path& file, const std::string& key, const nlohmann::json& data);
    void warn(std::string msg);

    std::filesystem::path dir_;
    int format_;
    std::shared_mutex mu_;
    std::map<std::string, nlohmann::json> memo_;
    std::mutex warn_mu_;
    std::vector<std::string> warnings_;
    std::atomic<size_t> hits_{0}, misses_{0};
};

// serialize, parse and serialize again: true iff the table and the bytes are unchanged
bool structure_roundtrip(const StructTable& t);
bool cosets_roundtrip(i64 p, int n);

}  // namespace heckelab::io
