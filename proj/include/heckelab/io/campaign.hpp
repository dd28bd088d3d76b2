#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heckelab/io/cache.hpp"
#include "heckelab/io/serialize.hpp"

namespace heckelab::io {

// malformed campaign or missing fixtures: exit code 2
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridCell {
    i64 p = 0;
    int n = 0;
    std::vector<i64> conrey;  // empty: every character mod p^n
};

struct Tolerances {
    double relation = 1e-6;
    double membership = 1e-6;
    double up = 1e-8;
};

struct Campaign {
    std::vector<GridCell> grid;
    std::vector<std::filesystem::path> fixture_dirs;
    std::vector<std::string> fixtures;  // file stems; empty: every fixture in the directories
    Tolerances tol;
    bool induced = true;
    int workers = 0;  // 0: hardware concurrency
};

Campaign parse_campaign(const json& js, const std::filesystem::path& base = ".");
Campaign load_campaign(const std::filesystem::path& file);
// p in {2, 3, 5}, n <= 3, all characters; every fixture in fixture_dir if given
Campaign default_campaign(const std::optional<std::filesystem::path>& fixture_dir = std::nullopt);

Report run_verify(const Campaign& c, std::uint64_t seed, Cache* cache = nullptr);
inline int exit_code(const Report& r) { return r.passed() ? 0 : 1; }

}  // namespace heckelab::io
