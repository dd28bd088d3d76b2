#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "heckelab/classical.hpp"
#include "heckelab/hecke.hpp"
#include "heckelab/induced.hpp"
#include "json.hpp"

namespace heckelab::io {

using nlohmann::json;

inline constexpr int kReportSchema = 1;
inline constexpr int kCacheFormat = 1;

// exact coefficients in the power basis of Q(zeta_m): {"m", "num": [...], "den"}
json to_json(const CycNum& x);
CycNum cycnum_from_json(const json& js, const FieldPtr& f);

// Conrey index of a character mod p^n
i64 conrey_index(const PChar& chi);
json character_json(const PChar& chi);

json structure_json(const StructTable& t);
// throws std::invalid_argument unless the document describes alg
StructTable structure_from_json(const json& js, const AlgebraPtr& alg);

// canonical representatives of K0 \ K as 4-tuples with their double-coset labels
json coset_table_json(i64 p, int n);

json to_json(const RelationCheck& c);
json to_json(const RelationReport& r);
json to_json(const SpectralReport& r);
json to_json(const ClassicalCheck& c);
json to_json(const OpMatrix& m);
json to_json(const CharacterizationReport& r);

struct Assertion {
    std::string id;
    bool passed = false;
    std::string expected;
    std::string computed;
    std::string source;
    double runtime = 0;  // seconds spent on the cell that produced it
};

struct Report {
    int schema = kReportSchema;
    std::uint64_t seed = 0;
    std::vector<Assertion> assertions;
    std::vector<std::string> warnings;
    json details = json::object();
    size_t failures() const;
    bool passed() const { return failures() == 0; }
};

json to_json(const Report& r);

// pretty-printed, through a temporary file and a rename
void write_json(const std::filesystem::path& file, const json& js);
json read_json(const std::filesystem::path& file);

}  // namespace heckelab::io
