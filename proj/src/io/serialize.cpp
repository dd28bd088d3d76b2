#include "heckelab/io/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unistd.h>

namespace heckelab::io {

json to_json(const CycNum& x) { return {{"m", x.order()}, {"num", x.numerators()}, {"den", x.denominator()}}; }

CycNum cycnum_from_json(const json& js, const FieldPtr& f) {
    if (js.at("m").get<int>() != f->order()) throw std::invalid_argument("cyclotomic number from another field");
    return CycNum::from_coeffs(f, js.at("num").get<std::vector<i64>>(), js.at("den").get<i64>());
}

i64 conrey_index(const PChar& chi) {
    for (const auto& [j, x] : all_pchars(chi.p(), chi.n()))
        if (x == chi) return j;
    throw std::logic_error("conrey_index: character not found");
}

json character_json(const PChar& chi) {
    return {{"p", chi.p()}, {"n", chi.n()}, {"conrey", conrey_index(chi)}, {"order", chi.order()}, {"r", chi.r()}};
}

json structure_json(const StructTable& t) {
    const auto& alg = *t.alg;
    json c = json::array();
    for (const auto& row : t.c) {
        json r = json::array();
        for (const auto& cell : row) {
            json k = json::array();
            for (const auto& x : cell) k.push_back(to_json(x));
            r.push_back(std::move(k));
        }
        c.push_back(std::move(r));
    }
    json labels = json::array();
    for (Label j : alg.basis()) labels.push_back(label_name(alg.p(), j));
    return {{"character", character_json(alg.character())}, {"field_order", alg.field()->order()}, {"basis", alg.basis()},
            {"basis_names", labels}, {"c", std::move(c)}};
}

StructTable structure_from_json(const json& js, const AlgebraPtr& alg) {
    const json& ch = js.at("character");
    if (ch.at("p").get<i64>() != alg->p() || ch.at("n").get<int>() != alg->n() || ch.at("conrey").get<i64>() != conrey_index(alg->character()))
        throw std::invalid_argument("structure table for another character");
    if (js.at("basis").get<std::vector<Label>>() != alg->basis()) throw std::invalid_argument("structure table with another basis");
    const size_t d = alg->dim();
    StructTable t{alg, {}};
    const json& c = js.at("c");
    if (c.size() != d) throw std::invalid_argument("structure table of the wrong size");
    for (const auto& row : c) {
        if (row.size() != d) throw std::invalid_argument("structure table of the wrong size");
        std::vector<std::vector<CycNum>> r;
        for (const auto& cell : row) {
            if (cell.size() != d) throw std::invalid_argument("structure table of the wrong size");
            std::vector<CycNum> k;
            for (const auto& x : cell) k.push_back(cycnum_from_json(x, alg->field()));
            r.push_back(std::move(k));
        }
        t.c.push_back(std::move(r));
    }
    return t;
}

json coset_table_json(i64 p, int n) {
    const CosetSpace& S = CosetTables::get(p, n)->space();
    json reps = json::array(), labels = json::array();
    for (size_t i = 0; i < S.size(); ++i) {
        const auto& e = S.rep(i).entries();
        reps.push_back({e[0], e[1], e[2], e[3]});
        labels.push_back(S.label_of(i));
    }
    json dc = json::array();
    for (Label j = 0; j <= n; ++j) {
        const auto e = label_rep(p, n, j).entries();
        dc.push_back({{"label", j}, {"name", label_name(p, j)}, {"rep", {e[0], e[1], e[2], e[3]}}});
    }
    return {{"p", p}, {"n", n}, {"reps", std::move(reps)}, {"labels", std::move(labels)}, {"double_cosets", std::move(dc)}};
}

json to_json(const RelationCheck& c) {
    return {{"id", c.id}, {"statement", c.statement}, {"passed", c.passed}, {"expected", c.expected}, {"computed", c.computed},
            {"source", source_name(c.source)}};
}

json to_json(const RelationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    json names = json::array();
    for (Label j : r.basis) names.push_back(label_name(r.p, j));
    return {{"p", r.p}, {"n", r.n}, {"r", r.r}, {"basis", names}, {"all_passed", r.all_passed()}, {"checks", std::move(checks)}};
}

json to_json(const SpectralReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"p", r.p},
            {"n", r.n},
            {"r", r.r},
            {"dim", r.dim},
            {"rows", r.rows},
            {"cols", r.cols},
            {"row_convention", r.row_convention},
            {"y_table", {{"computed", r.y_computed}, {"expected", r.y_expected}}},
            {"v_table", {{"computed", r.v_computed}, {"expected", r.v_expected}}},
            {"traces", r.traces},
            {"dimensions", {{"projector", r.dims_projector}, {"trace_system", r.dims_trace_system}, {"expected", r.dims_expected}}},
            {"fixed_dims", r.fixed_dims},
            {"note", r.note},
            {"all_passed", r.all_passed()},
            {"checks", std::move(checks)}};
}

json to_json(const ClassicalCheck& c) {
    return {{"id", c.id},         {"statement", c.statement}, {"passed", c.passed}, {"expected", c.expected},
            {"computed", c.computed}, {"source", c.source},       {"value", c.value}};
}

json to_json(const OpMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.m.cols(); ++j) row.push_back({m.m(i, j).real(), m.m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return {{"name", m.name}, {"residual", m.residual}, {"cond", m.cond},     {"points", m.points},
            {"poisoned", m.poisoned}, {"reason", m.reason}, {"matrix", std::move(rows)}};
}

json to_json(const CharacterizationReport& r) {
    json conds = json::array(), ops = json::array(), checks = json::array();
    for (const auto& c : r.conditions) conds.push_back({{"p", c.p}, {"e", c.e}, {"c", c.c}, {"kind", c.kind}});
    for (const auto& m : r.operators) ops.push_back(to_json(m));
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"fixture", r.fixture},
            {"level", r.level},
            {"weight", r.weight},
            {"character", r.character},
            {"dim", r.dim},
            {"conditions", std::move(conds)},
            {"new_dim_computed", r.new_dim_computed},
            {"new_dim_oracle", r.new_dim_oracle},
            {"stacked_singular_values", r.stacked_singular_values},
            {"gap_ratio", r.gap_ratio},
            {"notes", r.notes},
            {"all_passed", r.all_passed()},
            {"operators", std::move(ops)},
            {"checks", std::move(checks)}};
}

size_t Report::failures() const {
    size_t f = 0;
    for (const auto& a : assertions) f += !a.passed;
    return f;
}

json to_json(const Report& r) {
    json as = json::object();
    for (const auto& a : r.assertions)
        as[a.id] = {{"status", a.passed ? "pass" : "fail"}, {"expected", a.expected}, {"computed", a.computed}, {"source", a.source}, {"runtime", a.runtime}};
    return {{"schema_version", r.schema},
            {"seed", r.seed},
            {"passed", r.passed()},
            {"total", r.assertions.size()},
            {"failures", r.failures()},
            {"warnings", r.warnings},
            {"assertions", std::move(as)},
            {"details", r.details}};
}

void write_json(const std::filesystem::path& file, const json& js) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ostringstream tag;
    tag << ".tmp." << ::getpid() << "." << std::this_thread::get_id();
    std::filesystem::path tmp = file;
    tmp += tag.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << js.dump(2) << '\n';
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

json read_json(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    return json::parse(in);
}

}  // namespace heckelab::io
