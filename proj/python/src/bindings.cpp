#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heckelab/classical.hpp"
#include "heckelab/hecke.hpp"
#include "heckelab/induced.hpp"
#include "heckelab/io/serialize.hpp"
#include "heckelab/number_theory.hpp"

namespace py = pybind11;
using namespace heckelab;
using namespace heckelab::io;

namespace {

// Reports cross the boundary as JSON text; the package decodes them.
std::string dump(const nlohmann::json& js) { return js.dump(); }

PChar pchar(i64 p, int n, i64 conrey) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    return PChar::from_conrey(p, n, conrey);
}

py::dict op_dict(const OpMatrix& m) {
    py::dict d;
    d["name"] = m.name;
    d["matrix"] = m.m;
    d["residual"] = m.residual;
    d["cond"] = m.cond;
    d["points"] = m.points;
    d["poisoned"] = m.poisoned;
    d["reason"] = m.reason;
    return d;
}

py::dict classical_operator(const std::string& fixture, i64 p, const std::string& op, std::uint64_t seed) {
    const CuspSpace S = load_space(std::filesystem::path(fixture));
    if (!is_prime(p) || S.level() % p != 0) throw std::invalid_argument("p must be a prime dividing the level");
    OpConfig cfg;
    cfg.seed = seed;
    const int e = valuation(S.level(), p);
    const std::string ps = std::to_string(p);
    if (op == "w") return op_dict(op_matrix("W_" + ps, op_W(S, p), S, S, cfg));
    if (op == "q" || op == "qprime") {
        if (e != 1) throw std::invalid_argument("Q_p needs p || N");
        const OpMatrix W = op_matrix("W_" + ps, op_W(S, p), S, S, cfg);
        OpMatrix Q = q_from_factors(S, p, W);
        if (op == "qprime") {
            Q.name = "Q'_" + ps;
            Q.m = W.m * Q.m * W.m / atkin_lehner_square(S.character(), p);
        }
        return op_dict(Q);
    }
    if (op == "s" || op == "sprime") {
        if (e < 2) throw std::invalid_argument("S_{p^n,n-1} needs p^2 | N");
        if (S.character().conductor_exponent(p) > e - 1) throw std::invalid_argument("chi^(p^n) is primitive");
        const SlashSum T = op == "s" ? op_S(S, p, e - 1) : op_Sprime_direct(S, p, e - 1);
        return op_dict(op_matrix((op == "s" ? "S_" : "S'_") + ps, T, S, S, cfg));
    }
    throw std::invalid_argument("op must be one of w, q, qprime, s, sprime");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hecke algebras of Iwahori-type subgroups and newform operators";
    py::register_exception<std::invalid_argument>(m, "InputError", PyExc_ValueError);

    m.def("supported_basis", [](i64 p, int n, i64 conrey) { return supported_basis(pchar(p, n, conrey)); }, py::arg("p"), py::arg("n"),
          py::arg("conrey"));
    m.def("conductor_exponent", [](i64 p, int n, i64 conrey) { return pchar(p, n, conrey).r(); }, py::arg("p"), py::arg("n"),
          py::arg("conrey"));
    m.def("coset_table", [](i64 p, int n) { return dump(coset_table_json(p, n)); }, py::arg("p"), py::arg("n"));
    m.def(
        "structure_constants",
        [](i64 p, int n, i64 conrey) {
            py::gil_scoped_release nogil;
            return dump(structure_json(structure_table(HeckeAlgebra::create(pchar(p, n, conrey)))));
        },
        py::arg("p"), py::arg("n"), py::arg("conrey"));
    m.def(
        "verify_relations",
        [](i64 p, int n, i64 conrey) {
            py::gil_scoped_release nogil;
            return dump(to_json(verify_relations(pchar(p, n, conrey))));
        },
        py::arg("p"), py::arg("n"), py::arg("conrey"));
    m.def(
        "verify_induced",
        [](i64 p, int n, i64 conrey, std::uint64_t seed, int samples) {
            py::gil_scoped_release nogil;
            return dump(to_json(verify_induced(pchar(p, n, conrey), {.seed = seed, .samples = samples})));
        },
        py::arg("p"), py::arg("n"), py::arg("conrey"), py::arg("seed") = 1, py::arg("samples") = 100);
    m.def(
        "fixed_dimensions",
        [](i64 p, int n, i64 conrey) {
            InducedRep rep(pchar(p, n, conrey));
            std::vector<size_t> out;
            for (int lvl = 0; lvl <= n; ++lvl) out.push_back(rep.fixed_subspace(lvl).size());
            return out;
        },
        py::arg("p"), py::arg("n"), py::arg("conrey"));
    m.def("cusp_dimension", [](i64 N, int k, i64 conrey) { return cusp_dimension(N, k, DirChar::from_conrey(N, conrey)); }, py::arg("level"),
          py::arg("weight"), py::arg("conrey"));
    m.def("new_dimension", [](i64 N, int k, i64 conrey) { return new_dimension(N, k, DirChar::from_conrey(N, conrey)); }, py::arg("level"),
          py::arg("weight"), py::arg("conrey"));
    m.def("classical_operator", &classical_operator, py::arg("fixture"), py::arg("p"), py::arg("op"), py::arg("seed") = 1);
    m.def(
        "characterize",
        [](const std::string& fixture, std::uint64_t seed) {
            py::gil_scoped_release nogil;
            const std::filesystem::path f(fixture);
            CharacterizeOptions opt;
            opt.op.seed = seed;
            return dump(to_json(characterize(load_space(f), f.parent_path(), opt)));
        },
        py::arg("fixture"), py::arg("seed") = 1);
}
