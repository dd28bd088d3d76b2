#include <cmath>
#include <fstream>
#include <stdexcept>

#include "heckelab/classical.hpp"

namespace heckelab {

namespace {
constexpr int kMinPrecision = 60;
}

CuspSpace::CuspSpace(i64 level, int weight, DirChar chi, std::vector<QExpansion> basis, std::string id)
    : N_(level), k_(weight), chi_(std::move(chi)), basis_(std::move(basis)), id_(std::move(id)) {
    if (level < 1 || weight < 1) throw std::invalid_argument("space: level and weight must be positive");
    if (chi_.modulus() != N_) {
        if (N_ % chi_.conductor() != 0) throw std::invalid_argument("space: character conductor does not divide the level");
        chi_ = chi_.with_modulus(N_);
    }
    if (chi_.parity() != (weight % 2 == 0 ? 1 : -1))
        throw std::invalid_argument("space: chi(-1) = " + std::to_string(chi_.parity()) + " contradicts weight " + std::to_string(weight));
    for (auto& f : basis_) {
        if (f.precision() < kMinPrecision) throw std::invalid_argument("space: precision " + std::to_string(f.precision()) + " is too small");
        if (std::abs(f.a[0]) > 1e-12 * std::max(1.0, f.growth)) throw std::invalid_argument("space: a_0 != 0, not a cusp form");
        f.weight = weight;
        if (f.growth == 0) f.fit_growth();
    }
}

CuspSpace CuspSpace::empty(i64 level, int weight, DirChar chi) { return CuspSpace(level, weight, std::move(chi), {}, "empty"); }

cplx CuspSpace::value(size_t j, cplx w, const EvalConfig& cfg) const {
    Reduction r = reduce_gamma0(N_, w, cfg.im_floor);
    const IntMat& g = r.gamma;
    if (g.c == 0) return evaluate(basis_[j], r.image, cfg).value;
    // f | g = chi(d) f  =>  f(w) = conj(chi(d)) (c w + d)^{-k} f(g w)
    const cplx j_factor = std::pow(static_cast<double>(g.c) * w + static_cast<double>(g.d), -k_);
    return std::conj(chi_.complex_value(g.d)) * j_factor * evaluate(basis_[j], r.image, cfg).value;
}

cplx CuspSpace::slash(size_t j, const IntMat& A, cplx z, const EvalConfig& cfg) const {
    const IntMat P = A.primitive();
    const i64 det = P.det();
    if (det <= 0) throw std::invalid_argument("slash: determinant must be positive");
    const cplx factor = std::pow(static_cast<double>(det), k_ / 2.0) * std::pow(static_cast<double>(P.c) * z + static_cast<double>(P.d), -k_);
    return factor * value(j, P.act(z), cfg);
}

double CuspSpace::reduced_im(const IntMat& A, cplx z, double min_im) const {
    return reduce_gamma0(N_, A.primitive().act(z), min_im).image.imag();
}

DirChar parse_character(const nlohmann::json& js) {
    if (!js.is_object() || !js.contains("modulus")) throw std::invalid_argument("character: expected an object with a modulus");
    const i64 N = js.at("modulus").get<i64>();
    if (js.contains("conrey")) return DirChar::from_conrey(N, js.at("conrey").get<i64>());
    if (js.contains("exponents")) return DirChar::from_exponents(N, js.at("exponents").get<std::vector<std::vector<i64>>>());
    throw std::invalid_argument("character: need conrey or exponents");
}

CuspSpace load_space(const nlohmann::json& js, const std::string& id) {
    try {
        const i64 N = js.at("level").get<i64>();
        const int k = js.at("weight").get<int>();
        DirChar chi = parse_character(js.at("character"));
        if (js.contains("character_check")) {
            const auto& cc = js.at("character_check");
            const i64 ord = cc.at("order").get<i64>();
            if (chi.order() != ord) throw std::invalid_argument("character_check: order mismatch");
            for (const auto& pr : cc.at("exponents")) {
                const i64 u = pr.at(0).get<i64>(), e = pr.at(1).get<i64>();
                if (chi.exponent(u) * ord != e * chi.order()) throw std::invalid_argument("character_check: value mismatch at " + std::to_string(u));
            }
        }
        std::vector<QExpansion> basis;
        for (const auto& form : js.at("basis")) {
            QExpansion f;
            f.weight = k;
            for (const auto& c : form) f.a.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
            f.fit_growth();
            basis.push_back(std::move(f));
        }
        if (js.contains("precision")) {
            const int B = js.at("precision").get<int>();
            for (const auto& f : basis)
                if (f.precision() < B) throw std::invalid_argument("fixture: fewer coefficients than the declared precision");
        }
        CuspSpace S(N, k, chi, std::move(basis), id);
        if (js.contains("oracle")) {
            S.oracle_cusp_dim = js.at("oracle").at("cusp_dim").get<i64>();
            S.oracle_new_dim = js.at("oracle").at("new_dim").get<i64>();
        }
        if (S.dim() > 0) {
            // independence at sample points
            auto pts = sample_points(S, {}, 2 * S.dim() + 4, 12345);
            CMatrix V(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(S.dim()));
            for (size_t i = 0; i < pts.size(); ++i)
                for (size_t j = 0; j < S.dim(); ++j) V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = S.value(j, pts[i]);
            Eigen::JacobiSVD<CMatrix> svd(V);
            const auto& sv = svd.singularValues();
            if (sv(sv.size() - 1) < 1e-10 * sv(0)) throw std::invalid_argument("fixture: basis is numerically dependent at the sample points");
        }
        return S;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("fixture: malformed JSON: ") + e.what());
    }
}

CuspSpace load_space(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open fixture " + file.string());
    nlohmann::json js;
    try {
        js = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("fixture " + file.string() + ": " + e.what());
    }
    return load_space(js, file.stem().string());
}

std::optional<CuspSpace> find_space(const std::filesystem::path& dir, i64 level, int weight, const DirChar& chi) {
    if (level % chi.conductor() != 0) return std::nullopt;
    const DirChar want = chi.with_modulus(level);
    std::error_code ec;
    for (const auto& ent : std::filesystem::directory_iterator(dir, ec)) {
        if (ent.path().extension() != ".json") continue;
        std::ifstream in(ent.path());
        nlohmann::json js = nlohmann::json::parse(in, nullptr, false);
        if (js.is_discarded() || !js.is_object() || !js.contains("level") || !js.contains("weight") || !js.contains("character")) continue;
        if (js["level"].get<i64>() != level || js["weight"].get<int>() != weight) continue;
        DirChar c = parse_character(js["character"]);
        if (c.modulus() != level || !c.same_values(want)) continue;
        return load_space(js, ent.path().stem().string());
    }
    return std::nullopt;
}

}  // namespace heckelab
