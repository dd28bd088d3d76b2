#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "heckelab/classical.hpp"

namespace heckelab {

void QExpansion::fit_growth() {
    growth = 0;
    for (size_t n = 1; n < a.size(); ++n) growth = std::max(growth, std::abs(a[n]) / std::pow(static_cast<double>(n), weight - 1));
}

double tail_bound(const QExpansion& f, double im) {
    const double t = std::exp(-2 * std::numbers::pi * im);
    const double B = f.precision();
    const double rho = std::pow((B + 2) / (B + 1), f.weight - 1) * t;
    if (rho >= 1) return INFINITY;
    return f.growth * std::pow(B + 1, f.weight - 1) * std::pow(t, B + 1) / (1 - rho);
}

Evaluation evaluate(const QExpansion& f, cplx z, const EvalConfig& cfg) {
    if (z.imag() < cfg.im_floor * (1 - 1e-12))
        throw std::domain_error("evaluate: Im z = " + std::to_string(z.imag()) + " is below the floor " + std::to_string(cfg.im_floor));
    const cplx q = std::exp(cplx(0, 2 * std::numbers::pi) * z);
    cplx acc = 0;
    for (size_t n = f.a.size(); n-- > 0;) acc = acc * q + f.a[n];
    Evaluation e{acc, tail_bound(f, z.imag())};
    if (e.tail > cfg.tail_tol * std::max(f.growth * std::abs(q), 1e-300))
        throw std::domain_error("evaluate: tail bound " + std::to_string(e.tail) + " exceeds tolerance at Im z = " + std::to_string(z.imag()));
    return e;
}

QExpansion coeff_Up(const QExpansion& f, i64 p) {
    QExpansion g;
    g.weight = f.weight;
    const i64 B = f.precision() / p;
    g.a.assign(static_cast<size_t>(B + 1), 0);
    const double s = std::pow(static_cast<double>(p), f.weight / 2.0);
    for (i64 n = 1; n <= B; ++n) g.a[static_cast<size_t>(n)] = s * f.a[static_cast<size_t>(p * n)];
    g.fit_growth();
    return g;
}

QExpansion coeff_Vp(const QExpansion& f, i64 p) {
    QExpansion g;
    g.weight = f.weight;
    g.a.assign(f.a.size(), 0);
    for (i64 n = 1; p * n <= f.precision(); ++n) g.a[static_cast<size_t>(p * n)] = f.a[static_cast<size_t>(n)];
    g.fit_growth();
    return g;
}

IntMat IntMat::operator*(const IntMat& o) const {
    auto m = [](i64 x, i64 y, i64 u, i64 v) { return narrow(static_cast<i128>(x) * y + static_cast<i128>(u) * v); };
    return {m(a, o.a, b, o.c), m(a, o.b, b, o.d), m(c, o.a, d, o.c), m(c, o.b, d, o.d)};
}

IntMat IntMat::primitive() const {
    i64 g = gcd(gcd(a, b), gcd(c, d));
    if (g <= 1) return *this;
    return {a / g, b / g, c / g, d / g};
}

std::string IntMat::to_string() const {
    std::ostringstream os;
    os << "(" << a << "," << b << ";" << c << "," << d << ")";
    return os.str();
}

Reduction reduce_gamma0(i64 N, cplx w, double min_im) {
    const double x = w.real(), y = w.imag();
    if (y <= 0) throw std::domain_error("reduce_gamma0: point not in the upper half plane");
    i64 bc = 0, bd = 1;
    double best = 1.0;  // |c w + d|^2 of the best bottom row so far
    // |c w + d|^2 >= c^2 y^2, and images below min_im need not be optimal
    const double cap = min_im > 0 ? y / min_im : 1e300;
    for (i64 c = N; static_cast<double>(c) * static_cast<double>(c) * y * y < std::min(best, cap); c += N) {
        const double cx = static_cast<double>(c) * x;
        const auto d0 = static_cast<i64>(std::floor(-cx));
        // nearest d coprime to c on each side of -cx
        for (i64 step : {-1, 1}) {
            i64 d = step < 0 ? d0 : d0 + 1;
            while (gcd(c, d) != 1) d += step;
            const double den = std::norm(static_cast<double>(c) * w + static_cast<double>(d));
            if (den < best * (1 - 1e-14)) {
                best = den;
                bc = c;
                bd = d;
            }
        }
    }
    IntMat g;
    if (bc != 0) {
        Egcd e = egcd(bd, bc);  // bd * x + bc * y = 1
        g = {e.x, -e.y, bc, bd};
    }
    cplx img = g.act(w);
    const i64 t = static_cast<i64>(std::llround(img.real()));
    g = IntMat{1, -t, 0, 1} * g;
    return {g, g.act(w)};
}

}  // namespace heckelab
