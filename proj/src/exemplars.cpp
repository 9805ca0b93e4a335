#include "ncpdo/exemplars.hpp"

#include <cmath>

#include "ncpdo/io.hpp"
#include "ncpdo/random.hpp"

namespace ncpdo {

double ExemplarSpec::num(const std::string& key, double fallback) const
{
    auto it = params.find(key);
    if (it == params.end())
        return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ValidationError("exemplar: parameter '" + key + "' is not a number");
    }
}

std::string ExemplarSpec::str(const std::string& key, const std::string& fallback) const
{
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

namespace {

std::vector<double> band_cutoff(const LPFamily& fam)
{
    std::vector<double> c(fam.grid.points(), 0.0);
    for (int j = 1; j <= fam.J; ++j)
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] += fam.hat_phi[j][i];
    return c;
}

cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

} // namespace

OpValuedFunction smooth_matrix_function(const GridSpec& g)
{
    const int q = g.q;
    std::vector<cplx> s(g.values(), cplx(0));
    for (std::size_t i = 0; i < g.points(); ++i) {
        double x = g.coord(i, 0);
        double y = g.d > 1 ? g.coord(i, 1) : 0.0;
        Mat a = Mat::Identity(q, q) * cplx(1.0 + 0.3 * std::cos(two_pi * x), 0.2 * std::sin(two_pi * y));
        for (int r = 0; r + 1 < q; ++r) {
            a(r, r + 1) += 0.5 * expi(two_pi * (x + y));
            a(r + 1, r) += 0.25 * std::sin(two_pi * y);
        }
        MMap(s.data() + i * g.block(), q, q) = a;
    }
    return OpValuedFunction::from_samples(g, std::move(s));
}

Symbol make_cos2_multiplier(const GridSpec& g, const LPFamily& fam, bool cutoff, double scale)
{
    std::vector<double> m(g.points(), 0.0);
    auto c = band_cutoff(fam);
    const auto& prof = RadialProfile::active();
    for (std::size_t i = 0; i < g.points(); ++i) {
        double m1 = g.freq(i, 0), m2 = g.d > 1 ? g.freq(i, 1) : 0.0;
        double r2 = m1 * m1 + m2 * m2;
        double v = r2 > 0 ? (m1 * m1 - m2 * m2) / r2 : 0.0;
        // chi(2^-J r) - chi(r / scale); scale = 1 is the sum of bands 1..J
        double cut = scale == 1.0 ? c[i] : prof.chi(std::ldexp(std::sqrt(r2), -fam.J)) - prof.chi(std::sqrt(r2) / scale);
        m[i] = cutoff ? v * cut : (r2 > 0 ? v : 0.0);
    }
    return Symbol::multiplier(g, m, {0, 1, 0});
}

Symbol make_bessel(const GridSpec& g, double alpha)
{
    std::vector<double> m(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) {
        double r = g.freq_norm(i);
        m[i] = std::pow(1.0 + r * r, alpha / 2.0);
    }
    return Symbol::multiplier(g, m, {alpha, 1, 0});
}

Symbol make_exotic(const GridSpec& g, const LPFamily& fam, double delta, int first_bands, std::uint64_t seed)
{
    const int q = g.q;
    const std::size_t P = g.points();
    int top = first_bands > 0 ? std::min(first_bands, fam.J) : fam.J;
    std::vector<Symbol::Term> terms;
    for (int j = 1; j <= top; ++j) {
        Symbol::Term t;
        if (delta >= 1.0) {
            t.a.resize(P);
            for (std::size_t i = 0; i < P; ++i)
                t.a[i] = expi(-two_pi * std::ldexp(1.0, j) * g.coord(i, 0));
        } else {
            // Gaussian s-spectrum of width 2^{j delta}, random phases, unit sup norm
            Rng rng(seed + static_cast<std::uint64_t>(j));
            GridSpec g1 = g.with_q(1);
            std::vector<cplx> c(P, cplx(0));
            double width = std::pow(2.0, j * delta);
            for (std::size_t i = 0; i < P; ++i) {
                double r = g.freq_norm(i);
                cplx z = gaussian(rng);
                if (g.freq(i, 0) == -g.n / 2 || (g.d > 1 && g.freq(i, 1) == -g.n / 2))
                    continue;
                c[i] = z * std::exp(-0.5 * r * r / (width * width));
            }
            t.a = fft_inverse(g1, 1, c);
            double mx = 0;
            for (auto v : t.a)
                mx = std::max(mx, std::abs(v));
            for (auto& v : t.a)
                v /= mx;
        }
        t.B.assign(g.values(), cplx(0));
        for (std::size_t i = 0; i < P; ++i)
            for (int a = 0; a < q; ++a)
                t.B[i * g.block() + a * (q + 1)] = fam.hat_phi[j][i];
        terms.push_back(std::move(t));
    }
    return Symbol::separable(g, std::move(terms), {0, 1, std::min(delta, 1.0)});
}

Symbol make_regular_exemplar(const GridSpec& g, const LPFamily& fam)
{
    return make_exotic(g, fam, 0.5);
}

Symbol make_product_exemplar(const GridSpec& g, double scale)
{
    std::vector<cplx> m(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) {
        double r = g.freq_norm(i) / scale;
        m[i] = cplx(1.0, g.freq(i, 0) / scale / std::sqrt(1.0 + r * r));
    }
    Symbol a = Symbol::pointwise(smooth_matrix_function(g));
    Symbol b = Symbol::multiplier(g, m);
    return (a * b).with_claim({0, 1, 0});
}

Symbol make_exemplar(const ExemplarSpec& spec, const GridSpec& g, const LPFamily& fam)
{
    Symbol s;
    const std::string& k = spec.kind;
    if (k == "multiplier") {
        std::string prof = spec.str("profile", "cos2");
        bool cut = spec.str("cutoff", "band") == "band";
        if (prof == "cos2") {
            s = make_cos2_multiplier(g, fam, cut, spec.num("scale", 1.0));
        } else if (prof == "riesz1") {
            std::vector<cplx> m(g.points(), cplx(0));
            auto c = band_cutoff(fam);
            for (std::size_t i = 0; i < g.points(); ++i) {
                double r = g.freq_norm(i);
                if (r > 0)
                    m[i] = cplx(0, -g.freq(i, 0) / r) * (cut ? c[i] : 1.0);
            }
            s = Symbol::multiplier(g, m, {0, 1, 0});
        } else if (prof == "one") {
            s = Symbol::identity(g);
        } else {
            throw ValidationError("exemplar: unknown multiplier profile '" + prof + "'");
        }
    } else if (k == "pointwise") {
        s = Symbol::pointwise(smooth_matrix_function(g), {0, 1, 0});
    } else if (k == "bessel") {
        s = make_bessel(g, spec.num("alpha", -1.0));
    } else if (k == "band") {
        int j = static_cast<int>(spec.num("j", 1));
        if (j < 0 || j > fam.J)
            throw ValidationError("exemplar: band index out of range");
        double mod = spec.num("dyadic", 0) != 0 ? std::ldexp(1.0, j) : spec.num("mod", 1);
        Symbol::Term t;
        t.a.resize(g.points());
        for (std::size_t i = 0; i < g.points(); ++i)
            t.a[i] = expi(two_pi * mod * g.coord(i, 0));
        t.B.assign(g.values(), cplx(0));
        for (std::size_t i = 0; i < g.points(); ++i)
            for (int a = 0; a < g.q; ++a)
                t.B[i * g.block() + a * (g.q + 1)] = fam.hat_phi[j][i];
        s = Symbol::separable(g, {t}, {0, 1, 1});
    } else if (k == "exotic") {
        s = make_exotic(g, fam, spec.num("delta", 1.0), static_cast<int>(spec.num("first_bands", 0)),
                        static_cast<std::uint64_t>(spec.num("seed", 7)));
    } else if (k == "product") {
        s = make_product_exemplar(g, spec.num("scale", 1.0));
    } else if (k == "custom-table") {
        s = read_symbol_dump(spec.str("path", ""));
        if (!(s.grid() == g))
            throw ValidationError("exemplar: custom table grid does not match the requested grid");
    } else {
        throw ValidationError("exemplar: unknown kind '" + k + "'");
    }
    if (spec.has_claim)
        s = s.with_claim(spec.claim);
    return s;
}

} // namespace ncpdo
