#include <doctest.h>

#include <cmath>

#include "ncpdo/exemplars.hpp"
#include "ncpdo/pdo.hpp"
#include "ncpdo/random.hpp"
#include "ncpdo/symbol.hpp"
#include "oracles.hpp"

using namespace ncpdo;
using namespace oracle;

namespace {

// T f(s) = sum_m sigma(s,m) f^(m) e(s.m), straight from the definition
std::vector<cplx> direct_pdo(const Symbol& s, const OpValuedFunction& f)
{
    const auto& g = f.grid();
    std::vector<cplx> out(g.values(), cplx(0));
    for (std::size_t i = 0; i < g.points(); ++i) {
        Mat acc = Mat::Zero(g.q, g.q);
        for (std::size_t m = 0; m < g.points(); ++m) {
            double ph = 0;
            for (int a = 0; a < g.d; ++a)
                ph += g.coord(i, a) * g.freq(m, a);
            acc += s.value(i, m) * f.coeff(m) * expi(two_pi * ph);
        }
        MMap(out.data() + i * g.block(), g.q, g.q) = acc;
    }
    return out;
}

std::vector<Symbol> shipped(const GridSpec& g, const LPFamily& fam)
{
    return {Symbol::identity(g),
            make_cos2_multiplier(g, fam),
            Symbol::pointwise(smooth_matrix_function(g)),
            make_bessel(g, -1.0),
            make_product_exemplar(g),
            make_regular_exemplar(g, fam),
            make_exotic(g, fam, 1.0)};
}

double entry(const ClassReport& r, std::vector<int> g, std::vector<int> b) { return r.at(g, b).constant; }

} // namespace

TEST_CASE("identity symbol: C_00 = 1 and every other constant vanishes")
{
    GridSpec g{2, 16, 2};
    auto r = check_symbol_class(Symbol::identity(g), 2, 2);
    for (const auto& e : r.entries) {
        int ord = 0;
        for (int a = 0; a < 2; ++a)
            ord += e.gamma[a] + e.beta[a];
        if (ord == 0)
            CHECK(e.constant == doctest::Approx(1.0).epsilon(1e-14));
        else
            CHECK(e.constant <= 1e-12);
    }
}

TEST_CASE("Bessel J_{-1} constants stay below 3 for first-order checks")
{
    GridSpec g{2, 32, 1};
    auto r = check_symbol_class(make_bessel(g, -1.0).with_claim({-1, 1, 0}), 1, 1);
    CHECK(r.max_constant() <= 3.0);
    // oracle for beta = e_1: central difference of the closed form, weighted by (1+|xi|)^2, interior lattice
    auto J = [](double x, double y) { return 1.0 / std::sqrt(1.0 + x * x + y * y); };
    double oracle = 0;
    for (int x = -15; x <= 14; ++x)
        for (int y = -16; y <= 15; ++y)
            oracle = std::max(oracle, std::abs(J(x + 1, y) - J(x - 1, y)) / 2 * std::pow(1 + std::hypot(x, y), 2));
    CHECK(entry(r, {0, 0}, {1, 0}) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("modulated single band in S^0_{1,1}: constants uniform in j")
{
    GridSpec g{2, 64, 1};
    auto fam = build_lp_family(g);
    double lo = 1e300, hi = 0;
    for (int j = 1; j <= fam.J; ++j) {
        ExemplarSpec spec;
        spec.kind = "band";
        spec.params = {{"j", std::to_string(j)}, {"dyadic", "1"}};
        auto r = check_symbol_class(make_exemplar(spec, g, fam), 1, 1);
        lo = std::min(lo, r.max_constant());
        hi = std::max(hi, r.max_constant());
    }
    CHECK(hi / lo <= 4.0);
}

TEST_CASE("claims outside [0,1] are rejected")
{
    GridSpec g{2, 8, 1};
    CHECK_THROWS_AS(Symbol::identity(g).with_claim({0, 1.5, 0}), ValidationError);
    CHECK_THROWS_AS(check_symbol_class(Symbol::identity(g).with_claim({0, 1, -0.1}), 1, 1), ValidationError);
}

TEST_CASE("kernel path and frequency path agree with the defining sum on every exemplar")
{
    GridSpec g{2, 16, 2};
    auto fam = build_lp_family(g);
    Rng rng(11);
    auto f = random_function(g, rng, 4.0);
    for (const auto& s : shipped(g, fam)) {
        auto ref = direct_pdo(s, f);
        double scale = std::max(max_abs(ref), 1.0);
        auto K = kernel_from_symbol(s);
        auto viaK = apply_with_kernel(K, g, f);
        auto viaF = apply_pdo(s, f);
        CHECK(max_abs_diff(viaK.samples(), ref) / scale <= 1e-10);
        CHECK(max_abs_diff(viaF.samples(), ref) / scale <= 1e-10);
    }
}

TEST_CASE("identity kernel is N^d times a delta at t = 0")
{
    GridSpec g{2, 8, 1};
    auto K = kernel_from_symbol(Symbol::identity(g));
    const std::size_t P = g.points();
    for (std::size_t s = 0; s < P; s += 7)
        for (std::size_t t = 0; t < P; ++t)
            CHECK(std::abs(K[s * P + t] - (t == 0 ? cplx(64.0) : cplx(0))) <= 1e-10);
}

TEST_CASE("multiplier kernel does not depend on s")
{
    GridSpec g{2, 8, 1};
    auto fam = build_lp_family(g);
    auto K = kernel_from_symbol(make_cos2_multiplier(g, fam));
    const std::size_t P = g.points();
    for (std::size_t s = 1; s < P; ++s)
        for (std::size_t t = 0; t < P; ++t)
            CHECK(std::abs(K[s * P + t] - K[t]) <= 1e-12);
}

TEST_CASE("kernel decay slopes on the S^0 multiplier")
{
    GridSpec g{2, 64, 1};
    auto fam = build_lp_family(g);
    auto s = make_cos2_multiplier(g, fam);
    auto r0 = kernel_decay_report(s, {0, 0}, {0, 0});
    CHECK(r0.predicted == -2.0);
    CHECK(std::abs(r0.slope + 2.0) <= 0.3);
    for (std::vector<int> beta : {std::vector<int>{1, 0}, std::vector<int>{0, 1}}) {
        auto r = kernel_decay_report(s, {0, 0}, beta);
        CHECK(r.predicted == -3.0);
        CHECK(std::abs(r.slope - r.predicted) <= 0.15 * 3.0);
    }
}

TEST_CASE("kernel of J_{-d-1} is flagged as having no singular decay")
{
    GridSpec g{2, 64, 1};
    auto r = kernel_decay_report(make_bessel(g, -3.0).with_claim({-3, 1, 0}), {0, 0}, {0, 0});
    CHECK(r.no_singular_decay);
}

TEST_CASE("kernel decay needs four bins")
{
    GridSpec g{2, 8, 1};
    auto fam = build_lp_family(g);
    CHECK_THROWS_AS(kernel_decay_report(make_cos2_multiplier(g, fam), {0, 0}, {0, 0}), ConfigError);
}

TEST_CASE("dyadic pieces reconstruct the symbol where the partition is exact")
{
    GridSpec g{2, 32, 2};
    auto fam = build_lp_family(g);
    Rng rng(5);
    std::vector<cplx> table(g.points() * g.values());
    for (auto& v : table)
        v = gaussian(rng);
    Symbol s = Symbol::dense(g, table);
    auto pieces = dyadic_pieces(s, fam);
    double worst = 0;
    for (std::size_t i = 0; i < g.points(); i += 5)
        for (std::size_t m = 0; m < g.points(); ++m) {
            if (g.freq_norm(m) > std::ldexp(1.0, fam.J))
                continue;
            Mat acc = Mat::Zero(2, 2);
            for (const auto& p : pieces)
                acc += p.value(i, m);
            worst = std::max(worst, (acc - s.value(i, m)).cwiseAbs().maxCoeff());
        }
    CHECK(worst <= 1e-12);
}

TEST_CASE("single-band symbol has no pieces two levels away")
{
    GridSpec g{2, 64, 1};
    auto fam = build_lp_family(g);
    const int j = 2;
    Symbol s = Symbol::multiplier(g, fam.hat_phi[j]);
    auto pieces = dyadic_pieces(s, fam);
    for (int k = 0; k < static_cast<int>(pieces.size()); ++k) {
        if (std::abs(k - j) < 2)
            continue;
        double worst = 0;
        for (std::size_t m = 0; m < g.points(); ++m)
            worst = std::max(worst, pieces[k].value(0, m).cwiseAbs().maxCoeff());
        CHECK(worst == 0.0);
    }
}

TEST_CASE("composition keeps the left factor on the left")
{
    GridSpec g{2, 16, 2};
    Rng rng(2);
    auto A = smooth_matrix_function(g);
    std::vector<cplx> bs(g.values());
    for (std::size_t i = 0; i < g.points(); ++i)
        MMap(bs.data() + i * 4, 2, 2) = random_matrix(2, rng);
    auto B = OpValuedFunction::from_coeffs(g, OpValuedFunction::from_samples(g, bs).coeffs());
    auto s3 = compose_symbols_asymptotic(Symbol::pointwise(A), Symbol::pointwise(B), 3);
    double worst = 0;
    int inner[2] = {1, -2};
    std::size_t m = g.freq_index(inner);
    for (std::size_t i = 0; i < g.points(); i += 3)
        worst = std::max(worst, (s3.value(i, m) - A.sample(i) * B.sample(i)).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-12);
}

TEST_CASE("multiplier after a smooth pointwise factor: asymptotic symbol converges to the lattice sum")
{
    GridSpec g{2, 16, 1};
    auto fam = build_lp_family(g);
    // a(xi) smooth, b(s) = 1 + 0.3 cos(2 pi s1) + 0.2 sin(2 pi s2)
    auto a = make_cos2_multiplier(g, fam, false);
    std::vector<cplx> b(g.points());
    for (std::size_t i = 0; i < g.points(); ++i)
        b[i] = 1.0 + 0.3 * std::cos(two_pi * g.coord(i, 0)) + 0.2 * std::sin(two_pi * g.coord(i, 1));
    auto bf = OpValuedFunction::from_samples(g, b);
    Symbol sb = Symbol::pointwise(bf);
    // exact composed symbol sum_eta a(xi+eta) b^(eta) e(s.eta)
    auto exact = [&](std::size_t i, std::size_t m) {
        cplx acc = 0;
        for (std::size_t e = 0; e < g.points(); ++e) {
            if (std::abs(bf.coeffs()[e]) < 1e-14)
                continue;
            int k[2] = {g.freq(m, 0) + g.freq(e, 0), g.freq(m, 1) + g.freq(e, 1)};
            std::size_t km = g.freq_index(k);
            if (km == GridSpec::npos)
                continue;
            double ph = g.coord(i, 0) * g.freq(e, 0) + g.coord(i, 1) * g.freq(e, 1);
            acc += a.value(0, km)(0, 0) * bf.coeffs()[e] * expi(two_pi * ph);
        }
        return acc;
    };
    std::vector<double> err;
    for (int N0 : {1, 2, 3}) {
        auto s3 = compose_symbols_asymptotic(a, sb, N0);
        double worst = 0;
        for (std::size_t i = 0; i < g.points(); i += 7)
            for (std::size_t m = 0; m < g.points(); ++m)
                if (g.freq_norm(m) <= 4.0)
                    worst = std::max(worst, std::abs(s3.value(i, m)(0, 0) - exact(i, m)));
        err.push_back(worst);
    }
    CHECK(err[1] <= err[0]);
    CHECK(err[2] <= err[1]);
    CHECK(err[2] < 0.5 * err[0]);
}

TEST_CASE("composition order guard")
{
    GridSpec g{2, 8, 1};
    CHECK_THROWS_AS(compose_symbols_asymptotic(Symbol::identity(g), Symbol::identity(g), 7), ValidationError);
}

TEST_CASE("adjoint expansion: constant matrix and real multiplier")
{
    GridSpec g{2, 16, 2};
    auto fam = build_lp_family(g);
    Mat c(2, 2);
    c << cplx(1, 2), cplx(0, 1), 3, cplx(-1, 0.5);
    std::vector<cplx> cs(g.values());
    for (std::size_t i = 0; i < g.points(); ++i)
        MMap(cs.data() + i * 4, 2, 2) = c;
    auto sc = adjoint_symbol_asymptotic(Symbol::pointwise(OpValuedFunction::from_samples(g, cs)), 3);
    auto mult = make_cos2_multiplier(g, fam);
    auto sm = adjoint_symbol_asymptotic(mult, 3);
    double w1 = 0, w2 = 0;
    for (std::size_t i = 0; i < g.points(); i += 5)
        for (std::size_t m = 0; m < g.points(); m += 3) {
            w1 = std::max(w1, (sc.value(i, m) - c.adjoint()).cwiseAbs().maxCoeff());
            w2 = std::max(w2, (sm.value(i, m) - mult.value(i, m)).cwiseAbs().maxCoeff());
        }
    CHECK(w1 <= 1e-12);
    CHECK(w2 <= 1e-12);
}

TEST_CASE("toroidal extension restricts to the symbol bit-exactly")
{
    GridSpec g{2, 16, 2};
    auto fam = build_lp_family(g);
    auto s = make_product_exemplar(g);
    auto e = extend_toroidal_symbol(ToroidalSymbol{s});
    for (std::size_t i = 0; i < g.points(); i += 11)
        for (std::size_t m = 0; m < g.points(); ++m) {
            double xi[2] = {double(g.freq(m, 0)), double(g.freq(m, 1))};
            CHECK((e.eval(i, xi) - s.value(i, m)).cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("extension of a delta symbol is the interpolating bump")
{
    GridSpec g{2, 16, 1};
    std::vector<double> d0(g.points(), 0.0);
    int zero[2] = {0, 0};
    d0[g.freq_index(zero)] = 1.0;
    auto e = extend_toroidal_symbol(ToroidalSymbol{Symbol::multiplier(g, d0)});
    for (double x : {-0.7, -0.25, 0.0, 0.3, 0.9})
        for (double y : {-0.5, 0.1, 0.6}) {
            double xi[2] = {x, y};
            CHECK(std::abs(e.eval(3, xi)(0, 0) - zeta_hat(xi, 2)) <= 1e-15);
        }
    double one[2] = {0, 0}, two[2] = {1, 0}, three[2] = {-2, 3};
    CHECK(zeta_hat(one, 2) == 1.0);
    CHECK(zeta_hat(two, 2) == 0.0);
    CHECK(zeta_hat(three, 2) == 0.0);
}

TEST_CASE("extension inflates class constants by at most 10")
{
    GridSpec g{2, 16, 1};
    auto fam = build_lp_family(g);
    auto s = make_cos2_multiplier(g, fam).with_claim({0, 1, 0});
    auto base = check_symbol_class(ToroidalSymbol{s}, 1, 1);
    auto ext = check_extended_class(extend_toroidal_symbol(ToroidalSymbol{s}), 1, 1);
    CHECK(ext.max_constant() <= 10.0 * base.max_constant());
}

TEST_CASE("Leibniz consistency on a product of multipliers")
{
    GridSpec g{2, 32, 1};
    auto fam = build_lp_family(g);
    auto s1 = make_bessel(g, -1.0).with_claim({-1, 1, 0});
    auto s2 = make_cos2_multiplier(g, fam).with_claim({0, 1, 0});
    auto r1 = check_symbol_class(s1, 0, 1), r2 = check_symbol_class(s2, 0, 1);
    auto r12 = check_symbol_class((s1 * s2).with_claim({-1, 1, 0}), 0, 1);
    for (std::vector<int> b : {std::vector<int>{1, 0}, std::vector<int>{0, 1}}) {
        double leib = entry(r1, {0, 0}, {0, 0}) * entry(r2, {0, 0}, b) + entry(r1, {0, 0}, b) * entry(r2, {0, 0}, {0, 0});
        CHECK(entry(r12, {0, 0}, b) <= 2.0 * leib);
    }
}

TEST_CASE("kernel assembly respects the memory budget")
{
    GridSpec g{2, 64, 2};
    double old = memory_budget_mb();
    set_memory_budget_mb(1.0);
    CHECK_THROWS_AS(kernel_from_symbol(Symbol::identity(g)), BudgetError);
    set_memory_budget_mb(old);
}
