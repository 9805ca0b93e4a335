#include <doctest.h>

#include <cmath>

#include "ncpdo/atoms.hpp"
#include "ncpdo/error.hpp"
#include "ncpdo/exemplars.hpp"
#include "ncpdo/norms.hpp"
#include "oracles.hpp"

using namespace ncpdo;
using namespace oracle;

namespace {

AtomGeometry small_geo(int q = 1)
{
    AtomGeometry geo;
    geo.grid = {2, 256, q};
    geo.period = 8.0;
    return geo;
}

AtomGenerator gen_of(AtomKind kind, const std::string& shape, int mu, std::vector<int> l = {0, 0})
{
    AtomGenerator gen;
    gen.kind = kind;
    gen.shape = shape;
    gen.mu = mu;
    gen.l = std::move(l);
    return gen;
}

AtomSpec scaled_atom(AtomSpec a, double c)
{
    auto s = a.payload.samples();
    for (auto& v : s)
        v *= c;
    a.payload = OpValuedFunction::from_samples(a.geo.grid, s);
    return a;
}

// int a over the lattice, cell-weighted
cplx mass(const AtomSpec& a)
{
    cplx acc = 0;
    for (std::size_t i = 0; i < a.geo.grid.points(); ++i)
        acc += a.payload.samples()[i * a.geo.grid.block()];
    return acc * a.geo.cell();
}

} // namespace

TEST_CASE("mollified bump on the unit cube is a valid h1c atom without cancellation")
{
    auto geo = small_geo();
    auto a = make_atom(gen_of(AtomKind::h1c_atom, "bump", 0), geo, 0.0);
    auto r = validate_atom(a, 0.0);
    CHECK(r.pass);
    CHECK(r.support_leak == 0.0);
    CHECK(std::abs(mass(a)) > 0.1);
    for (const auto& c : r.checks)
        CHECK(c.name.find("moment") == std::string::npos);
}

TEST_CASE("derivative of a bump on Q_{1,0} has vanishing moments")
{
    auto geo = small_geo();
    for (double alpha : {0.0, 0.5}) {
        auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, "derivative", 1), geo, alpha);
        auto r = validate_atom(a, alpha);
        CHECK(r.pass);
        CHECK(std::abs(mass(a)) <= 1e-12);
        CHECK(r.moment_residual <= 1e-9);
    }
}

TEST_CASE("every shape and level validates; twice an atom does not")
{
    auto geo = small_geo(2);
    const double alpha = 0.5;
    for (const char* shape : {"bump", "derivative", "oscillating"})
        for (int mu = 0; mu <= 3; ++mu) {
            CAPTURE(shape);
            CAPTURE(mu);
            auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, shape, mu, {1, -1}), geo, alpha);
            auto r = validate_atom(a, alpha);
            CHECK(r.pass);
            CHECK(r.max_size_ratio <= 0.9 + 1e-12);
            CHECK_FALSE(validate_atom(scaled_atom(a, 2.0), alpha).pass);
        }
    auto one = make_atom(gen_of(AtomKind::alpha1_atom, "bump", 0), geo, alpha);
    CHECK(validate_atom(one, alpha).pass);
}

TEST_CASE("rescaling a subatom to the unit cube keeps it valid")
{
    // a_{mu}(x) = |Q|^{alpha/d - 1/2} a(2^mu x): Q_{1,l} on a box of period 4 samples exactly like
    // Q_{0,l} on a box of period 8, so the size ratios must agree
    auto g8 = small_geo(), g4 = small_geo();
    g4.period = 4.0;
    const double alpha = 0.5;
    for (const char* shape : {"bump", "derivative", "oscillating"}) {
        CAPTURE(shape);
        auto a0 = make_atom(gen_of(AtomKind::alphaQ_subatom, shape, 0, {1, 0}), g8, alpha);
        auto a1 = make_atom(gen_of(AtomKind::alphaQ_subatom, shape, 1, {2, 0}), g4, alpha);
        auto r0 = validate_atom(a0, alpha), r1 = validate_atom(a1, alpha);
        CHECK(r0.pass);
        CHECK(r1.pass);
        REQUIRE(r0.checks.size() == r1.checks.size());
        for (std::size_t c = 0; c < r0.checks.size(); ++c) {
            if (r0.checks[c].name.rfind("size", 0) != 0)
                continue;
            CAPTURE(r0.checks[c].name);
            double q0 = r0.checks[c].measured / r0.checks[c].bound;
            double q1 = r1.checks[c].measured / r1.checks[c].bound;
            CHECK(q1 == doctest::Approx(q0).epsilon(1e-9));
        }
    }
}

TEST_CASE("atom preconditions")
{
    auto geo = small_geo();
    CHECK_THROWS_AS(make_atom(gen_of(AtomKind::alphaQ_subatom, "bump", 4), geo, 0.5), ConfigError);
    CHECK_THROWS_AS(make_atom(gen_of(AtomKind::alpha1_atom, "bump", 1), geo, 0.5), ValidationError);
    CHECK_THROWS_AS(make_atom(gen_of(AtomKind::alphaQ_subatom, "spiral", 0), geo, 0.5), ValidationError);
    auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, "bump", 0), geo, 0.5);
    a.K = 0;
    CHECK_THROWS_AS(validate_atom(a, 0.5), ValidationError);
    CHECK_THROWS_AS(parse_atom_kind("molecule"), ValidationError);
    CHECK(default_K(0.5) >= 1);
    CHECK(default_L(0.5) >= -1);
}

TEST_CASE("composite (alpha, Q_{k,m})-atom")
{
    auto geo = small_geo();
    auto a = make_composite_atom(geo, 0.5, 0, {0, 0});
    auto r = validate_atom(a, 0.5);
    CHECK(r.pass);
    CHECK(a.parts.size() > 1);
}

TEST_CASE("synthesis: single atom, ten disjoint atoms, zero coefficients")
{
    auto geo = small_geo();
    const double alpha = 0.5;
    auto one = make_atom(gen_of(AtomKind::alphaQ_subatom, "derivative", 1), geo, alpha);
    auto s1 = synthesize({{1.0, one}}, alpha);
    CHECK(s1.pass);
    CHECK(s1.ratio <= 10.0);
    CHECK(s1.ratio == doctest::Approx(physical_f1_norm(one.payload, geo, alpha)).epsilon(1e-12));

    std::vector<std::pair<cplx, AtomSpec>> ten;
    for (int k = 0; k < 10; ++k)
        ten.push_back({1.0, make_atom(gen_of(AtomKind::alphaQ_subatom, "derivative", 1, {2 * (k % 5) - 4, 4 * (k / 5) - 2}),
                                      geo, alpha)});
    auto s10 = synthesize(ten, alpha);
    CHECK(s10.ratio <= 10.0);
    CHECK(s10.ratio >= s1.ratio / 10.0);
    CHECK(s10.coefficient_sum == doctest::Approx(10.0));

    auto z = synthesize({{0.0, one}, {0.0, ten[3].second}}, alpha);
    CHECK(z.norm == 0.0);
    CHECK(max_abs(z.f.samples()) == 0.0);

    CHECK_THROWS_AS(synthesize({}, alpha), ValidationError);
    CHECK_THROWS_AS(synthesize({{1.0, scaled_atom(one, 3.0)}}, alpha), ValidationError);
}

TEST_CASE("synthesis is linear and permutation invariant")
{
    auto geo = small_geo();
    const double alpha = 0.5;
    auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, "bump", 1, {1, 0}), geo, alpha);
    auto b = make_atom(gen_of(AtomKind::alphaQ_subatom, "oscillating", 2, {-3, 2}), geo, alpha);
    const cplx la(0.7, -0.2), lb(-1.3, 0.0);
    auto ab = synthesize({{la, a}, {lb, b}}, alpha);
    auto ba = synthesize({{lb, b}, {la, a}}, alpha);
    CHECK(max_abs_diff(ab.f.samples(), ba.f.samples()) <= 1e-15);
    CHECK(ab.norm == doctest::Approx(ba.norm).epsilon(1e-14));
    std::vector<cplx> lin(a.payload.samples().size());
    for (std::size_t i = 0; i < lin.size(); ++i)
        lin[i] = la * a.payload.samples()[i] + lb * b.payload.samples()[i];
    CHECK(max_abs_diff(ab.f.samples(), lin) <= 1e-14 * max_abs(lin));
}

TEST_CASE("atom image under the identity is the atom itself")
{
    auto geo = small_geo();
    const double alpha = 0.5;
    auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, "derivative", 1), geo, alpha);
    auto img = atom_image_report(Symbol::identity(geo.grid), a, 0.0, alpha);
    auto self = validate_atom(a, alpha);
    // M = -d removes the weight; what remains are the atom's own size checks
    auto bare = atom_image_report(Symbol::identity(geo.grid), a, -2.0, alpha);
    REQUIRE(!bare.gammas.empty());
    for (std::size_t k = 0; k < bare.gammas.size(); ++k) {
        const auto& gm = bare.gammas[k];
        std::string name = "size D^(" + std::to_string(gm[0]) + "," + std::to_string(gm[1]) + ")";
        bool seen = false;
        for (const auto& c : self.checks)
            if (c.name == name) {
                CHECK(bare.ratio[k] == doctest::Approx(c.measured / c.bound).epsilon(1e-12));
                seen = true;
            }
        CHECK(seen);
    }
    CHECK(std::isfinite(img.max_ratio));
    CHECK(img.max_ratio >= bare.max_ratio);
}

TEST_CASE("atom image preconditions")
{
    auto geo = small_geo();
    auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, "bump", 0), geo, 0.5);
    auto I = Symbol::identity(geo.grid);
    CHECK_THROWS_AS(atom_image_report(I, a, 2.0 * a.L + 2.0, 0.5), ValidationError);
    CHECK_THROWS_AS(atom_image_report(I, a, 0.0, 0.5, {{a.K, 0}}), ValidationError);
    CHECK_THROWS_AS(atom_image_report(Symbol::identity({2, 128, 1}), a, 0.0, 0.5), StructuralError);
}

TEST_CASE("weighted image of a multiplier is uniform in mu")
{
    AtomGeometry geo;
    geo.grid = {2, 512, 1};
    geo.period = 4.0;
    auto fam = build_lp_family(geo.grid);
    auto s = make_cos2_multiplier(geo.grid, fam, true, geo.period);
    AtomGenerator gen;
    auto sw = atom_image_sweep(s, gen, geo, 0.5, 2.0, {0, 1, 2, 3});
    REQUIRE(sw.max_ratio.size() == 4);
    CHECK(sw.spread <= 4.0);
}

TEST_CASE("far-support images decay at least like 2^{-mu d/2}")
{
    AtomGeometry geo;
    geo.grid = {2, 512, 1};
    geo.period = 8.0;
    auto fam = build_lp_family(geo.grid);
    auto s = make_cos2_multiplier(geo.grid, fam, true, geo.period);
    AtomGenerator gen;
    auto fs = far_support_sweep(s, gen, geo, 0.5, {1, 2, 3});
    CHECK(fs.required == 1.0);
    CHECK(fs.exponent >= fs.required);
    CHECK(fs.pass);

    auto a = make_atom(gen_of(AtomKind::alphaQ_subatom, "bump", 1), geo, 0.5);
    std::vector<cplx> zero(geo.grid.points(), cplx(0));
    Symbol nothing = Symbol::pointwise(OpValuedFunction::from_samples(geo.grid, zero));
    CHECK(far_support_image_norm(nothing, a, 0.5) == 0.0);
    CHECK_THROWS_AS(far_support_image_norm(s, a, 0.5), ValidationError);
}

TEST_CASE("exclusion masks vanish exactly near the cube")
{
    auto geo = small_geo();
    std::vector<double> c = {0.5, -0.25};
    auto m = exclusion_mask(geo, c, 2.0, 3.0);
    for (std::size_t i = 0; i < geo.grid.points(); ++i) {
        bool inner = std::abs(geo.offset(i, 0, c[0])) <= 1.0 && std::abs(geo.offset(i, 1, c[1])) <= 1.0;
        bool outer = std::abs(geo.offset(i, 0, c[0])) >= 1.5 || std::abs(geo.offset(i, 1, c[1])) >= 1.5;
        if (inner)
            CHECK(m[i] == 0.0);
        if (outer)
            CHECK(m[i] == 1.0);
    }
    CHECK_THROWS_AS(exclusion_mask(geo, c, 3.0, 2.0), ConfigError);
}
