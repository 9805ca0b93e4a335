#include <doctest.h>

#include <cmath>

#include "ncpdo/exemplars.hpp"
#include "ncpdo/pdo.hpp"
#include "ncpdo/random.hpp"
#include "oracles.hpp"

using namespace ncpdo;
using namespace oracle;

namespace {

std::vector<cplx> pointwise_product(const OpValuedFunction& b, const OpValuedFunction& f, bool left)
{
    const auto& g = f.grid();
    std::vector<cplx> out(g.values());
    for (std::size_t i = 0; i < g.points(); ++i)
        MMap(out.data() + i * g.block(), g.q, g.q) = left ? Mat(b.sample(i) * f.sample(i)) : Mat(f.sample(i) * b.sample(i));
    return out;
}

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    return max_abs_diff(a, b) / std::max(max_abs(b), 1e-300);
}

} // namespace

TEST_CASE("identity symbol reproduces the input")
{
    GridSpec g{2, 16, 2};
    Rng rng(1);
    auto f = random_function(g, rng);
    for (Side side : {Side::column, Side::row})
        CHECK(rel_diff(apply_pdo(Symbol::identity(g), f, side).samples(), f.samples()) <= 1e-12);
}

TEST_CASE("xi-independent symbol is pointwise multiplication on the correct side")
{
    GridSpec g{2, 16, 2};
    Rng rng(2);
    auto f = random_function(g, rng, 5.0);
    auto b = smooth_matrix_function(g);
    Symbol s = Symbol::pointwise(b);
    CHECK(rel_diff(apply_pdo(s, f, Side::column).samples(), pointwise_product(b, f, true)) <= 1e-12);
    CHECK(rel_diff(apply_pdo(s, f, Side::row).samples(), pointwise_product(b, f, false)) <= 1e-12);
}

TEST_CASE("multiplier symbol matches a direct DFT multiplier")
{
    GridSpec g{2, 16, 1};
    auto fam = build_lp_family(g);
    Rng rng(3);
    auto f = random_function(g, rng);
    Symbol s = make_cos2_multiplier(g, fam);
    auto c = direct_dft(g, f.samples());
    for (std::size_t i = 0; i < g.points(); ++i)
        c[i] *= s.value(0, i)(0, 0);
    CHECK(rel_diff(apply_pdo(s, f).samples(), direct_idft(g, c)) <= 1e-12);
}

TEST_CASE("input with Nyquist content is refused")
{
    GridSpec g{2, 16, 1};
    std::vector<cplx> c(g.values(), cplx(0));
    int m[2] = {-8, 0};
    c[g.freq_index(m)] = 1.0;
    auto f = OpValuedFunction::from_coeffs(g, c);
    CHECK_THROWS_AS(apply_pdo(Symbol::identity(g), f), ValidationError);
}

TEST_CASE("scalar symbols: column equals row, and act entrywise on matrices")
{
    GridSpec g1{2, 16, 1}, g2{2, 16, 2};
    auto fam = build_lp_family(g1);
    Rng rng(4);
    auto f = random_function(g1, rng);
    Symbol s = make_cos2_multiplier(g1, fam);
    auto c = apply_pdo(s, f, Side::column), r = apply_pdo(s, f, Side::row);
    CHECK(max_abs_diff(c.samples(), r.samples()) == 0.0);

    auto F = random_function(g2, rng);
    auto out = apply_pdo(make_cos2_multiplier(g2, build_lp_family(g2)), F);
    for (int e = 0; e < 4; ++e) {
        std::vector<cplx> entry(g1.points());
        for (std::size_t i = 0; i < g1.points(); ++i)
            entry[i] = F.samples()[i * 4 + e];
        auto ref = apply_pdo(s, OpValuedFunction::from_samples(g1, entry));
        double worst = 0;
        for (std::size_t i = 0; i < g1.points(); ++i)
            worst = std::max(worst, std::abs(out.samples()[i * 4 + e] - ref.samples()[i]));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("exact adjoint satisfies the trace pairing identity")
{
    GridSpec g{2, 16, 2};
    auto fam = build_lp_family(g);
    Rng rng(5);
    for (const Symbol& s : {make_product_exemplar(g), make_regular_exemplar(g, fam), make_bessel(g, -1.0).to_dense()})
        for (Side side : {Side::column, Side::row}) {
            auto f = random_function(g, rng, 4.0), h = random_function(g, rng, 4.0);
            cplx lhs = pairing(apply_pdo_unchecked(s, f, side), h);
            cplx rhs = pairing(f, apply_pdo_adjoint(s, h, side));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * l2(f) * l2(h) * 10);
        }
}

TEST_CASE("pairing is the trace integral of g^* f")
{
    GridSpec g{2, 8, 2};
    Rng rng(6);
    auto f = random_function(g, rng), h = random_function(g, rng);
    cplx acc = 0;
    for (std::size_t i = 0; i < g.points(); ++i)
        acc += (h.sample(i).adjoint() * f.sample(i)).trace();
    acc *= g.cell();
    CHECK(std::abs(pairing(f, h) - acc) <= 1e-12 * std::abs(acc));
}

TEST_CASE("composition: exact when the left symbol is xi-independent, monotone otherwise")
{
    GridSpec g{2, 32, 2};
    auto fam = build_lp_family(g);
    auto pw = Symbol::pointwise(smooth_matrix_function(g));
    auto prod = make_product_exemplar(g);
    auto cos2 = make_cos2_multiplier(g, fam);
    for (const Symbol* s2 : {&prod, &cos2, &pw}) {
        auto r = composition_remainder(pw, *s2, {1, 2, 3}, 3, 9);
        for (double e : r.errors)
            CHECK(e <= 1e-10);
    }
    auto id = composition_remainder(Symbol::identity(g), Symbol::identity(g), {1, 2, 3}, 2, 9);
    for (double e : id.errors)
        CHECK(e <= 1e-14);
    auto r = composition_remainder(prod, prod, {1, 2, 3}, 3, 9);
    CHECK(r.monotone());
    CHECK(r.errors[2] < r.errors[0]);
}

TEST_CASE("adjoint remainder shrinks by at least 4 from N0 = 1 to 3 on the product exemplar")
{
    GridSpec g{2, 32, 2};
    auto r = adjoint_remainder(make_product_exemplar(g), {1, 2, 3}, 4, 3);
    CHECK(r.errors[0] >= 4.0 * r.errors[2]);
}

TEST_CASE("power iteration matches the assembled matrix")
{
    GridSpec g{2, 8, 2};
    auto s = make_product_exemplar(g);
    auto M = assemble_operator(s, Side::column);
    Eigen::JacobiSVD<Mat> svd(M);
    double top = svd.singularValues()(0);
    NormEstimateOptions opt;
    opt.seed = 4;
    auto e = estimate_operator_norm(s, Side::column, SpaceDescriptor::parse("L2N"), build_lp_family(g), opt);
    CHECK(e.method.find("power") != std::string::npos);
    CHECK(std::abs(e.value - top) <= 0.01 * top);
}

TEST_CASE("identity has unit L2 norm; conjugation by a unitary leaves the norm unchanged")
{
    GridSpec g{2, 16, 2};
    auto fam = build_lp_family(g);
    NormEstimateOptions opt;
    auto L2 = SpaceDescriptor::parse("L2N");
    CHECK(std::abs(estimate_operator_norm(Symbol::identity(g), Side::column, L2, fam, opt).value - 1.0) <= 1e-3);
    Rng rng(8);
    auto u = random_unitary(2, rng);
    auto s = make_product_exemplar(g);
    double a = estimate_operator_norm(s, Side::column, L2, fam, opt).value;
    double b = estimate_operator_norm(s.conjugated(u), Side::column, L2, fam, opt).value;
    CHECK(std::abs(a - b) <= 1e-3 * a);
}

TEST_CASE("Bessel potential from F_2^0 to F_2^alpha is comparable to its L2 norm")
{
    GridSpec g{2, 32, 1};
    auto fam = build_lp_family(g);
    const double alpha = 1.0;
    auto s = make_bessel(g, -alpha);
    NormEstimateOptions opt;
    double lift = estimate_operator_norm(s, Side::column, SpaceDescriptor::parse("F2a", 0.0),
                                         SpaceDescriptor::parse("F2a", alpha), fam, opt)
                      .value;
    double plain = estimate_operator_norm(s, Side::column, SpaceDescriptor::parse("L2N"), fam, opt).value;
    CHECK(std::isfinite(lift));
    CHECK(lift <= 3.0 * plain);
    CHECK(lift >= plain / 3.0);
}

TEST_CASE("unknown space tags are refused")
{
    CHECK_THROWS_AS(SpaceDescriptor::parse("Q7"), ValidationError);
}

TEST_CASE("Cotlar-Stein table for the delta = 1/2 exemplar")
{
    GridSpec g{2, 64, 1};
    auto fam = build_lp_family(g);
    auto r = cotlar_stein_report(make_regular_exemplar(g, fam), fam, 1);
    REQUIRE(r.levels == 5);
    CHECK(r.max_tt_far <= 1e-10);
    for (int j = 0; j < r.levels; ++j)
        for (int k = 0; k < r.levels; ++k)
            if (std::abs(j - k) >= 2)
                CHECK(r.t_tstar[j][k] <= 1e-10);
    CHECK(r.diag_ratio <= 10.0);
    CHECK(r.tstar_t[1][3] > r.tstar_t[1][4]);
    CHECK(r.tstar_t[0][2] > r.tstar_t[0][4]);
    CHECK(r.decay_rate < 0.0);
}

TEST_CASE("Cotlar-Stein preconditions")
{
    GridSpec small{2, 8, 1};
    auto fs = build_lp_family(small);
    CHECK_THROWS_AS(cotlar_stein_report(make_regular_exemplar(small, fs), fs, 1), ConfigError);
    GridSpec g{2, 32, 1};
    auto fam = build_lp_family(g);
    CHECK_THROWS_AS(cotlar_stein_report(make_exotic(g, fam, 1.0), fam, 1), ValidationError);
}

TEST_CASE("regular exemplar: F_1 lower bounds grow at most 2x across 16, 32, 64")
{
    for (double alpha : {0.0, 0.5}) {
        std::vector<double> est;
        for (int n : {16, 32, 64}) {
            GridSpec g{2, n, 1};
            auto fam = build_lp_family(g);
            NormEstimateOptions opt;
            opt.trials = 8;
            opt.library.push_back(coherent_input(g, fam));
            auto e = estimate_operator_norm(make_regular_exemplar(g, fam), Side::column,
                                            SpaceDescriptor::parse("F1a", alpha), fam, opt);
            CHECK(e.lower_bound);
            est.push_back(e.value);
        }
        CHECK(est.back() <= 2.0 * est.front());
    }
}

TEST_CASE("forbidden exemplar truncated to its first band is bounded at every alpha")
{
    auto r = forbidden_symbol_experiment({0.0, 1.0}, {16, 32, 64}, 1, 1);
    for (double gr : r.growth)
        CHECK(gr <= 2.0);
}

TEST_CASE("side names")
{
    CHECK(parse_side("c") == Side::column);
    CHECK(parse_side("column") == Side::column);
    CHECK(parse_side("r") == Side::row);
    CHECK(side_name(Side::row) == "row");
    CHECK_THROWS(parse_side("diagonal"));
}
