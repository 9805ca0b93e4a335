#include <doctest.h>

#include "ncpdo/grid.hpp"
#include "ncpdo/random.hpp"
#include "oracles.hpp"

using namespace ncpdo;


TEST_CASE("constant function has a single zero coefficient")
{
    GridSpec g{2, 8, 2};
    Mat c(2, 2);
    c << cplx(1, 2), 3, cplx(0, -1), 0.5;
    std::vector<cplx> s(g.values());
    for (std::size_t i = 0; i < g.points(); ++i)
        MMap(s.data() + i * 4, 2, 2) = c;
    auto f = OpValuedFunction::from_samples(g, s);
    int zero[2] = {0, 0};
    std::size_t i0 = g.freq_index(zero);
    for (std::size_t i = 0; i < g.points(); ++i) {
        if (i == i0)
            CHECK((f.coeff(i) - c).norm() < 1e-14);
        else
            CHECK(f.coeff(i).norm() < 1e-14);
    }
}

TEST_CASE("single character transforms to a unit coefficient")
{
    GridSpec g{2, 16, 2};
    std::vector<int> m0{3, -5};
    std::vector<cplx> s(g.values(), cplx(0));
    for (std::size_t i = 0; i < g.points(); ++i) {
        double ph = g.coord(i, 0) * m0[0] + g.coord(i, 1) * m0[1];
        cplx e = oracle::expi(two_pi * ph);
        s[i * 4 + 0] = e;
        s[i * 4 + 3] = e;
    }
    auto f = OpValuedFunction::from_samples(g, s);
    std::size_t im = g.freq_index(m0.data());
    CHECK((f.coeff(im) - Mat::Identity(2, 2)).norm() < 1e-13);
    double rest = 0;
    for (std::size_t i = 0; i < g.points(); ++i)
        if (i != im)
            rest = std::max(rest, f.coeff(i).norm());
    CHECK(rest < 1e-13);
}

TEST_CASE("FFT path matches the direct DFT oracle and round-trips")
{
    Rng rng(7);
    for (int d : {1, 2})
        for (int n : {8, 16, 32})
            for (int q : {1, 2, 3}) {
                if (d == 2 && n == 32 && q == 3)
                    continue; // direct oracle is quadratic in the point count
                GridSpec g{d, n, q};
                std::vector<cplx> s(g.values());
                for (auto& v : s)
                    v = gaussian(rng);
                auto f = OpValuedFunction::from_samples(g, s);
                auto ref = oracle::direct_dft(g, s);
                CHECK(oracle::max_abs_diff(f.coeffs(), ref) <= 1e-12 * oracle::max_abs(ref) * 10);
                auto back = fft_inverse(g, g.block(), f.coeffs());
                CHECK(oracle::max_abs_diff(back, s) <= 1e-12 * oracle::max_abs(s));
                auto iref = oracle::direct_idft(g, f.coeffs());
                CHECK(oracle::max_abs_diff(back, iref) <= 1e-11 * oracle::max_abs(s));
            }
}

TEST_CASE("transforms are linear")
{
    Rng rng(11);
    GridSpec g{2, 16, 2};
    auto f = random_function(g, rng);
    auto h = random_function(g, rng);
    cplx a(0.3, -1.2), b(2.0, 0.5);
    std::vector<cplx> mix(g.values());
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = a * f.samples()[i] + b * h.samples()[i];
    auto fm = OpValuedFunction::from_samples(g, mix);
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < mix.size(); ++i) {
        err = std::max(err, std::abs(fm.coeffs()[i] - (a * f.coeffs()[i] + b * h.coeffs()[i])));
        scale = std::max(scale, std::abs(fm.coeffs()[i]));
    }
    CHECK(err <= 1e-12 * scale);
}

TEST_CASE("adjoint maps coefficients to conjugate transpose at -m")
{
    Rng rng(3);
    GridSpec g{2, 8, 2};
    auto f = random_function(g, rng);
    auto fs = f.adjoint();
    for (std::size_t i = 0; i < g.points(); ++i) {
        int m[2] = {-g.freq(i, 0), -g.freq(i, 1)};
        std::size_t j = g.freq_index(m);
        if (j == GridSpec::npos)
            continue;
        CHECK((fs.coeff(i) - f.coeff(j).adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("Plancherel residual")
{
    GridSpec g{2, 16, 2};
    CHECK(plancherel_check(OpValuedFunction::zeros(g)) == 0.0);

    std::vector<cplx> c(g.values(), cplx(0));
    int m0[2] = {2, 1};
    std::size_t i = g.freq_index(m0);
    c[i * 4] = 1.0;
    c[i * 4 + 3] = 1.0;
    CHECK(plancherel_check(OpValuedFunction::from_coeffs(g, c)) < 1e-14);

    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        auto f = random_function(g, rng);
        double mass = 0;
        for (auto v : f.coeffs())
            mass += std::norm(v);
        CHECK(plancherel_check(f) <= 1e-10 * mass);
    }
}

TEST_CASE("Cauchy-Schwarz gap is positive semidefinite")
{
    GridSpec g{2, 16, 2};
    Rng rng(9);
    Mat c = random_matrix(2, rng);
    std::vector<cplx> s(g.values());
    for (std::size_t i = 0; i < g.points(); ++i)
        MMap(s.data() + i * 4, 2, 2) = c;
    auto f0 = OpValuedFunction::from_samples(g, s);
    std::vector<cplx> one(g.points(), cplx(1));
    CHECK(cauchy_schwarz_check(one, f0).norm() < 1e-12 * c.squaredNorm());

    std::vector<cplx> zero(g.points(), cplx(0));
    CHECK(cauchy_schwarz_check(zero, f0).norm() == 0.0);

    for (int t = 0; t < 20; ++t) {
        auto phi = random_real_samples(g, rng);
        auto f = random_function(g, rng);
        Mat G = cauchy_schwarz_check(phi, f);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()));
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("invalid grids are rejected")
{
    CHECK_THROWS_AS((GridSpec{2, 12, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{2, 4, 1}.validate()), ConfigError);
    CHECK_THROWS_AS(OpValuedFunction::from_samples(GridSpec{1, 8, 1}, std::vector<cplx>(7)), StructuralError);
}
