#include <doctest.h>

#include <chrono>
#include <cmath>

#include "ncpdo/lp.hpp"
#include "ncpdo/random.hpp"
#include "oracles.hpp"

using namespace ncpdo;

TEST_CASE("smooth step endpoints are exact")
{
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smooth_step(0.3) + smooth_step(0.7) == doctest::Approx(1.0).epsilon(1e-15));
    // derivative against a centred difference
    double h = 1e-6;
    for (double x : {0.2, 0.5, 0.81})
        CHECK(smooth_step_deriv(x) == doctest::Approx((smooth_step(x + h) - smooth_step(x - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("tabulated profile tracks the closed form")
{
    const auto& p = RadialProfile::active();
    double err = 0;
    for (int i = 0; i <= 10000; ++i) {
        double r = 1.0 + i / 10000.0;
        err = std::max(err, std::abs(p.chi(r) - smooth_step(2.0 - r)));
    }
    CHECK(err < 1e-10);
    CHECK(p.chi(0.3) == 1.0);
    CHECK(p.chi(2.0) == 0.0);
    CHECK(p.chi(7.0) == 0.0);
}

TEST_CASE("base profile is positive inside its annulus and zero outside")
{
    const auto& p = RadialProfile::active();
    for (int i = 0; i <= 1000; ++i) {
        double r = 0.55 + 1.4 * i / 1000.0;
        CHECK(p.phi(r) > 0.0);
    }
    CHECK(p.phi(0.5) == 0.0);
    CHECK(p.phi(0.2) == 0.0);
    CHECK(p.phi(2.0) == 0.0);
    CHECK(p.phi(3.0) == 0.0);
}

TEST_CASE("LP family: partition, supports, origin")
{
    auto t0 = std::chrono::steady_clock::now();
    GridSpec g{2, 64, 1};
    auto fam = build_lp_family(g);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 1.0);
    CHECK(fam.J == 4);
    CHECK(std::ldexp(1.0, fam.J + 1) <= g.n / 2);

    int zero[2] = {0, 0};
    std::size_t i0 = g.freq_index(zero);
    CHECK(fam.hat_phi[0][i0] == 1.0);
    for (int j = 1; j <= fam.J; ++j)
        CHECK(fam.hat_phi[j][i0] == 0.0);

    double worst = 0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        double r = g.freq_norm(i);
        if (r > std::ldexp(1.0, fam.J))
            continue;
        double s = 0;
        for (int j = 0; j <= fam.J; ++j)
            s += fam.hat_phi[j][i];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    CHECK(worst <= 1e-10);

    for (int j = 0; j <= fam.J; ++j)
        for (std::size_t i = 0; i < g.points(); ++i) {
            double r = g.freq_norm(i);
            bool inside = j == 0 ? r <= 2.0 : (r >= std::ldexp(1.0, j - 1) && r <= std::ldexp(1.0, j + 1));
            if (!inside)
                CHECK(fam.hat_phi[j][i] == 0.0);
        }
}

TEST_CASE("at |xi| = 2^j at most two consecutive levels are active")
{
    GridSpec g{2, 64, 1};
    auto fam = build_lp_family(g);
    for (int j = 0; j <= fam.J; ++j) {
        int m[2] = {1 << j, 0};
        std::size_t i = g.freq_index(m);
        std::vector<int> active;
        for (int k = 0; k <= fam.J; ++k)
            if (fam.hat_phi[k][i] != 0.0)
                active.push_back(k);
        CHECK(active.size() <= 2);
        if (active.size() == 2)
            CHECK(active[1] == active[0] + 1);
    }
}

TEST_CASE("torus family sums to one away from the origin")
{
    for (int d : {1, 2}) {
        GridSpec g{d, 32, 1};
        auto fam = build_lp_family(g);
        const auto& tor = periodize_lp(fam, g);
        std::vector<int> z(d, 0);
        std::size_t i0 = g.freq_index(z.data());
        CHECK(tor[0][i0] == 0.0);
        for (std::size_t i = 0; i < g.points(); ++i) {
            if (i == i0)
                continue;
            double s = 0;
            for (const auto& lvl : tor)
                s += lvl[i];
            CHECK(std::abs(s - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("torus convolution equals the lattice multiplier")
{
    GridSpec g{2, 8, 2};
    auto fam = build_lp_family(g);
    Rng rng(21);
    auto f = random_function(g, rng);
    for (std::size_t j = 0; j < fam.torus.size(); ++j) {
        // kernel phi~_j(s) = sum_m phi(2^-j m) e(s.m), as scalar samples
        GridSpec g1 = g.with_q(1);
        std::vector<cplx> kc(fam.torus[j].begin(), fam.torus[j].end());
        auto k = fft_inverse(g1, 1, kc);
        auto conv = oracle::direct_convolution(g, k, f.samples());
        auto mult = apply_multiplier(f, fam.torus[j]);
        CHECK(oracle::max_abs_diff(conv, mult.samples()) <= 1e-12 * (1 + oracle::max_abs(conv)));
    }
}

TEST_CASE("multiplier acts diagonally on characters")
{
    GridSpec g{2, 32, 1};
    auto fam = build_lp_family(g);
    int m0[2] = {5, 3};
    std::size_t i = g.freq_index(m0);
    std::vector<cplx> c(g.values(), cplx(0));
    c[i] = 1.0;
    auto f = OpValuedFunction::from_coeffs(g, c);
    int j = 2; // 2^{j-1} <= |m0| <= 2^{j+1}
    auto out = apply_multiplier(f, fam.torus[j]);
    double v = RadialProfile::active().phi(std::ldexp(std::hypot(5.0, 3.0), -j));
    CHECK(v > 0);
    for (std::size_t s = 0; s < g.points(); ++s)
        CHECK(std::abs(out.samples()[s] - v * f.samples()[s]) < 1e-13);
    int zero[2] = {0, 0};
    CHECK(fam.torus[0][g.freq_index(zero)] == 0.0);
}

TEST_CASE("band differences obey the 2^{-j order} derivative bound")
{
    // |Delta^k h| <= sup|h^(k)| and h = chi(2^-j r) - chi(2^{1-j} r), so
    // 2^{jk} |Delta^k phi^_j| <= (1 + 2^k) sup|chi^(k)|
    GridSpec g{1, 256, 1};
    auto fam = build_lp_family(g);
    for (int order = 1; order <= 4; ++order) {
        double sup = 0, hs = 1e-3;
        for (int i = 0; i <= 4000; ++i) {
            double r = 1.0 + i / 4000.0;
            double acc = 0, binom = 1;
            for (int k = 0; k <= order; ++k) {
                acc += ((k & 1) ? -1 : 1) * binom * smooth_step(2.0 - (r + (k - order / 2.0) * hs));
                binom = binom * (order - k) / (k + 1);
            }
            sup = std::max(sup, std::abs(acc) / std::pow(hs, order));
        }
        double bound = (1 + std::ldexp(1.0, order)) * sup * 1.01;
        for (int j = 1; j <= fam.J; ++j) {
            const auto& h = fam.hat_phi[j];
            double mx = 0;
            for (std::size_t i = 0; i + order < g.points(); ++i) {
                double acc = 0, binom = 1;
                for (int k = 0; k <= order; ++k) {
                    acc += ((k & 1) ? -1 : 1) * binom * h[i + k];
                    binom = binom * (order - k) / (k + 1);
                }
                mx = std::max(mx, std::abs(acc));
            }
            CHECK(mx * std::ldexp(1.0, j * order) <= bound);
        }
    }
}

TEST_CASE("unit resolution partitions unity with exact supports")
{
    GridSpec g{2, 32, 1};
    for (int mu = 0; mu <= 3; ++mu) {
        auto ur = build_unit_resolution(g, mu);
        auto s = ur.partition_sum();
        for (double v : s)
            CHECK(std::abs(v - 1.0) <= 1e-10);
        for (std::size_t c = 0; c < ur.cube_count(); ++c) {
            auto m = ur.cube(c);
            auto b = ur.bump(m);
            for (std::size_t i = 0; i < g.points(); ++i) {
                CHECK(b[i] >= 0.0);
                if (mu == 0)
                    continue;
                double side = std::ldexp(1.0, -mu);
                bool inside = true;
                for (int a = 0; a < 2; ++a)
                    inside = inside && std::abs(wrap_offset(g.coord(i, a), m[a] * side, 1.0)) < side;
                if (!inside)
                    CHECK(b[i] == 0.0);
            }
        }
    }
}

TEST_CASE("centred bump dominates at its cube centre")
{
    GridSpec g{2, 32, 1};
    auto ur = build_unit_resolution(g, 2);
    int k[2] = {8, 16}; // s = (1/4, 1/2) = 2^-2 (1, 2)
    std::size_t si = g.sample_index(k);
    double centred = ur.value({1, 2}, si);
    CHECK(centred == 1.0);
    for (std::size_t c = 0; c < ur.cube_count(); ++c)
        CHECK(ur.value(ur.cube(c), si) <= centred);
}

TEST_CASE("configuration errors")
{
    CHECK_THROWS_AS(build_unit_resolution(GridSpec{2, 16, 1}, 3), ConfigError);
    CHECK_THROWS_AS(build_lp_family(GridSpec{2, 4, 1}), ConfigError);
}
