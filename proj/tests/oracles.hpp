#pragma once
// Slow reference implementations used only by tests.

#include <cmath>
#include <vector>

#include "ncpdo/grid.hpp"

namespace oracle {

using ncpdo::cplx;
using ncpdo::GridSpec;

inline cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

// c(m) = n^-d sum_s f(s) e^{-2 pi i s.m}, written out term by term
inline std::vector<cplx> direct_dft(const GridSpec& g, const std::vector<cplx>& f)
{
    const std::size_t P = g.points(), B = g.block();
    std::vector<cplx> c(P * B, cplx(0));
    for (std::size_t m = 0; m < P; ++m)
        for (std::size_t s = 0; s < P; ++s) {
            double ph = 0;
            for (int a = 0; a < g.d; ++a)
                ph += g.coord(s, a) * g.freq(m, a);
            cplx e = expi(-ncpdo::two_pi * ph) / double(P);
            for (std::size_t b = 0; b < B; ++b)
                c[m * B + b] += f[s * B + b] * e;
        }
    return c;
}

inline std::vector<cplx> direct_idft(const GridSpec& g, const std::vector<cplx>& c)
{
    const std::size_t P = g.points(), B = g.block();
    std::vector<cplx> f(P * B, cplx(0));
    for (std::size_t s = 0; s < P; ++s)
        for (std::size_t m = 0; m < P; ++m) {
            double ph = 0;
            for (int a = 0; a < g.d; ++a)
                ph += g.coord(s, a) * g.freq(m, a);
            cplx e = expi(ncpdo::two_pi * ph);
            for (std::size_t b = 0; b < B; ++b)
                f[s * B + b] += c[m * B + b] * e;
        }
    return f;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<cplx>& a)
{
    double m = 0;
    for (auto v : a)
        m = std::max(m, std::abs(v));
    return m;
}

// periodic convolution (k * f)(s) = n^-d sum_t k(s-t) f(t) for scalar k
inline std::vector<cplx> direct_convolution(const GridSpec& g, const std::vector<cplx>& k, const std::vector<cplx>& f)
{
    const std::size_t P = g.points(), B = g.block();
    std::vector<cplx> out(P * B, cplx(0));
    std::vector<int> ks(g.d), kt(g.d), kd(g.d);
    for (std::size_t s = 0; s < P; ++s)
        for (std::size_t t = 0; t < P; ++t) {
            for (int a = 0; a < g.d; ++a)
                kd[a] = g.axis_index(s, a) - g.axis_index(t, a);
            cplx kv = k[g.sample_index(kd.data())] / double(P);
            for (std::size_t b = 0; b < B; ++b)
                out[s * B + b] += kv * f[t * B + b];
        }
    return out;
}

} // namespace oracle
