#include "ncpdo/lp.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace ncpdo {

double smooth_step(double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    double a = std::exp(-1.0 / x);
    double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double smooth_step_deriv(double x)
{
    if (x <= 0.0 || x >= 1.0)
        return 0.0;
    double s = smooth_step(x);
    return s * (1.0 - s) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)));
}

RadialProfile RadialProfile::shipped()
{
    RadialProfile p;
    p.val_.resize(table_size);
    p.der_.resize(table_size);
    for (int i = 0; i < table_size; ++i) {
        double r = 1.0 + double(i) / (table_size - 1);
        p.val_[i] = smooth_step(2.0 - r);
        p.der_[i] = -smooth_step_deriv(2.0 - r);
    }
    p.val_.front() = 1.0;
    p.val_.back() = 0.0;
    p.id_ = "smoothstep-hermite4096";
    return p;
}

RadialProfile RadialProfile::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("profile: cannot open " + path);
    RadialProfile p;
    double v, dv;
    while (in >> v >> dv) {
        p.val_.push_back(v);
        p.der_.push_back(dv);
    }
    if (p.val_.size() < 2)
        throw ConfigError("profile: table needs at least two (value, derivative) rows");
    if (p.val_.front() != 1.0 || p.val_.back() != 0.0)
        throw ConfigError("profile: table must run from 1 at r=1 to 0 at r=2");
    std::size_t h = std::hash<std::string>{}(std::string(reinterpret_cast<const char*>(p.val_.data()),
                                                          p.val_.size() * sizeof(double)));
    std::ostringstream os;
    os << "table:" << path << "#" << std::hex << h;
    p.id_ = os.str();
    return p;
}

const RadialProfile& RadialProfile::active()
{
    static const RadialProfile p = [] {
        const char* env = std::getenv("NCPDO_PROFILE");
        if (env && *env)
            return from_file(env);
        return shipped();
    }();
    return p;
}

double RadialProfile::chi(double r) const
{
    if (r <= 1.0)
        return 1.0;
    if (r >= 2.0)
        return 0.0;
    const int n = static_cast<int>(val_.size());
    const double h = 1.0 / (n - 1);
    double x = (r - 1.0) / h;
    int i = std::min(static_cast<int>(x), n - 2);
    double t = x - i;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * val_[i] + h10 * h * der_[i] + h01 * val_[i + 1] + h11 * h * der_[i + 1];
}

LPFamily build_lp_family(const GridSpec& g)
{
    g.validate();
    const auto& prof = RadialProfile::active();
    LPFamily fam;
    fam.grid = g;
    fam.profile_id = prof.id();
    int log2n = 0;
    while ((1 << log2n) < g.n)
        ++log2n;
    fam.J = log2n - 2;

    const std::size_t P = g.points();
    std::vector<double> radius(P);
    double rmax = 0;
    for (std::size_t i = 0; i < P; ++i) {
        radius[i] = g.freq_norm(i);
        rmax = std::max(rmax, radius[i]);
    }

    fam.hat_phi.assign(fam.J + 1, std::vector<double>(P, 0.0));
    for (std::size_t i = 0; i < P; ++i) {
        double r = radius[i];
        fam.hat_phi[0][i] = prof.chi(r);
        for (int j = 1; j <= fam.J; ++j)
            fam.hat_phi[j][i] = prof.chi(std::ldexp(r, -j)) - prof.chi(std::ldexp(r, 1 - j));
    }

    int levels = 1;
    while (std::ldexp(1.0, levels - 1) < rmax)
        ++levels;
    fam.torus.assign(levels, std::vector<double>(P, 0.0));
    for (int j = 0; j < levels; ++j)
        for (std::size_t i = 0; i < P; ++i)
            fam.torus[j][i] = prof.phi(std::ldexp(radius[i], -j));

    fam.base_profile.resize(RadialProfile::table_size);
    for (int i = 0; i < RadialProfile::table_size; ++i)
        fam.base_profile[i] = prof.phi(2.0 * i / (RadialProfile::table_size - 1));
    return fam;
}

const std::vector<std::vector<double>>& periodize_lp(const LPFamily& fam, const GridSpec& g)
{
    if (fam.grid.d != g.d || fam.grid.n != g.n)
        throw StructuralError("periodize_lp: family built on a different lattice");
    return fam.torus;
}

OpValuedFunction apply_multiplier(const OpValuedFunction& f, const std::vector<double>& mult)
{
    const auto& g = f.grid();
    if (mult.size() != g.points())
        throw StructuralError("apply_multiplier: table does not match lattice");
    std::vector<cplx> c = f.coeffs();
    const std::size_t B = g.block();
    for (std::size_t i = 0; i < g.points(); ++i)
        for (std::size_t b = 0; b < B; ++b)
            c[i * B + b] *= mult[i];
    return OpValuedFunction::from_coeffs(g, std::move(c));
}

OpValuedFunction apply_multiplier(const OpValuedFunction& f, const std::vector<cplx>& mult)
{
    const auto& g = f.grid();
    if (mult.size() != g.points())
        throw StructuralError("apply_multiplier: table does not match lattice");
    std::vector<cplx> c = f.coeffs();
    const std::size_t B = g.block();
    for (std::size_t i = 0; i < g.points(); ++i)
        for (std::size_t b = 0; b < B; ++b)
            c[i * B + b] *= mult[i];
    return OpValuedFunction::from_coeffs(g, std::move(c));
}

double unit_bump_1d(double x)
{
    if (x <= -1.0 || x >= 1.0)
        return 0.0;
    if (x <= 0.0)
        return smooth_step(x + 1.0);
    return 1.0 - smooth_step(x);
}

double wrap_offset(double x, double c, double period)
{
    double u = std::fmod(x - c, period);
    if (u < -period / 2)
        u += period;
    else if (u >= period / 2)
        u -= period;
    return u;
}

std::size_t UnitResolution::cube_count() const
{
    std::size_t c = 1;
    for (int a = 0; a < grid.d; ++a)
        c *= static_cast<std::size_t>(cubes_per_axis());
    return c;
}

std::vector<int> UnitResolution::cube(std::size_t c) const
{
    std::vector<int> m(grid.d);
    for (int a = grid.d - 1; a >= 0; --a) {
        m[a] = static_cast<int>(c % cubes_per_axis());
        c /= cubes_per_axis();
    }
    return m;
}

double UnitResolution::value(const std::vector<int>& m, std::size_t sample) const
{
    const double scale = std::ldexp(1.0, mu);
    const int per = cubes_per_axis();
    double v = 1.0;
    for (int a = 0; a < grid.d; ++a) {
        if (per == 1)
            continue; // a single cube: the periodized bump is identically 1
        double u = wrap_offset(scale * grid.coord(sample, a), double(m[a]), double(per));
        v *= unit_bump_1d(u);
    }
    return v;
}

std::vector<double> UnitResolution::bump(const std::vector<int>& m) const
{
    std::vector<double> b(grid.points());
    for (std::size_t i = 0; i < b.size(); ++i)
        b[i] = value(m, i);
    return b;
}

std::vector<double> UnitResolution::partition_sum() const
{
    std::vector<double> s(grid.points(), 0.0);
    for (std::size_t c = 0; c < cube_count(); ++c) {
        auto m = cube(c);
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] += value(m, i);
    }
    return s;
}

UnitResolution build_unit_resolution(const GridSpec& g, int mu)
{
    g.validate();
    if (mu < 0)
        throw ConfigError("unit resolution: scale must be nonnegative");
    if ((1 << mu) > g.n / 4)
        throw ConfigError("unit resolution: scale 2^-mu too fine for the grid");
    return UnitResolution{g, mu};
}

} // namespace ncpdo
