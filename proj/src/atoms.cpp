#include "ncpdo/atoms.hpp"

#include <algorithm>
#include <cmath>

#include "ncpdo/lp.hpp"
#include "ncpdo/norms.hpp"
#include "ncpdo/pdo.hpp"

namespace ncpdo {

void AtomGeometry::validate() const
{
    grid.validate();
    if (!(period > 0))
        throw ConfigError("atom geometry: period must be positive");
}

double AtomGeometry::cell() const { return std::pow(h(), grid.d); }

double AtomGeometry::offset(std::size_t idx, int axis, double c) const
{
    return wrap_offset(grid.axis_index(idx, axis) * h(), c, period);
}

AtomKind parse_atom_kind(const std::string& s)
{
    if (s == "h1c_atom")
        return AtomKind::h1c_atom;
    if (s == "alpha1_atom")
        return AtomKind::alpha1_atom;
    if (s == "alphaQ_subatom")
        return AtomKind::alphaQ_subatom;
    if (s == "alphaQ_atom")
        return AtomKind::alphaQ_atom;
    throw ValidationError("unknown atom kind '" + s + "'");
}

std::string atom_kind_name(AtomKind k)
{
    switch (k) {
    case AtomKind::h1c_atom: return "h1c_atom";
    case AtomKind::alpha1_atom: return "alpha1_atom";
    case AtomKind::alphaQ_subatom: return "alphaQ_subatom";
    case AtomKind::alphaQ_atom: return "alphaQ_atom";
    }
    return "?";
}

namespace {

int min_K(double alpha) { return std::max(static_cast<int>(std::floor(alpha)) + 1, 0); }
int min_L(double alpha) { return std::max(static_cast<int>(std::floor(-alpha)), -1); }

void check_orders(int K, int L, double alpha)
{
    if (K < min_K(alpha) || L < min_L(alpha))
        throw ValidationError("atom orders: need K >= " + std::to_string(min_K(alpha)) + " and L >= " +
                              std::to_string(min_L(alpha)) + " for this alpha");
}

bool needs_moments(const AtomSpec& a)
{
    if (a.kind == AtomKind::alphaQ_subatom)
        return a.L >= 0;
    if (a.kind == AtomKind::h1c_atom)
        return a.mu > 0;
    return false;
}

int moment_order(const AtomSpec& a) { return a.kind == AtomKind::h1c_atom ? 0 : a.L; }

double bump(double t) { return smooth_step(2.0 * (1.0 - std::abs(t))); }

double bump_deriv(double t)
{
    double x = 2.0 * (1.0 - std::abs(t));
    if (x <= 0 || x >= 1)
        return 0.0;
    return (t > 0 ? -2.0 : 2.0) * smooth_step_deriv(x);
}

// cube coordinate u = (x - c) / side; the support 2Q is max |u_a| < 1
double cube_coord(const AtomSpec& a, std::size_t idx, int axis)
{
    return a.geo.offset(idx, axis, a.centre(axis)) / a.side();
}

bool in_double_cube(const AtomSpec& a, std::size_t idx)
{
    for (int ax = 0; ax < a.geo.grid.d; ++ax)
        if (std::abs(cube_coord(a, idx, ax)) >= 1.0)
            return false;
    return true;
}

double monomial(const AtomSpec& a, std::size_t idx, const std::vector<int>& beta)
{
    double v = 1;
    for (int ax = 0; ax < a.geo.grid.d; ++ax)
        v *= std::pow(cube_coord(a, idx, ax), beta[ax]);
    return v;
}

OpValuedFunction spectral_derivative(const OpValuedFunction& f, const AtomGeometry& geo, const std::vector<int>& gamma)
{
    const auto& g = f.grid();
    std::vector<cplx> m(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) {
        cplx v = 1;
        for (int ax = 0; ax < g.d; ++ax) {
            if (gamma[ax] == 0)
                continue;
            if (gamma[ax] % 2 == 1 && g.freq(i, ax) == -g.n / 2) {
                v = 0;
                break;
            }
            v *= std::pow(cplx(0, two_pi * geo.physical_freq(i, ax)), gamma[ax]);
        }
        m[i] = v;
    }
    return apply_multiplier(f, m);
}

// Tr (int w |f|^2 dx)^{1/2}
double weighted_column_size(const OpValuedFunction& f, const AtomGeometry& geo, const std::vector<double>* w)
{
    const int q = f.grid().q;
    Mat G = Mat::Zero(q, q);
    for (std::size_t s = 0; s < f.grid().points(); ++s) {
        double ws = w ? (*w)[s] : 1.0;
        if (ws == 0)
            continue;
        auto v = f.sample(s);
        G.noalias() += ws * (v.adjoint() * v);
    }
    G *= geo.cell();
    G = 0.5 * (G + G.adjoint()).eval();
    return psd_power_trace(G.data(), q, 0.5);
}

double size_bound(const AtomSpec& a, double alpha, int order)
{
    const int d = a.geo.grid.d;
    switch (a.kind) {
    case AtomKind::h1c_atom: return std::pow(a.volume(), -0.5);
    case AtomKind::alpha1_atom: return 1.0;
    default: return std::pow(a.volume(), alpha / d - double(order) / d);
    }
}

std::vector<std::vector<int>> size_indices(const AtomSpec& a)
{
    if (a.kind == AtomKind::h1c_atom)
        return {std::vector<int>(a.geo.grid.d, 0)};
    return multi_indices(a.geo.grid.d, a.K);
}

int order_of(const std::vector<int>& g)
{
    int s = 0;
    for (int v : g)
        s += v;
    return s;
}

std::string index_name(const std::vector<int>& g)
{
    std::string s = "(";
    for (std::size_t i = 0; i < g.size(); ++i)
        s += (i ? "," : "") + std::to_string(g[i]);
    return s + ")";
}

OpValuedFunction physical_bessel(const OpValuedFunction& f, const AtomGeometry& geo, double alpha)
{
    const auto& g = f.grid();
    std::vector<double> m(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) {
        double r2 = 0;
        for (int ax = 0; ax < g.d; ++ax)
            r2 += std::pow(geo.physical_freq(i, ax), 2);
        m[i] = std::pow(1.0 + r2, alpha / 2);
    }
    return apply_multiplier(f, m);
}

double max_size_ratio(const AtomSpec& a, double alpha)
{
    double r = 0;
    for (const auto& gam : size_indices(a)) {
        auto D = spectral_derivative(a.payload, a.geo, gam);
        r = std::max(r, weighted_column_size(D, a.geo, nullptr) / size_bound(a, alpha, order_of(gam)));
    }
    return r;
}

double coefficient_l2(const AtomSpec& a)
{
    double s = 0;
    for (const auto& p : a.parts)
        s += std::norm(p.coefficient);
    return std::sqrt(s);
}

double moment_residual(const AtomSpec& a)
{
    if (!needs_moments(a))
        return 0.0;
    const auto& g = a.geo.grid;
    const int q = g.q;
    double mass = 0;
    for (auto v : a.payload.samples())
        mass += std::norm(v);
    mass = std::sqrt(mass * a.geo.cell());
    if (mass == 0)
        return 0.0;
    double vol2q = std::pow(2.0 * a.side(), g.d);
    double worst = 0;
    for (const auto& beta : multi_indices(g.d, moment_order(a))) {
        Mat m = Mat::Zero(q, q);
        for (std::size_t s = 0; s < g.points(); ++s)
            if (in_double_cube(a, s))
                m += monomial(a, s, beta) * a.payload.sample(s);
        m *= a.geo.cell();
        worst = std::max(worst, op_norm(m) / (std::sqrt(vol2q) * mass));
    }
    return worst;
}

Symbol masked(const Symbol& sigma, const std::vector<double>& mask)
{
    const auto& g = sigma.grid();
    if (sigma.is_dense()) {
        auto t = sigma.table();
        const std::size_t row = g.values();
        for (std::size_t s = 0; s < g.points(); ++s)
            for (std::size_t k = 0; k < row; ++k)
                t[s * row + k] *= mask[s];
        return Symbol::dense(g, std::move(t), sigma.claim());
    }
    auto terms = sigma.terms();
    for (auto& t : terms)
        for (std::size_t s = 0; s < g.points(); ++s)
            t.a[s] *= mask[s];
    return Symbol::separable(g, std::move(terms), sigma.claim());
}

double fit_exponent(const std::vector<int>& mus, const std::vector<double>& v)
{
    double n = double(mus.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        double y = std::log2(v[i]);
        sx += mus[i];
        sy += y;
        sxx += double(mus[i]) * mus[i];
        sxy += mus[i] * y;
    }
    double den = n * sxx - sx * sx;
    return den != 0 ? -(n * sxy - sx * sy) / den : 0.0;
}

} // namespace

int default_K(double alpha) { return min_K(alpha) + 2; }
int default_L(double alpha) { return min_L(alpha) + 2; }

AtomSpec make_atom(const AtomGenerator& gen, const AtomGeometry& geo, double alpha)
{
    geo.validate();
    const auto& g = geo.grid;
    AtomSpec a;
    a.kind = gen.kind;
    if (a.kind == AtomKind::alphaQ_atom)
        throw ValidationError("make_atom: composite atoms are built by make_composite_atom");
    a.mu = gen.mu;
    a.l = gen.l.empty() ? std::vector<int>(g.d, 0) : gen.l;
    if (static_cast<int>(a.l.size()) != g.d)
        throw ValidationError("make_atom: cube index has wrong dimension");
    if (a.mu < 0)
        throw ValidationError("make_atom: mu must be nonnegative");
    if (a.kind == AtomKind::alpha1_atom && a.mu != 0)
        throw ValidationError("make_atom: (alpha,1)-atoms live on unit cubes (mu = 0)");
    a.K = gen.K >= 0 ? gen.K : default_K(alpha);
    a.L = gen.L >= 0 ? gen.L : default_L(alpha);
    check_orders(a.K, a.L, alpha);
    a.geo = geo;
    if (2.0 * a.side() / geo.h() < 8.0 || 2.0 * a.side() >= geo.period)
        throw ConfigError("make_atom: cube Q_{" + std::to_string(a.mu) + ",l} is not resolvable on this grid");

    const std::size_t P = g.points();
    std::vector<double> raw(P, 0.0), w(P, 0.0);
    for (std::size_t s = 0; s < P; ++s) {
        if (!in_double_cube(a, s))
            continue;
        double b = 1, v = 1;
        for (int ax = 0; ax < g.d; ++ax) {
            double u = cube_coord(a, s, ax);
            // narrower weight so a plain bump is not in the projection span
            b *= bump(2.0 * u);
            if (ax == gen.axis && gen.shape == "derivative")
                v *= bump_deriv(u);
            else if (ax == gen.axis && gen.shape == "oscillating")
                v *= bump(u) * std::cos(M_PI * gen.frequency * u);
            else if (gen.shape == "bump" || gen.shape == "derivative" || gen.shape == "oscillating")
                v *= bump(u);
            else
                throw ValidationError("make_atom: unknown shape '" + gen.shape + "'");
        }
        raw[s] = v;
        w[s] = b;
    }
    if (needs_moments(a)) {
        auto betas = multi_indices(g.d, moment_order(a));
        const int nb = static_cast<int>(betas.size());
        // two passes of projection keep the residual at roundoff
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nb, nb);
            Eigen::VectorXd mom = Eigen::VectorXd::Zero(nb);
            std::vector<std::vector<double>> mono(nb, std::vector<double>(P, 0.0));
            for (int i = 0; i < nb; ++i)
                for (std::size_t s = 0; s < P; ++s)
                    if (raw[s] != 0 || w[s] != 0)
                        mono[i][s] = monomial(a, s, betas[i]);
            for (int i = 0; i < nb; ++i)
                for (std::size_t s = 0; s < P; ++s) {
                    mom[i] += mono[i][s] * raw[s];
                    if (w[s] == 0)
                        continue;
                    for (int k = 0; k < nb; ++k)
                        G(i, k) += mono[i][s] * mono[k][s] * w[s];
                }
            Eigen::VectorXd c = G.ldlt().solve(mom);
            for (std::size_t s = 0; s < P; ++s) {
                if (w[s] == 0)
                    continue;
                double corr = 0;
                for (int k = 0; k < nb; ++k)
                    corr += c[k] * mono[k][s];
                raw[s] -= corr * w[s];
            }
        }
    }
    Mat A = gen.matrix.size() ? gen.matrix : Mat::Identity(g.q, g.q);
    if (A.rows() != g.q || A.cols() != g.q)
        throw ValidationError("make_atom: value matrix must be q×q");
    std::vector<cplx> samples(g.values(), cplx(0));
    for (std::size_t s = 0; s < P; ++s)
        if (raw[s] != 0)
            MMap(samples.data() + s * g.block(), g.q, g.q) = raw[s] * A;
    a.payload = OpValuedFunction::from_samples(g, std::move(samples));
    double r = max_size_ratio(a, alpha);
    if (!(r > 0))
        throw ValidationError("make_atom: generator produced the zero function");
    double scale = gen.fill / r;
    std::vector<cplx> s2 = a.payload.samples();
    for (auto& v : s2)
        v *= scale;
    a.payload = OpValuedFunction::from_samples(g, std::move(s2));
    return a;
}

AtomSpec make_composite_atom(const AtomGeometry& geo, double alpha, int k, const std::vector<int>& m, const Mat& matrix)
{
    const auto& g = geo.grid;
    AtomSpec a;
    a.kind = AtomKind::alphaQ_atom;
    a.mu = k;
    a.l = m.empty() ? std::vector<int>(g.d, 0) : m;
    a.K = default_K(alpha);
    a.L = default_L(alpha);
    a.geo = geo;
    std::vector<AtomSpec> subs;
    int count = 1;
    for (int ax = 0; ax < g.d; ++ax)
        count *= 3;
    for (int c = 0; c < count; ++c) {
        AtomGenerator gen;
        gen.kind = AtomKind::alphaQ_subatom;
        gen.mu = k + 1;
        gen.matrix = matrix;
        gen.l.resize(g.d);
        int rem = c;
        for (int ax = 0; ax < g.d; ++ax) {
            gen.l[ax] = 2 * a.l[ax] + (rem % 3) - 1;
            rem /= 3;
        }
        gen.shape = (c % 2) ? "oscillating" : "bump";
        subs.push_back(make_atom(gen, geo, alpha));
    }
    double coef = 0.9 * std::pow(a.volume(), -0.5) / std::sqrt(double(count));
    auto build = [&](double cf) {
        std::vector<cplx> acc(g.values(), cplx(0));
        a.parts.clear();
        for (std::size_t i = 0; i < subs.size(); ++i) {
            cplx d = (i % 2 ? -cf : cf);
            for (std::size_t v = 0; v < acc.size(); ++v)
                acc[v] += d * subs[i].payload.samples()[v];
            a.parts.push_back({d, {subs[i]}});
        }
        a.payload = OpValuedFunction::from_samples(g, std::move(acc));
    };
    build(coef);
    double js = weighted_column_size(physical_bessel(a.payload, geo, alpha), geo, nullptr) * std::sqrt(a.volume());
    if (js > 0.9)
        build(coef * 0.9 / js);
    return a;
}

AtomReport validate_atom(const AtomSpec& spec, double alpha)
{
    check_orders(spec.K, spec.L, alpha);
    const auto& g = spec.geo.grid;
    if (!(spec.payload.grid() == g))
        throw StructuralError("validate_atom: payload grid differs from the atom geometry");
    if (2.0 * spec.side() / spec.geo.h() < 8.0)
        throw ConfigError("validate_atom: cube is not resolvable on this grid");
    AtomReport rep;
    rep.kind = atom_kind_name(spec.kind);
    rep.mu = spec.mu;
    auto add = [&](std::string name, double measured, double bound) {
        rep.checks.push_back({std::move(name), measured, bound, measured <= bound});
    };
    if (spec.kind == AtomKind::alphaQ_atom) {
        bool nested = true, parts_ok = true;
        for (const auto& p : spec.parts) {
            const AtomSpec& s = p.sub.at(0);
            auto r = validate_atom(s, alpha);
            parts_ok = parts_ok && r.pass && s.kind == AtomKind::alphaQ_subatom;
            bool inside = s.mu >= spec.mu;
            for (int ax = 0; ax < g.d; ++ax)
                inside = inside && std::abs(s.centre(ax) - spec.centre(ax)) + s.side() / 2 <= spec.side() + 1e-12;
            nested = nested && inside;
        }
        add("subatoms valid", parts_ok ? 0.0 : 1.0, 0.0);
        add("subatom cubes inside 2Q", nested ? 0.0 : 1.0, 0.0);
        double bound = std::pow(spec.volume(), -0.5);
        add("coefficient l2", coefficient_l2(spec), bound);
        add("J^alpha size", weighted_column_size(physical_bessel(spec.payload, spec.geo, alpha), spec.geo, nullptr),
            bound);
        std::vector<cplx> acc(g.values(), cplx(0));
        for (const auto& p : spec.parts)
            for (std::size_t v = 0; v < acc.size(); ++v)
                acc[v] += p.coefficient * p.sub[0].payload.samples()[v];
        double diff = 0, mag = 0;
        for (std::size_t v = 0; v < acc.size(); ++v) {
            diff = std::max(diff, std::abs(acc[v] - spec.payload.samples()[v]));
            mag = std::max(mag, std::abs(acc[v]));
        }
        add("payload equals sum of parts", diff, 1e-12 * std::max(mag, 1.0));
        rep.max_size_ratio = rep.checks[3].measured / bound;
    } else {
        double leak = 0;
        for (std::size_t s = 0; s < g.points(); ++s)
            if (!in_double_cube(spec, s))
                for (std::size_t b = 0; b < g.block(); ++b)
                    leak = std::max(leak, std::abs(spec.payload.samples()[s * g.block() + b]));
        rep.support_leak = leak;
        add("support in 2Q", leak, 0.0);
        for (const auto& gam : size_indices(spec)) {
            auto D = spectral_derivative(spec.payload, spec.geo, gam);
            double v = weighted_column_size(D, spec.geo, nullptr);
            double b = size_bound(spec, alpha, order_of(gam));
            add("size D^" + index_name(gam), v, b);
            rep.max_size_ratio = std::max(rep.max_size_ratio, v / b);
        }
        if (needs_moments(spec)) {
            rep.moment_residual = moment_residual(spec);
            add("moments up to order " + std::to_string(moment_order(spec)), rep.moment_residual, 1e-9);
        }
    }
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const AtomCheck& c) { return c.pass; });
    return rep;
}

double physical_f1_norm(const OpValuedFunction& f, const AtomGeometry& geo, double alpha)
{
    const auto& g = f.grid();
    const int q = g.q;
    const auto& prof = RadialProfile::active();
    const std::size_t P = g.points();
    std::vector<double> r(P);
    double rmax = 0;
    for (std::size_t i = 0; i < P; ++i) {
        double r2 = 0;
        for (int ax = 0; ax < g.d; ++ax)
            r2 += std::pow(geo.physical_freq(i, ax), 2);
        r[i] = std::sqrt(r2);
        rmax = std::max(rmax, r[i]);
    }
    std::vector<cplx> S(g.values(), cplx(0));
    std::vector<double> m(P);
    for (int j = 0; std::ldexp(1.0, j - 1) <= rmax; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < P; ++i) {
            m[i] = j == 0 ? prof.chi(r[i]) : prof.phi(std::ldexp(r[i], -j));
            any = any || m[i] != 0;
        }
        if (!any)
            continue;
        auto piece = apply_multiplier(f, m);
        double wgt = std::pow(4.0, j * alpha);
        for (std::size_t s = 0; s < P; ++s) {
            auto v = piece.sample(s);
            MMap(S.data() + s * g.block(), q, q).noalias() += wgt * (v.adjoint() * v);
        }
    }
    double acc = 0;
    for (std::size_t s = 0; s < P; ++s) {
        MMap blk(S.data() + s * g.block(), q, q);
        blk = 0.5 * (blk + blk.adjoint()).eval();
        acc += psd_power_trace(blk.data(), q, 0.5);
    }
    return acc * geo.cell();
}

SynthesisReport synthesize(const std::vector<std::pair<cplx, AtomSpec>>& atoms, double alpha)
{
    if (atoms.empty())
        throw ValidationError("synthesize: empty atom list");
    const AtomGeometry& geo = atoms.front().second.geo;
    SynthesisReport rep;
    std::vector<cplx> acc(geo.grid.values(), cplx(0));
    for (const auto& [lam, a] : atoms) {
        if (!(a.geo.grid == geo.grid) || a.geo.period != geo.period)
            throw StructuralError("synthesize: atoms live on different geometries");
        auto r = validate_atom(a, alpha);
        if (!r.pass)
            throw ValidationError("synthesize: atom at mu=" + std::to_string(a.mu) + " fails validation");
        for (std::size_t v = 0; v < acc.size(); ++v)
            acc[v] += lam * a.payload.samples()[v];
        rep.coefficient_sum += std::abs(lam);
    }
    rep.f = OpValuedFunction::from_samples(geo.grid, std::move(acc));
    rep.norm = physical_f1_norm(rep.f, geo, alpha);
    rep.ratio = rep.coefficient_sum > 0 ? rep.norm / rep.coefficient_sum : 0.0;
    rep.pass = rep.ratio <= rep.ceiling;
    return rep;
}

AtomImageReport atom_image_report(const Symbol& sigma, const AtomSpec& spec, double M, double alpha,
                                  std::vector<std::vector<int>> gammas)
{
    const auto& g = spec.geo.grid;
    if (!(sigma.grid() == g))
        throw StructuralError("atom_image_report: symbol and atom grids differ");
    bool unit = spec.kind == AtomKind::alpha1_atom;
    if (!unit && M >= 2.0 * spec.L + 2.0)
        throw ValidationError("atom_image_report: M must be below 2L+2");
    double limit = spec.K - g.d / 2.0;
    if (gammas.empty()) {
        for (const auto& gam : multi_indices(g.d, spec.K))
            if (order_of(gam) < limit)
                gammas.push_back(gam);
    }
    for (const auto& gam : gammas)
        if (static_cast<int>(gam.size()) != g.d || order_of(gam) >= limit)
            throw ValidationError("atom_image_report: derivative order must satisfy |gamma| < K - d/2");
    AtomImageReport rep;
    rep.mu = spec.mu;
    rep.M = M;
    rep.gammas = gammas;
    auto Ta = apply_pdo_unchecked(sigma, spec.payload, Side::column);
    std::vector<double> w(g.points());
    double scale = unit ? 1.0 : std::ldexp(1.0, spec.mu);
    for (std::size_t s = 0; s < g.points(); ++s) {
        double r2 = 0;
        for (int ax = 0; ax < g.d; ++ax)
            r2 += std::pow(spec.geo.offset(s, ax, spec.centre(ax)), 2);
        w[s] = std::pow(1.0 + scale * std::sqrt(r2), g.d + M);
    }
    for (const auto& gam : gammas) {
        double v = weighted_column_size(spectral_derivative(Ta, spec.geo, gam), spec.geo, &w);
        double b;
        if (unit)
            b = 1.0;
        else if (spec.kind == AtomKind::h1c_atom)
            b = std::pow(spec.volume(), -0.5 - double(order_of(gam)) / g.d);
        else
            b = std::pow(spec.volume(), alpha / g.d - double(order_of(gam)) / g.d);
        rep.weighted.push_back(v);
        rep.ratio.push_back(v / b);
        rep.max_ratio = std::max(rep.max_ratio, v / b);
    }
    return rep;
}

ImageSweep atom_image_sweep(const Symbol& sigma, const AtomGenerator& gen, const AtomGeometry& geo, double alpha,
                            double M, const std::vector<int>& mus)
{
    ImageSweep sw;
    sw.mus = mus;
    for (int mu : mus) {
        AtomGenerator g2 = gen;
        g2.mu = mu;
        auto a = make_atom(g2, geo, alpha);
        sw.max_ratio.push_back(atom_image_report(sigma, a, M, alpha).max_ratio);
    }
    auto [lo, hi] = std::minmax_element(sw.max_ratio.begin(), sw.max_ratio.end());
    sw.spread = *lo > 0 ? *hi / *lo : INFINITY;
    return sw;
}

bool symbol_vanishes_near(const Symbol& sigma, const AtomGeometry& geo, const std::vector<double>& c, double side)
{
    const auto& g = geo.grid;
    for (std::size_t s = 0; s < g.points(); ++s) {
        bool inside = true;
        for (int ax = 0; ax < g.d && inside; ++ax)
            inside = std::abs(geo.offset(s, ax, c[ax])) <= side / 2;
        if (!inside)
            continue;
        if (sigma.is_dense()) {
            const cplx* row = sigma.table().data() + s * g.values();
            for (std::size_t k = 0; k < g.values(); ++k)
                if (row[k] != cplx(0))
                    return false;
        } else {
            bool zero = true;
            for (const auto& t : sigma.terms())
                zero = zero && t.a[s] == cplx(0);
            if (!zero) {
                for (auto v : sigma.row(s))
                    if (v != cplx(0))
                        return false;
            }
        }
    }
    return true;
}

std::vector<double> exclusion_mask(const AtomGeometry& geo, const std::vector<double>& c, double inner, double outer)
{
    if (!(inner < outer) || outer > geo.period)
        throw ConfigError("exclusion_mask: need inner < outer <= period");
    const auto& g = geo.grid;
    std::vector<double> mask(g.points());
    for (std::size_t s = 0; s < g.points(); ++s) {
        double in = 1;
        for (int ax = 0; ax < g.d; ++ax) {
            double t = std::abs(geo.offset(s, ax, c[ax]));
            in *= 1.0 - smooth_step((t - inner / 2) / ((outer - inner) / 2));
        }
        mask[s] = 1.0 - in;
    }
    return mask;
}

double far_support_image_norm(const Symbol& sigma, const AtomSpec& spec, double alpha)
{
    const auto& g = spec.geo.grid;
    std::vector<double> c(g.d);
    for (int ax = 0; ax < g.d; ++ax)
        c[ax] = spec.centre(ax);
    double side = spec.kind == AtomKind::alphaQ_atom ? 6.0 : 4.0;
    if (!symbol_vanishes_near(sigma, spec.geo, c, side))
        throw ValidationError("far_support_image_norm: symbol does not vanish on the exclusion cube");
    return physical_f1_norm(apply_pdo_unchecked(sigma, spec.payload, Side::column), spec.geo, alpha);
}

FarSupportSweep far_support_sweep(const Symbol& sigma, const AtomGenerator& gen, const AtomGeometry& geo,
                                  double alpha, const std::vector<int>& mus)
{
    if (geo.period < 6.0)
        throw ConfigError("far_support_sweep: period must exceed the exclusion cube");
    FarSupportSweep sw;
    sw.mus = mus;
    sw.required = geo.grid.d / 2.0;
    for (int mu : mus) {
        AtomGenerator g2 = gen;
        g2.mu = mu;
        auto a = make_atom(g2, geo, alpha);
        std::vector<double> c(geo.grid.d);
        for (int ax = 0; ax < geo.grid.d; ++ax)
            c[ax] = a.centre(ax);
        auto sm = masked(sigma, exclusion_mask(geo, c, 4.0, 6.0));
        sw.norms.push_back(far_support_image_norm(sm, a, alpha));
    }
    sw.exponent = fit_exponent(mus, sw.norms);
    sw.pass = sw.exponent >= sw.required;
    return sw;
}

} // namespace ncpdo
