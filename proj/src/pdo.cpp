#include "ncpdo/pdo.hpp"

#include <cmath>
#include <functional>

#include "ncpdo/exemplars.hpp"

namespace ncpdo {

Side parse_side(const std::string& s)
{
    if (s == "c" || s == "column")
        return Side::column;
    if (s == "r" || s == "row")
        return Side::row;
    throw ValidationError("side must be c|column or r|row");
}

std::string side_name(Side s) { return s == Side::column ? "column" : "row"; }

namespace {

// 1-D character table e(k m / n), k sample index, m centered frequency index
std::vector<cplx> char_table(int n)
{
    std::vector<cplx> e(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
        for (int mi = 0; mi < n; ++mi) {
            long m = mi - n / 2;
            double ph = two_pi * double((k * m) % n) / n;
            e[static_cast<std::size_t>(k) * n + mi] = {std::cos(ph), std::sin(ph)};
        }
    return e;
}

cplx character(const GridSpec& g, const std::vector<cplx>& e, std::size_t s, std::size_t m)
{
    cplx v = 1.0;
    for (int a = 0; a < g.d; ++a)
        v *= e[static_cast<std::size_t>(g.axis_index(s, a)) * g.n + g.axis_index(m, a)];
    return v;
}

} // namespace

OpValuedFunction apply_pdo_unchecked(const Symbol& sigma, const OpValuedFunction& f, Side side)
{
    const auto& g = sigma.grid();
    if (!(f.grid() == g))
        throw StructuralError("apply_pdo: grid mismatch between symbol and input");
    const int q = g.q;
    const std::size_t P = g.points(), B = g.block();
    std::vector<cplx> out(g.values(), cplx(0));
    if (sigma.is_dense()) {
        auto e = char_table(g.n);
        for (std::size_t s = 0; s < P; ++s) {
            Mat acc = Mat::Zero(q, q);
            const cplx* row = sigma.table().data() + s * g.values();
            for (std::size_t m = 0; m < P; ++m) {
                cplx ch = character(g, e, s, m);
                if (side == Side::column)
                    acc += ch * (CMap(row + m * B, q, q) * f.coeff(m));
                else
                    acc += ch * (f.coeff(m) * CMap(row + m * B, q, q));
            }
            MMap(out.data() + s * B, q, q) = acc;
        }
        return OpValuedFunction::from_samples(g, std::move(out));
    }
    std::vector<cplx> c(g.values()), tmp(g.values());
    for (const auto& t : sigma.terms()) {
        for (std::size_t m = 0; m < P; ++m) {
            if (side == Side::column)
                MMap(c.data() + m * B, q, q) = CMap(t.B.data() + m * B, q, q) * f.coeff(m);
            else
                MMap(c.data() + m * B, q, q) = f.coeff(m) * CMap(t.B.data() + m * B, q, q);
        }
        fft_inverse(g, B, c.data(), tmp.data());
        for (std::size_t s = 0; s < P; ++s)
            for (std::size_t b = 0; b < B; ++b)
                out[s * B + b] += t.a[s] * tmp[s * B + b];
    }
    return OpValuedFunction::from_samples(g, std::move(out));
}

OpValuedFunction apply_pdo(const Symbol& sigma, const OpValuedFunction& f, Side side)
{
    double scale = 0;
    for (auto v : f.coeffs())
        scale = std::max(scale, std::abs(v));
    if (f.nyquist_leak() > 1e-12 * scale)
        throw ValidationError("apply_pdo: input is not band-limited (Nyquist coefficients present)");
    return apply_pdo_unchecked(sigma, f, side);
}

OpValuedFunction apply_pdo_adjoint(const Symbol& sigma, const OpValuedFunction& h, Side side)
{
    const auto& g = sigma.grid();
    if (!(h.grid() == g))
        throw StructuralError("apply_pdo_adjoint: grid mismatch");
    const int q = g.q;
    const std::size_t P = g.points(), B = g.block();
    std::vector<cplx> c(g.values(), cplx(0));
    if (sigma.is_dense()) {
        auto e = char_table(g.n);
        for (std::size_t m = 0; m < P; ++m) {
            Mat acc = Mat::Zero(q, q);
            for (std::size_t s = 0; s < P; ++s) {
                cplx ch = std::conj(character(g, e, s, m));
                CMap sv(sigma.table().data() + (s * P + m) * B, q, q);
                if (side == Side::column)
                    acc += ch * (sv.adjoint() * h.sample(s));
                else
                    acc += ch * (h.sample(s) * sv.adjoint());
            }
            MMap(c.data() + m * B, q, q) = acc * g.cell();
        }
        return OpValuedFunction::from_coeffs(g, std::move(c));
    }
    std::vector<cplx> w(g.values()), wc(g.values());
    for (const auto& t : sigma.terms()) {
        for (std::size_t s = 0; s < P; ++s)
            for (std::size_t b = 0; b < B; ++b)
                w[s * B + b] = std::conj(t.a[s]) * h.samples()[s * B + b];
        fft_forward(g, B, w.data(), wc.data());
        for (std::size_t m = 0; m < P; ++m) {
            CMap bm(t.B.data() + m * B, q, q);
            CMap hm(wc.data() + m * B, q, q);
            if (side == Side::column)
                MMap(c.data() + m * B, q, q) += bm.adjoint() * hm;
            else
                MMap(c.data() + m * B, q, q) += hm * bm.adjoint();
        }
    }
    return OpValuedFunction::from_coeffs(g, std::move(c));
}

cplx pairing(const OpValuedFunction& f, const OpValuedFunction& g)
{
    cplx acc = 0;
    for (std::size_t i = 0; i < f.samples().size(); ++i)
        acc += std::conj(g.samples()[i]) * f.samples()[i];
    return acc * f.grid().cell();
}

double l2(const OpValuedFunction& f)
{
    double acc = 0;
    for (auto v : f.coeffs())
        acc += std::norm(v);
    return std::sqrt(acc);
}

bool RemainderReport::monotone(double slack) const
{
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > errors[i - 1] * (1 + slack) + 1e-300)
            return false;
    return true;
}

namespace {

double default_band(const GridSpec& g)
{
    int J = 0;
    while ((1 << (J + 2)) < g.n)
        ++J;
    return std::ldexp(1.0, J);
}

} // namespace

RemainderReport composition_remainder(const Symbol& s1, const Symbol& s2, const std::vector<int>& orders, int panel,
                                      std::uint64_t seed)
{
    RemainderReport rep;
    rep.orders = orders;
    rep.panel = panel;
    rep.seed = seed;
    const auto& g = s1.grid();
    Rng rng(seed);
    std::vector<OpValuedFunction> fs, exact;
    for (int i = 0; i < panel; ++i) {
        fs.push_back(random_function(g, rng, default_band(g)));
        exact.push_back(apply_pdo_unchecked(s1, apply_pdo_unchecked(s2, fs.back(), Side::column), Side::column));
    }
    for (int N0 : orders) {
        Symbol s3 = compose_symbols_asymptotic(s1, s2, N0);
        double err = 0;
        for (int i = 0; i < panel; ++i) {
            auto approx = apply_pdo_unchecked(s3, fs[i], Side::column);
            err = std::max(err, l2(approx - exact[i]) / l2(fs[i]));
        }
        rep.errors.push_back(err);
    }
    return rep;
}

RemainderReport adjoint_remainder(const Symbol& s, const std::vector<int>& orders, int panel, std::uint64_t seed)
{
    RemainderReport rep;
    rep.orders = orders;
    rep.panel = panel;
    rep.seed = seed;
    const auto& g = s.grid();
    Rng rng(seed);
    std::vector<OpValuedFunction> fs, gs;
    std::vector<cplx> rhs;
    for (int i = 0; i < panel; ++i) {
        fs.push_back(random_function(g, rng, default_band(g)));
        gs.push_back(random_function(g, rng, default_band(g)));
        rhs.push_back(pairing(fs.back(), apply_pdo_unchecked(s, gs.back(), Side::column)));
    }
    for (int N0 : orders) {
        Symbol st = adjoint_symbol_asymptotic(s, N0);
        double err = 0;
        for (int i = 0; i < panel; ++i) {
            cplx lhs = pairing(apply_pdo_unchecked(st, fs[i], Side::column), gs[i]);
            err = std::max(err, std::abs(lhs - rhs[i]) / (l2(fs[i]) * l2(gs[i])));
        }
        rep.errors.push_back(err);
    }
    return rep;
}

namespace {

using LinOp = std::function<OpValuedFunction(const OpValuedFunction&)>;

struct PowerResult {
    double value = 0;
    int iterations = 0;
    OpValuedFunction vec;
};

// largest singular value of A given A and A^*
PowerResult power_iterate(const LinOp& A, const LinOp& At, OpValuedFunction x, double tol, int max_iter)
{
    PowerResult r;
    double nx = l2(x);
    if (nx == 0)
        return r;
    x = x.scaled(1.0 / nx);
    double prev = -1;
    for (int it = 1; it <= max_iter; ++it) {
        auto y = A(x);
        double s = l2(y);
        r.iterations = it;
        r.value = s;
        r.vec = x;
        if (s == 0)
            break;
        if (prev >= 0 && std::abs(s - prev) <= tol * s)
            break;
        prev = s;
        auto z = At(y);
        double nz = l2(z);
        if (nz == 0)
            break;
        x = z.scaled(1.0 / nz);
    }
    return r;
}

OpValuedFunction weight_apply(const OpValuedFunction& f, const std::vector<double>& w, double power)
{
    std::vector<double> m(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        m[i] = std::pow(w[i], power);
    return apply_multiplier(f, m);
}

} // namespace

OpNormEstimate power_norm(const Symbol& sigma, Side side, const std::vector<double>& w_src,
                          const std::vector<double>& w_tgt, const NormEstimateOptions& opt, OpValuedFunction* top)
{
    const auto& g = sigma.grid();
    LinOp A = [&](const OpValuedFunction& x) {
        return weight_apply(apply_pdo_unchecked(sigma, weight_apply(x, w_src, -0.5), side), w_tgt, 0.5);
    };
    LinOp At = [&](const OpValuedFunction& y) {
        return weight_apply(apply_pdo_adjoint(sigma, weight_apply(y, w_tgt, 0.5), side), w_src, -0.5);
    };
    Rng rng(opt.seed);
    auto x0 = random_function(g, rng, opt.band < 0 ? default_band(g) : opt.band);
    auto r = power_iterate(A, At, x0, opt.tol, opt.max_iter);
    OpNormEstimate e;
    e.method = "power-iteration";
    e.value = r.value;
    e.iterations = r.iterations;
    e.resolution = g.n;
    e.seed = opt.seed;
    if (top && r.iterations > 0)
        *top = weight_apply(r.vec, w_src, -0.5);
    return e;
}

OpNormEstimate estimate_operator_norm(const Symbol& sigma, Side side, const SpaceDescriptor& src,
                                      const SpaceDescriptor& tgt, const LPFamily& fam, const NormEstimateOptions& opt)
{
    src.validate();
    tgt.validate();
    const auto& g = sigma.grid();
    OpNormEstimate e;
    if (src.hilbertian() && tgt.hilbertian()) {
        OpValuedFunction top;
        e = power_norm(sigma, side, hilbert_weight(g, src, fam), hilbert_weight(g, tgt, fam), opt, &top);
        if (src.family == SpaceFamily::Fpac || tgt.family == SpaceFamily::Fpac) {
            e.method = "power-iteration (equivalent Hilbert norm)";
            double nf = space_norm(top, src, fam);
            if (nf > 0)
                e.ratio_at_top_vector = space_norm(apply_pdo_unchecked(sigma, top, side), tgt, fam) / nf;
        }
    } else {
        e.method = "randomized-lower-bound";
        e.lower_bound = true;
        e.resolution = g.n;
        e.seed = opt.seed;
        double best = 0;
        auto consider = [&](const OpValuedFunction& f) {
            double nf = space_norm(f, src, fam);
            if (nf <= 0)
                return;
            best = std::max(best, space_norm(apply_pdo_unchecked(sigma, f, side), tgt, fam) / nf);
        };
        Rng rng(opt.seed);
        double band = opt.band < 0 ? default_band(g) : opt.band;
        for (int t = 0; t < opt.trials; ++t)
            consider(random_function(g, rng, band));
        for (const auto& f : opt.library)
            consider(f);
        SpaceDescriptor h;
        h.family = SpaceFamily::H2a;
        h.alpha = src.alpha;
        OpValuedFunction top;
        auto pe = power_norm(sigma, side, hilbert_weight(g, h, fam), hilbert_weight(g, h, fam), opt, &top);
        if (pe.iterations > 0)
            consider(top);
        e.trials = opt.trials + static_cast<int>(opt.library.size()) + 1;
        e.value = best;
    }
    e.source = src.tag();
    e.target = tgt.tag();
    return e;
}

Mat assemble_operator(const Symbol& sigma, Side side)
{
    const auto& g = sigma.grid();
    const std::size_t V = g.values();
    require_budget(V * V * sizeof(cplx), "assemble_operator");
    Mat M(V, V);
    std::vector<cplx> c(V, cplx(0));
    for (std::size_t k = 0; k < V; ++k) {
        std::fill(c.begin(), c.end(), cplx(0));
        c[k] = 1.0;
        auto out = apply_pdo_unchecked(sigma, OpValuedFunction::from_coeffs(g, c), side);
        for (std::size_t i = 0; i < V; ++i)
            M(i, k) = out.coeffs()[i];
    }
    return M;
}

CotlarSteinReport cotlar_stein_report(const Symbol& sigma, const LPFamily& fam, std::uint64_t seed, Side side)
{
    const auto& g = sigma.grid();
    if (fam.J + 1 < 3)
        throw ConfigError("cotlar_stein_report: need at least 3 dyadic bands");
    if (sigma.claim().delta >= 1.0)
        throw ValidationError("cotlar_stein_report: requires a claim with delta < 1");
    auto pieces = dyadic_pieces(sigma, fam);
    const int L = static_cast<int>(pieces.size());
    CotlarSteinReport rep;
    rep.levels = L;
    rep.tstar_t.assign(L, std::vector<double>(L, 0.0));
    rep.t_tstar.assign(L, std::vector<double>(L, 0.0));
    Rng rng(seed);
    auto T = [&](int k) { return [&, k](const OpValuedFunction& x) { return apply_pdo_unchecked(pieces[k], x, side); }; };
    auto Ts = [&](int k) { return [&, k](const OpValuedFunction& x) { return apply_pdo_adjoint(pieces[k], x, side); }; };
    for (int j = 0; j < L; ++j)
        for (int k = 0; k < L; ++k) {
            auto x0 = random_function(g, rng);
            LinOp A = [&](const OpValuedFunction& x) { return Ts(k)(T(j)(x)); };
            LinOp At = [&](const OpValuedFunction& x) { return Ts(j)(T(k)(x)); };
            rep.tstar_t[j][k] = power_iterate(A, At, x0, 1e-8, 300).value;
            LinOp B = [&](const OpValuedFunction& x) { return T(k)(Ts(j)(x)); };
            LinOp Bt = [&](const OpValuedFunction& x) { return T(j)(Ts(k)(x)); };
            rep.t_tstar[j][k] = power_iterate(B, Bt, x0, 1e-8, 300).value;
        }
    std::vector<double> xs, ys;
    double dmin = 1e300, dmax = 0;
    for (int j = 0; j < L; ++j) {
        // phi^_0 is a ball, not an annulus
        if (j > 0) {
            dmin = std::min(dmin, rep.tstar_t[j][j]);
            dmax = std::max(dmax, rep.tstar_t[j][j]);
        }
        for (int k = 0; k < L; ++k) {
            if (std::abs(j - k) < 2)
                continue;
            rep.max_tt_far = std::max(rep.max_tt_far, rep.t_tstar[j][k]);
            if (rep.tstar_t[j][k] > 1e-14) {
                xs.push_back(std::max(j, k));
                ys.push_back(std::log2(rep.tstar_t[j][k]));
            }
        }
    }
    rep.diag_ratio = dmin > 0 ? dmax / dmin : INFINITY;
    rep.fit_points = static_cast<int>(xs.size());
    if (xs.size() >= 2) {
        double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        double den = n * sxx - sx * sx;
        rep.decay_rate = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
    }
    return rep;
}

OpValuedFunction coherent_input(const GridSpec& g, const LPFamily& fam)
{
    std::vector<cplx> c(g.values(), cplx(0));
    std::vector<int> m(g.d, 0);
    for (int j = 1; j <= fam.J; ++j) {
        m[0] = 1 << j;
        std::size_t idx = g.freq_index(m.data());
        if (idx == GridSpec::npos)
            continue;
        for (int a = 0; a < g.q; ++a)
            c[idx * g.block() + a * (g.q + 1)] = 1.0;
    }
    return OpValuedFunction::from_coeffs(g, std::move(c));
}

namespace {

void summarize(const std::vector<std::vector<double>>& est, std::vector<double>& growth, std::vector<bool>& inc)
{
    for (const auto& row : est) {
        growth.push_back(row.back() / row.front());
        bool up = true;
        for (std::size_t i = 1; i < row.size(); ++i)
            up = up && row[i] > row[i - 1];
        inc.push_back(up);
    }
}

} // namespace

ForbiddenReport forbidden_symbol_experiment(const std::vector<double>& alphas, const std::vector<int>& sizes,
                                            int first_bands, std::uint64_t seed)
{
    for (double a : alphas)
        if (a < 0)
            throw ValidationError("forbidden experiment: alpha must be nonnegative");
    ForbiddenReport rep;
    rep.sizes = sizes;
    rep.alphas = alphas;
    rep.method = "power-iteration on H2^alpha";
    rep.estimates.assign(alphas.size(), {});
    rep.f1_estimates.assign(alphas.size(), {});
    for (int n : sizes) {
        GridSpec g{2, n, 1};
        auto fam = build_lp_family(g);
        Symbol s = make_exotic(g, fam, 1.0, first_bands);
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            SpaceDescriptor h;
            h.family = SpaceFamily::H2a;
            h.alpha = alphas[ai];
            NormEstimateOptions opt;
            opt.seed = seed;
            opt.tol = 1e-8;
            opt.max_iter = 2000;
            opt.band = -1;
            auto w = hilbert_weight(g, h, fam);
            rep.estimates[ai].push_back(power_norm(s, Side::column, w, w, opt).value);
            NormEstimateOptions lo;
            lo.seed = seed;
            lo.trials = 8;
            lo.library = {coherent_input(g, fam)};
            auto f1 = SpaceDescriptor::parse("F1a", alphas[ai]);
            rep.f1_estimates[ai].push_back(estimate_operator_norm(s, Side::column, f1, fam, lo).value);
        }
    }
    summarize(rep.estimates, rep.growth, rep.strictly_increasing);
    summarize(rep.f1_estimates, rep.f1_growth, rep.f1_strictly_increasing);
    return rep;
}

} // namespace ncpdo
