#include "ncpdo/norms.hpp"

#include <cmath>
#include <sstream>

namespace ncpdo {

void SpaceDescriptor::validate() const
{
    auto pin = [](double p) { return p == 1.0 || p == 2.0 || p == p_inf; };
    switch (family) {
    case SpaceFamily::LpN:
    case SpaceFamily::Fpac:
        if (!pin(p))
            throw Unsupported("space: p must be 1, 2 or inf");
        break;
    case SpaceFamily::Bpqa:
        if (!pin(p) || !pin(q))
            throw Unsupported("space: Besov p, q must be 1, 2 or inf");
        break;
    case SpaceFamily::Fpac_infty:
        if (p != p_inf)
            throw ValidationError("space: Fpac_infty requires p = inf");
        break;
    case SpaceFamily::LpML2c:
    case SpaceFamily::hp_c:
        if (p != 1.0)
            throw Unsupported("space: only p = 1 is implemented for this family");
        break;
    case SpaceFamily::H2a:
        if (p != 2.0)
            throw Unsupported("space: Sobolev norms are implemented for p = 2 only");
        break;
    }
}

namespace {

std::string pstr(double p)
{
    if (p == p_inf)
        return "inf";
    std::ostringstream os;
    os << p;
    return os.str();
}

} // namespace

std::string SpaceDescriptor::tag() const
{
    switch (family) {
    case SpaceFamily::LpN:
        return "L" + pstr(p) + "N";
    case SpaceFamily::LpML2c:
        return "L1ML2c";
    case SpaceFamily::hp_c:
        return "h1c";
    case SpaceFamily::Fpac:
        return "F" + pstr(p) + "a";
    case SpaceFamily::Fpac_infty:
        return "Finfa";
    case SpaceFamily::Bpqa:
        return "B" + pstr(p) + pstr(q) + "a";
    case SpaceFamily::H2a:
        return "H2a";
    }
    return "?";
}

bool SpaceDescriptor::hilbertian() const
{
    return (family == SpaceFamily::LpN && p == 2.0) || family == SpaceFamily::H2a ||
           (family == SpaceFamily::Fpac && p == 2.0);
}

SpaceDescriptor SpaceDescriptor::parse(const std::string& t, double alpha)
{
    SpaceDescriptor sp;
    sp.alpha = alpha;
    auto num = [](const std::string& s) {
        if (s == "inf")
            return p_inf;
        if (s == "1")
            return 1.0;
        if (s == "2")
            return 2.0;
        throw ValidationError("space: unknown exponent '" + s + "'");
    };
    if (t == "L1ML2c") {
        sp.family = SpaceFamily::LpML2c;
        sp.p = 1;
    } else if (t == "h1c") {
        sp.family = SpaceFamily::hp_c;
        sp.p = 1;
        sp.alpha = 0;
    } else if (t == "H2a") {
        sp.family = SpaceFamily::H2a;
        sp.p = 2;
    } else if (t.size() >= 3 && t[0] == 'L' && t.back() == 'N') {
        sp.family = SpaceFamily::LpN;
        sp.p = num(t.substr(1, t.size() - 2));
    } else if (t == "Finfa") {
        sp.family = SpaceFamily::Fpac_infty;
        sp.p = p_inf;
    } else if (t.size() >= 3 && t[0] == 'F' && t.back() == 'a') {
        sp.family = SpaceFamily::Fpac;
        sp.p = num(t.substr(1, t.size() - 2));
    } else if (t.size() == 4 && t[0] == 'B' && t.back() == 'a') {
        sp.family = SpaceFamily::Bpqa;
        sp.p = num(t.substr(1, 1));
        sp.q = num(t.substr(2, 1));
    } else {
        throw ValidationError("space: unknown tag '" + t + "'");
    }
    sp.validate();
    return sp;
}

double psd_power_trace(const cplx* S, int q, double e)
{
    auto clip = [](double lam, double scale) {
        if (lam < 0) {
            if (lam < -1e-12 * std::max(1.0, scale))
                throw DataError("matrix square root: Gram matrix has a negative eigenvalue");
            return 0.0;
        }
        return lam;
    };
    if (q == 1) {
        double lam = clip(S[0].real(), std::abs(S[0].real()));
        return lam == 0 ? 0.0 : std::pow(lam, e);
    }
    if (q == 2) {
        double a = S[0].real(), d = S[3].real();
        double off = std::norm(S[2]);
        double mid = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + off);
        double l1 = clip(mid + rad, mid + rad), l2 = clip(mid - rad, mid + rad);
        return (l1 == 0 ? 0.0 : std::pow(l1, e)) + (l2 == 0 ? 0.0 : std::pow(l2, e));
    }
    Mat h = CMap(S, q, q);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    double t = 0;
    for (int i = 0; i < q; ++i) {
        double lam = clip(es.eigenvalues()(i), scale);
        if (lam > 0)
            t += std::pow(lam, e);
    }
    return t;
}

double schatten_trace(const cplx* A, int q, double p)
{
    if (q == 1)
        return std::pow(std::abs(A[0]), p);
    Mat a = CMap(A, q, q);
    Mat g = a.adjoint() * a;
    return psd_power_trace(g.data(), q, p / 2.0);
}

double lp_norm(const OpValuedFunction& f, double p, TraceConvention tr)
{
    const auto& g = f.grid();
    for (auto v : f.samples())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DataError("lp_norm: non-finite entries");
    if (p == p_inf) {
        double m = 0;
        for (std::size_t i = 0; i < g.points(); ++i)
            m = std::max(m, fast_op_norm(f.samples().data() + i * g.block(), g.q));
        return m;
    }
    if (p != 1.0 && p != 2.0)
        throw Unsupported("lp_norm: p must be 1, 2 or inf");
    double acc = 0;
    if (p == 2.0) {
        for (auto v : f.samples())
            acc += std::norm(v);
    } else {
        for (std::size_t i = 0; i < g.points(); ++i)
            acc += schatten_trace(f.samples().data() + i * g.block(), g.q, p);
    }
    return std::pow(acc * g.cell() * tr.scale, 1.0 / p);
}

double l1_l2c_norm(const OpValuedFunction& f, TraceConvention tr)
{
    const auto& g = f.grid();
    Mat G = Mat::Zero(g.q, g.q);
    for (std::size_t i = 0; i < g.points(); ++i)
        G += f.sample(i).adjoint() * f.sample(i);
    G *= g.cell();
    return tr.scale * psd_power_trace(G.data(), g.q, 0.5);
}

OpValuedFunction bessel_potential(const OpValuedFunction& f, double alpha)
{
    const auto& g = f.grid();
    std::vector<double> w(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) {
        double r = g.freq_norm(i);
        w[i] = std::pow(1.0 + r * r, alpha / 2.0);
    }
    return apply_multiplier(f, w);
}

std::vector<cplx> square_function(const OpValuedFunction& f, double alpha, const LPFamily& fam)
{
    const auto& g = f.grid();
    const int q = g.q;
    const std::size_t B = g.block();
    const auto& tor = periodize_lp(fam, g);
    std::vector<cplx> S(g.values(), cplx(0));
    for (std::size_t j = 0; j < tor.size(); ++j) {
        auto band = apply_multiplier(f, tor[j]);
        double w = std::pow(2.0, 2.0 * j * alpha);
        for (std::size_t i = 0; i < g.points(); ++i) {
            Mat sq = band.sample(i).adjoint() * band.sample(i);
            MMap(S.data() + i * B, q, q) += w * sq;
        }
    }
    return S;
}

namespace {

std::size_t zero_index(const GridSpec& g)
{
    std::vector<int> z(g.d, 0);
    return g.freq_index(z.data());
}

double zero_term(const OpValuedFunction& f, double p, TraceConvention tr)
{
    const auto& g = f.grid();
    const cplx* c0 = f.coeffs().data() + zero_index(g) * g.block();
    if (p == p_inf)
        return fast_op_norm(c0, g.q);
    return std::pow(tr.scale * schatten_trace(c0, g.q, p), 1.0 / p);
}

} // namespace

double triebel_lizorkin_norm(const OpValuedFunction& f, double alpha, double p, const LPFamily& fam,
                             TraceConvention tr)
{
    const auto& g = f.grid();
    const int q = g.q;
    const std::size_t B = g.block();
    if (p != 1.0 && p != 2.0 && p != p_inf)
        throw Unsupported("triebel_lizorkin_norm: p must be 1, 2 or inf");
    if (p != p_inf) {
        auto S = square_function(f, alpha, fam);
        double acc = 0;
        for (std::size_t i = 0; i < g.points(); ++i)
            acc += psd_power_trace(S.data() + i * B, q, p / 2.0);
        return zero_term(f, p, tr) + std::pow(tr.scale * acc * g.cell(), 1.0 / p);
    }
    // sup over dyadic cubes aligned with the samples
    const auto& tor = periodize_lp(fam, g);
    std::vector<OpValuedFunction> bands;
    for (const auto& t : tor)
        bands.push_back(apply_multiplier(f, t));
    int kmax = 0;
    while ((1 << (kmax + 2)) < g.n)
        ++kmax;
    double best = 0;
    for (int k = 1; k <= kmax; ++k) {
        std::vector<cplx> S(g.values(), cplx(0));
        for (std::size_t j = static_cast<std::size_t>(k); j < bands.size(); ++j) {
            double w = std::pow(2.0, 2.0 * j * alpha);
            for (std::size_t i = 0; i < g.points(); ++i)
                MMap(S.data() + i * B, q, q) += w * (bands[j].sample(i).adjoint() * bands[j].sample(i));
        }
        const int side = g.n >> k; // samples per cube edge
        const int cubes = 1 << k;
        std::size_t ncubes = 1;
        for (int a = 0; a < g.d; ++a)
            ncubes *= static_cast<std::size_t>(cubes);
        std::vector<Mat> acc(ncubes, Mat::Zero(q, q));
        for (std::size_t i = 0; i < g.points(); ++i) {
            std::size_t c = 0;
            for (int a = 0; a < g.d; ++a)
                c = c * cubes + g.axis_index(i, a) / side;
            acc[c] += CMap(S.data() + i * B, q, q);
        }
        double vol = std::pow(2.0, -k * g.d);
        for (auto& m : acc) {
            Mat avg = m * (g.cell() / vol);
            best = std::max(best, std::sqrt(fast_op_norm(avg.data(), q)));
        }
    }
    return zero_term(f, p_inf, tr) + best;
}

double hardy_h1c_norm(const OpValuedFunction& f, const LPFamily& fam)
{
    return triebel_lizorkin_norm(f, 0.0, 1.0, fam);
}

double besov_norm(const OpValuedFunction& f, double alpha, double p, double q, const LPFamily& fam)
{
    const auto& tor = periodize_lp(fam, f.grid());
    std::vector<double> terms;
    for (std::size_t k = 0; k < tor.size(); ++k)
        terms.push_back(std::pow(2.0, k * alpha) * lp_norm(apply_multiplier(f, tor[k]), p));
    double agg = 0;
    if (q == p_inf) {
        for (double t : terms)
            agg = std::max(agg, t);
    } else {
        for (double t : terms)
            agg += std::pow(t, q);
        agg = std::pow(agg, 1.0 / q);
    }
    return zero_term(f, p, {}) + agg;
}

double sobolev_h2_norm(const OpValuedFunction& f, double alpha)
{
    return lp_norm(bessel_potential(f, alpha), 2.0);
}

double space_norm(const OpValuedFunction& f, const SpaceDescriptor& sp, const LPFamily& fam)
{
    sp.validate();
    switch (sp.family) {
    case SpaceFamily::LpN:
        return lp_norm(f, sp.p);
    case SpaceFamily::LpML2c:
        return l1_l2c_norm(f);
    case SpaceFamily::hp_c:
        return hardy_h1c_norm(f, fam);
    case SpaceFamily::Fpac:
    case SpaceFamily::Fpac_infty:
        return triebel_lizorkin_norm(f, sp.alpha, sp.p, fam);
    case SpaceFamily::Bpqa:
        return besov_norm(f, sp.alpha, sp.p, sp.q, fam);
    case SpaceFamily::H2a:
        return sobolev_h2_norm(f, sp.alpha);
    }
    throw ValidationError("space_norm: unknown family");
}

std::vector<double> hilbert_weight(const GridSpec& g, const SpaceDescriptor& sp, const LPFamily& fam)
{
    std::vector<double> w(g.points(), 1.0);
    if (sp.family == SpaceFamily::LpN && sp.p == 2.0)
        return w;
    if (sp.family == SpaceFamily::H2a) {
        for (std::size_t i = 0; i < g.points(); ++i) {
            double r = g.freq_norm(i);
            w[i] = std::pow(1.0 + r * r, sp.alpha);
        }
        return w;
    }
    if (sp.family == SpaceFamily::Fpac && sp.p == 2.0) {
        const auto& tor = periodize_lp(fam, g);
        std::size_t i0 = zero_index(g);
        for (std::size_t i = 0; i < g.points(); ++i) {
            if (i == i0)
                continue;
            double s = 0;
            for (std::size_t j = 0; j < tor.size(); ++j)
                s += std::pow(4.0, j * sp.alpha) * tor[j][i] * tor[j][i];
            w[i] = s;
        }
        return w;
    }
    throw ValidationError("hilbert_weight: space " + sp.tag() + " is not Hilbertian");
}

} // namespace ncpdo
