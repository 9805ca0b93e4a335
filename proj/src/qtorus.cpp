#include "ncpdo/qtorus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ncpdo/norms.hpp"

namespace ncpdo {

namespace {

cplx e1(double x) { return {std::cos(two_pi * x), std::sin(two_pi * x)}; }

std::vector<int> freq_of(const GridSpec& g, std::size_t i)
{
    std::vector<int> m(g.d);
    for (int a = 0; a < g.d; ++a)
        m[a] = g.freq(i, a);
    return m;
}

bool same_theta(const ThetaMatrix& a, const ThetaMatrix& b) { return a.d == b.d && a.v == b.v; }

} // namespace

void ThetaMatrix::validate() const
{
    if (d < 1 || d > 3)
        throw ValidationError("theta: dimension must be 1..3");
    if (v.size() != static_cast<std::size_t>(d * d))
        throw ValidationError("theta: wrong number of entries");
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j)
            if (at(k, j) != -at(j, k))
                throw ValidationError("theta: matrix is not skew-symmetric");
    if (rational) {
        if (den <= 0 || num.size() != v.size())
            throw ValidationError("theta: bad rational tag");
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j)
                if (num[k * d + j] != -num[j * d + k])
                    throw ValidationError("theta: numerators are not skew-symmetric");
    }
}

bool ThetaMatrix::is_zero() const
{
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

std::string ThetaMatrix::str() const
{
    if (d < 2)
        return "0";
    std::ostringstream os;
    if (rational)
        os << num[1] << "/" << den;
    else
        os << at(0, 1);
    return os.str();
}

ThetaMatrix ThetaMatrix::zero(int d)
{
    ThetaMatrix t;
    t.d = d;
    t.v.assign(d * d, 0.0);
    t.num.assign(d * d, 0);
    t.den = 1;
    t.validate();
    return t;
}

ThetaMatrix ThetaMatrix::pair(int d, long p, long q)
{
    if (d < 2)
        throw ValidationError("theta: a commutation pair needs d >= 2");
    if (q <= 0)
        throw ValidationError("theta: denominator must be positive");
    long g = std::gcd(std::abs(p), q);
    if (g == 0)
        g = 1;
    p /= g;
    q /= g;
    if (p == 0)
        q = 1;
    ThetaMatrix t = zero(d);
    t.den = q;
    t.num[1] = p;
    t.num[d] = -p;
    t.v[1] = double(p) / double(q);
    t.v[d] = -t.v[1];
    t.validate();
    return t;
}

ThetaMatrix ThetaMatrix::irrational(int d, double theta12)
{
    ThetaMatrix t = zero(d);
    t.rational = false;
    t.num.clear();
    t.den = 0;
    t.v[1] = theta12;
    t.v[d] = -theta12;
    return t;
}

ThetaMatrix ThetaMatrix::parse(const std::string& s, int d)
{
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos)
            return pair(d, std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
        double x = std::stod(s);
        if (x == 0.0)
            return zero(d);
        if (x == std::round(x))
            return pair(d, static_cast<long>(x), 1);
        return irrational(d, x);
    } catch (const std::invalid_argument&) {
        throw ConfigError("theta: cannot parse '" + s + "'");
    }
}

QTElement QTElement::zero(const ThetaMatrix& th, int box)
{
    th.validate();
    QTElement x;
    x.theta = th;
    x.box = box;
    x.index().validate();
    x.c.assign(x.index().points(), cplx(0));
    return x;
}

QTElement QTElement::monomial(const ThetaMatrix& th, int box, const std::vector<int>& m, cplx a)
{
    QTElement x = zero(th, box);
    std::size_t i = x.index().freq_index(m.data());
    if (i == GridSpec::npos)
        throw ValidationError("qt: monomial outside the frequency box");
    x.c[i] = a;
    return x;
}

QTElement QTElement::random(const ThetaMatrix& th, int box, Rng& rng, double band)
{
    QTElement x = zero(th, box);
    auto g = x.index();
    for (std::size_t i = 0; i < g.points(); ++i) {
        bool nyq = false;
        for (int a = 0; a < g.d; ++a)
            nyq = nyq || g.freq(i, a) == -box / 2;
        cplx z = gaussian(rng);
        if (band < 0 ? !nyq : g.freq_norm(i) <= band)
            x.c[i] = z;
    }
    return x;
}

cplx QTElement::coeff(const std::vector<int>& m) const
{
    std::size_t i = index().freq_index(m.data());
    return i == GridSpec::npos ? cplx(0) : c[i];
}

QTElement QTElement::operator+(const QTElement& o) const
{
    if (!same_theta(theta, o.theta) || box != o.box)
        throw ValidationError("qt: sum of elements with different theta or box");
    QTElement r = *this;
    for (std::size_t i = 0; i < c.size(); ++i)
        r.c[i] += o.c[i];
    return r;
}

QTElement QTElement::scaled(cplx a) const
{
    QTElement r = *this;
    for (auto& v : r.c)
        v *= a;
    return r;
}

QTElement QTElement::resized(int new_box) const
{
    QTElement r = zero(theta, new_box);
    auto g = index(), h = r.index();
    double lost = 0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        auto m = freq_of(g, i);
        std::size_t k = h.freq_index(m.data());
        if (k == GridSpec::npos)
            lost += std::norm(c[i]);
        else
            r.c[k] = c[i];
    }
    r.truncation_loss = std::sqrt(lost);
    return r;
}

cplx qt_cocycle(const ThetaMatrix& th, const int* m1, const int* m2)
{
    if (th.rational) {
        long long acc = 0;
        for (int k = 0; k < th.d; ++k)
            for (int j = 0; j < k; ++j)
                acc += static_cast<long long>(th.num[k * th.d + j]) * m1[k] * m2[j];
        acc %= th.den;
        return e1(double(acc) / double(th.den));
    }
    double ph = 0;
    for (int k = 0; k < th.d; ++k)
        for (int j = 0; j < k; ++j)
            ph += th.at(k, j) * m1[k] * m2[j];
    return e1(ph);
}

QTElement QTElement::adjoint() const
{
    // (U^m)^* = U_d^{-m_d} ... U_1^{-m_1}, normal-ordered through the cocycle
    QTElement r = zero(theta, 2 * box);
    auto g = index(), h = r.index();
    const int d = theta.d;
    for (std::size_t i = 0; i < g.points(); ++i) {
        if (c[i] == cplx(0))
            continue;
        auto m = freq_of(g, i);
        std::vector<int> acc(d, 0);
        cplx ph = 1;
        for (int k = d - 1; k >= 0; --k) {
            std::vector<int> step(d, 0);
            step[k] = -m[k];
            ph *= qt_cocycle(theta, acc.data(), step.data());
            acc[k] = -m[k];
        }
        r.c[h.freq_index(acc.data())] += std::conj(c[i]) * ph;
    }
    return r.resized(box);
}

QTElement qt_multiply(const QTElement& x, const QTElement& y, int out_box)
{
    if (!same_theta(x.theta, y.theta))
        throw ValidationError("qt_multiply: theta mismatch");
    const int full = 2 * std::max(x.box, y.box);
    QTElement r = QTElement::zero(x.theta, full);
    auto gx = x.index(), gy = y.index(), gr = r.index();
    const int d = x.theta.d;
    std::vector<int> m(d);
    for (std::size_t i = 0; i < gx.points(); ++i) {
        if (x.c[i] == cplx(0))
            continue;
        auto m1 = freq_of(gx, i);
        for (std::size_t k = 0; k < gy.points(); ++k) {
            if (y.c[k] == cplx(0))
                continue;
            auto m2 = freq_of(gy, k);
            for (int a = 0; a < d; ++a)
                m[a] = m1[a] + m2[a];
            r.c[gr.freq_index(m.data())] += x.c[i] * y.c[k] * qt_cocycle(x.theta, m1.data(), m2.data());
        }
    }
    return r.resized(out_box > 0 ? out_box : x.box);
}

QTRepresentation QTRepresentation::build(const ThetaMatrix& th)
{
    th.validate();
    QTRepresentation rep;
    if (th.is_zero()) {
        rep.q = 1;
        rep.U.assign(th.d, Mat::Identity(1, 1));
        return rep;
    }
    if (!th.rational)
        throw Unsupported("qt representation: theta is tagged irrational");
    for (int k = 0; k < th.d; ++k)
        for (int j = 0; j < th.d; ++j)
            if (th.num[k * th.d + j] != 0 && !((k == 0 && j == 1) || (k == 1 && j == 0)))
                throw Unsupported("qt representation: only theta_12 may be nonzero");
    const int q = static_cast<int>(th.den);
    const long p = th.num[1];
    rep.q = q;
    Mat clock = Mat::Zero(q, q), shift = Mat::Zero(q, q);
    for (int k = 0; k < q; ++k) {
        clock(k, k) = e1(double((p * k) % q) / q);
        shift((k + 1) % q, k) = 1.0;
    }
    rep.U = {clock, shift};
    for (int k = 2; k < th.d; ++k)
        rep.U.push_back(Mat::Identity(q, q));
    return rep;
}

Mat QTRepresentation::monomial(const int* m) const
{
    Mat r = Mat::Identity(q, q);
    for (std::size_t k = 0; k < U.size(); ++k) {
        int e = m[k];
        Mat base = e >= 0 ? U[k] : Mat(U[k].adjoint());
        for (int t = 0; t < std::abs(e); ++t)
            r = r * base;
    }
    return r;
}

double QTRepresentation::commutation_residual(const ThetaMatrix& th) const
{
    double worst = 0;
    for (int k = 0; k < th.d; ++k)
        for (int j = 0; j < th.d; ++j) {
            Mat lhs = U[k] * U[j];
            Mat rhs = e1(th.at(k, j)) * (U[j] * U[k]);
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    return worst;
}

double QTRepresentation::unitarity_residual() const
{
    double worst = 0;
    for (const auto& u : U)
        worst = std::max(worst, (u.adjoint() * u - Mat::Identity(q, q)).cwiseAbs().maxCoeff());
    return worst;
}

Mat qt_represent(const QTElement& x, const QTRepresentation& rep)
{
    auto g = x.index();
    Mat r = Mat::Zero(rep.q, rep.q);
    for (std::size_t i = 0; i < g.points(); ++i)
        if (x.c[i] != cplx(0)) {
            auto m = freq_of(g, i);
            r += x.c[i] * rep.monomial(m.data());
        }
    return r;
}

double calibrate_cocycle(int box)
{
    auto th = ThetaMatrix::pair(2, 1, 3);
    auto rep = QTRepresentation::build(th);
    GridSpec g{2, box, 1};
    std::vector<Mat> mono(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) {
        auto m = freq_of(g, i);
        mono[i] = rep.monomial(m.data());
    }
    double worst = 0;
    for (std::size_t i = 0; i < g.points(); ++i)
        for (std::size_t k = 0; k < g.points(); ++k) {
            auto x = QTElement::monomial(th, box, freq_of(g, i));
            auto y = QTElement::monomial(th, box, freq_of(g, k));
            auto xy = qt_multiply(x, y, 2 * box);
            worst = std::max(worst, (qt_represent(xy, rep) - mono[i] * mono[k]).cwiseAbs().maxCoeff());
        }
    return worst;
}

cplx qt_trace(const QTElement& x)
{
    std::vector<int> zero(x.theta.d, 0);
    return x.coeff(zero);
}

int qt_quadrature_size(int box)
{
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(4 * box)));
}

double qt_lp_norm(const QTElement& x, double p)
{
    if (p == 2.0) {
        double s = 0;
        for (auto v : x.c)
            s += std::norm(v);
        return std::sqrt(s);
    }
    if (p != 1.0 && p != p_inf)
        throw ValidationError("qt_lp_norm: p must be 1, 2 or inf");
    auto rep = QTRepresentation::build(x.theta);
    auto g = x.index();
    const int G = qt_quadrature_size(x.box);
    GridSpec zg{x.theta.d, G, 1};
    std::vector<std::size_t> nz;
    std::vector<Mat> mono;
    for (std::size_t i = 0; i < g.points(); ++i)
        if (x.c[i] != cplx(0)) {
            auto m = freq_of(g, i);
            nz.push_back(i);
            mono.push_back(x.c[i] * rep.monomial(m.data()));
        }
    double acc = 0;
    for (std::size_t z = 0; z < zg.points(); ++z) {
        Mat X = Mat::Zero(rep.q, rep.q);
        for (std::size_t t = 0; t < nz.size(); ++t) {
            double ph = 0;
            for (int a = 0; a < zg.d; ++a)
                ph += zg.coord(z, a) * g.freq(nz[t], a);
            X += e1(ph) * mono[t];
        }
        Eigen::JacobiSVD<Mat> svd(X);
        const auto& sv = svd.singularValues();
        if (p == 1.0)
            acc += sv.sum() / rep.q;
        else
            acc = std::max(acc, sv.size() ? sv(0) : 0.0);
    }
    return p == 1.0 ? acc / double(zg.points()) : acc;
}

OpValuedFunction transference_embed(const QTElement& x, int n)
{
    auto rep = QTRepresentation::build(x.theta);
    if (n == 0)
        n = qt_quadrature_size(x.box);
    if (n < x.box)
        throw ValidationError("transference_embed: grid smaller than the frequency box");
    GridSpec g{x.theta.d, n, rep.q};
    auto gx = x.index();
    std::vector<cplx> c(g.values(), cplx(0));
    for (std::size_t i = 0; i < gx.points(); ++i) {
        if (x.c[i] == cplx(0))
            continue;
        auto m = freq_of(gx, i);
        MMap(c.data() + g.freq_index(m.data()) * g.block(), rep.q, rep.q) = x.c[i] * rep.monomial(m.data());
    }
    return OpValuedFunction::from_coeffs(g, std::move(c));
}

QTField QTField::embed(const QTElement& x, int zn)
{
    QTField f;
    f.theta = x.theta;
    f.box = x.box;
    f.zgrid = {x.theta.d, zn, 1};
    f.zgrid.validate();
    auto g = x.index();
    f.f.assign(g.points(), std::vector<cplx>(f.zgrid.points()));
    for (std::size_t i = 0; i < g.points(); ++i)
        for (std::size_t z = 0; z < f.zgrid.points(); ++z) {
            double ph = 0;
            for (int a = 0; a < g.d; ++a)
                ph += f.zgrid.coord(z, a) * g.freq(i, a);
            f.f[i][z] = x.c[i] * e1(ph);
        }
    return f;
}

double QTField::l2() const
{
    double s = 0;
    for (const auto& fm : f)
        for (auto v : fm)
            s += std::norm(v);
    return std::sqrt(s / double(zgrid.points()));
}

QTField QTField::operator-(const QTField& o) const
{
    QTField r = *this;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t z = 0; z < f[i].size(); ++z)
            r.f[i][z] -= o.f[i][z];
    return r;
}

QTField conditional_expectation(const QTField& f)
{
    if (f.zgrid.n < f.box)
        throw ValidationError("conditional_expectation: z grid smaller than the frequency box");
    QTField r = f;
    GridSpec g{f.theta.d, f.box, 1};
    for (std::size_t i = 0; i < g.points(); ++i) {
        auto m = freq_of(g, i);
        // (f_m)^(m) = int f_m(w) w^{-m} dw
        auto co = fft_forward(f.zgrid, 1, f.f[i]);
        cplx a = co[f.zgrid.freq_index(m.data())];
        for (std::size_t z = 0; z < f.zgrid.points(); ++z) {
            double ph = 0;
            for (int ax = 0; ax < g.d; ++ax)
                ph += f.zgrid.coord(z, ax) * m[ax];
            r.f[i][z] = a * e1(ph);
        }
    }
    return r;
}

QTApplyResult qt_pdo_apply(const QTSymbolFn& sigma, const QTElement& x, int out_box)
{
    const int full = 4 * x.box;
    QTElement acc = QTElement::zero(x.theta, full);
    auto gx = x.index(), ga = acc.index();
    const int d = x.theta.d;
    std::vector<int> k(d);
    for (std::size_t i = 0; i < gx.points(); ++i) {
        if (x.c[i] == cplx(0))
            continue;
        auto m = freq_of(gx, i);
        QTElement s = sigma(m, x.box);
        if (!same_theta(s.theta, x.theta))
            throw ValidationError("qt_pdo_apply: symbol theta differs from the element");
        if (s.box > 2 * x.box)
            throw ValidationError("qt_pdo_apply: symbol box too large");
        auto gs = s.index();
        for (std::size_t t = 0; t < gs.points(); ++t) {
            if (s.c[t] == cplx(0))
                continue;
            auto kk = freq_of(gs, t);
            for (int a = 0; a < d; ++a)
                k[a] = kk[a] + m[a];
            acc.c[ga.freq_index(k.data())] += s.c[t] * x.c[i] * qt_cocycle(x.theta, kk.data(), m.data());
        }
    }
    QTApplyResult r;
    r.y = acc.resized(out_box > 0 ? out_box : x.box);
    r.truncation_loss = r.y.truncation_loss;
    return r;
}

QTElement qt_pdo_apply_scalar(const std::function<cplx(const std::vector<int>&)>& sigma, const QTElement& x)
{
    QTElement r = x;
    auto g = x.index();
    for (std::size_t i = 0; i < g.points(); ++i)
        r.c[i] *= sigma(freq_of(g, i));
    return r;
}

ClassReport qt_symbol_class(const QTSymbolFn& sigma, const ThetaMatrix& th, int box, SymbolClaim claim, int max_gamma,
                            int max_beta)
{
    claim.validate();
    const int d = th.d;
    GridSpec g{d, box, 1};
    ClassReport rep;
    rep.claim = claim;
    rep.max_gamma = max_gamma;
    rep.max_beta = max_beta;
    for (const auto& gam : multi_indices(d, max_gamma))
        for (const auto& beta : multi_indices(d, max_beta)) {
            int ng = 0, nb = 0;
            for (int a = 0; a < d; ++a) {
                ng += gam[a];
                nb += beta[a];
            }
            ClassEntry e;
            e.gamma = gam;
            e.beta = beta;
            e.exponent = claim.n - claim.rho * ng + claim.delta * nb;
            for (std::size_t i = 0; i < g.points(); ++i) {
                auto m = freq_of(g, i);
                bool inside = true;
                for (int a = 0; a < d; ++a)
                    inside = inside && m[a] + gam[a] < box / 2;
                if (!inside)
                    continue;
                // forward difference Delta^gamma, sum over nu <= gamma
                QTElement diff = QTElement::zero(th, box);
                std::vector<int> nu(d, 0);
                while (true) {
                    double coef = 1;
                    int sign = 0;
                    std::vector<int> mm = m;
                    for (int a = 0; a < d; ++a) {
                        coef *= std::tgamma(gam[a] + 1) / (std::tgamma(nu[a] + 1) * std::tgamma(gam[a] - nu[a] + 1));
                        sign += gam[a] - nu[a];
                        mm[a] += nu[a];
                    }
                    auto s = sigma(mm, box).resized(box);
                    diff = diff + s.scaled((sign % 2 ? -1.0 : 1.0) * coef);
                    int a = 0;
                    while (a < d && ++nu[a] > gam[a])
                        nu[a++] = 0;
                    if (a == d)
                        break;
                }
                double nrm = 0;
                for (std::size_t t = 0; t < g.points(); ++t) {
                    if (diff.c[t] == cplx(0))
                        continue;
                    double w = 1;
                    for (int a = 0; a < d; ++a)
                        w *= std::pow(two_pi * std::abs(g.freq(t, a)), beta[a]);
                    nrm += w * std::abs(diff.c[t]);
                }
                double r = 0;
                for (int a = 0; a < d; ++a)
                    r += double(m[a]) * m[a];
                e.constant = std::max(e.constant, nrm / std::pow(1.0 + std::sqrt(r), e.exponent));
            }
            rep.entries.push_back(e);
        }
    return rep;
}

namespace {

int qt_levels(const GridSpec& g)
{
    double rmax = std::sqrt(double(g.d)) * g.n / 2;
    int L = 0;
    while (std::ldexp(1.0, L - 1) <= rmax)
        ++L;
    return L;
}

} // namespace

double qt_tl_norm(const QTElement& x, double alpha, double p)
{
    if (p != 1.0 && p != 2.0)
        throw Unsupported("qt_tl_norm: p must be 1 or 2");
    const auto& prof = RadialProfile::active();
    auto g = x.index();
    const int L = qt_levels(g);
    std::vector<int> zero(g.d, 0);
    double head = std::abs(x.coeff(zero));
    if (p == 2.0) {
        double s = 0;
        for (std::size_t i = 0; i < g.points(); ++i) {
            double r = g.freq_norm(i);
            if (r == 0 || x.c[i] == cplx(0))
                continue;
            double w = 0;
            for (int j = 0; j < L; ++j)
                w += std::pow(4.0, j * alpha) * std::pow(prof.phi(std::ldexp(r, -j)), 2);
            s += w * std::norm(x.c[i]);
        }
        return head + std::sqrt(s);
    }
    auto rep = QTRepresentation::build(x.theta);
    const int q = rep.q;
    GridSpec zg{g.d, qt_quadrature_size(x.box), q};
    std::vector<Mat> mono(g.points());
    for (std::size_t i = 0; i < g.points(); ++i)
        if (x.c[i] != cplx(0)) {
            auto m = freq_of(g, i);
            mono[i] = x.c[i] * rep.monomial(m.data());
        }
    std::vector<cplx> S(zg.values(), cplx(0)), c(zg.values()), y(zg.values());
    for (int j = 0; j < L; ++j) {
        std::fill(c.begin(), c.end(), cplx(0));
        bool any = false;
        for (std::size_t i = 0; i < g.points(); ++i) {
            double r = g.freq_norm(i);
            if (r == 0 || x.c[i] == cplx(0))
                continue;
            double ph = prof.phi(std::ldexp(r, -j));
            if (ph == 0)
                continue;
            any = true;
            auto m = freq_of(g, i);
            MMap(c.data() + zg.freq_index(m.data()) * zg.block(), q, q) = ph * mono[i];
        }
        if (!any)
            continue;
        fft_inverse(zg, zg.block(), c.data(), y.data());
        double w = std::pow(4.0, j * alpha);
        for (std::size_t z = 0; z < zg.points(); ++z) {
            CMap Y(y.data() + z * zg.block(), q, q);
            MMap(S.data() + z * zg.block(), q, q).noalias() += w * (Y.adjoint() * Y);
        }
    }
    double acc = 0;
    for (std::size_t z = 0; z < zg.points(); ++z) {
        Eigen::SelfAdjointEigenSolver<Mat> es(CMap(S.data() + z * zg.block(), q, q));
        for (int k = 0; k < q; ++k)
            acc += std::sqrt(std::max(es.eigenvalues()(k), 0.0));
    }
    return head + acc / (double(q) * zg.points());
}

QTSweep qt_boundedness_sweep(const QTSymbolFn& sigma, SymbolClaim claim, const ThetaMatrix& th, double alpha, double p,
                             const std::vector<int>& boxes, int trials, std::uint64_t seed)
{
    if (boxes.empty())
        throw ValidationError("qt sweep: no boxes");
    auto cls = qt_symbol_class(sigma, th, boxes.front(), claim, 1, 1);
    if (!(cls.max_constant() <= 100.0))
        throw ValidationError("qt sweep: symbol fails the toroidal class check for its claim");
    QTSweep sw;
    sw.boxes = boxes;
    sw.trials = trials + 1;
    for (int B : boxes) {
        Rng rng(seed + static_cast<std::uint64_t>(B));
        std::vector<QTElement> inputs;
        for (int t = 0; t < trials; ++t)
            inputs.push_back(QTElement::random(th, B, rng));
        // coherent input sum_j U_1^{2^j}, j = 1..log2(B)-2
        QTElement coh = QTElement::zero(th, B);
        std::vector<int> m(th.d, 0);
        for (int j = 1; (1 << (j + 2)) <= B; ++j) {
            m[0] = 1 << j;
            coh.c[coh.index().freq_index(m.data())] = 1.0;
        }
        inputs.push_back(coh);
        double best = 0;
        for (const auto& x : inputs) {
            double nx = qt_tl_norm(x, alpha, p);
            if (nx == 0)
                continue;
            auto y = qt_pdo_apply(sigma, x, 2 * B).y;
            best = std::max(best, qt_tl_norm(y, alpha, p) / nx);
        }
        sw.ratios.push_back(best);
    }
    sw.growth = sw.ratios.back() / sw.ratios.front();
    sw.strictly_increasing = true;
    for (std::size_t i = 1; i < sw.ratios.size(); ++i)
        sw.strictly_increasing = sw.strictly_increasing && sw.ratios[i] > sw.ratios[i - 1];
    sw.bounded = sw.growth <= 2.0;
    return sw;
}

QTSymbolFn qt_scalar_symbol(std::function<cplx(const std::vector<int>&)> f, const ThetaMatrix& th)
{
    return [f = std::move(f), th](const std::vector<int>& m, int box) {
        return QTElement::monomial(th, box, std::vector<int>(th.d, 0), f(m));
    };
}

QTSymbolFn qt_bessel_symbol(const ThetaMatrix& th, double order)
{
    return qt_scalar_symbol(
        [order](const std::vector<int>& m) {
            double r2 = 0;
            for (int v : m)
                r2 += double(v) * v;
            return cplx(std::pow(1.0 + r2, order / 2));
        },
        th);
}

QTSymbolFn qt_exotic_symbol(const ThetaMatrix& th)
{
    return [th](const std::vector<int>& m, int box) {
        const auto& prof = RadialProfile::active();
        double r2 = 0;
        for (int v : m)
            r2 += double(v) * v;
        double r = std::sqrt(r2);
        QTElement s = QTElement::zero(th, box);
        std::vector<int> k(th.d, 0);
        for (int j = 1; (1 << (j + 2)) <= box; ++j) {
            double ph = prof.phi(std::ldexp(r, -j));
            if (ph == 0)
                continue;
            k[0] = -(1 << j);
            s.c[s.index().freq_index(k.data())] += ph;
        }
        return s;
    };
}

namespace {

constexpr char qt_magic[4] = {'N', 'C', 'Q', 'T'};

template <class T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is)
        throw DataError("qt dump: truncated");
    return v;
}

} // namespace

void write_qt_element(const std::string& path, const QTElement& x)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("qt dump: cannot write " + path);
    os.write(qt_magic, 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(x.theta.d));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(x.box));
    put<std::uint32_t>(os, x.theta.rational ? 1u : 0u);
    put<std::int64_t>(os, x.theta.rational ? x.theta.den : 0);
    for (std::size_t i = 0; i < x.theta.v.size(); ++i) {
        if (x.theta.rational)
            put<std::int64_t>(os, x.theta.num[i]);
        else
            put<double>(os, x.theta.v[i]);
    }
    put<std::uint64_t>(os, x.c.size());
    for (auto v : x.c) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
}

QTElement read_qt_element(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("qt dump: cannot open " + path);
    char mg[4];
    is.read(mg, 4);
    if (!is || !std::equal(mg, mg + 4, qt_magic))
        throw DataError("qt dump: bad magic");
    if (get<std::uint32_t>(is) != 1)
        throw DataError("qt dump: unknown version");
    int d = static_cast<int>(get<std::uint32_t>(is));
    int box = static_cast<int>(get<std::uint32_t>(is));
    bool rational = get<std::uint32_t>(is) == 1;
    auto den = get<std::int64_t>(is);
    if (d < 1 || d > 3)
        throw DataError("qt dump: bad dimension");
    ThetaMatrix th = ThetaMatrix::zero(d);
    th.rational = rational;
    th.den = rational ? den : 0;
    if (!rational)
        th.num.clear();
    for (int i = 0; i < d * d; ++i) {
        if (rational) {
            th.num[i] = get<std::int64_t>(is);
            th.v[i] = double(th.num[i]) / double(den);
        } else {
            th.v[i] = get<double>(is);
        }
    }
    th.validate();
    QTElement x = QTElement::zero(th, box);
    if (get<std::uint64_t>(is) != x.c.size())
        throw DataError("qt dump: coefficient count does not match the box");
    for (auto& v : x.c) {
        double re = get<double>(is);
        double im = get<double>(is);
        v = {re, im};
    }
    return x;
}

} // namespace ncpdo
