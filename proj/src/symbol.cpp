#include "ncpdo/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ncpdo {

void SymbolClaim::validate() const
{
    if (rho < 0 || rho > 1 || delta < 0 || delta > 1)
        throw ValidationError("symbol claim: rho and delta must lie in [0,1]");
}

namespace {

double g_budget_mb = 1024.0;

void add_scaled(std::vector<cplx>& acc, const std::vector<cplx>& x, cplx c)
{
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] += c * x[i];
}

// spectral multi-derivative of batched samples; odd orders drop the Nyquist mode
std::vector<cplx> spectral_derivative(const GridSpec& g, std::size_t batch, const std::vector<cplx>& v,
                                      const std::vector<int>& gamma)
{
    int total = 0;
    for (int x : gamma)
        total += x;
    if (total == 0)
        return v;
    auto c = fft_forward(g, batch, v);
    for (std::size_t i = 0; i < g.points(); ++i) {
        cplx f = 1.0;
        for (int a = 0; a < g.d; ++a) {
            if (gamma[a] == 0)
                continue;
            int m = g.freq(i, a);
            if (m == -g.n / 2 && (gamma[a] & 1))
                f = 0.0;
            else
                f *= std::pow(cplx(0, two_pi * m), gamma[a]);
        }
        for (std::size_t b = 0; b < batch; ++b)
            c[i * batch + b] *= f;
    }
    return fft_inverse(g, batch, c);
}

// one lattice difference along axis; kind 0 central first (half sum), 1 second central, 2 forward
std::vector<cplx> lattice_step(const GridSpec& g, std::size_t block, const std::vector<cplx>& v, int axis, int kind)
{
    std::vector<cplx> out(v.size(), cplx(0));
    std::vector<int> m(g.d);
    auto at = [&](std::size_t i, int shift, std::size_t b) -> cplx {
        for (int a = 0; a < g.d; ++a)
            m[a] = g.freq(i, a);
        m[axis] += shift;
        std::size_t j = g.freq_index(m.data());
        return j == GridSpec::npos ? cplx(0) : v[j * block + b];
    };
    for (std::size_t i = 0; i < g.points(); ++i)
        for (std::size_t b = 0; b < block; ++b) {
            cplx r;
            if (kind == 0)
                r = 0.5 * (at(i, 1, b) - at(i, -1, b));
            else if (kind == 1)
                r = at(i, 1, b) - 2.0 * v[i * block + b] + at(i, -1, b);
            else
                r = at(i, 1, b) - v[i * block + b];
            out[i * block + b] = r;
        }
    return out;
}

std::vector<cplx> lattice_difference(const GridSpec& g, std::size_t block, std::vector<cplx> v,
                                     const std::vector<int>& beta, bool forward)
{
    for (int a = 0; a < g.d; ++a) {
        int k = beta[a];
        if (forward) {
            for (int i = 0; i < k; ++i)
                v = lattice_step(g, block, v, a, 2);
        } else {
            for (int i = 0; i < k / 2; ++i)
                v = lattice_step(g, block, v, a, 1);
            if (k & 1)
                v = lattice_step(g, block, v, a, 0);
        }
    }
    return v;
}

// whether the difference stencil of beta at lattice point i stays inside the box
bool stencil_inside(const GridSpec& g, std::size_t i, const std::vector<int>& beta, bool forward)
{
    for (int a = 0; a < g.d; ++a) {
        int m = g.freq(i, a);
        int lo = forward ? 0 : -((beta[a] + 1) / 2);
        int hi = forward ? beta[a] : (beta[a] + 1) / 2;
        if (m + lo < -g.n / 2 || m + hi > g.n / 2 - 1)
            return false;
    }
    return true;
}

double factorial(int k)
{
    double f = 1;
    for (int i = 2; i <= k; ++i)
        f *= i;
    return f;
}

} // namespace

void set_memory_budget_mb(double mb) { g_budget_mb = mb; }
double memory_budget_mb() { return g_budget_mb; }

void require_budget(std::size_t bytes, const std::string& what)
{
    if (double(bytes) > g_budget_mb * 1024.0 * 1024.0)
    {
        char msg[160];
        std::snprintf(msg, sizeof msg, ": needs %.3g MB, budget is %.3g MB", double(bytes) / (1024.0 * 1024.0),
                      g_budget_mb);
        throw BudgetError(what + msg);
    }
}

Symbol Symbol::separable(const GridSpec& g, std::vector<Term> terms, SymbolClaim claim)
{
    g.validate();
    claim.validate();
    for (const auto& t : terms)
        if (t.a.size() != g.points() || t.B.size() != g.values())
            throw StructuralError("symbol: separable term has wrong shape");
    require_budget(terms.size() * (g.points() + g.values()) * sizeof(cplx), "separable symbol table");
    Symbol s;
    s.g_ = g;
    s.claim_ = claim;
    s.terms_ = std::move(terms);
    return s;
}

Symbol Symbol::dense(const GridSpec& g, std::vector<cplx> table, SymbolClaim claim)
{
    g.validate();
    claim.validate();
    if (table.size() != g.points() * g.values())
        throw StructuralError("symbol: dense table has wrong shape");
    require_budget(table.size() * sizeof(cplx), "dense symbol table");
    Symbol s;
    s.g_ = g;
    s.claim_ = claim;
    s.dense_ = true;
    s.table_ = std::move(table);
    return s;
}

Symbol Symbol::multiplier(const GridSpec& g, const std::vector<cplx>& m, SymbolClaim claim)
{
    if (m.size() != g.points())
        throw StructuralError("symbol: multiplier table has wrong shape");
    Term t;
    t.a.assign(g.points(), cplx(1));
    t.B.assign(g.values(), cplx(0));
    for (std::size_t i = 0; i < g.points(); ++i)
        for (int a = 0; a < g.q; ++a)
            t.B[i * g.block() + a * (g.q + 1)] = m[i];
    return separable(g, {t}, claim);
}

Symbol Symbol::multiplier(const GridSpec& g, const std::vector<double>& m, SymbolClaim claim)
{
    return multiplier(g, std::vector<cplx>(m.begin(), m.end()), claim);
}

Symbol Symbol::pointwise(const OpValuedFunction& b, SymbolClaim claim)
{
    const auto& g = b.grid();
    std::vector<Term> terms;
    for (int r = 0; r < g.q; ++r)
        for (int c = 0; c < g.q; ++c) {
            Term t;
            t.a.resize(g.points());
            for (std::size_t i = 0; i < g.points(); ++i)
                t.a[i] = b.sample(i)(r, c);
            t.B.assign(g.values(), cplx(0));
            for (std::size_t i = 0; i < g.points(); ++i)
                t.B[i * g.block() + r + c * g.q] = 1.0;
            terms.push_back(std::move(t));
        }
    return separable(g, std::move(terms), claim);
}

Symbol Symbol::identity(const GridSpec& g)
{
    return multiplier(g, std::vector<double>(g.points(), 1.0));
}

Symbol Symbol::with_claim(SymbolClaim c) const
{
    c.validate();
    Symbol s = *this;
    s.claim_ = c;
    return s;
}

Mat Symbol::value(std::size_t s, std::size_t m) const
{
    const int q = g_.q;
    const std::size_t B = g_.block();
    if (dense_)
        return CMap(table_.data() + (s * g_.points() + m) * B, q, q);
    Mat v = Mat::Zero(q, q);
    for (const auto& t : terms_)
        v += t.a[s] * CMap(t.B.data() + m * B, q, q);
    return v;
}

std::vector<cplx> Symbol::row(std::size_t s) const
{
    if (dense_) {
        auto first = table_.begin() + static_cast<std::ptrdiff_t>(s * g_.values());
        return std::vector<cplx>(first, first + static_cast<std::ptrdiff_t>(g_.values()));
    }
    std::vector<cplx> r(g_.values(), cplx(0));
    for (const auto& t : terms_)
        if (t.a[s] != cplx(0))
            add_scaled(r, t.B, t.a[s]);
    return r;
}

std::size_t Symbol::dense_bytes() const { return g_.points() * g_.values() * sizeof(cplx); }

Symbol Symbol::to_dense() const
{
    if (dense_)
        return *this;
    require_budget(dense_bytes(), "dense symbol table");
    std::vector<cplx> tab(g_.points() * g_.values());
    for (std::size_t s = 0; s < g_.points(); ++s) {
        auto r = row(s);
        std::copy(r.begin(), r.end(), tab.begin() + static_cast<std::ptrdiff_t>(s * g_.values()));
    }
    return dense(g_, std::move(tab), claim_);
}

Symbol Symbol::operator+(const Symbol& o) const
{
    if (!(o.g_ == g_))
        throw StructuralError("symbol: grid mismatch");
    if (dense_ || o.dense_) {
        Symbol a = to_dense(), b = o.to_dense();
        for (std::size_t i = 0; i < a.table_.size(); ++i)
            a.table_[i] += b.table_[i];
        return a;
    }
    Symbol s = *this;
    s.terms_.insert(s.terms_.end(), o.terms_.begin(), o.terms_.end());
    return s;
}

Symbol Symbol::scaled(cplx c) const
{
    Symbol s = *this;
    if (dense_)
        for (auto& v : s.table_)
            v *= c;
    else
        for (auto& t : s.terms_)
            for (auto& v : t.a)
                v *= c;
    return s;
}

Symbol Symbol::operator*(const Symbol& o) const
{
    if (!(o.g_ == g_))
        throw StructuralError("symbol: grid mismatch");
    const int q = g_.q;
    const std::size_t B = g_.block(), P = g_.points();
    if (dense_ || o.dense_) {
        Symbol a = to_dense(), b = o.to_dense();
        for (std::size_t i = 0; i < P * P; ++i) {
            Mat prod = CMap(a.table_.data() + i * B, q, q) * CMap(b.table_.data() + i * B, q, q);
            MMap(a.table_.data() + i * B, q, q) = prod;
        }
        return a;
    }
    std::vector<Term> terms;
    for (const auto& t1 : terms_)
        for (const auto& t2 : o.terms_) {
            Term t;
            t.a.resize(P);
            for (std::size_t i = 0; i < P; ++i)
                t.a[i] = t1.a[i] * t2.a[i];
            t.B.resize(g_.values());
            for (std::size_t i = 0; i < P; ++i)
                MMap(t.B.data() + i * B, q, q) = CMap(t1.B.data() + i * B, q, q) * CMap(t2.B.data() + i * B, q, q);
            terms.push_back(std::move(t));
        }
    Symbol s = *this;
    s.terms_ = std::move(terms);
    return s;
}

Symbol Symbol::adjoint_values() const
{
    const int q = g_.q;
    const std::size_t B = g_.block();
    Symbol s = *this;
    if (dense_) {
        for (std::size_t i = 0; i < g_.points() * g_.points(); ++i)
            MMap(s.table_.data() + i * B, q, q) = CMap(table_.data() + i * B, q, q).adjoint();
        return s;
    }
    for (auto& t : s.terms_) {
        for (auto& v : t.a)
            v = std::conj(v);
        for (std::size_t i = 0; i < g_.points(); ++i) {
            Mat adj = CMap(t.B.data() + i * B, q, q).adjoint();
            MMap(t.B.data() + i * B, q, q) = adj;
        }
    }
    return s;
}

Symbol Symbol::times_lattice(const std::vector<double>& w) const
{
    if (w.size() != g_.points())
        throw StructuralError("symbol: lattice weight has wrong shape");
    const std::size_t B = g_.block(), P = g_.points();
    Symbol s = *this;
    if (dense_) {
        for (std::size_t si = 0; si < P; ++si)
            for (std::size_t m = 0; m < P; ++m)
                for (std::size_t b = 0; b < B; ++b)
                    s.table_[(si * P + m) * B + b] *= w[m];
        return s;
    }
    for (auto& t : s.terms_)
        for (std::size_t m = 0; m < P; ++m)
            for (std::size_t b = 0; b < B; ++b)
                t.B[m * B + b] *= w[m];
    return s;
}

Symbol Symbol::conjugated(const Mat& u) const
{
    const int q = g_.q;
    const std::size_t B = g_.block();
    Symbol s = *this;
    auto conj_block = [&](cplx* p) {
        Mat v = u * CMap(p, q, q) * u.adjoint();
        MMap(p, q, q) = v;
    };
    if (dense_) {
        for (std::size_t i = 0; i < g_.points() * g_.points(); ++i)
            conj_block(s.table_.data() + i * B);
    } else {
        for (auto& t : s.terms_)
            for (std::size_t i = 0; i < g_.points(); ++i)
                conj_block(t.B.data() + i * B);
    }
    return s;
}

Symbol Symbol::ds(const std::vector<int>& gamma) const
{
    Symbol s = *this;
    if (dense_) {
        s.table_ = spectral_derivative(g_, g_.values(), table_, gamma);
        return s;
    }
    for (auto& t : s.terms_)
        t.a = spectral_derivative(g_, 1, t.a, gamma);
    return s;
}

Symbol Symbol::dxi(const std::vector<int>& beta, bool forward) const
{
    Symbol s = *this;
    if (dense_) {
        const std::size_t V = g_.values();
        for (std::size_t si = 0; si < g_.points(); ++si) {
            std::vector<cplx> r(table_.begin() + static_cast<std::ptrdiff_t>(si * V),
                                table_.begin() + static_cast<std::ptrdiff_t>((si + 1) * V));
            r = lattice_difference(g_, g_.block(), std::move(r), beta, forward);
            std::copy(r.begin(), r.end(), s.table_.begin() + static_cast<std::ptrdiff_t>(si * V));
        }
        return s;
    }
    for (auto& t : s.terms_)
        t.B = lattice_difference(g_, g_.block(), std::move(t.B), beta, forward);
    return s;
}

std::vector<std::vector<int>> multi_indices(int d, int order)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(d, 0);
    for (int total = 0; total <= order; ++total) {
        // compositions of `total` into d parts, lexicographically descending
        std::function<void(int, int)> rec = [&](int axis, int left) {
            if (axis == d - 1) {
                cur[axis] = left;
                out.push_back(cur);
                return;
            }
            for (int k = left; k >= 0; --k) {
                cur[axis] = k;
                rec(axis + 1, left - k);
            }
        };
        rec(0, total);
    }
    return out;
}

double ClassReport::max_constant() const
{
    double m = 0;
    for (const auto& e : entries)
        m = std::max(m, e.constant);
    return m;
}

const ClassEntry& ClassReport::at(const std::vector<int>& gamma, const std::vector<int>& beta) const
{
    for (const auto& e : entries)
        if (e.gamma == gamma && e.beta == beta)
            return e;
    throw ValidationError("class report: no entry for the requested orders");
}

namespace {

ClassReport check_class(const Symbol& sym, int max_gamma, int max_beta, bool forward)
{
    sym.claim().validate();
    if (max_gamma < 0 || max_beta < 0 || max_gamma > 4 || max_beta > 4)
        throw ValidationError("class check: orders must lie in 0..4");
    const auto& g = sym.grid();
    const auto& c = sym.claim();
    ClassReport rep;
    rep.claim = c;
    rep.max_gamma = max_gamma;
    rep.max_beta = max_beta;
    const std::size_t P = g.points(), B = g.block();
    std::vector<double> radius(P);
    for (std::size_t i = 0; i < P; ++i)
        radius[i] = g.freq_norm(i);
    for (const auto& gamma : multi_indices(g.d, max_gamma)) {
        Symbol sg = sym.ds(gamma);
        int gabs = 0;
        for (int x : gamma)
            gabs += x;
        for (const auto& beta : multi_indices(g.d, max_beta)) {
            int babs = 0;
            for (int x : beta)
                babs += x;
            Symbol sgb = sg.dxi(beta, forward);
            ClassEntry e;
            e.gamma = gamma;
            e.beta = beta;
            e.exponent = c.n + c.delta * gabs - c.rho * babs;
            std::vector<double> w(P);
            std::vector<char> ok(P);
            for (std::size_t i = 0; i < P; ++i) {
                w[i] = std::pow(1.0 + radius[i], -e.exponent);
                ok[i] = stencil_inside(g, i, beta, forward);
            }
            double best = 0;
            for (std::size_t s = 0; s < P; ++s) {
                auto r = sgb.row(s);
                for (std::size_t m = 0; m < P; ++m)
                    if (ok[m])
                        best = std::max(best, fast_op_norm(r.data() + m * B, g.q) * w[m]);
            }
            e.constant = best;
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

} // namespace

ClassReport check_symbol_class(const Symbol& s, int max_gamma, int max_beta)
{
    return check_class(s, max_gamma, max_beta, false);
}

ClassReport check_symbol_class(const ToroidalSymbol& s, int max_gamma, int max_beta)
{
    return check_class(s.values, max_gamma, max_beta, true);
}

std::vector<cplx> kernel_from_symbol(const Symbol& s)
{
    const auto& g = s.grid();
    const std::size_t P = g.points(), V = g.values();
    require_budget(P * V * sizeof(cplx), "kernel_from_symbol");
    std::vector<cplx> K(P * V);
    for (std::size_t si = 0; si < P; ++si) {
        auto r = s.row(si);
        fft_inverse(g, g.block(), r.data(), K.data() + si * V);
    }
    return K;
}

OpValuedFunction apply_with_kernel(const std::vector<cplx>& K, const GridSpec& g, const OpValuedFunction& f)
{
    const std::size_t P = g.points(), V = g.values(), B = g.block();
    const int q = g.q;
    if (K.size() != P * V || !(f.grid() == g))
        throw StructuralError("apply_with_kernel: shape mismatch");
    std::vector<cplx> out(V, cplx(0));
    std::vector<int> ks(g.d);
    for (std::size_t s = 0; s < P; ++s) {
        Mat acc = Mat::Zero(q, q);
        for (std::size_t t = 0; t < P; ++t) {
            for (int a = 0; a < g.d; ++a)
                ks[a] = g.axis_index(s, a) - g.axis_index(t, a);
            std::size_t st = g.sample_index(ks.data());
            acc += CMap(K.data() + s * V + st * B, q, q) * f.sample(t);
        }
        MMap(out.data() + s * B, q, q) = acc * g.cell();
    }
    return OpValuedFunction::from_samples(g, std::move(out));
}

KernelDecayReport kernel_decay_report(const Symbol& s, const std::vector<int>& gamma, const std::vector<int>& beta,
                                      std::size_t s_index)
{
    const auto& g = s.grid();
    const std::size_t P = g.points(), B = g.block();
    int order = 0;
    for (int x : gamma)
        order += x;
    for (int x : beta)
        order += x;
    KernelDecayReport rep;
    rep.predicted = -(order + g.d + s.claim().n);
    rep.no_singular_decay = rep.predicted >= 0;
    rep.far_field_note = "extra decay for |t|>1 is not observable on a period-1 torus; untested";

    auto r = s.ds(gamma).row(s_index);
    for (std::size_t i = 0; i < P; ++i) {
        cplx f = 1.0;
        for (int a = 0; a < g.d; ++a)
            if (beta[a])
                f *= std::pow(cplx(0, two_pi * g.freq(i, a)), beta[a]);
        for (std::size_t b = 0; b < B; ++b)
            r[i * B + b] *= f;
    }
    std::vector<cplx> K(r.size());
    fft_inverse(g, B, r.data(), K.data());

    const double lo = 2.0 / g.n, hi = 0.25;
    std::vector<double> edges;
    for (double e = lo; e <= hi * (1 + 1e-12); e *= std::sqrt(2.0))
        edges.push_back(e);
    std::vector<double> mx(edges.size() - 1, 0.0);
    for (std::size_t t = 0; t < P; ++t) {
        double r2 = 0;
        for (int a = 0; a < g.d; ++a) {
            double u = g.coord(t, a);
            if (u >= 0.5)
                u -= 1.0;
            r2 += u * u;
        }
        double rad = std::sqrt(r2);
        for (std::size_t k = 0; k + 1 < edges.size(); ++k)
            if (rad >= edges[k] && rad < edges[k + 1])
                mx[k] = std::max(mx[k], fast_op_norm(K.data() + t * B, g.q));
    }
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < mx.size(); ++k)
        if (mx[k] > 0) {
            double mid = std::sqrt(edges[k] * edges[k + 1]);
            rep.bin_radius.push_back(mid);
            rep.bin_value.push_back(mx[k]);
            xs.push_back(std::log(mid));
            ys.push_back(std::log(mx[k]));
        }
    if (xs.size() < 4)
        throw ConfigError("kernel_decay_report: fewer than 4 usable bins, grid too coarse");
    double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - rep.slope * sx) / n;
    rep.constant = std::exp(icpt);
    double res = 0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        res += std::pow(ys[k] - icpt - rep.slope * xs[k], 2);
    rep.residual = std::sqrt(res / n);
    return rep;
}

std::vector<Symbol> dyadic_pieces(const Symbol& s, const LPFamily& fam)
{
    if (fam.grid.d != s.grid().d || fam.grid.n != s.grid().n)
        throw StructuralError("dyadic_pieces: lattice mismatch");
    std::vector<Symbol> out;
    for (const auto& w : fam.hat_phi)
        out.push_back(s.times_lattice(w));
    return out;
}

Symbol compose_symbols_asymptotic(const Symbol& s1, const Symbol& s2, int N0)
{
    if (N0 < 1 || N0 > 6)
        throw ValidationError("composition: N0 must lie in 1..6 (finite differences in xi degrade beyond)");
    if (!(s1.grid() == s2.grid()))
        throw StructuralError("composition: grid mismatch");
    Symbol out;
    bool first = true;
    for (const auto& gamma : multi_indices(s1.grid().d, N0 - 1)) {
        int k = 0;
        double fact = 1;
        for (int x : gamma) {
            k += x;
            fact *= factorial(x);
        }
        cplx coef = std::pow(cplx(0, two_pi), -k) / fact;
        Symbol t = (s1.dxi(gamma) * s2.ds(gamma)).scaled(coef);
        out = first ? t : out + t;
        first = false;
    }
    SymbolClaim c;
    c.n = s1.claim().n + s2.claim().n;
    c.rho = 1.0;
    c.delta = std::max(s1.claim().delta, s2.claim().delta);
    return out.with_claim(c);
}

Symbol adjoint_symbol_asymptotic(const Symbol& s, int N0)
{
    if (N0 < 1 || N0 > 6)
        throw ValidationError("adjoint: N0 must lie in 1..6 (finite differences in xi degrade beyond)");
    Symbol star = s.adjoint_values();
    Symbol out;
    bool first = true;
    for (const auto& gamma : multi_indices(s.grid().d, N0 - 1)) {
        int k = 0;
        double fact = 1;
        for (int x : gamma) {
            k += x;
            fact *= factorial(x);
        }
        cplx coef = std::pow(cplx(0, two_pi), -k) / fact;
        Symbol t = star.ds(gamma).dxi(gamma).scaled(coef);
        out = first ? t : out + t;
        first = false;
    }
    return out.with_claim(s.claim());
}

double zeta_hat(const double* xi, int d)
{
    double v = 1.0;
    for (int a = 0; a < d; ++a)
        v *= unit_bump_1d(xi[a]);
    return v;
}

Mat ExtendedSymbol::eval(std::size_t s, const double* xi) const
{
    const auto& sym = base_.values;
    const auto& g = sym.grid();
    Mat v = Mat::Zero(g.q, g.q);
    std::vector<int> base(g.d), m(g.d);
    std::vector<double> off(g.d);
    for (int a = 0; a < g.d; ++a)
        base[a] = static_cast<int>(std::floor(xi[a]));
    for (int corner = 0; corner < (1 << g.d); ++corner) {
        for (int a = 0; a < g.d; ++a) {
            m[a] = base[a] + ((corner >> a) & 1);
            off[a] = xi[a] - m[a];
        }
        double z = zeta_hat(off.data(), g.d);
        if (z == 0.0)
            continue;
        std::size_t mi = g.freq_index(m.data());
        if (mi == GridSpec::npos)
            continue;
        v += z * sym.value(s, mi);
    }
    return v;
}

ExtendedSymbol extend_toroidal_symbol(const ToroidalSymbol& s)
{
    return ExtendedSymbol(s);
}

ClassReport check_extended_class(const ExtendedSymbol& e, int max_gamma, int max_beta, int refine)
{
    const auto& sym = e.base().values;
    const auto& g = sym.grid();
    const auto& c = sym.claim();
    const int q = g.q;
    const int R = refine * (g.n - 1) + 1; // refined samples per axis covering [-n/2, n/2-1]
    std::size_t RP = 1;
    for (int a = 0; a < g.d; ++a)
        RP *= static_cast<std::size_t>(R);
    require_budget(g.points() * RP * g.block() * sizeof(cplx), "check_extended_class");

    auto coords = [&](std::size_t idx, std::vector<int>& k) {
        for (int a = g.d - 1; a >= 0; --a) {
            k[a] = static_cast<int>(idx % R);
            idx /= R;
        }
    };
    ClassReport rep;
    rep.claim = c;
    rep.max_gamma = max_gamma;
    rep.max_beta = max_beta;
    std::vector<int> k(g.d), kk(g.d);
    std::vector<double> xi(g.d);
    for (const auto& gamma : multi_indices(g.d, max_gamma)) {
        ExtendedSymbol eg(ToroidalSymbol{sym.ds(gamma)});
        std::vector<cplx> tab(g.points() * RP * g.block());
        for (std::size_t s = 0; s < g.points(); ++s)
            for (std::size_t i = 0; i < RP; ++i) {
                coords(i, k);
                for (int a = 0; a < g.d; ++a)
                    xi[a] = -g.n / 2 + double(k[a]) / refine;
                MMap(tab.data() + (s * RP + i) * g.block(), q, q) = eg.eval(s, xi.data());
            }
        int gabs = 0;
        for (int x : gamma)
            gabs += x;
        for (const auto& beta : multi_indices(g.d, max_beta)) {
            int babs = 0;
            for (int x : beta)
                babs += x;
            ClassEntry ent;
            ent.gamma = gamma;
            ent.beta = beta;
            ent.exponent = c.n + c.delta * gabs - c.rho * babs;
            // unit-step central differences = `refine` steps on the refined lattice
            std::vector<cplx> cur = tab;
            for (int a = 0; a < g.d; ++a) {
                auto step = [&](int kind) {
                    std::vector<cplx> nxt(cur.size(), cplx(0));
                    for (std::size_t s = 0; s < g.points(); ++s)
                        for (std::size_t i = 0; i < RP; ++i) {
                            coords(i, k);
                            auto get = [&](int sh) -> const cplx* {
                                kk = k;
                                kk[a] += sh * refine;
                                if (kk[a] < 0 || kk[a] >= R)
                                    return nullptr;
                                std::size_t j = 0;
                                for (int b = 0; b < g.d; ++b)
                                    j = j * R + kk[b];
                                return cur.data() + (s * RP + j) * g.block();
                            };
                            const cplx* p = get(1);
                            const cplx* mm = get(-1);
                            const cplx* z = cur.data() + (s * RP + i) * g.block();
                            for (std::size_t b = 0; b < g.block(); ++b) {
                                cplx vp = p ? p[b] : cplx(0), vm = mm ? mm[b] : cplx(0);
                                nxt[(s * RP + i) * g.block() + b] = kind == 0 ? 0.5 * (vp - vm) : vp - 2.0 * z[b] + vm;
                            }
                        }
                    cur.swap(nxt);
                };
                for (int i = 0; i < beta[a] / 2; ++i)
                    step(1);
                if (beta[a] & 1)
                    step(0);
            }
            double best = 0;
            for (std::size_t i = 0; i < RP; ++i) {
                coords(i, k);
                bool inside = true;
                double r2 = 0;
                for (int a = 0; a < g.d; ++a) {
                    int reach = ((beta[a] + 1) / 2) * refine;
                    inside = inside && k[a] - reach >= 0 && k[a] + reach < R;
                    xi[a] = -g.n / 2 + double(k[a]) / refine;
                    r2 += xi[a] * xi[a];
                }
                if (!inside)
                    continue;
                double w = std::pow(1.0 + std::sqrt(r2), -ent.exponent);
                for (std::size_t s = 0; s < g.points(); ++s)
                    best = std::max(best, fast_op_norm(cur.data() + (s * RP + i) * g.block(), q) * w);
            }
            ent.constant = best;
            rep.entries.push_back(std::move(ent));
        }
    }
    return rep;
}

} // namespace ncpdo
