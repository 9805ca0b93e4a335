#include "ncpdo/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace ncpdo {

void GridSpec::validate() const
{
    if (d < 1 || d > 3)
        throw ConfigError("grid: d must be 1, 2 or 3");
    if (n < 8 || (n & (n - 1)) != 0)
        throw ConfigError("grid: n_points must be a power of two >= 8");
    if (q < 1)
        throw ConfigError("grid: q must be positive");
}

std::size_t GridSpec::points() const
{
    std::size_t p = 1;
    for (int i = 0; i < d; ++i)
        p *= static_cast<std::size_t>(n);
    return p;
}

int GridSpec::axis_index(std::size_t idx, int axis) const
{
    for (int i = d - 1; i > axis; --i)
        idx /= static_cast<std::size_t>(n);
    return static_cast<int>(idx % static_cast<std::size_t>(n));
}

double GridSpec::freq_norm(std::size_t idx) const
{
    double r2 = 0;
    for (int a = 0; a < d; ++a) {
        double m = freq(idx, a);
        r2 += m * m;
    }
    return std::sqrt(r2);
}

std::size_t GridSpec::freq_index(const int* m) const
{
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) {
        int k = m[a] + n / 2;
        if (k < 0 || k >= n)
            return npos;
        idx = idx * n + k;
    }
    return idx;
}

std::size_t GridSpec::sample_index(const int* k) const
{
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) {
        int kk = ((k[a] % n) + n) % n;
        idx = idx * n + kk;
    }
    return idx;
}

namespace {

// FFTW planning is not thread safe, execution with fftw_execute_dft is.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, std::size_t, int>, fftw_plan> plans;

    fftw_plan get(const GridSpec& g, std::size_t batch, int sign)
    {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(g.d, g.n, batch, sign);
        auto it = plans.find(key);
        if (it != plans.end())
            return it->second;
        std::vector<int> dims(g.d, g.n);
        std::vector<cplx> a(g.points() * batch), b(g.points() * batch);
        auto* ia = reinterpret_cast<fftw_complex*>(a.data());
        auto* ib = reinterpret_cast<fftw_complex*>(b.data());
        int howmany = static_cast<int>(batch);
        fftw_plan p = fftw_plan_many_dft(g.d, dims.data(), howmany, ia, nullptr, howmany, 1, ib, nullptr,
                                         howmany, 1, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans.emplace(key, p);
        return p;
    }

    ~PlanCache()
    {
        for (auto& kv : plans)
            fftw_destroy_plan(kv.second);
    }
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

// (-1)^{k_1+...+k_d}: multiplying by it moves the zero frequency to the box centre
inline double checker(const GridSpec& g, std::size_t idx)
{
    int s = 0;
    for (int a = 0; a < g.d; ++a)
        s += g.axis_index(idx, a);
    return (s & 1) ? -1.0 : 1.0;
}

} // namespace

void fft_forward(const GridSpec& g, std::size_t batch, const cplx* in, cplx* out)
{
    const std::size_t P = g.points();
    std::vector<cplx> tmp(P * batch);
    const double scale = 1.0 / static_cast<double>(P);
    for (std::size_t i = 0; i < P; ++i) {
        double c = checker(g, i) * scale;
        for (std::size_t b = 0; b < batch; ++b)
            tmp[i * batch + b] = in[i * batch + b] * c;
    }
    fftw_plan p = cache().get(g, batch, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()), reinterpret_cast<fftw_complex*>(out));
}

void fft_inverse(const GridSpec& g, std::size_t batch, const cplx* in, cplx* out)
{
    const std::size_t P = g.points();
    std::vector<cplx> tmp(in, in + P * batch);
    fftw_plan p = cache().get(g, batch, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()), reinterpret_cast<fftw_complex*>(out));
    for (std::size_t i = 0; i < P; ++i) {
        double c = checker(g, i);
        if (c < 0)
            for (std::size_t b = 0; b < batch; ++b)
                out[i * batch + b] = -out[i * batch + b];
    }
}

std::vector<cplx> fft_forward(const GridSpec& g, std::size_t batch, const std::vector<cplx>& in)
{
    if (in.size() != g.points() * batch)
        throw StructuralError("fft_forward: buffer does not match grid");
    std::vector<cplx> out(in.size());
    fft_forward(g, batch, in.data(), out.data());
    return out;
}

std::vector<cplx> fft_inverse(const GridSpec& g, std::size_t batch, const std::vector<cplx>& in)
{
    if (in.size() != g.points() * batch)
        throw StructuralError("fft_inverse: buffer does not match grid");
    std::vector<cplx> out(in.size());
    fft_inverse(g, batch, in.data(), out.data());
    return out;
}

OpValuedFunction OpValuedFunction::from_samples(const GridSpec& g, std::vector<cplx> samples)
{
    g.validate();
    if (samples.size() != g.values())
        throw StructuralError("OpValuedFunction: sample array has wrong shape");
    OpValuedFunction f;
    f.g_ = g;
    f.c_ = fft_forward(g, g.block(), samples);
    f.s_ = std::move(samples);
    return f;
}

OpValuedFunction OpValuedFunction::from_coeffs(const GridSpec& g, std::vector<cplx> coeffs)
{
    g.validate();
    if (coeffs.size() != g.values())
        throw StructuralError("OpValuedFunction: coefficient array has wrong shape");
    OpValuedFunction f;
    f.g_ = g;
    f.s_ = fft_inverse(g, g.block(), coeffs);
    f.c_ = std::move(coeffs);
    return f;
}

OpValuedFunction OpValuedFunction::zeros(const GridSpec& g)
{
    g.validate();
    OpValuedFunction f;
    f.g_ = g;
    f.s_.assign(g.values(), cplx(0));
    f.c_.assign(g.values(), cplx(0));
    return f;
}

OpValuedFunction OpValuedFunction::adjoint() const
{
    std::vector<cplx> s(s_.size());
    const int q = g_.q;
    for (std::size_t i = 0; i < g_.points(); ++i)
        MMap(s.data() + i * g_.block(), q, q) = sample(i).adjoint();
    return from_samples(g_, std::move(s));
}

OpValuedFunction OpValuedFunction::operator+(const OpValuedFunction& o) const
{
    if (!(o.g_ == g_))
        throw StructuralError("OpValuedFunction: grid mismatch");
    OpValuedFunction f = *this;
    for (std::size_t i = 0; i < s_.size(); ++i) {
        f.s_[i] += o.s_[i];
        f.c_[i] += o.c_[i];
    }
    return f;
}

OpValuedFunction OpValuedFunction::operator-(const OpValuedFunction& o) const
{
    return *this + o.scaled(-1.0);
}

OpValuedFunction OpValuedFunction::scaled(cplx a) const
{
    OpValuedFunction f = *this;
    for (auto& v : f.s_)
        v *= a;
    for (auto& v : f.c_)
        v *= a;
    return f;
}

double OpValuedFunction::nyquist_leak() const
{
    double leak = 0;
    for (std::size_t i = 0; i < g_.points(); ++i) {
        bool edge = false;
        for (int a = 0; a < g_.d; ++a)
            edge = edge || g_.axis_index(i, a) == 0;
        if (!edge)
            continue;
        for (std::size_t b = 0; b < g_.block(); ++b)
            leak = std::max(leak, std::abs(c_[i * g_.block() + b]));
    }
    return leak;
}

double op_norm(const Mat& a)
{
    if (a.size() == 0)
        return 0.0;
    if (a.rows() == 1 && a.cols() == 1)
        return std::abs(a(0, 0));
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

double fast_op_norm(const cplx* a, int q)
{
    if (q == 1)
        return std::abs(a[0]);
    if (q == 2) {
        // largest eigenvalue of a^* a in closed form
        double p = std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]);
        double det = std::norm(a[0] * a[3] - a[2] * a[1]);
        double disc = std::max(0.0, p * p - 4 * det);
        return std::sqrt(0.5 * (p + std::sqrt(disc)));
    }
    return op_norm(CMap(a, q, q));
}

double plancherel_check(const OpValuedFunction& f)
{
    const auto& g = f.grid();
    Mat lhs = Mat::Zero(g.q, g.q), rhs = Mat::Zero(g.q, g.q);
    for (std::size_t i = 0; i < g.points(); ++i) {
        lhs += f.sample(i).adjoint() * f.sample(i);
        rhs += f.coeff(i).adjoint() * f.coeff(i);
    }
    lhs *= g.cell();
    return op_norm(lhs - rhs);
}

Mat cauchy_schwarz_check(const std::vector<cplx>& phi, const OpValuedFunction& f)
{
    const auto& g = f.grid();
    if (phi.size() != g.points())
        throw StructuralError("cauchy_schwarz_check: phi must be scalar on the same grid");
    double phi2 = 0;
    Mat f2 = Mat::Zero(g.q, g.q), pf = Mat::Zero(g.q, g.q);
    for (std::size_t i = 0; i < g.points(); ++i) {
        phi2 += std::norm(phi[i]);
        f2 += f.sample(i).adjoint() * f.sample(i);
        pf += phi[i] * f.sample(i);
    }
    phi2 *= g.cell();
    f2 *= g.cell();
    pf *= g.cell();
    return phi2 * f2 - pf.adjoint() * pf;
}

} // namespace ncpdo
