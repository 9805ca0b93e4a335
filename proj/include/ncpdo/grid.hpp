#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ncpdo/error.hpp"

namespace ncpdo {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CMap = Eigen::Map<const Mat>;
using MMap = Eigen::Map<Mat>;

constexpr double two_pi = 6.283185307179586476925286766559;

// Torus [0,1)^d sampled at k/n per axis; frequencies in the centered box [-n/2, n/2)^d.
// Flat indices are row-major with axis 0 slowest, for samples and coefficients alike.
struct GridSpec {
    int d = 2;
    int n = 16;
    int q = 1;

    void validate() const;
    std::size_t points() const;
    std::size_t block() const { return static_cast<std::size_t>(q) * q; }
    std::size_t values() const { return points() * block(); }
    double cell() const { return 1.0 / static_cast<double>(points()); }

    // axis index k of flat index idx
    int axis_index(std::size_t idx, int axis) const;
    int freq(std::size_t idx, int axis) const { return axis_index(idx, axis) - n / 2; }
    double coord(std::size_t idx, int axis) const { return axis_index(idx, axis) / double(n); }
    double freq_norm(std::size_t idx) const;
    // flat coefficient index of frequency m, or npos when m leaves the box
    std::size_t freq_index(const int* m) const;
    // flat sample index with periodic wrap
    std::size_t sample_index(const int* k) const;
    GridSpec with_q(int qq) const { return {d, n, qq}; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    bool operator==(const GridSpec&) const = default;
};

// Batched transforms over `batch` interleaved values per point.
// forward: c(m) = n^{-d} sum_s f(s) e^{-2 pi i s.m}; inverse: f(s) = sum_m c(m) e^{2 pi i s.m}
void fft_forward(const GridSpec& g, std::size_t batch, const cplx* in, cplx* out);
void fft_inverse(const GridSpec& g, std::size_t batch, const cplx* in, cplx* out);

std::vector<cplx> fft_forward(const GridSpec& g, std::size_t batch, const std::vector<cplx>& in);
std::vector<cplx> fft_inverse(const GridSpec& g, std::size_t batch, const std::vector<cplx>& in);

// Matrix-valued function with both views materialized at construction.
class OpValuedFunction {
public:
    OpValuedFunction() = default;
    static OpValuedFunction from_samples(const GridSpec& g, std::vector<cplx> samples);
    static OpValuedFunction from_coeffs(const GridSpec& g, std::vector<cplx> coeffs);
    static OpValuedFunction zeros(const GridSpec& g);

    const GridSpec& grid() const { return g_; }
    const std::vector<cplx>& samples() const { return s_; }
    const std::vector<cplx>& coeffs() const { return c_; }
    CMap sample(std::size_t i) const { return CMap(s_.data() + i * g_.block(), g_.q, g_.q); }
    CMap coeff(std::size_t i) const { return CMap(c_.data() + i * g_.block(), g_.q, g_.q); }

    // pointwise f(s)^*
    OpValuedFunction adjoint() const;

    OpValuedFunction operator+(const OpValuedFunction& o) const;
    OpValuedFunction operator-(const OpValuedFunction& o) const;
    OpValuedFunction scaled(cplx a) const;

    // largest |coefficient| on the Nyquist planes m_i = -n/2
    double nyquist_leak() const;

private:
    GridSpec g_;
    std::vector<cplx> s_;
    std::vector<cplx> c_;
};

// || sum_s |f(s)|^2 ds - sum_m |f^(m)|^2 ||_op
double plancherel_check(const OpValuedFunction& f);

// (int |phi|^2)(int |f|^2) - |int phi f|^2
Mat cauchy_schwarz_check(const std::vector<cplx>& phi, const OpValuedFunction& f);

double op_norm(const Mat& a);
// spectral norm of a q×q column-major block, closed form for q <= 2
double fast_op_norm(const cplx* a, int q);

} // namespace ncpdo
