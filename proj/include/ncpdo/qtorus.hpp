#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ncpdo/grid.hpp"
#include "ncpdo/lp.hpp"
#include "ncpdo/random.hpp"
#include "ncpdo/symbol.hpp"

namespace ncpdo {

// Real skew-symmetric d×d matrix; rational when every entry is num/den over one denominator.
struct ThetaMatrix {
    int d = 2;
    std::vector<double> v; // row-major
    bool rational = true;
    long den = 1;
    std::vector<long> num;

    double at(int k, int j) const { return v[static_cast<std::size_t>(k) * d + j]; }
    void validate() const;
    bool is_zero() const;
    std::string str() const;

    static ThetaMatrix zero(int d);
    // theta_12 = p/q, theta_21 = -p/q, other entries 0
    static ThetaMatrix pair(int d, long p, long q);
    static ThetaMatrix irrational(int d, double theta12);
    // "p/q" (rational theta_12) or a decimal (irrational tag)
    static ThetaMatrix parse(const std::string& s, int d = 2);
};

// Coefficients x^(m) on the centered box [-box/2, box/2)^d.
struct QTElement {
    ThetaMatrix theta;
    int box = 8;
    std::vector<cplx> c;
    double truncation_loss = 0; // l2 mass dropped by the last product into this box

    GridSpec index() const { return {theta.d, box, 1}; }
    static QTElement zero(const ThetaMatrix& th, int box);
    static QTElement monomial(const ThetaMatrix& th, int box, const std::vector<int>& m, cplx a = 1.0);
    static QTElement random(const ThetaMatrix& th, int box, Rng& rng, double band = -1.0);
    cplx coeff(const std::vector<int>& m) const;
    QTElement operator+(const QTElement& o) const;
    QTElement scaled(cplx a) const;
    QTElement adjoint() const;
    QTElement resized(int new_box) const;
};

// exp(2 pi i sum_{k>j} theta_kj m'_k m''_j): U^{m'} U^{m''} = c(m',m'') U^{m'+m''}
cplx qt_cocycle(const ThetaMatrix& th, const int* m1, const int* m2);

// twisted convolution into the box of `out_box` (0: x.box)
QTElement qt_multiply(const QTElement& x, const QTElement& y, int out_box = 0);

// Clock and shift for theta_12 = p/q; further axes act trivially and must commute.
struct QTRepresentation {
    int q = 1;
    std::vector<Mat> U;

    static QTRepresentation build(const ThetaMatrix& th);
    Mat monomial(const int* m) const;
    double commutation_residual(const ThetaMatrix& th) const;
    double unitarity_residual() const;
};

Mat qt_represent(const QTElement& x, const QTRepresentation& rep);

// max deviation of qt_multiply against the representation over monomial pairs at theta = 1/3
double calibrate_cocycle(int box = 8);

cplx qt_trace(const QTElement& x);

// quadrature grid for the direct integral over z: power of two >= 4 box
int qt_quadrature_size(int box);
// p = 2 from coefficients; p in {1, inf} through the representation on the z grid
double qt_lp_norm(const QTElement& x, double p);

// x~(z) = sum_m x^(m) z^m rep(U^m) on a grid of n points per axis (0: quadrature size)
OpValuedFunction transference_embed(const QTElement& x, int n = 0);

// Element of L_inf(T^d) ⊗ T^d_theta: f(z) = sum_m f_m(z) U^m, m in the box, z on `zgrid`.
struct QTField {
    ThetaMatrix theta;
    int box = 8;
    GridSpec zgrid;
    std::vector<std::vector<cplx>> f; // [m][z]

    static QTField embed(const QTElement& x, int zn);
    double l2() const;
    QTField operator-(const QTField& o) const;
};

QTField conditional_expectation(const QTField& f);

using QTSymbolFn = std::function<QTElement(const std::vector<int>& m, int box)>;

struct QTApplyResult {
    QTElement y;
    double truncation_loss = 0;
};

// T x = sum_m sigma(m) x^(m) U^m, output on out_box (0: x.box)
QTApplyResult qt_pdo_apply(const QTSymbolFn& sigma, const QTElement& x, int out_box = 0);
QTElement qt_pdo_apply_scalar(const std::function<cplx(const std::vector<int>&)>& sigma, const QTElement& x);

// toroidal class constants of an algebra-valued symbol: D^beta through the derivations,
// norms by the coefficient l1 bound
ClassReport qt_symbol_class(const QTSymbolFn& sigma, const ThetaMatrix& th, int box, SymbolClaim claim, int max_gamma,
                            int max_beta);

// |x^(0)| + || (sum_j 4^{j alpha} |phi~_j * x|^2)^{1/2} ||_p, p in {1, 2}
double qt_tl_norm(const QTElement& x, double alpha, double p);

struct QTSweep {
    std::vector<int> boxes;
    std::vector<double> ratios;
    double growth = 0;
    bool strictly_increasing = false;
    bool bounded = false; // growth <= 2
    int trials = 0;
};

QTSweep qt_boundedness_sweep(const QTSymbolFn& sigma, SymbolClaim claim, const ThetaMatrix& th, double alpha, double p,
                             const std::vector<int>& boxes, int trials, std::uint64_t seed);

// shipped symbols
QTSymbolFn qt_scalar_symbol(std::function<cplx(const std::vector<int>&)> f, const ThetaMatrix& th);
QTSymbolFn qt_bessel_symbol(const ThetaMatrix& th, double order); // (1+|m|^2)^{order/2}
QTSymbolFn qt_exotic_symbol(const ThetaMatrix& th);              // sum_j phi(2^-j m) U_1^{-2^j}

void write_qt_element(const std::string& path, const QTElement& x);
QTElement read_qt_element(const std::string& path);

} // namespace ncpdo
