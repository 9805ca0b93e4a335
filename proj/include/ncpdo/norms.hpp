#pragma once

#include <limits>
#include <string>

#include "ncpdo/grid.hpp"
#include "ncpdo/lp.hpp"

namespace ncpdo {

constexpr double p_inf = std::numeric_limits<double>::infinity();

enum class SpaceFamily { LpN, LpML2c, hp_c, Fpac, Fpac_infty, Bpqa, H2a };

struct SpaceDescriptor {
    SpaceFamily family = SpaceFamily::LpN;
    double p = 2.0;
    double q = 2.0;
    double alpha = 0.0;

    void validate() const;
    std::string tag() const;
    bool hilbertian() const;
    // CLI tags: L2N L1N LinfN L1ML2c h1c F1a F2a Finfa H2a B22a ...
    static SpaceDescriptor parse(const std::string& tag, double alpha = 0.0);
};

// Trace on M_q: unnormalized Tr by default; trace_scale = 1/q gives tr_q.
struct TraceConvention {
    double scale = 1.0;
    std::string name() const { return scale == 1.0 ? "Tr" : "Tr/q"; }
};

// sum of lambda^e over eigenvalues of a PSD q×q block, clipping roundoff negatives
double psd_power_trace(const cplx* S, int q, double e);
// Tr |A|^p for a general block
double schatten_trace(const cplx* A, int q, double p);

double lp_norm(const OpValuedFunction& f, double p, TraceConvention tr = {});
double l1_l2c_norm(const OpValuedFunction& f, TraceConvention tr = {});
OpValuedFunction bessel_potential(const OpValuedFunction& f, double alpha);
// torus convention: ||f^(0)||_{L_p(M)} + ||(sum_j 4^{j alpha} |phi~_j * f|^2)^{1/2}||_{L_p(N)}
double triebel_lizorkin_norm(const OpValuedFunction& f, double alpha, double p, const LPFamily& fam,
                             TraceConvention tr = {});
double hardy_h1c_norm(const OpValuedFunction& f, const LPFamily& fam);
double besov_norm(const OpValuedFunction& f, double alpha, double p, double q, const LPFamily& fam);
double sobolev_h2_norm(const OpValuedFunction& f, double alpha);

double space_norm(const OpValuedFunction& f, const SpaceDescriptor& sp, const LPFamily& fam);

// column square function sum_j 4^{j alpha} |phi~_j * f|^2, [s][q×q]
std::vector<cplx> square_function(const OpValuedFunction& f, double alpha, const LPFamily& fam);

// diagonal coefficient weight of a Hilbert norm equivalent to sp (L2N, H2a, F2a)
std::vector<double> hilbert_weight(const GridSpec& g, const SpaceDescriptor& sp, const LPFamily& fam);

} // namespace ncpdo
