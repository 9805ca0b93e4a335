#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ncpdo/grid.hpp"
#include "ncpdo/symbol.hpp"

namespace ncpdo {

// The sample torus read as the physical box [-R/2, R/2)^d: x = R s wrapped, xi = m / R.
struct AtomGeometry {
    GridSpec grid{2, 512, 1};
    double period = 8.0;

    void validate() const;
    double h() const { return period / grid.n; }
    double cell() const;
    // wrapped physical offset of sample idx from centre c, per axis
    double offset(std::size_t idx, int axis, double c) const;
    double physical_freq(std::size_t idx, int axis) const { return grid.freq(idx, axis) / period; }
};

enum class AtomKind { h1c_atom, alpha1_atom, alphaQ_subatom, alphaQ_atom };
AtomKind parse_atom_kind(const std::string& s);
std::string atom_kind_name(AtomKind k);

struct AtomSpec;

struct AtomPart {
    cplx coefficient;
    std::vector<AtomSpec> sub; // exactly one subatom; vector keeps the type complete
};

// Q_{mu,l}: centre 2^{-mu} l, side 2^{-mu} (physical units)
struct AtomSpec {
    AtomKind kind = AtomKind::alphaQ_subatom;
    int mu = 0;
    std::vector<int> l;
    int K = 3;
    int L = 1;
    AtomGeometry geo;
    OpValuedFunction payload;
    std::vector<AtomPart> parts; // composite (alpha, Q_{k,m})-atoms only

    double side() const { return std::ldexp(1.0, -mu); }
    double volume() const { return std::pow(side(), geo.grid.d); }
    double centre(int axis) const { return l[axis] * side(); }
};

// default orders strictly above the minima K >= ([a]+1)_+, L >= max([-a], -1)
int default_K(double alpha);
int default_L(double alpha);

struct AtomGenerator {
    AtomKind kind = AtomKind::alphaQ_subatom;
    std::string shape = "bump"; // bump | derivative | oscillating
    int axis = 0;                // derivative / oscillation axis
    double frequency = 1.0;      // oscillating: cos(pi f u) on the cube
    int mu = 0;
    std::vector<int> l;
    int K = -1, L = -1; // < 0: defaults for alpha
    Mat matrix;          // q×q value pattern, identity when empty
    double fill = 0.9;   // largest size ratio after normalization
};

// builds, imposes moments by projection, normalizes to `fill` of the size bounds
AtomSpec make_atom(const AtomGenerator& gen, const AtomGeometry& geo, double alpha);

// (alpha, Q_{k,m})-atom from equal-weight subatoms at level k+1 inside 2Q_{k,m}
AtomSpec make_composite_atom(const AtomGeometry& geo, double alpha, int k, const std::vector<int>& m,
                             const Mat& matrix = {});

struct AtomCheck {
    std::string name;
    double measured = 0;
    double bound = 0;
    bool pass = false;
};

struct AtomReport {
    std::string kind;
    int mu = 0;
    std::vector<AtomCheck> checks;
    double max_size_ratio = 0;
    double support_leak = 0;   // largest |sample| outside 2Q
    double moment_residual = 0; // scale-free, see atoms.cpp
    bool pass = false;
};

AtomReport validate_atom(const AtomSpec& spec, double alpha);

// physical F_1^{alpha,c} norm: L_1(dx) of (sum_{j>=0} 4^{j alpha} |phi_j(D) f|^2)^{1/2}, Tr trace
double physical_f1_norm(const OpValuedFunction& f, const AtomGeometry& geo, double alpha);

struct SynthesisReport {
    OpValuedFunction f;
    double norm = 0;
    double coefficient_sum = 0;
    double ratio = 0;
    double ceiling = 10.0;
    bool pass = false;
};

SynthesisReport synthesize(const std::vector<std::pair<cplx, AtomSpec>>& atoms, double alpha);

struct AtomImageReport {
    int mu = 0;
    double M = 0;
    std::vector<std::vector<int>> gammas;
    std::vector<double> weighted; // tau(int w |D^gamma T a|^2)^{1/2}
    std::vector<double> ratio;    // weighted / |Q|^{alpha/d - |gamma|/d}
    double max_ratio = 0;
};

// gammas: all |gamma| < K - d/2 when empty
AtomImageReport atom_image_report(const Symbol& sigma, const AtomSpec& spec, double M, double alpha,
                                  std::vector<std::vector<int>> gammas = {});

struct ImageSweep {
    std::vector<int> mus;
    std::vector<double> max_ratio;
    double spread = 0; // max/min over mu
};

ImageSweep atom_image_sweep(const Symbol& sigma, const AtomGenerator& gen, const AtomGeometry& geo, double alpha,
                            double M, const std::vector<int>& mus);

// sigma(s,.) = 0 for every s in c + (side/2) cube, exact zeros
bool symbol_vanishes_near(const Symbol& sigma, const AtomGeometry& geo, const std::vector<double>& c, double side);

// smooth mask equal to 0 on the cube of side `inner` about c and 1 outside the cube of side `outer`
std::vector<double> exclusion_mask(const AtomGeometry& geo, const std::vector<double>& c, double inner, double outer);

double far_support_image_norm(const Symbol& sigma, const AtomSpec& spec, double alpha);

struct FarSupportSweep {
    std::vector<int> mus;
    std::vector<double> norms;
    double exponent = 0; // fitted: norm ~ 2^{-mu exponent}
    double required = 0; // d/2
    bool pass = false;
};

// masks sigma by the exclusion cube of side 4 about each atom (6 for composite atoms)
FarSupportSweep far_support_sweep(const Symbol& sigma, const AtomGenerator& gen, const AtomGeometry& geo,
                                  double alpha, const std::vector<int>& mus);

} // namespace ncpdo
