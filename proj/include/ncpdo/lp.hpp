#pragma once

#include <string>
#include <vector>

#include "ncpdo/grid.hpp"

namespace ncpdo {

// C^inf step: 0 for x<=0, 1 for x>=1
double smooth_step(double x);
double smooth_step_deriv(double x);

// Radial cutoff chi: 1 on [0,1], 0 on [2,inf), tabulated on [1,2].
class RadialProfile {
public:
    static constexpr int table_size = 4096;

    // shipped table, or the file named by NCPDO_PROFILE when set
    static const RadialProfile& active();
    static RadialProfile shipped();
    static RadialProfile from_file(const std::string& path);

    double chi(double r) const;
    // base profile phi(r) = chi(r) - chi(2r), supported in [1/2, 2]
    double phi(double r) const { return chi(r) - chi(2.0 * r); }
    const std::string& id() const { return id_; }

private:
    std::vector<double> val_, der_;
    std::string id_;
};

struct LPFamily {
    GridSpec grid;
    int J = 0;
    // hat_phi[j][idx]: phi^_0 = chi(|m|), phi^_j = chi(2^-j|m|) - chi(2^{1-j}|m|)
    std::vector<std::vector<double>> hat_phi;
    // torus[j][idx] = phi(2^-j m), j = 0..torus_levels-1; zero at m = 0
    std::vector<std::vector<double>> torus;
    std::vector<double> base_profile;
    std::string profile_id;

    int top_level() const { return J; }
};

LPFamily build_lp_family(const GridSpec& g);
const std::vector<std::vector<double>>& periodize_lp(const LPFamily& fam, const GridSpec& g);

// pointwise multiplication of coefficients by a scalar lattice table
OpValuedFunction apply_multiplier(const OpValuedFunction& f, const std::vector<double>& mult);
OpValuedFunction apply_multiplier(const OpValuedFunction& f, const std::vector<cplx>& mult);

// 1-D bump h on [-1,1] with h(x) + h(x-1) = 1 on [0,1]
double unit_bump_1d(double x);

// Family X_{mu,m}(s) = X_0(2^mu s - m) on the torus, m in {0..2^mu-1}^d.
struct UnitResolution {
    GridSpec grid;
    int mu = 0;

    int cubes_per_axis() const { return 1 << mu; }
    std::size_t cube_count() const;
    std::vector<int> cube(std::size_t c) const;
    double value(const std::vector<int>& m, std::size_t sample) const;
    std::vector<double> bump(const std::vector<int>& m) const;
    std::vector<double> partition_sum() const;
};

UnitResolution build_unit_resolution(const GridSpec& g, int mu);

// signed periodic offset of x from c on a circle of circumference period, in [-period/2, period/2)
double wrap_offset(double x, double c, double period);

} // namespace ncpdo
