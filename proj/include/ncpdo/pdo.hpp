#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncpdo/norms.hpp"
#include "ncpdo/random.hpp"
#include "ncpdo/symbol.hpp"

namespace ncpdo {

enum class Side { column, row };

Side parse_side(const std::string& s);
std::string side_name(Side s);

// column: sum_m sigma(s,m) f^(m) e(s.m); row: sum_m f^(m) sigma(s,m) e(s.m)
OpValuedFunction apply_pdo(const Symbol& sigma, const OpValuedFunction& f, Side side = Side::column);
// same without the band-limit validation, for internal chains
OpValuedFunction apply_pdo_unchecked(const Symbol& sigma, const OpValuedFunction& f, Side side);
// exact adjoint for the pairing <f,g> = int Tr(g(s)^* f(s)) ds
OpValuedFunction apply_pdo_adjoint(const Symbol& sigma, const OpValuedFunction& g, Side side = Side::column);

cplx pairing(const OpValuedFunction& f, const OpValuedFunction& g);
double l2(const OpValuedFunction& f);

struct RemainderReport {
    std::vector<int> orders;
    std::vector<double> errors;
    int panel = 0;
    std::uint64_t seed = 0;
    bool monotone(double slack = 1e-9) const;
};

// ||T_{s3(N0)} f - T_{s1} T_{s2} f|| / ||f||, max over a random band-limited panel
RemainderReport composition_remainder(const Symbol& s1, const Symbol& s2, const std::vector<int>& orders, int panel,
                                      std::uint64_t seed);
// |<T_{s~(N0)} f, g> - <f, T_s g>| / (||f|| ||g||), max over random pairs
RemainderReport adjoint_remainder(const Symbol& s, const std::vector<int>& orders, int panel, std::uint64_t seed);

struct CotlarSteinReport {
    int levels = 0;
    std::vector<std::vector<double>> tstar_t; // ||T_k^* T_j||, [j][k]
    std::vector<std::vector<double>> t_tstar; // ||T_k T_j^*||
    double decay_rate = 0;                    // fitted slope of log2 entry vs max(j,k), |j-k|>=2
    int fit_points = 0;
    double max_tt_far = 0; // largest TT* entry with |j-k| >= 2
    double diag_ratio = 0; // max/min of the diagonal T*T entries over the annuli j >= 1
};

CotlarSteinReport cotlar_stein_report(const Symbol& sigma, const LPFamily& fam, std::uint64_t seed, Side side = Side::column);

struct OpNormEstimate {
    std::string source, target, method;
    double value = 0;
    bool lower_bound = false;
    int trials = 0;
    int iterations = 0;
    int resolution = 0;
    std::uint64_t seed = 0;
    double ratio_at_top_vector = 0; // true-norm ratio at the converged vector (equivalent-norm runs)
};

struct NormEstimateOptions {
    int trials = 16;
    std::uint64_t seed = 1;
    double tol = 1e-6;
    int max_iter = 500;
    double band = -1; // band limit of random inputs, < 0: 2^J
    std::vector<OpValuedFunction> library; // extra inputs (atoms, coherent test functions)
};

// largest singular value of f -> W_t T W_s^{-1} f by power iteration (W diagonal coefficient weights)
OpNormEstimate power_norm(const Symbol& sigma, Side side, const std::vector<double>& w_src,
                          const std::vector<double>& w_tgt, const NormEstimateOptions& opt,
                          OpValuedFunction* top = nullptr);

OpNormEstimate estimate_operator_norm(const Symbol& sigma, Side side, const SpaceDescriptor& src,
                                      const SpaceDescriptor& tgt, const LPFamily& fam, const NormEstimateOptions& opt);
inline OpNormEstimate estimate_operator_norm(const Symbol& sigma, Side side, const SpaceDescriptor& space,
                                             const LPFamily& fam, const NormEstimateOptions& opt)
{
    return estimate_operator_norm(sigma, side, space, space, fam, opt);
}

// assembled matrix of the column operator on the coefficient space (small grids only)
Mat assemble_operator(const Symbol& sigma, Side side);

struct ForbiddenReport {
    std::vector<int> sizes;
    std::vector<double> alphas;
    std::vector<std::vector<double>> estimates; // [alpha][size], H2^alpha norm by power iteration
    std::vector<double> growth;                 // last/first per alpha
    std::vector<bool> strictly_increasing;
    std::string method;
    // F_1^{alpha,c} lower bounds over random inputs plus the coherent input sum_j e(2^j s_1)
    std::vector<std::vector<double>> f1_estimates;
    std::vector<double> f1_growth;
    std::vector<bool> f1_strictly_increasing;
};

// sum_{j=1}^{J} e(2^j s_1) I: each term sits where phi^_j = 1
OpValuedFunction coherent_input(const GridSpec& g, const LPFamily& fam);

ForbiddenReport forbidden_symbol_experiment(const std::vector<double>& alphas, const std::vector<int>& sizes,
                                            int first_bands = 0, std::uint64_t seed = 1);

} // namespace ncpdo
