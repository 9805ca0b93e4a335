#pragma once

#include <map>
#include <string>

#include "ncpdo/lp.hpp"
#include "ncpdo/symbol.hpp"

namespace ncpdo {

// Shipped symbol exemplars, selected by kind and a flat parameter map.
//   multiplier   profile = cos2 | riesz1 | one, cutoff = band | none            S^0_{1,0}
//   pointwise    matrix-valued smooth b(s)                                       S^0_{1,0}
//   bessel       alpha: (1+|xi|^2)^{alpha/2}                                     S^alpha_{1,0}
//   band         j, mod (or dyadic = 1): e(mod s_1) phi^_j(xi)                    S^0_{1,1}
//   exotic       delta, first_bands: sum_j b_j(s) phi^_j(xi), b_j at frequency scale 2^{j delta}
//   product      A(s) · (1 + i xi_1/<xi>)                                        S^0_{1,0}
//   custom-table path of a dense symbol dump
struct ExemplarSpec {
    std::string kind = "multiplier";
    std::map<std::string, std::string> params;
    SymbolClaim claim;
    bool has_claim = false;

    double num(const std::string& key, double fallback) const;
    std::string str(const std::string& key, const std::string& fallback) const;
};

Symbol make_exemplar(const ExemplarSpec& spec, const GridSpec& g, const LPFamily& fam);

Symbol make_exotic(const GridSpec& g, const LPFamily& fam, double delta, int first_bands = 0, std::uint64_t seed = 7);
Symbol make_regular_exemplar(const GridSpec& g, const LPFamily& fam); // exotic at delta = 1/2
// scale: frequencies read as xi = m / scale (physical units of an atom geometry)
Symbol make_product_exemplar(const GridSpec& g, double scale = 1.0);
Symbol make_cos2_multiplier(const GridSpec& g, const LPFamily& fam, bool band_cutoff = true, double scale = 1.0);
Symbol make_bessel(const GridSpec& g, double alpha);
// matrix trig polynomial used by pointwise and product exemplars
OpValuedFunction smooth_matrix_function(const GridSpec& g);

} // namespace ncpdo
