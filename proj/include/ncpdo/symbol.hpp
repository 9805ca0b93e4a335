#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ncpdo/grid.hpp"
#include "ncpdo/lp.hpp"

namespace ncpdo {

struct SymbolClaim {
    double n = 0.0;
    double rho = 1.0;
    double delta = 0.0;
    void validate() const;
};

// sigma(s, m) on the s-grid times the centered frequency lattice, q×q valued.
// Separable storage: sigma(s,m) = sum_r a_r(s) B_r(m); dense storage: full table [s][m][q×q].
class Symbol {
public:
    struct Term {
        std::vector<cplx> a; // points() scalar samples in s
        std::vector<cplx> B; // points() × q×q lattice values
    };

    Symbol() = default;
    static Symbol separable(const GridSpec& g, std::vector<Term> terms, SymbolClaim claim = {});
    static Symbol dense(const GridSpec& g, std::vector<cplx> table, SymbolClaim claim = {});
    // s-independent multiplier m(xi)·I
    static Symbol multiplier(const GridSpec& g, const std::vector<cplx>& m, SymbolClaim claim = {});
    static Symbol multiplier(const GridSpec& g, const std::vector<double>& m, SymbolClaim claim = {});
    // xi-independent b(s), matrix valued
    static Symbol pointwise(const OpValuedFunction& b, SymbolClaim claim = {});
    static Symbol identity(const GridSpec& g);

    const GridSpec& grid() const { return g_; }
    const SymbolClaim& claim() const { return claim_; }
    Symbol with_claim(SymbolClaim c) const;
    bool is_dense() const { return dense_; }
    const std::vector<Term>& terms() const { return terms_; }
    const std::vector<cplx>& table() const { return table_; }

    Mat value(std::size_t s, std::size_t m) const;
    // all lattice values at one s, points() × q×q
    std::vector<cplx> row(std::size_t s) const;
    Symbol to_dense() const;
    std::size_t dense_bytes() const;

    Symbol operator+(const Symbol& o) const;
    Symbol scaled(cplx c) const;
    // pointwise matrix product sigma(s,m) tau(s,m)
    Symbol operator*(const Symbol& o) const;
    // pointwise sigma(s,m)^*
    Symbol adjoint_values() const;
    // sigma(s,m) w(m)
    Symbol times_lattice(const std::vector<double>& w) const;
    // u sigma u^*
    Symbol conjugated(const Mat& u) const;

    // spectral d/ds multi-derivative
    Symbol ds(const std::vector<int>& gamma) const;
    // unit-step lattice differences; central (zero extension) or forward
    Symbol dxi(const std::vector<int>& beta, bool forward = false) const;

private:
    GridSpec g_;
    SymbolClaim claim_;
    bool dense_ = false;
    std::vector<Term> terms_;
    std::vector<cplx> table_;
};

// Symbol on T^d × Z^d; xi differences are the forward differences Delta_m.
struct ToroidalSymbol {
    Symbol values;
};

struct ClassEntry {
    std::vector<int> gamma, beta;
    double exponent = 0.0;
    double constant = 0.0;
};

struct ClassReport {
    SymbolClaim claim;
    int max_gamma = 0, max_beta = 0;
    std::vector<ClassEntry> entries;
    double max_constant() const;
    const ClassEntry& at(const std::vector<int>& gamma, const std::vector<int>& beta) const;
};

// all multi-indices of dimension d with |alpha|_1 <= order
std::vector<std::vector<int>> multi_indices(int d, int order);

ClassReport check_symbol_class(const Symbol& s, int max_gamma, int max_beta);
ClassReport check_symbol_class(const ToroidalSymbol& s, int max_gamma, int max_beta);

// memory guard shared by kernel assembly and dense tables
void set_memory_budget_mb(double mb);
double memory_budget_mb();
void require_budget(std::size_t bytes, const std::string& what);

// K[s][t] = sum_m sigma(s,m) e(t.m), layout [s][t][q×q]
std::vector<cplx> kernel_from_symbol(const Symbol& s);
// T f(s) = sum_t K(s, s-t) f(t) dt
OpValuedFunction apply_with_kernel(const std::vector<cplx>& K, const GridSpec& g, const OpValuedFunction& f);

struct KernelDecayReport {
    double slope = 0, predicted = 0, constant = 0, residual = 0;
    std::vector<double> bin_radius, bin_value;
    bool no_singular_decay = false;
    std::string far_field_note;
};

// fit of log max_{|t| in bin} ||D_s^gamma D_t^beta K(s0,t)|| against log|t|, half-octave bins over [2/N, 1/4]
KernelDecayReport kernel_decay_report(const Symbol& s, const std::vector<int>& gamma, const std::vector<int>& beta,
                                      std::size_t s_index = 0);

std::vector<Symbol> dyadic_pieces(const Symbol& s, const LPFamily& fam);

// sum_{|gamma|<N0} (2 pi i)^{-|gamma|}/gamma! D_xi^gamma s1 · D_s^gamma s2
Symbol compose_symbols_asymptotic(const Symbol& s1, const Symbol& s2, int N0);
// sum_{|gamma|<N0} (2 pi i)^{-|gamma|}/gamma! D_xi^gamma D_s^gamma s^*
Symbol adjoint_symbol_asymptotic(const Symbol& s, int N0);

// smooth bump on (-1,1)^d with zeta^(0)=1, hence zeta^(m)=delta_0(m) on Z^d
double zeta_hat(const double* xi, int d);

class ExtendedSymbol {
public:
    explicit ExtendedSymbol(ToroidalSymbol s) : base_(std::move(s)) {}
    // sigma~(s, xi) = sum_m zeta^(xi - m) sigma(s, m), xi real
    Mat eval(std::size_t s, const double* xi) const;
    const ToroidalSymbol& base() const { return base_; }

private:
    ToroidalSymbol base_;
};

ExtendedSymbol extend_toroidal_symbol(const ToroidalSymbol& s);
// class constants of the extension sampled on the lattice refined by `refine`, unit-step central differences
ClassReport check_extended_class(const ExtendedSymbol& e, int max_gamma, int max_beta, int refine = 4);

} // namespace ncpdo
