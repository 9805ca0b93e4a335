#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "ncpdo/error.hpp"
#include "ncpdo/experiments.hpp"

using namespace ncpdo;

namespace {

enum class T { Int, Num, Str, Ints, Nums, Strs, Flag };

struct Flag {
    std::string name, key;
    T type;
    std::string help;
};

const std::map<std::string, std::vector<Flag>>& flag_table()
{
    static const std::map<std::string, std::vector<Flag>> t = {
        {"lp-build", {{"--n", "n", T::Int, "grid points per axis"}, {"--d", "d", T::Int, "dimension"},
                      {"--dump", "dump", T::Str, "write multiplier tables (binary dump)"}}},
        {"symbol-check", {{"--max-gamma", "max_gamma", T::Int, "largest s-derivative order"},
                          {"--max-beta", "max_beta", T::Int, "largest xi-difference order"},
                          {"--ceiling", "ceiling", T::Num, "largest acceptable class constant"},
                          {"--toroidal", "toroidal", T::Flag, "forward differences on Z^d"}}},
        {"pdo-apply", {{"--symbol", "symbol", T::Str, "symbol declaration (TOML)"},
                       {"--input", "input", T::Str, "input function dump"},
                       {"--side", "side", T::Str, "c|column or r|row"},
                       {"--out", "output", T::Str, "output function dump"}}},
        {"norm", {{"--input", "input", T::Str, "function dump (zero function when omitted)"},
                  {"--space", "space", T::Str, "L2N L1N LinfN L1ML2c h1c F1a F2a Finfa H2a B22a ..."},
                  {"--alpha", "alpha", T::Num, "smoothness"}, {"--d", "d", T::Int, "dimension (zero function)"},
                  {"--n", "n", T::Int, "grid size (zero function)"}, {"--q", "q", T::Int, "matrix size (zero function)"}}},
        {"compose-check", {{"--n", "n", T::Int, "grid size"}, {"--q", "q", T::Int, "matrix size"},
                           {"--orders", "orders", T::Ints, "expansion orders N0"},
                           {"--panel", "panel", T::Int, "random inputs per order"}}},
        {"adjoint-check", {{"--symbol", "symbol", T::Str, "symbol declaration (TOML)"}, {"--n", "n", T::Int, "grid size"},
                           {"--q", "q", T::Int, "matrix size"}, {"--orders", "orders", T::Ints, "expansion orders N0"},
                           {"--panel", "panel", T::Int, "random pairs per order"},
                           {"--min-shrink", "min_shrink", T::Num, "required error shrink first/last"}}},
        {"kernel-decay", {{"--symbol", "symbol", T::Str, "symbol declaration (TOML)"}, {"--n", "n", T::Int, "grid size"},
                          {"--d", "d", T::Int, "dimension"}, {"--q", "q", T::Int, "matrix size"},
                          {"--tol", "relative_tol", T::Num, "relative slope tolerance"}}},
        {"cotlar", {{"--symbol", "symbol", T::Str, "symbol declaration (TOML)"}, {"--n", "n", T::Int, "grid size"},
                    {"--q", "q", T::Int, "matrix size"}, {"--side", "side", T::Str, "column or row"}}},
        {"atoms-validate", {{"--manifest", "manifest", T::Str, "atom manifest (TOML)"},
                            {"--alpha", "alpha", T::Num, "smoothness"}}},
        {"atom-image", {{"--symbol", "symbol", T::Str, "symbol declaration (TOML)"}, {"--alpha", "alpha", T::Num, "smoothness"},
                        {"--mus", "mus", T::Ints, "atom levels"}, {"--M", "M", T::Nums, "weight exponents"},
                        {"--shapes", "shapes", T::Strs, "bump,derivative,oscillating"},
                        {"--max-spread", "max_spread", T::Num, "largest max/min ratio over mu"}}},
        {"bound-sweep", {{"--symbol", "symbol", T::Str, "symbol declaration (TOML)"}, {"--space", "space", T::Str, "space tag"},
                         {"--alpha", "alpha", T::Num, "smoothness"}, {"--sizes", "sizes", T::Ints, "grid sizes"},
                         {"--trials", "trials", T::Int, "random inputs"}, {"--d", "d", T::Int, "dimension"},
                         {"--q", "q", T::Int, "matrix size"}, {"--side", "side", T::Str, "column or row"},
                         {"--max-growth", "max_growth", T::Num, "largest acceptable growth"}}},
        {"forbidden", {{"--alphas", "alphas", T::Nums, "smoothness values"}, {"--sizes", "sizes", T::Ints, "grid sizes"},
                       {"--first-bands", "first_bands", T::Int, "truncate to the first bands (0: all)"}}},
        {"qt-demo", {{"--theta", "theta", T::Str, "p/q or decimal"}, {"--box", "box", T::Int, "frequency box"},
                     {"--alpha", "alpha", T::Num, "smoothness"}, {"--p", "p", T::Num, "1, 2 or inf"},
                     {"--dump", "dump", T::Str, "write the random element (binary dump)"}}},
        {"qt-sweep", {{"--theta", "theta", T::Str, "p/q or decimal"}, {"--symbol", "symbol", T::Str, "exotic|bessel|one"},
                      {"--order", "order", T::Num, "bessel order"}, {"--alpha", "alpha", T::Num, "smoothness"},
                      {"--p", "p", T::Num, "1 or 2"}, {"--boxes", "boxes", T::Ints, "frequency boxes"},
                      {"--trials", "trials", T::Int, "random inputs per box"},
                      {"--expect", "expect", T::Str, "bounded or increasing"}}},
    };
    return t;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

double to_num(const std::string& s, const std::string& name)
{
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("flag " + name + ": not a number '" + s + "'");
    }
}

long long to_int(const std::string& s, const std::string& name)
{
    double v = to_num(s, name);
    if (v != std::floor(v))
        throw ConfigError("flag " + name + ": not an integer '" + s + "'");
    return static_cast<long long>(v);
}

json convert(const Flag& f, const std::string& v)
{
    switch (f.type) {
    case T::Int: return to_int(v, f.name);
    case T::Num: {
        double x = to_num(v, f.name);
        return std::isinf(x) ? json("inf") : json(x);
    }
    case T::Str: return v;
    case T::Flag: return true;
    case T::Ints: {
        json a = json::array();
        for (const auto& s : split(v))
            a.push_back(to_int(s, f.name));
        return a;
    }
    case T::Nums: {
        json a = json::array();
        for (const auto& s : split(v))
            a.push_back(to_num(s, f.name));
        return a;
    }
    case T::Strs: return split(v);
    }
    return nullptr;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ncpdo: operator-valued pseudo-differential operators on the torus"};
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    int threads = 1;
    double budget = 2048;
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (recorded; computation is single-threaded)")->capture_default_str();
    app.add_option("--budget-mb", budget, "memory budget for dense tables and kernels")->capture_default_str();

    struct Sub {
        CLI::App* app;
        std::string config, out;
        std::map<std::string, std::string> values;
        std::map<std::string, bool> flags;
    };
    std::map<std::string, std::unique_ptr<Sub>> subs;
    for (const auto& kind : experiment_kinds()) {
        auto s = std::make_unique<Sub>();
        s->app = app.add_subcommand(kind, "run the " + kind + " experiment");
        s->app->fallthrough();
        s->app->add_option("--config", s->config, "parameters (TOML)");
        s->app->add_option(kind == "pdo-apply" ? "--report" : "--out", s->out,
                           "report path: JSON, or CSV for sweeps when the name ends in .csv; - for stdout");
        for (const auto& f : flag_table().at(kind)) {
            if (f.type == T::Flag)
                s->app->add_flag(f.name, s->flags[f.key], f.help);
            else
                s->app->add_option(f.name, s->values[f.key], f.help);
        }
        subs[kind] = std::move(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        for (auto& [kind, s] : subs) {
            if (!s->app->parsed())
                continue;
            ExperimentConfig cfg;
            cfg.kind = kind;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.budget_mb = budget;
            if (!s->config.empty()) {
                cfg.params = load_toml(s->config);
                if (cfg.params.contains("experiment")) {
                    if (cfg.params["experiment"] != kind)
                        throw ConfigError("config: experiment '" + cfg.params["experiment"].dump() +
                                          "' does not match the subcommand");
                    cfg.params.erase("experiment");
                }
            }
            for (const auto& f : flag_table().at(kind)) {
                if (f.type == T::Flag) {
                    if (s->flags[f.key])
                        cfg.params[f.key] = true;
                } else if (s->app->count(f.name) > 0) {
                    cfg.params[f.key] = convert(f, s->values[f.key]);
                }
            }
            auto res = run_experiment(cfg);
            emit(res, s->out);
            return res.pass ? 0 : 2;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const BudgetError& e) {
        std::cerr << "resource budget exceeded: " << e.what() << "\n";
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
    } catch (const Unsupported& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
}
