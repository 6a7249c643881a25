#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfkit/circuit.hpp"
#include "rfkit/network.hpp"

namespace rfkit {

enum class FitObjective { ComplexLS, DbMagLS };

struct FreeParam {
    std::string label;  // element label in the template netlist
    double lo;          // SI units
    double hi;
};

struct FitProblem {
    Netlist netlist;
    std::vector<FreeParam> free_params;
    NetworkRecord target;          // one-port reflection trace
    std::vector<double> weights;   // per frequency, nonnegative
    FitObjective objective;
};

// Validates and fills defaults (empty weights -> all ones).
FitProblem make_fit_problem(Netlist netlist, std::vector<FreeParam> free_params,
                            NetworkRecord target,
                            FitObjective objective = FitObjective::ComplexLS,
                            std::vector<double> weights = {});

// Weighted mismatch between the template's computed S11 and the target:
// ComplexLS sums w*|S11_model - S11_target|^2, DbMagLS sums w*(dB diff)^2
// (dB floored at -400). A singular circuit solve yields a large finite
// penalty (1e6 + log10 of the condition estimate) instead of an error so an
// optimizer can step back out. params are SI values for free_params, in
// order, and must lie within bounds.
double fit_objective(const FitProblem& problem, const std::vector<double>& params);

struct FitConfig {
    std::size_t multistarts = 8;
    std::size_t max_iters = 2000;   // per start
    double xtol = 1e-9;             // simplex diameter, log-parameter space
    double ftol = 1e-12;            // objective spread across the simplex
    std::uint64_t seed = 0;
    std::vector<double> initial;    // optional explicit start (SI values);
                                    // replaces the first multistart point
};

struct FitResult {
    std::vector<double> values;     // SI, within bounds
    double residual;
    std::size_t iterations;         // total across starts
    bool converged;                 // the winning start met xtol or ftol
    std::vector<double> history;    // running best objective, nonincreasing
};

// Bounded Nelder-Mead in log-parameter space (element values span decades),
// multistarted from a Latin-hypercube sample of the log bounds. Fully
// deterministic for a fixed seed. Exhausting max_iters on every start is not
// an error: the best point found is returned with converged = false.
FitResult fit(const FitProblem& problem, const FitConfig& config = {});

struct FitSpec {
    Netlist netlist;
    std::vector<FreeParam> free_params;
};

// Netlist text extended with "FREE <label> <lo><unit> <hi><unit>" lines.
FitSpec parse_fit_spec(const std::string& text);

}  // namespace rfkit
