#include "rfkit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace rfkit {

namespace {

double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double floored_db(Complex v) {
    double db = db20(v);
    return std::max(db, -400.0);
}

struct Simplex {
    std::vector<std::vector<double>> x;  // log-space vertices
    std::vector<double> f;
};

double diameter(const Simplex& s, std::size_t best) {
    double d = 0.0;
    for (std::size_t v = 0; v < s.x.size(); ++v)
        for (std::size_t k = 0; k < s.x[v].size(); ++k)
            d = std::max(d, std::abs(s.x[v][k] - s.x[best][k]));
    return d;
}

}  // namespace

FitProblem make_fit_problem(Netlist netlist, std::vector<FreeParam> free_params,
                            NetworkRecord target, FitObjective objective,
                            std::vector<double> weights) {
    if (free_params.empty())
        throw ValidationError("fit needs at least one free parameter");
    std::set<std::string> seen;
    for (const auto& fp : free_params) {
        if (!netlist.find(fp.label))
            throw ValidationError("free parameter '" + fp.label +
                                  "' does not name a netlist element");
        if (!seen.insert(fp.label).second)
            throw ValidationError("free parameter '" + fp.label + "' listed twice");
        if (!std::isfinite(fp.lo) || !std::isfinite(fp.hi) || fp.lo <= 0.0 || fp.lo >= fp.hi)
            throw ValidationError("free parameter '" + fp.label +
                                  "' needs positive bounds with lo < hi");
    }
    if (target.order() != 1)
        throw ValidationError("fit target must be a one-port record");
    if (weights.empty()) weights.assign(target.points(), 1.0);
    if (weights.size() != target.points())
        throw ValidationError("weight count does not match the target sweep");
    for (double w : weights)
        if (!std::isfinite(w) || w < 0.0)
            throw ValidationError("weights must be finite and nonnegative");
    return {std::move(netlist), std::move(free_params), std::move(target), std::move(weights),
            objective};
}

double fit_objective(const FitProblem& problem, const std::vector<double>& params) {
    if (params.size() != problem.free_params.size())
        throw ValidationError("parameter count does not match the free parameter list");
    std::map<std::string, double> overrides;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& fp = problem.free_params[k];
        if (!(params[k] >= fp.lo && params[k] <= fp.hi))
            throw ValidationError("parameter '" + fp.label + "' outside its bounds");
        overrides[fp.label] = params[k];
    }

    try {
        Netlist trial = problem.netlist.with_values(overrides);
        SweepSolveResult solved = solve_sparams(trial, problem.target.sweep());
        double total = 0.0;
        for (std::size_t k = 0; k < problem.target.points(); ++k) {
            Complex model = solved.record.at(k)(0, 0);
            Complex want = problem.target.at(k)(0, 0);
            if (problem.objective == FitObjective::ComplexLS) {
                total += problem.weights[k] * std::norm(model - want);
            } else {
                double diff = floored_db(model) - floored_db(want);
                total += problem.weights[k] * diff * diff;
            }
        }
        return total;
    } catch (const NumericalError& e) {
        double cond = e.condition_estimate();
        double logc = cond > 1.0 && std::isfinite(cond) ? std::log10(cond) : 300.0;
        return 1e6 + std::min(logc, 300.0);
    }
}

FitResult fit(const FitProblem& problem, const FitConfig& config) {
    std::size_t d = problem.free_params.size();
    std::size_t starts = std::max<std::size_t>(config.multistarts, 1);
    if (!config.initial.empty() && config.initial.size() != d)
        throw ValidationError("initial point size does not match the free parameter list");

    std::vector<double> llo(d), lhi(d);
    for (std::size_t k = 0; k < d; ++k) {
        llo[k] = std::log(problem.free_params[k].lo);
        lhi[k] = std::log(problem.free_params[k].hi);
    }
    auto clamp_log = [&](std::vector<double>& u) {
        for (std::size_t k = 0; k < d; ++k) u[k] = std::clamp(u[k], llo[k], lhi[k]);
    };
    auto eval_log = [&](const std::vector<double>& u) {
        std::vector<double> v(d);
        for (std::size_t k = 0; k < d; ++k)
            v[k] = std::clamp(std::exp(u[k]), problem.free_params[k].lo,
                              problem.free_params[k].hi);
        return fit_objective(problem, v);
    };

    // Latin hypercube over the log box: one stratum per start and dimension.
    std::mt19937_64 rng(config.seed);
    std::vector<std::vector<double>> start_points(starts, std::vector<double>(d));
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<std::size_t> strata(starts);
        std::iota(strata.begin(), strata.end(), 0);
        for (std::size_t i = starts; i-- > 1;)
            std::swap(strata[i], strata[rng() % (i + 1)]);
        for (std::size_t s = 0; s < starts; ++s) {
            double frac = (static_cast<double>(strata[s]) + u01(rng)) / starts;
            start_points[s][k] = llo[k] + frac * (lhi[k] - llo[k]);
        }
    }
    if (!config.initial.empty()) {
        for (std::size_t k = 0; k < d; ++k) {
            if (!(config.initial[k] >= problem.free_params[k].lo &&
                  config.initial[k] <= problem.free_params[k].hi))
                throw ValidationError("initial point outside bounds for '" +
                                      problem.free_params[k].label + "'");
            start_points[0][k] = std::log(config.initial[k]);
        }
        clamp_log(start_points[0]);
    }

    constexpr double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;

    FitResult result;
    result.residual = std::numeric_limits<double>::infinity();
    result.iterations = 0;
    result.converged = false;

    double running_best = std::numeric_limits<double>::infinity();
    std::vector<double> best_log;

    for (std::size_t s = 0; s < starts; ++s) {
        Simplex sx;
        sx.x.push_back(start_points[s]);
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<double> v = start_points[s];
            double step = 0.05 * (lhi[k] - llo[k]);
            v[k] += v[k] + step > lhi[k] ? -step : step;
            clamp_log(v);
            sx.x.push_back(std::move(v));
        }
        for (const auto& v : sx.x) sx.f.push_back(eval_log(v));

        bool start_converged = false;
        std::size_t iter = 0;
        for (; iter < config.max_iters; ++iter) {
            std::vector<std::size_t> ord(sx.x.size());
            std::iota(ord.begin(), ord.end(), 0);
            std::stable_sort(ord.begin(), ord.end(),
                             [&](std::size_t a, std::size_t b) { return sx.f[a] < sx.f[b]; });
            std::size_t best = ord.front(), worst = ord.back(), second = ord[ord.size() - 2];

            running_best = std::min(running_best, sx.f[best]);
            result.history.push_back(running_best);

            if (diameter(sx, best) < config.xtol || sx.f[worst] - sx.f[best] < config.ftol) {
                start_converged = true;
                break;
            }

            std::vector<double> centroid(d, 0.0);
            for (std::size_t v = 0; v < sx.x.size(); ++v) {
                if (v == worst) continue;
                for (std::size_t k = 0; k < d; ++k) centroid[k] += sx.x[v][k];
            }
            for (double& c : centroid) c /= static_cast<double>(d);

            auto blend = [&](const std::vector<double>& from, const std::vector<double>& to,
                             double t) {
                std::vector<double> out(d);
                for (std::size_t k = 0; k < d; ++k) out[k] = from[k] + t * (to[k] - from[k]);
                clamp_log(out);
                return out;
            };

            std::vector<double> xr = blend(centroid, sx.x[worst], -kAlpha);
            double fr = eval_log(xr);
            if (fr < sx.f[best]) {
                std::vector<double> xe = blend(centroid, sx.x[worst], -kGamma);
                double fe = eval_log(xe);
                if (fe < fr) {
                    sx.x[worst] = std::move(xe);
                    sx.f[worst] = fe;
                } else {
                    sx.x[worst] = std::move(xr);
                    sx.f[worst] = fr;
                }
            } else if (fr < sx.f[second]) {
                sx.x[worst] = std::move(xr);
                sx.f[worst] = fr;
            } else {
                bool outside = fr < sx.f[worst];
                std::vector<double> xc =
                    outside ? blend(centroid, xr, kRho) : blend(centroid, sx.x[worst], kRho);
                double fc = eval_log(xc);
                if ((outside && fc <= fr) || (!outside && fc < sx.f[worst])) {
                    sx.x[worst] = std::move(xc);
                    sx.f[worst] = fc;
                } else {
                    for (std::size_t v = 0; v < sx.x.size(); ++v) {
                        if (v == best) continue;
                        sx.x[v] = blend(sx.x[best], sx.x[v], kSigma);
                        sx.f[v] = eval_log(sx.x[v]);
                    }
                }
            }
        }
        result.iterations += iter;

        std::size_t best = 0;
        for (std::size_t v = 1; v < sx.f.size(); ++v)
            if (sx.f[v] < sx.f[best]) best = v;
        running_best = std::min(running_best, sx.f[best]);
        result.history.push_back(running_best);

        if (sx.f[best] < result.residual) {
            result.residual = sx.f[best];
            result.converged = start_converged;
            best_log = sx.x[best];
        }
    }

    result.values.resize(d);
    for (std::size_t k = 0; k < d; ++k)
        result.values[k] = std::clamp(std::exp(best_log[k]), problem.free_params[k].lo,
                                      problem.free_params[k].hi);
    return result;
}

FitSpec parse_fit_spec(const std::string& text) {
    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    std::string netlist_text;
    struct RawFree {
        std::string label, lo, hi;
        std::size_t line;
    };
    std::vector<RawFree> raw_frees;

    while (std::getline(stream, raw)) {
        ++line_no;
        std::string body = raw;
        if (auto hash = body.find('#'); hash != std::string::npos) body.erase(hash);
        std::istringstream toks(body);
        std::vector<std::string> t;
        std::string tok;
        while (toks >> tok) t.push_back(tok);
        if (!t.empty() && t[0] == "FREE") {
            if (t.size() != 4)
                throw ParseError("FREE line needs: FREE label lo hi", line_no);
            raw_frees.push_back({t[1], t[2], t[3], line_no});
            netlist_text += "\n";  // keep line numbers aligned
        } else {
            netlist_text += raw + "\n";
        }
    }

    Netlist netlist = parse_netlist(netlist_text);
    std::vector<FreeParam> frees;
    for (const auto& rf : raw_frees) {
        const CircuitElement* elem = netlist.find(rf.label);
        if (!elem)
            throw ParseError("FREE references unknown element '" + rf.label + "'", rf.line);
        double lo = parse_valued_unit(rf.lo, elem->kind, rf.line);
        double hi = parse_valued_unit(rf.hi, elem->kind, rf.line);
        frees.push_back({rf.label, lo, hi});
    }
    if (frees.empty())
        throw ParseError("fit specification has no FREE lines", line_no);
    return {std::move(netlist), std::move(frees)};
}

}  // namespace rfkit
