#include "doctest.h"

#include <cmath>

#include "rfkit/errors.hpp"
#include "rfkit/fit.hpp"
#include "support/helpers.hpp"

using namespace rfkit;
using namespace testsupport;

namespace {

// One shunt resistor: S11 = (r - z0) / (r + z0) at every frequency, so the
// objective is available in closed form.
FitProblem single_r_problem(double target_r, FitObjective objective = FitObjective::ComplexLS,
                            std::vector<double> weights = {}) {
    Netlist netlist({{ElementKind::R, "R1", "p1", "0", 100.0}}, {{"p1", "0", 50.0}});
    auto target = solve_sparams(netlist.with_values({{"R1", target_r}}),
                                FrequencySweep({3e9}))
                      .record;
    return make_fit_problem(netlist, {{"R1", 1.0, 1000.0}}, target, objective,
                            std::move(weights));
}

FitProblem one_stage_problem(FitObjective objective = FitObjective::ComplexLS) {
    auto netlist = build_resonator_ladder({{StageTopology::SeriesRlcShunt, 50.0, 1e-9,
                                            2.8145e-12}});
    auto target =
        solve_sparams(netlist, FrequencySweep(linspace(2.6e9, 4.7e9, 101))).record;
    std::vector<FreeParam> free_params = {
        {"R1", 5.0, 500.0}, {"L1", 0.1e-9, 10e-9}, {"C1", 0.1e-12, 30e-12}};
    return make_fit_problem(netlist.with_values({{"R1", 30.0}, {"L1", 2e-9}, {"C1", 5e-12}}),
                            free_params, target, objective);
}

}  // namespace

TEST_CASE("objective matches the closed-form reflection mismatch") {
    auto problem = single_r_problem(50.0);
    // template at R=100 vs target at R=50: S11_model = 50/150 = 1/3, S11_target = 0
    CHECK(std::abs(fit_objective(problem, {100.0}) - 1.0 / 9.0) < 1e-12);
    CHECK(fit_objective(problem, {50.0}) < 1e-30);
}

TEST_CASE("zero weights zero the objective") {
    auto problem = single_r_problem(50.0, FitObjective::ComplexLS, {0.0});
    CHECK(fit_objective(problem, {100.0}) == 0.0);
}

TEST_CASE("objective rejects out-of-bounds parameters") {
    auto problem = single_r_problem(50.0);
    CHECK_THROWS_AS(fit_objective(problem, {0.5}), ValidationError);
    CHECK_THROWS_AS(fit_objective(problem, {2000.0}), ValidationError);
    CHECK_THROWS_AS(fit_objective(problem, {100.0, 1.0}), ValidationError);
}

TEST_CASE("singular solves turn into a large finite penalty") {
    Netlist netlist({{ElementKind::L, "L1", "p1", "n1", 1e8},
                     {ElementKind::L, "L2", "n1", "0", 1e8}},
                    {{"p1", "0", 50.0}});
    auto target =
        record_from_db({3e9}, {-20.0});
    auto problem = make_fit_problem(netlist, {{"L1", 1e-9, 1e9}}, target);
    double penalty = fit_objective(problem, {1e8});
    CHECK(std::isfinite(penalty));
    CHECK(penalty >= 1e6);
}

TEST_CASE("one free resistor is recovered to a fraction of a percent") {
    auto problem = single_r_problem(130.0);
    FitConfig config;
    config.seed = 7;
    auto result = fit(problem, config);
    CHECK(std::abs(result.values[0] - 130.0) / 130.0 < 0.01);
    CHECK(result.residual < 1e-10);
}

TEST_CASE("starting at the truth converges immediately") {
    auto problem = one_stage_problem();
    FitConfig config;
    config.multistarts = 1;
    config.max_iters = 2000;
    config.initial = {50.0, 1e-9, 2.8145e-12};
    auto result = fit(problem, config);
    CHECK(result.residual < 1e-18);
    CHECK(result.converged);
    CHECK(result.iterations <= 500);
}

TEST_CASE("fit is deterministic for a fixed seed") {
    auto problem = one_stage_problem();
    FitConfig config;
    config.multistarts = 3;
    config.max_iters = 400;
    config.seed = 42;
    auto a = fit(problem, config);
    auto b = fit(problem, config);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    CHECK(a.residual == b.residual);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i] == b.history[i]);
}

TEST_CASE("history tracks the running best and never increases") {
    auto problem = one_stage_problem();
    FitConfig config;
    config.multistarts = 2;
    config.max_iters = 300;
    config.seed = 3;
    auto result = fit(problem, config);
    REQUIRE(!result.history.empty());
    for (std::size_t i = 1; i < result.history.size(); ++i)
        CHECK(result.history[i] <= result.history[i - 1]);
    CHECK(result.history.back() == result.residual);
}

TEST_CASE("solutions scale with the frequency axis under the log parameterization") {
    // Same physics on two axes: halving every frequency doubles the fitted L.
    // The log-space optimizer must land on equivalent answers for both.
    Netlist netlist({{ElementKind::R, "R1", "p1", "n1", 50.0},
                     {ElementKind::L, "L1", "n1", "0", 1e-9}},
                    {{"p1", "0", 50.0}});
    auto freqs = linspace(1e9, 5e9, 41);
    std::vector<double> freqs_down(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) freqs_down[i] = freqs[i] / 10.0;

    auto target_a = solve_sparams(netlist, FrequencySweep(freqs)).record;
    auto target_b =
        solve_sparams(netlist.with_values({{"L1", 1e-8}}), FrequencySweep(freqs_down)).record;

    auto guess = netlist.with_values({{"L1", 3e-9}});
    auto problem_a = make_fit_problem(guess, {{"L1", 1e-11, 1e-7}}, target_a);
    auto problem_b = make_fit_problem(guess.with_values({{"L1", 3e-8}}),
                                      {{"L1", 1e-10, 1e-6}}, target_b);

    FitConfig config;
    config.multistarts = 4;
    config.seed = 11;
    auto a = fit(problem_a, config);
    auto b = fit(problem_b, config);
    CHECK(std::abs(a.values[0] - 1e-9) / 1e-9 < 1e-6);
    CHECK(std::abs(b.values[0] - 1e-8) / 1e-8 < 1e-6);
    CHECK(std::abs(b.values[0] - 10.0 * a.values[0]) / b.values[0] < 1e-5);
}

TEST_CASE("two-stage model reproduces a structured reflection curve") {
    // Parallel stage first so its output node carries the shunt stage; a
    // trailing series-connected stage would dangle and carry no current.
    std::vector<ResonatorStage> truth = {{StageTopology::ParallelRlcSeries, 90.0, 2.4e-9,
                                          0.9e-12},
                                         {StageTopology::SeriesRlcShunt, 35.0, 1.2e-9,
                                          2.2e-12}};
    auto netlist = build_resonator_ladder(truth);
    auto sweep = FrequencySweep(linspace(2.6e9, 4.7e9, 85));
    auto target = solve_sparams(netlist, sweep).record;

    std::vector<FreeParam> free_params = {{"R1", 5.0, 500.0},  {"L1", 0.1e-9, 10e-9},
                                          {"C1", 0.1e-12, 30e-12}, {"R2", 5.0, 500.0},
                                          {"L2", 0.1e-9, 10e-9},   {"C2", 0.1e-12, 30e-12}};
    auto start = netlist.with_values({{"R1", 50.0},
                                      {"L1", 1e-9},
                                      {"C1", 1e-12},
                                      {"R2", 50.0},
                                      {"L2", 1e-9},
                                      {"C2", 1e-12}});
    auto problem = make_fit_problem(start, free_params, target, FitObjective::DbMagLS);

    FitConfig config;
    config.multistarts = 6;
    config.max_iters = 1500;
    config.seed = 5;
    auto result = fit(problem, config);

    auto fitted = solve_sparams(start.with_values({{"R1", result.values[0]},
                                                   {"L1", result.values[1]},
                                                   {"C1", result.values[2]},
                                                   {"R2", result.values[3]},
                                                   {"L2", result.values[4]},
                                                   {"C2", result.values[5]}}),
                                sweep)
                      .record;
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        double want = db20(target.at(k)(0, 0));
        double got = db20(fitted.at(k)(0, 0));
        CHECK(std::abs(want - got) < 0.1);
    }
}

TEST_CASE("problem construction validates its pieces") {
    Netlist netlist({{ElementKind::R, "R1", "p1", "0", 100.0}}, {{"p1", "0", 50.0}});
    auto target = record_from_db({2e9, 3e9}, {-10.0, -12.0});

    CHECK_THROWS_AS(make_fit_problem(netlist, {}, target), ValidationError);
    CHECK_THROWS_AS(make_fit_problem(netlist, {{"R9", 1.0, 10.0}}, target), ValidationError);
    CHECK_THROWS_AS(make_fit_problem(netlist, {{"R1", 10.0, 10.0}}, target), ValidationError);
    CHECK_THROWS_AS(make_fit_problem(netlist, {{"R1", -1.0, 10.0}}, target), ValidationError);
    CHECK_THROWS_AS(make_fit_problem(netlist, {{"R1", 1.0, 10.0}, {"R1", 1.0, 10.0}}, target),
                    ValidationError);
    CHECK_THROWS_AS(
        make_fit_problem(netlist, {{"R1", 1.0, 10.0}}, target, FitObjective::ComplexLS,
                         {1.0}),
        ValidationError);
    CHECK_THROWS_AS(
        make_fit_problem(netlist, {{"R1", 1.0, 10.0}}, target, FitObjective::ComplexLS,
                         {1.0, -1.0}),
        ValidationError);

    Netlist two_port({{ElementKind::R, "R1", "p1", "p2", 100.0}},
                     {{"p1", "0", 50.0}, {"p2", "0", 50.0}});
    auto two_port_target = solve_sparams(two_port, FrequencySweep({2e9, 3e9})).record;
    CHECK_THROWS_AS(make_fit_problem(netlist, {{"R1", 1.0, 10.0}}, two_port_target),
                    ValidationError);
}

TEST_CASE("fit spec parser attaches bounds to template elements") {
    std::string text =
        "# matching stub\n"
        "R R1 p1 n1 30ohm\n"
        "L L1 n1 0 1nH\n"
        "C C1 n1 0 2pF\n"
        "FREE L1 0.1nH 10nH\n"
        "FREE C1 100fF 30pF\n"
        "PORT 1 p1 0 50\n";
    auto spec = parse_fit_spec(text);
    CHECK(spec.netlist.elements().size() == 3);
    REQUIRE(spec.free_params.size() == 2);
    CHECK(spec.free_params[0].label == "L1");
    CHECK(spec.free_params[0].lo == doctest::Approx(1e-10).epsilon(1e-12));
    CHECK(spec.free_params[0].hi == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(spec.free_params[1].lo == doctest::Approx(1e-13).epsilon(1e-12));

    CHECK_THROWS_AS(parse_fit_spec("R R1 p1 0 50ohm\nFREE Lx 1nH 2nH\nPORT 1 p1 0 50\n"),
                    ParseError);
    CHECK_THROWS_WITH_AS(parse_fit_spec("R R1 p1 0 50ohm\nPORT 1 p1 0 50\n"),
                         doctest::Contains("FREE"), ParseError);
    CHECK_THROWS_AS(
        parse_fit_spec("R R1 p1 0 50ohm\nFREE R1 10nH 20nH\nPORT 1 p1 0 50\n"), ParseError);
}
