#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "adl/limit_process.hpp"
#include "adl/scenario.hpp"
#include "oracles.hpp"

using namespace adl;

namespace {

// Cycle contraction of example 3.2 from the closed-form fitness values.
double closed_form_contraction(const ModelParams& p) {
    const double d = p.delta, tau = p.tau, sigma = p.sigma, pp = p.p;
    const double s_11_00 = (-d + tau - sigma + std::sqrt((tau - d + sigma) * (tau - d + sigma) + 12 * pp * d)) / 2;
    const double s_02_00 = tau - d;
    const double s_00_11 = 3 - (3 - d) / (1 - pp * d) - tau;
    const double s_02_11 = 3 - d - (3 - d) / (1 - pp * d) + tau;
    const double s_11_02 = (-tau - sigma + std::sqrt((sigma - tau) * (sigma - tau) + 4 * pp * d * (3 - d))) / 2;
    const double s_00_02 = d - tau;
    const double c1 = 1.0 / s_02_11;
    const double c2 = -s_00_11 / s_00_02 * c1;
    const double c3 = -s_11_02 / s_11_00 * c2;
    return -c3 * s_02_00;
}

}  // namespace

TEST_SUITE("limit") {

TEST_CASE("initial exponents") {
    const ModelParams p = preset("example-3.2").params;
    const TraitGrid grid(p);
    const auto v = initial_exponents(p);
    CHECK(v[grid.index({0, 0})] == 1.0);
    CHECK(v[grid.index({0, 1})] == 0.5);
    CHECK(v[grid.index({1, 0})] == 0.5);
    CHECK(v[grid.index({1, 1})] == 0.0);
    CHECK(v[grid.index({0, 2})] == 0.0);
}

TEST_CASE("example 3.1 runs to the horizon without accumulation") {
    const auto traj = run_limit(preset("example-3.1").params, 100.0);
    CHECK(traj.termination == Termination::horizon_reached);
    CHECK_FALSE(traj.accumulation_point.has_value());
    CHECK(traj.end_time() == doctest::Approx(100.0));
    CHECK(to_string(traj.termination) == "horizon-reached");
}

TEST_CASE("exponents are continuous and stay in [0, 1]") {
    for (const char* name : {"example-3.1", "example-3.2", "example-3.4", "example-3.6"}) {
        const Scenario s = preset(name);
        const auto traj = run_limit(s.params, 60.0, s.mode);
        for (const auto& beta : traj.betas) {
            const auto& bp = beta.breakpoints();
            const auto& vals = beta.values();
            for (std::size_t j = 0; j < bp.size(); ++j) {
                CHECK(vals[j] >= -1e-12);
                CHECK(vals[j] <= 1.0 + 1e-12);
                if (j + 1 < bp.size()) {
                    const double left_end = vals[j] + beta.slopes()[j] * (bp[j + 1] - bp[j]);
                    CHECK(std::abs(left_end - vals[j + 1]) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("one macroscopic trait in every standard phase") {
    const ModelParams p = preset("example-3.2").params;
    const auto traj = run_limit(p, 40.0);
    const TraitGrid grid(p);
    REQUIRE(traj.phases.size() > 3);
    for (const Phase& ph : traj.phases) {
        const double mid = 0.5 * (ph.start + ph.end);
        int at_one = 0;
        for (int i = 0; i < grid.size(); ++i) at_one += std::abs(traj.betas[i](mid) - 1.0) < 1e-9;
        CHECK(at_one == 1);
        CHECK(traj.beta(ph.resident)(mid) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("successive residents meet at exponent 1") {
    const auto traj = run_limit(preset("example-3.1").params, 100.0);
    for (std::size_t k = 1; k < traj.phases.size(); ++k) {
        const double s = traj.phases[k].start;
        const double incoming = traj.beta(traj.phases[k].resident)(s);
        const double outgoing = traj.beta(traj.phases[k - 1].resident)(s);
        CHECK(std::abs(incoming - outgoing) < 1e-9);
        CHECK(std::abs(incoming - 1.0) < 1e-9);
    }
}

TEST_CASE("example 3.2 accumulates with the closed-form contraction") {
    const ModelParams p = preset("example-3.2").params;
    const auto traj = run_limit(p, 100.0);
    CHECK(traj.termination == Termination::coexistence_accumulation);
    REQUIRE(traj.accumulation.has_value());
    CHECK(std::abs(traj.accumulation->ratio - closed_form_contraction(p)) < 1e-6);
    CHECK(*traj.accumulation_point < 100.0);
    CHECK(traj.accumulation->period == 3);
}

TEST_CASE("negative fitness everywhere keeps the first resident") {
    ModelParams p = preset("example-3.1").params;
    p.tau = 0.0;
    p.p = 0.1;
    const auto traj = run_limit(p, 50.0);
    CHECK(traj.phases.size() == 1);
    CHECK(traj.termination == Termination::horizon_reached);
    const TraitGrid grid(p);
    CHECK(traj.beta({0, 0})(50.0) == 1.0);
    // Mutants sit at the mutation floor below the resident.
    for (int i = 1; i < grid.size(); ++i) {
        const TraitIndex t = grid.trait(i);
        CHECK(traj.betas[i](50.0) == doctest::Approx(std::max(0.0, 1.0 - (t.m + t.n) * p.alpha)));
    }
}

TEST_CASE("offspring lines start when a parent reaches alpha") {
    ModelParams p = preset("example-3.1").params;
    p.alpha = 0.6;
    const TraitGrid grid(p);
    const auto start = initial_exponents(p);
    CHECK(start[grid.index({0, 1})] == doctest::Approx(0.4));
    CHECK(start[grid.index({0, 2})] == 0.0);
    const PhaseState st = begin_phase(p, 0.0, {0, 0}, Regime::resident, start);
    const double slope = *invasion_fitness({0, 1}, {0, 0}, p, FitnessMode::resident_relative);
    REQUIRE(slope > 0.0);
    const double expected = (0.6 - 0.4) / slope;
    if (*invasion_fitness({0, 2}, {0, 0}, p, FitnessMode::resident_relative) > 0.0) {
        CHECK(st.activation[grid.index({0, 2})] == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(st.value(grid.index({0, 2}), 0.5 * expected) == 0.0);
}

TEST_CASE("first switch comes no later when transfer is stronger") {
    double previous = 1e300;
    for (double tau : {1.0, 1.2, 1.4, 1.6, 1.8}) {
        ModelParams p = preset("example-3.1").params;
        p.tau = tau;
        const auto traj = run_limit(p, 100.0);
        const double first = traj.phases.size() > 1 ? traj.phases[1].start : 1e300;
        CHECK(first <= previous);
        previous = first;
    }
}

TEST_CASE("extended presets pass through dominant phases") {
    for (const char* name : {"example-3.6", "example-3.7"}) {
        const Scenario s = preset(name);
        const auto traj = run_limit(s.params, 100.0, LimitMode::extended);
        bool dominant = false;
        for (const Phase& ph : traj.phases) dominant |= ph.regime == Regime::dominant;
        CHECK(dominant);
    }
}

TEST_CASE("event engine agrees with the forward construction") {
    for (const char* name : {"example-3.1", "example-3.4"}) {
        const Scenario s = preset(name);
        const bool extended = s.mode == LimitMode::extended;
        const auto traj = run_limit(s.params, 30.0, s.mode);
        const oracle::ForwardConstruction ref(s.params, 30.0, extended, 1e-4);
        const TraitGrid grid(s.params);
        double sup = 0.0;
        for (int k = 0; k <= 600; ++k) {
            const double t = 30.0 * k / 600.0;
            for (int i = 0; i < grid.size(); ++i) {
                sup = std::max(sup, std::abs(traj.betas[i](t) - ref.value(i, t)));
            }
        }
        CHECK(sup < 1e-6);
    }
}

}  // TEST_SUITE
