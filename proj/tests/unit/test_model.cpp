#include <doctest.h>

#include <cmath>

#include "adl/errors.hpp"
#include "adl/model.hpp"

using namespace adl;

namespace {

ModelParams base(double delta = 1.51, double K = 1000.0) {
    ModelParams p;
    p.delta = delta;
    p.C = 1.0;
    p.p = 0.22;
    p.tau = 1.3;
    p.kappa = 0.0;
    p.sigma = 1.0;
    p.alpha = 0.5;
    p.K = K;
    return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("birth rate follows the linear trade-off") {
    CHECK(birth_rate({0, 0}, base()) == 4.0);
    CHECK(birth_rate({1, 1}, base(1.51)) == doctest::Approx(2.49).epsilon(1e-15));
    CHECK(birth_rate({2, 2}, base(0.9)) == doctest::Approx(2.2).epsilon(1e-15));
}

TEST_CASE("lattice size and validation") {
    CHECK(base(1.51).L() == 2);
    CHECK(base(0.9).L() == 4);
    CHECK(base(4.0 / 3.0).L() == 3);
    ModelParams p = base();
    p.p = 0.3;
    CHECK_THROWS_WITH_AS(p.validate(), "p ∈ (0, 1/4)", ConfigError);
    p = base();
    p.delta = 4.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = base();
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = base();
    p.alpha = 1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK_NOTHROW(base().validate());
}

TEST_CASE("single active individual at the origin") {
    ModelParams p = base(1.51, 1000.0);
    PopulationState s(p.L());
    const TraitGrid grid(p);
    s.active[grid.index({0, 0})] = 1;
    const RateTable table = build_rate_table(s, p);
    const TraitRates& r = table.traits[grid.index({0, 0})];
    CHECK(r.birth_clone + r.birth_mut_dorm + r.birth_mut_hgt == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(r.death_active == doctest::Approx(1.0 + 1.0 / 1000.0).epsilon(1e-14));
    CHECK(r.to_dormant == 0.0);
    CHECK(r.birth_mut_dorm == doctest::Approx(4.0 * std::pow(1000.0, -0.5) / 2.0));
}

TEST_CASE("empty population has no rates") {
    ModelParams p = base();
    PopulationState s(p.L());
    const RateTable table = build_rate_table(s, p);
    CHECK(table.total() == 0.0);
}

TEST_CASE("transfer conversion between two occupied traits") {
    ModelParams p = base();
    const TraitGrid grid(p);
    PopulationState s(p.L());
    s.active[grid.index({0, 0})] = 1;
    s.active[grid.index({0, 1})] = 1;
    const RateTable table = build_rate_table(s, p);
    CHECK(table.traits[grid.index({0, 0})].convert_to[grid.index({0, 1})] ==
          doctest::Approx(0.65).epsilon(1e-14));
    CHECK(table.traits[grid.index({0, 1})].convert_to[grid.index({0, 0})] == 0.0);
}

TEST_CASE("competition-induced switching and boundary mutation mass") {
    ModelParams p = base(1.51, 500.0);
    const TraitGrid grid(p);
    PopulationState s(p.L());
    s.active[grid.index({1, 0})] = 40;
    s.active[grid.index({2, 2})] = 10;
    s.dormant[grid.index({1, 0})] = 7;
    const RateTable table = build_rate_table(s, p);
    const double ntot = 50.0, K = 500.0, x = 1.51;
    const TraitRates& r = table.traits[grid.index({1, 0})];
    CHECK(r.to_dormant == doctest::Approx(40.0 * p.C * p.p * x * ntot / K).epsilon(1e-14));
    CHECK(r.death_active == doctest::Approx(40.0 * (1.0 + p.C * (1.0 - p.p * x) * ntot / K)).epsilon(1e-14));
    CHECK(r.wake == doctest::Approx(7.0 * p.sigma));
    CHECK(r.death_dormant == 0.0);
    // (2,2) sits in the lattice corner: no mutation targets, all births clonal.
    const TraitRates& corner = table.traits[grid.index({2, 2})];
    CHECK(corner.birth_mut_dorm == 0.0);
    CHECK(corner.birth_mut_hgt == 0.0);
    CHECK(corner.birth_clone == doctest::Approx(10.0 * birth_rate({2, 2}, p)).epsilon(1e-14));
}

TEST_CASE("transfer totals agree donor-side and recipient-side") {
    ModelParams p = base(0.9, 1e4);
    const TraitGrid grid(p);
    PopulationState s(p.L());
    for (int i = 0; i < grid.size(); ++i) s.active[i] = 3 + 7 * i;
    const RateTable table = build_rate_table(s, p);
    const double ntot = static_cast<double>(s.total_active());
    double recipient_side = 0.0, donor_side = 0.0;
    for (int v = 0; v < grid.size(); ++v) {
        for (int u = 0; u < grid.size(); ++u) recipient_side += table.traits[v].convert_to[u];
    }
    for (int u = 0; u < grid.size(); ++u) {
        for (int v = 0; v < grid.size(); ++v) {
            if (grid.trait(u).n > grid.trait(v).n) {
                donor_side += p.tau * s.active[u] * s.active[v] / ntot;
            }
        }
    }
    CHECK(recipient_side == doctest::Approx(donor_side).epsilon(1e-13));
}

TEST_CASE("dormancy channel vanishes on the m = 0 row") {
    ModelParams p = base(0.9, 1e4);
    const TraitGrid grid(p);
    PopulationState s(p.L());
    for (int i = 0; i < grid.size(); ++i) s.active[i] = 100;
    const RateTable table = build_rate_table(s, p);
    for (int n = 0; n <= grid.L; ++n) CHECK(table.traits[grid.index({0, n})].to_dormant == 0.0);
}

TEST_CASE("initial state follows the starting conditions") {
    ModelParams p = base(1.51, 1e4);
    const TraitGrid grid(p);
    PopulationState s = initial_state(p);
    CHECK(s.active[grid.index({0, 0})] == 30000);
    CHECK(s.active[grid.index({0, 1})] == 100);
    CHECK(s.dormant[grid.index({0, 1})] == 0);
    CHECK(s.active[grid.index({1, 0})] == 100);
    CHECK(s.dormant[grid.index({1, 0})] == 100);
    CHECK(s.active[grid.index({1, 1})] == 0);
    CHECK(s.dormant[grid.index({1, 1})] == 0);

    ModelParams q = base(1.51, 1e6);
    q.alpha = 0.3;
    PopulationState t = initial_state(q);
    CHECK(t.active[grid.index({1, 1})] == 251);
    CHECK(t.dormant[grid.index({1, 1})] == 251);
}

TEST_CASE("initial exponents approach the limit profile as K grows") {
    double previous = 1e9;
    for (double K : {1e3, 1e4, 1e5}) {
        ModelParams p = base(1.51, K);
        p.alpha = 0.3;
        const TraitGrid grid(p);
        const PopulationState s = initial_state(p);
        double err = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            const TraitIndex t = grid.trait(i);
            const double beta = std::log(1.0 + s.total(i)) / std::log(K);
            err = std::max(err, std::abs(beta - std::max(0.0, 1.0 - (t.m + t.n) * p.alpha)));
        }
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("floor_power is exact at integer powers") {
    CHECK(floor_power(1e4, 0.5) == 100);
    CHECK(floor_power(1e6, 0.5) == 1000);
    CHECK(floor_power(1e15, 1.0 / 3.0) == 100000);
}

}  // TEST_SUITE
