#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "adl/competition.hpp"
#include "adl/errors.hpp"
#include "adl/fitness.hpp"
#include "adl/scenario.hpp"

using namespace adl;

namespace {

// Invader (b1, q) beats resident (a1, p): criteria of the forward four-dimensional case hold.
CompetitionParams forward_case() {
    CompetitionParams c;
    c.a1 = 3.0;
    c.p = 0.2;
    c.b1 = 2.9;
    c.q = 0.5;
    c.d1 = 1.0;
    c.d2 = 0.0;
    c.sigma2 = 1.0;
    c.C = 1.0;
    c.tau = 0.0;
    return c;
}

CompetitionParams reverse_case() {
    CompetitionParams c = forward_case();
    std::swap(c.a1, c.b1);
    std::swap(c.p, c.q);
    return c;
}

double dominant_by_eigensolve(double r, double off, double exit, double sigma2) {
    Eigen::Matrix2d m;
    m << r, sigma2, off, -exit;
    return Eigen::EigenSolver<Eigen::Matrix2d>(m).eigenvalues().real().maxCoeff();
}

}  // namespace

TEST_SUITE("competition") {

TEST_CASE("logistic equilibrium") {
    const auto plain = logistic_equilibrium(3.0, 1.0, 0.2, 1.0, 0.0, 2.0);
    CHECK(plain.active == doctest::Approx(1.0));
    CHECK(plain.dormant == 0.0);
    CHECK(logistic_equilibrium(1.0, 1.0, 0.2, 1.0, 0.3, 1.0).subcritical);

    CompetitionParams c = forward_case();
    c.d2 = 0.3;
    const auto e = x_equilibrium(c);
    const double denom = c.d2 + (1 - c.p) * c.sigma2;
    CHECK(e.active == doctest::Approx(2.0 * 1.3 / denom).epsilon(1e-14));
    CHECK(e.dormant == doctest::Approx(c.p * 4.0 * 1.3 / (denom * denom)).epsilon(1e-14));

    Eigen::VectorXd s = Eigen::VectorXd::Zero(4);
    s[0] = e.active;
    s[1] = e.dormant;
    CHECK(competition_rhs(s, c, CompetitionSystem::four_d).lpNorm<Eigen::Infinity>() < 1e-12);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
    y[0] = y[1] = 0.2;
    const double h = 0.01;
    for (int k = 0; k < 50000; ++k) {
        const Eigen::VectorXd k1 = competition_rhs(y, c, CompetitionSystem::four_d);
        const Eigen::VectorXd k2 = competition_rhs(y + 0.5 * h * k1, c, CompetitionSystem::four_d);
        const Eigen::VectorXd k3 = competition_rhs(y + 0.5 * h * k2, c, CompetitionSystem::four_d);
        const Eigen::VectorXd k4 = competition_rhs(y + h * k3, c, CompetitionSystem::four_d);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK(std::abs(y[0] - e.active) < 1e-8);
    CHECK(std::abs(y[1] - e.dormant) < 1e-8);
}

TEST_CASE("identical traits without transfer sit on the neutral boundary") {
    CompetitionParams c = forward_case();
    c.b1 = c.a1;
    c.q = c.p;
    const auto crit = invasion_criteria(c, CompetitionSystem::four_d);
    CHECK(std::abs(crit.y_det) < 1e-12);
    CHECK(std::abs(crit.y_growth) < 1e-12);
    CHECK_FALSE(criteria_hold(crit, CompetitionRole::forward));
    CHECK_FALSE(criteria_hold(crit, CompetitionRole::reverse));
}

TEST_CASE("growth rates reproduce the invasion fitness of trait pairs") {
    for (const char* name : {"example-2.1", "example-3.2", "example-3.5"}) {
        const ModelParams p = preset(name).params;
        const TraitGrid grid(p);
        for (TraitIndex inv : grid.traits()) {
            for (TraitIndex res : grid.traits()) {
                if (inv == res || !is_fit(inv, p) || !is_fit(res, p)) continue;
                const auto tc = competition_from_traits(inv, res, p);
                const auto crit = invasion_criteria(tc.params, tc.system);
                const bool swapped = tc.role == CompetitionRole::reverse;
                const double forward = swapped ? crit.x_growth : crit.y_growth;
                const double backward = swapped ? crit.y_growth : crit.x_growth;
                CHECK(forward == doctest::Approx(*invasion_fitness(inv, res, p, FitnessMode::resident_relative)).epsilon(1e-12));
                CHECK(backward == doctest::Approx(*invasion_fitness(res, inv, p, FitnessMode::resident_relative)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("example 2.1 traits invade each other") {
    const ModelParams p = preset("example-2.1").params;
    const auto tc = competition_from_traits({2, 4}, {0, 2}, p);
    CHECK(tc.system == CompetitionSystem::three_d);
    CHECK(tc.role == CompetitionRole::reverse);
    const auto crit = invasion_criteria(tc.params, tc.system);
    CHECK(crit.invader_supercritical);
    CHECK(crit.resident_supercritical);
    CHECK_FALSE(criteria_hold(crit, CompetitionRole::forward));
    CHECK_FALSE(criteria_hold(crit, CompetitionRole::reverse));
}

TEST_CASE("criterion signs agree with a direct eigensolve") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int found = 0;
    for (int attempt = 0; attempt < 100000 && found < 20; ++attempt) {
        CompetitionParams c;
        c.a1 = 1.5 + 2.0 * u01(rng);
        c.b1 = 1.5 + 2.0 * u01(rng);
        c.p = 0.9 * u01(rng);
        c.q = 0.9 * u01(rng);
        c.d2 = 0.5 * u01(rng);
        c.sigma2 = 0.2 + u01(rng);
        c.C = 0.5 + u01(rng);
        c.tau = u01(rng);
        c.direction = u01(rng) < 0.5 ? TransferDirection::invader_receives : TransferDirection::invader_donates;
        const auto crit = invasion_criteria(c, CompetitionSystem::four_d);
        if (!criteria_hold(crit, CompetitionRole::forward)) continue;
        ++found;
        const double st = c.transfer_sign() * c.tau;
        const double xa = x_equilibrium(c).active, ya = y_equilibrium(c, CompetitionSystem::four_d).active;
        const double exit = c.d2 + c.sigma2;
        const double y_direct = dominant_by_eigensolve(c.b1 + st - c.d1 - c.C * xa, c.q * c.C * xa, exit, c.sigma2);
        const double x_direct = dominant_by_eigensolve(c.a1 - st - c.d1 - c.C * ya, c.p * c.C * ya, exit, c.sigma2);
        CHECK(y_direct > 0.0);
        CHECK(x_direct < 0.0);
        CHECK(crit.y_growth == doctest::Approx(y_direct).epsilon(1e-12));
        CHECK(crit.x_growth == doctest::Approx(x_direct).epsilon(1e-12));
    }
    CHECK(found == 20);
}

TEST_CASE("vector fields keep the nonnegative orthant") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (auto system : {CompetitionSystem::four_d, CompetitionSystem::three_d}) {
        CompetitionParams c = forward_case();
        c.tau = 0.7;
        const int n = state_size(system);
        for (int k = 0; k < 500; ++k) {
            Eigen::VectorXd s(n);
            for (int i = 0; i < n; ++i) s[i] = 4.0 * u01(rng);
            const int face = k % n;
            s[face] = 0.0;
            CHECK(competition_rhs(s, c, system)[face] >= 0.0);
        }
        CHECK(competition_rhs(Eigen::VectorXd::Zero(n), c, system).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("analytic Jacobian matches finite differences") {
    CompetitionParams c = forward_case();
    c.tau = 0.6;
    c.d2 = 0.2;
    Eigen::VectorXd s(4);
    s << 1.1, 0.4, 0.7, 0.3;
    const Eigen::MatrixXd J = competition_jacobian(s, c, CompetitionSystem::four_d);
    for (int j = 0; j < 4; ++j) {
        Eigen::VectorXd up = s, down = s;
        up[j] += 1e-6;
        down[j] -= 1e-6;
        const Eigen::VectorXd col = (competition_rhs(up, c, CompetitionSystem::four_d) -
                                     competition_rhs(down, c, CompetitionSystem::four_d)) / 2e-6;
        CHECK((col - J.col(j)).lpNorm<Eigen::Infinity>() < 1e-7);
    }
}

TEST_CASE("growth condition") {
    const CompetitionParams c = forward_case();
    const auto start = invasion_start(c, CompetitionSystem::four_d, CompetitionRole::forward, 1e-4);
    const auto good = growth_condition(start, c, CompetitionSystem::four_d, CompetitionRole::forward);
    CHECK(good.satisfied);
    CHECK_FALSE(good.boundary);

    Eigen::VectorXd active_only = start;
    active_only[2] += active_only[3];
    active_only[3] = 0.0;
    CHECK_FALSE(growth_condition(active_only, c, CompetitionSystem::four_d, CompetitionRole::forward).satisfied);

    Eigen::VectorXd empty = start;
    empty[2] = 0.0;
    const auto edge = growth_condition(empty, c, CompetitionSystem::four_d, CompetitionRole::forward);
    CHECK_FALSE(edge.satisfied);
    CHECK(edge.boundary);
}

TEST_CASE("competition time: convergence and monotonicity in the invader size") {
    const CompetitionParams c = forward_case();
    REQUIRE(criteria_hold(invasion_criteria(c, CompetitionSystem::four_d), CompetitionRole::forward));
    const auto target = boundary_equilibria(c, CompetitionSystem::four_d)[2];
    double previous = 1e300;
    for (double m : {1e-3, 1e-2, 1e-1}) {
        const auto out = competition_time(c, CompetitionSystem::four_d, CompetitionRole::forward, 1e-3, 1e-6, m);
        CHECK(out.time < previous);
        previous = out.time;
        CHECK((out.state - target).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("reverse role converges to the resident-free x equilibrium") {
    const CompetitionParams c = reverse_case();
    REQUIRE(criteria_hold(invasion_criteria(c, CompetitionSystem::four_d), CompetitionRole::reverse));
    const auto out = competition_time(c, CompetitionSystem::four_d, CompetitionRole::reverse, 1e-3, 1e-6, 0.1);
    const auto target = boundary_equilibria(c, CompetitionSystem::four_d)[1];
    CHECK((out.state - target).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("mismatched criteria never converge") {
    const CompetitionParams c = reverse_case();
    CHECK_THROWS_WITH_AS(
        competition_time(c, CompetitionSystem::four_d, CompetitionRole::forward, 1e-3, 1e-6, 0.1, 200.0),
        doctest::Contains("no convergence"), NumericalError);
}

TEST_CASE("only the three boundary equilibria, and the winner is stable") {
    const CompetitionParams c = forward_case();
    RootScanOptions opt;
    opt.grid_points = 20;
    const auto scan = scan_equilibria(c, CompetitionSystem::four_d, opt);
    const auto eq = boundary_equilibria(c, CompetitionSystem::four_d);
    CHECK(scan.roots.size() == 3);
    for (const auto& root : scan.roots) {
        double best = 1e300;
        for (const auto& e : eq) best = std::min(best, (root - e).lpNorm<Eigen::Infinity>());
        CHECK(best < 1e-8);
    }
    const Eigen::MatrixXd J = competition_jacobian(eq[2], c, CompetitionSystem::four_d);
    CHECK(Eigen::EigenSolver<Eigen::MatrixXd>(J).eigenvalues().real().maxCoeff() < 0.0);
}

TEST_CASE("three-dimensional system with a plain invader") {
    const ModelParams p = preset("example-3.2").params;
    const auto tc = competition_from_traits({0, 2}, {1, 1}, p);
    CHECK(tc.system == CompetitionSystem::three_d);
    CHECK(tc.role == CompetitionRole::forward);
    CHECK(tc.params.direction == TransferDirection::invader_receives);
    CHECK(tc.params.p == doctest::Approx(p.p * p.delta));
}

}  // TEST_SUITE
