#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "adl/model.hpp"

namespace adl {

// Transfer between the x-process and the y-process. The y-process is the invader of
// the forward propositions: `invader_receives` moves individuals from x_a to y_a.
enum class TransferDirection { invader_receives, invader_donates, none };

// four_d: both processes have a dormant class, state (x_a, x_d, y_a, y_d).
// three_d: y is single-type, state (x_a, x_d, y).
enum class CompetitionSystem { four_d, three_d };

// forward: x starts at its equilibrium and y invades; reverse: the other way round.
enum class CompetitionRole { forward, reverse };

struct CompetitionParams {
    double a1 = 2.0;      // birth rate of x
    double b1 = 2.0;      // birth rate of y
    double d1 = 1.0;      // active death rate
    double d2 = 0.0;      // dormant death rate
    double sigma2 = 1.0;  // wake rate
    double p = 0.0;       // dormancy fraction of x
    double q = 0.0;       // dormancy fraction of y (unused in three_d)
    double C = 1.0;
    double tau = 0.0;
    TransferDirection direction = TransferDirection::invader_receives;

    // +1 if y gains from transfer, -1 if it loses, 0 without transfer.
    double transfer_sign() const;
    void validate() const;
};

struct LogisticEquilibrium {
    double active = 0.0;
    double dormant = 0.0;
    bool subcritical = false;  // birth <= death; both densities are 0
};

LogisticEquilibrium logistic_equilibrium(double b1, double d1, double d2, double sigma2, double p,
                                         double C);

// Resident equilibria of each process alone (y has no dormant mass in three_d).
LogisticEquilibrium x_equilibrium(const CompetitionParams& params);
LogisticEquilibrium y_equilibrium(const CompetitionParams& params, CompetitionSystem system);

struct InvasionCriteria {
    // y invading x at equilibrium.
    double y_growth = 0.0;  // dominant eigenvalue (scalar rate when y is single-type)
    double y_det = 0.0;
    double y_ratio = 0.0;   // pi_d / pi_a of the left principal eigenvector
    bool invader_supercritical = false;
    bool invader_subcritical = false;
    // x invading y at equilibrium.
    double x_growth = 0.0;
    double x_det = 0.0;
    double x_ratio = 0.0;
    bool resident_subcritical = false;
    bool resident_supercritical = false;
};

InvasionCriteria invasion_criteria(const CompetitionParams& params, CompetitionSystem system);

// True when the criteria of the proposition for this role hold.
bool criteria_hold(const InvasionCriteria& criteria, CompetitionRole role);

int state_size(CompetitionSystem system);

// Vector fields of the competition systems. Throws NumericalError on non-finite output.
Eigen::VectorXd competition_rhs(const Eigen::VectorXd& state, const CompetitionParams& params,
                                CompetitionSystem system);
Eigen::MatrixXd competition_jacobian(const Eigen::VectorXd& state, const CompetitionParams& params,
                                     CompetitionSystem system);

// The three nonnegative equilibria: origin, x alone, y alone.
std::vector<Eigen::VectorXd> boundary_equilibria(const CompetitionParams& params,
                                                 CompetitionSystem system);

struct GrowthCondition {
    bool satisfied = false;
    bool boundary = false;  // the invader's active density is 0
};

// Two-sided bound on the invader's dormant/active ratio under which the system
// converges to the invader's equilibrium.
GrowthCondition growth_condition(const Eigen::VectorXd& state, const CompetitionParams& params,
                                 CompetitionSystem system, CompetitionRole role);

// Resident at its equilibrium, invader of total size `invader_total` split along the
// principal left eigenvector of its mean matrix.
Eigen::VectorXd invasion_start(const CompetitionParams& params, CompetitionSystem system,
                               CompetitionRole role, double invader_total);

struct CompetitionOutcome {
    double time = 0.0;
    Eigen::VectorXd state;
};

// Integrates from invasion_start(.., m * eps) until the resident's total is <= eps_prime
// and every invader component is within eps_prime of its equilibrium. Throws
// NumericalError "no convergence" past `horizon`.
CompetitionOutcome competition_time(const CompetitionParams& params, CompetitionSystem system,
                                    CompetitionRole role, double eps, double eps_prime, double m,
                                    double horizon = 1e4);

struct RootScanOptions {
    int grid_points = 50;      // per axis
    double prefilter = 1e-3;   // residual below which a grid point seeds Newton
    double newton_tol = 1e-12;
    int newton_iterations = 100;
    double margin = 1.25;      // grid extends to margin times the largest equilibrium value
};

struct RootScan {
    std::vector<Eigen::VectorXd> roots;  // distinct converged nonnegative roots
    int seeds = 0;
    int converged = 0;
};

// Grid scan of the residual followed by Newton polishing from every grid point below the
// prefilter threshold or at a local minimum of the residual along each axis.
RootScan scan_equilibria(const CompetitionParams& params, CompetitionSystem system,
                         const RootScanOptions& options = {});

// Newton iteration with backtracking; empty if it fails to converge.
std::optional<Eigen::VectorXd> newton_root(const CompetitionParams& params,
                                           CompetitionSystem system, Eigen::VectorXd start,
                                           double tol = 1e-12, int iterations = 100);

// Competition parameters for `invader` entering a population of `resident`. The y-process
// is the invader unless the invader has dormancy and the resident has none, in which case
// the three-dimensional system is used with the invader as x and the role reversed.
struct TraitCompetition {
    CompetitionParams params;
    CompetitionSystem system = CompetitionSystem::four_d;
    CompetitionRole role = CompetitionRole::forward;
};

TraitCompetition competition_from_traits(TraitIndex invader, TraitIndex resident,
                                         const ModelParams& params);

}  // namespace adl
