#include "adl/competition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adl/errors.hpp"
#include "adl/fitness.hpp"

namespace adl {

namespace {

constexpr double kTinyTotal = 1e-300;

bool single_type_y(const CompetitionParams& params, CompetitionSystem system) {
    return system == CompetitionSystem::three_d || params.q == 0.0;
}

struct Split {
    double xa, xd, ya, yd;
};

Split unpack(const Eigen::VectorXd& s, CompetitionSystem system) {
    if (system == CompetitionSystem::four_d) return {s[0], s[1], s[2], s[3]};
    return {s[0], s[1], s[2], 0.0};
}

// Mean-matrix summary of a (possibly bi-type) invader with active growth `r` and
// switching coefficient `off` into dormancy.
struct Growth {
    double value, det, ratio;
    bool super, sub;
};

Growth invader_growth(double r, double off, double d2, double sigma2) {
    const double exit = d2 + sigma2;
    if (off == 0.0) return {r, r, 0.0, r > 0.0, r < 0.0};
    const double lambda = dominant_eigenvalue(r, -exit, off, sigma2);
    const double bound = sigma2 * off / exit;
    return {lambda, -r * exit - off * sigma2, (lambda - r) / sigma2, -r < bound, -r > bound};
}

}  // namespace

double CompetitionParams::transfer_sign() const {
    switch (direction) {
        case TransferDirection::invader_receives: return 1.0;
        case TransferDirection::invader_donates: return -1.0;
        default: return 0.0;
    }
}

void CompetitionParams::validate() const {
    auto finite_nonneg = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string(name) + " must be >= 0");
    };
    finite_nonneg(a1, "a1");
    finite_nonneg(b1, "b1");
    finite_nonneg(d1, "d1");
    finite_nonneg(d2, "d2");
    finite_nonneg(tau, "tau");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be > 0");
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("C must be > 0");
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("p ∈ [0, 1)");
    if (!(q >= 0.0 && q < 1.0)) throw ConfigError("q ∈ [0, 1)");
}

LogisticEquilibrium logistic_equilibrium(double b1, double d1, double d2, double sigma2, double p,
                                         double C) {
    if (b1 <= d1) return {0.0, 0.0, true};
    const double growth = b1 - d1;
    const double denom = d2 + (1.0 - p) * sigma2;
    return {growth * (d2 + sigma2) / (C * denom),
            p * growth * growth * (d2 + sigma2) / (C * denom * denom), false};
}

LogisticEquilibrium x_equilibrium(const CompetitionParams& params) {
    return logistic_equilibrium(params.a1, params.d1, params.d2, params.sigma2, params.p, params.C);
}

LogisticEquilibrium y_equilibrium(const CompetitionParams& params, CompetitionSystem system) {
    const double q = system == CompetitionSystem::three_d ? 0.0 : params.q;
    return logistic_equilibrium(params.b1, params.d1, params.d2, params.sigma2, q, params.C);
}

InvasionCriteria invasion_criteria(const CompetitionParams& params, CompetitionSystem system) {
    params.validate();
    const double s = params.transfer_sign() * params.tau;
    const double xa = x_equilibrium(params).active;
    const double ya = y_equilibrium(params, system).active;
    const double q = single_type_y(params, system) ? 0.0 : params.q;

    const Growth y = invader_growth(params.b1 + s - params.d1 - params.C * xa, q * params.C * xa,
                                    params.d2, params.sigma2);
    const Growth x = invader_growth(params.a1 - s - params.d1 - params.C * ya,
                                    params.p * params.C * ya, params.d2, params.sigma2);
    InvasionCriteria out;
    out.y_growth = y.value;
    out.y_det = y.det;
    out.y_ratio = y.ratio;
    out.invader_supercritical = y.super;
    out.invader_subcritical = y.sub;
    out.x_growth = x.value;
    out.x_det = x.det;
    out.x_ratio = x.ratio;
    out.resident_subcritical = x.sub;
    out.resident_supercritical = x.super;
    return out;
}

bool criteria_hold(const InvasionCriteria& criteria, CompetitionRole role) {
    if (role == CompetitionRole::forward) {
        return criteria.invader_supercritical && criteria.resident_subcritical;
    }
    return criteria.invader_subcritical && criteria.resident_supercritical;
}

int state_size(CompetitionSystem system) { return system == CompetitionSystem::four_d ? 4 : 3; }

Eigen::VectorXd competition_rhs(const Eigen::VectorXd& state, const CompetitionParams& params,
                                CompetitionSystem system) {
    if (state.size() != state_size(system)) throw ConfigError("competition state has wrong size");
    const auto [xa, xd, ya, yd] = unpack(state, system);
    const double total = xa + ya;
    const double exchange = total > kTinyTotal ? params.transfer_sign() * params.tau * xa * ya / total : 0.0;
    const double exit = params.d2 + params.sigma2;
    const double C = params.C;

    Eigen::VectorXd out(state.size());
    out[0] = xa * (params.a1 - params.d1 - C * total) + xd * params.sigma2 - exchange;
    out[1] = params.p * C * xa * total - exit * xd;
    out[2] = ya * (params.b1 - params.d1 - C * total) + yd * params.sigma2 + exchange;
    if (system == CompetitionSystem::four_d) out[3] = params.q * C * ya * total - exit * yd;
    if (!out.allFinite()) throw NumericalError("competition field: non-finite derivative");
    return out;
}

Eigen::MatrixXd competition_jacobian(const Eigen::VectorXd& state, const CompetitionParams& params,
                                     CompetitionSystem system) {
    const auto [xa, xd, ya, yd] = unpack(state, system);
    (void)xd;
    (void)yd;
    const double total = xa + ya;
    const double st = params.transfer_sign() * params.tau;
    double dx = 0.0, dy = 0.0;  // derivatives of xa ya / (xa + ya)
    if (total > kTinyTotal) {
        dx = ya * ya / (total * total);
        dy = xa * xa / (total * total);
    }
    const double C = params.C, exit = params.d2 + params.sigma2;
    const int n = state_size(system);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    J(0, 0) = params.a1 - params.d1 - C * total - C * xa - st * dx;
    J(0, 1) = params.sigma2;
    J(0, 2) = -C * xa - st * dy;
    J(1, 0) = params.p * C * (total + xa);
    J(1, 1) = -exit;
    J(1, 2) = params.p * C * xa;
    J(2, 0) = -C * ya + st * dx;
    J(2, 2) = params.b1 - params.d1 - C * total - C * ya + st * dy;
    if (system == CompetitionSystem::four_d) {
        J(2, 3) = params.sigma2;
        J(3, 0) = params.q * C * ya;
        J(3, 2) = params.q * C * (total + ya);
        J(3, 3) = -exit;
    }
    return J;
}

std::vector<Eigen::VectorXd> boundary_equilibria(const CompetitionParams& params,
                                                 CompetitionSystem system) {
    const int n = state_size(system);
    const LogisticEquilibrium x = x_equilibrium(params), y = y_equilibrium(params, system);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x_alone = origin, y_alone = origin;
    x_alone[0] = x.active;
    x_alone[1] = x.dormant;
    y_alone[2] = y.active;
    if (system == CompetitionSystem::four_d) y_alone[3] = y.dormant;
    return {origin, x_alone, y_alone};
}

GrowthCondition growth_condition(const Eigen::VectorXd& state, const CompetitionParams& params,
                                 CompetitionSystem system, CompetitionRole role) {
    const auto [xa, xd, ya, yd] = unpack(state, system);
    const double total = xa + ya;
    const double st = params.transfer_sign() * params.tau;
    const double exit = params.d2 + params.sigma2;
    const double C = params.C;
    if (role == CompetitionRole::forward) {
        if (ya <= 0.0) return {false, true};
        const double lower = (params.d1 - params.b1 + C * total - st * xa / total) / params.sigma2;
        if (single_type_y(params, system)) return {lower < 0.0, false};
        const double ratio = yd / ya;
        const double upper = params.q * C * total / exit;
        return {upper > ratio && ratio > lower, false};
    }
    if (xa <= 0.0) return {false, true};
    const double lower = (params.d1 - params.a1 + C * total + st * ya / total) / params.sigma2;
    if (params.p == 0.0) return {lower < 0.0, false};
    const double ratio = xd / xa;
    const double upper = params.p * C * total / exit;
    return {upper > ratio && ratio > lower, false};
}

Eigen::VectorXd invasion_start(const CompetitionParams& params, CompetitionSystem system,
                               CompetitionRole role, double invader_total) {
    const InvasionCriteria crit = invasion_criteria(params, system);
    const auto eq = boundary_equilibria(params, system);
    auto split = [&](double ratio, bool single) -> std::pair<double, double> {
        if (single) return {invader_total, 0.0};
        return {invader_total / (1.0 + ratio), invader_total * ratio / (1.0 + ratio)};
    };
    if (role == CompetitionRole::forward) {
        Eigen::VectorXd s = eq[1];
        const auto [active, dormant] = split(crit.y_ratio, single_type_y(params, system));
        s[2] = active;
        if (system == CompetitionSystem::four_d) s[3] = dormant;
        return s;
    }
    Eigen::VectorXd s = eq[2];
    const auto [active, dormant] = split(crit.x_ratio, params.p == 0.0);
    s[0] = active;
    s[1] = dormant;
    return s;
}

CompetitionOutcome competition_time(const CompetitionParams& params, CompetitionSystem system,
                                    CompetitionRole role, double eps, double eps_prime, double m,
                                    double horizon) {
    if (!(eps > 0.0) || !(eps_prime > 0.0) || !(m > 0.0)) {
        throw ConfigError("eps, eps_prime and m must be > 0");
    }
    const auto eq = boundary_equilibria(params, system);
    const Eigen::VectorXd target = role == CompetitionRole::forward ? eq[2] : eq[1];
    const bool forward = role == CompetitionRole::forward;
    auto done = [&](const Eigen::VectorXd& s) {
        const auto [xa, xd, ya, yd] = unpack(s, system);
        const double resident = forward ? xa + xd : ya + yd;
        if (resident > eps_prime) return false;
        const int first = forward ? 2 : 0;
        const int last = forward ? state_size(system) : 2;
        for (int i = first; i < last; ++i) {
            if (std::abs(s[i] - target[i]) > eps_prime) return false;
        }
        return true;
    };

    Eigen::VectorXd s = invasion_start(params, system, role, m * eps);
    const double h = 0.01;
    double t = 0.0;
    while (!done(s)) {
        if (t >= horizon) {
            throw NumericalError("no convergence: competition did not settle by t = " +
                                 std::to_string(horizon));
        }
        const Eigen::VectorXd k1 = competition_rhs(s, params, system);
        const Eigen::VectorXd k2 = competition_rhs(s + 0.5 * h * k1, params, system);
        const Eigen::VectorXd k3 = competition_rhs(s + 0.5 * h * k2, params, system);
        const Eigen::VectorXd k4 = competition_rhs(s + h * k3, params, system);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return {t, s};
}

std::optional<Eigen::VectorXd> newton_root(const CompetitionParams& params,
                                           CompetitionSystem system, Eigen::VectorXd start,
                                           double tol, int iterations) {
    Eigen::VectorXd s = std::move(start);
    Eigen::VectorXd F = competition_rhs(s, params, system);
    double norm = F.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < iterations; ++it) {
        if (norm <= tol) return s;
        const Eigen::MatrixXd J = competition_jacobian(s, params, system);
        const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
        if (!step.allFinite()) return std::nullopt;
        double scale = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k, scale *= 0.5) {
            const Eigen::VectorXd trial = s + scale * step;
            const Eigen::VectorXd Ft = competition_rhs(trial, params, system);
            const double trial_norm = Ft.lpNorm<Eigen::Infinity>();
            if (trial_norm < norm || trial_norm <= tol) {
                s = trial;
                F = Ft;
                norm = trial_norm;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (norm <= tol) return s;
    return std::nullopt;
}

RootScan scan_equilibria(const CompetitionParams& params, CompetitionSystem system,
                         const RootScanOptions& options) {
    params.validate();
    const int n = state_size(system);
    const int g = std::max(2, options.grid_points);
    const auto eq = boundary_equilibria(params, system);
    std::vector<double> upper(n, 0.0);
    for (const auto& e : eq) {
        for (int i = 0; i < n; ++i) upper[i] = std::max(upper[i], e[i]);
    }
    for (double& u : upper) u = std::max(u * options.margin, 1e-3);

    long long total = 1;
    for (int i = 0; i < n; ++i) total *= g;
    std::vector<float> residual(static_cast<std::size_t>(total));
    auto point = [&](long long index) {
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) {
            s[i] = upper[i] * static_cast<double>(index % g) / (g - 1);
            index /= g;
        }
        return s;
    };
    for (long long k = 0; k < total; ++k) {
        residual[k] = static_cast<float>(competition_rhs(point(k), params, system).lpNorm<Eigen::Infinity>());
    }

    RootScan scan;
    std::vector<long long> stride(n, 1);
    for (int i = 1; i < n; ++i) stride[i] = stride[i - 1] * g;
    for (long long k = 0; k < total; ++k) {
        bool seed = residual[k] < options.prefilter;
        if (!seed) {
            seed = true;
            for (int i = 0; i < n && seed; ++i) {
                const long long coord = (k / stride[i]) % g;
                if (coord > 0 && residual[k - stride[i]] < residual[k]) seed = false;
                if (coord < g - 1 && residual[k + stride[i]] < residual[k]) seed = false;
            }
        }
        if (!seed) continue;
        ++scan.seeds;
        const auto root = newton_root(params, system, point(k), options.newton_tol,
                                      options.newton_iterations);
        if (!root) continue;
        ++scan.converged;
        if (root->minCoeff() < -1e-9) continue;
        const bool known = std::any_of(scan.roots.begin(), scan.roots.end(), [&](const auto& r) {
            return (r - *root).template lpNorm<Eigen::Infinity>() < 1e-6;
        });
        if (!known) scan.roots.push_back(*root);
    }
    return scan;
}

TraitCompetition competition_from_traits(TraitIndex invader, TraitIndex resident,
                                         const ModelParams& params) {
    TraitCompetition out;
    CompetitionParams& c = out.params;
    c.d1 = 1.0;
    c.d2 = params.kappa;
    c.sigma2 = params.sigma;
    c.C = params.C;
    c.tau = params.tau;

    const bool invader_dormant = invader.m > 0;
    const bool resident_dormant = resident.m > 0;
    TraitIndex x = resident, y = invader;
    if (invader_dormant && !resident_dormant) {
        x = invader;
        y = resident;
        out.system = CompetitionSystem::three_d;
        out.role = CompetitionRole::reverse;
    } else if (!invader_dormant && resident_dormant) {
        out.system = CompetitionSystem::three_d;
    }
    c.a1 = birth_rate(x, params);
    c.b1 = birth_rate(y, params);
    c.p = params.p * x.x(params);
    c.q = params.p * y.x(params);
    c.direction = y.n > x.n   ? TransferDirection::invader_receives
                  : y.n < x.n ? TransferDirection::invader_donates
                              : TransferDirection::none;
    return out;
}

}  // namespace adl
