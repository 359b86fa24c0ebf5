#include "adl/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adl/errors.hpp"

namespace adl {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double net_growth(TraitIndex trait, const ModelParams& params) {
    return 3.0 - (trait.x(params) + trait.y(params)) / 2.0;
}

bool is_fit(TraitIndex trait, const ModelParams& params) { return net_growth(trait, params) > 0.0; }

Equilibrium equilibrium(TraitIndex trait, const ModelParams& params) {
    const double g = net_growth(trait, params);
    if (g <= 0.0) return {};
    const double px = params.p * trait.x(params);
    const double exit = params.kappa + params.sigma;
    const double denom = params.kappa + (1.0 - px) * params.sigma;
    return {g * exit / (params.C * denom), px * g * g * exit / (params.C * denom * denom)};
}

double resident_pressure(TraitIndex resident, const ModelParams& params) {
    const double px = params.p * resident.x(params);
    return net_growth(resident, params) * (params.kappa + params.sigma) /
           (params.kappa + (1.0 - px) * params.sigma);
}

double dominant_eigenvalue(double r1, double r2, double sigma1, double sigma2) {
    const double trace = r1 + r2;
    const double root = std::sqrt((r1 - r2) * (r1 - r2) + 4.0 * sigma1 * sigma2);
    // Avoid cancellation when the trace is negative and the eigenvalue is near zero.
    if (trace < 0.0) return 2.0 * (r1 * r2 - sigma1 * sigma2) / (trace - root);
    return (trace + root) / 2.0;
}

std::optional<FitnessSpec> fitness_spec(TraitIndex invader, TraitIndex resident,
                                        const ModelParams& params, FitnessMode mode) {
    FitnessSpec spec;
    spec.mode = mode;
    spec.kind = invader.m == 0 ? FitnessCase::one_type : FitnessCase::bi_type;
    const double transfer = params.tau * sign(invader.y(params) - resident.y(params));
    spec.r2 = -(params.kappa + params.sigma);
    spec.sigma2 = params.sigma;
    if (mode == FitnessMode::extended) {
        spec.r1 = net_growth(invader, params) + transfer;
        return spec;
    }
    if (!is_fit(resident, params)) return std::nullopt;
    const double pressure = resident_pressure(resident, params);
    spec.r1 = net_growth(invader, params) - pressure + transfer;
    spec.sigma1 = params.p * invader.x(params) * pressure;
    return spec;
}

double evaluate(const FitnessSpec& spec) {
    if (spec.kind == FitnessCase::one_type) return spec.r1;
    if (spec.mode == FitnessMode::extended) return std::max(spec.r1, spec.r2);
    return dominant_eigenvalue(spec.r1, spec.r2, spec.sigma1, spec.sigma2);
}

std::optional<double> invasion_fitness(TraitIndex invader, TraitIndex resident,
                                       const ModelParams& params, FitnessMode mode) {
    const auto spec = fitness_spec(invader, resident, params, mode);
    if (!spec) return std::nullopt;
    return evaluate(*spec);
}

FitnessMatrix::FitnessMatrix(const ModelParams& params, FitnessMode mode)
    : grid_(params), mode_(mode), entries_(grid_.size() * grid_.size()) {
    for (int i = 0; i < grid_.size(); ++i) {
        for (int j = 0; j < grid_.size(); ++j) {
            auto& e = entries_[i * grid_.size() + j];
            e = invasion_fitness(grid_.trait(i), grid_.trait(j), params, mode);
            // Self-invasion is neutral; pin it instead of keeping rounding noise.
            if (i == j && e && mode == FitnessMode::resident_relative) e = 0.0;
        }
    }
}

const std::optional<double>& FitnessMatrix::at(TraitIndex invader, TraitIndex resident) const {
    return entries_[grid_.index(invader) * grid_.size() + grid_.index(resident)];
}

void check_nonzero_fitness(const ModelParams& params, double tol) {
    const TraitGrid grid(params);
    for (const TraitIndex resident : grid.traits()) {
        if (!is_fit(resident, params)) continue;
        for (const TraitIndex invader : grid.traits()) {
            if (invader == resident) continue;
            const double s = *invasion_fitness(invader, resident, params, FitnessMode::resident_relative);
            if (std::abs(s) <= tol) {
                std::ostringstream msg;
                msg << "fitness: S(" << to_string(invader) << "," << to_string(resident)
                    << ") = " << s
                    << " is zero within tolerance; the limit process is undefined";
                throw ConfigError(msg.str());
            }
        }
    }
}

}  // namespace adl
