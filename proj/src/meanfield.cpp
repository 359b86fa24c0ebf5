#include "adl/meanfield.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "adl/errors.hpp"
#include "adl/fitness.hpp"
#include "adl/ode.hpp"

namespace adl {

namespace {

constexpr double kTinyDensity = 1e-300;

void rhs_into(const DensityState& s, const ModelParams& params, bool with_mutation,
              DensityState& out) {
    const TraitGrid grid(s.L);
    const int count = grid.size();
    out.L = s.L;
    out.active.assign(count, 0.0);
    out.dormant.assign(count, 0.0);

    const double total = s.total_active();
    std::vector<double> rows(s.L + 1, 0.0);
    for (int i = 0; i < count; ++i) rows[grid.trait(i).n] += s.active[i];
    const double mutation = with_mutation ? std::pow(params.carrying_capacity(), -params.alpha) : 0.0;

    for (int i = 0; i < count; ++i) {
        const TraitIndex t = grid.trait(i);
        double transfer = 0.0;
        if (total >= kTinyDensity) {
            double below = 0.0, above = 0.0;
            for (int n = 0; n <= s.L; ++n) {
                if (n < t.n) below += rows[n];
                if (n > t.n) above += rows[n];
            }
            transfer = params.tau * (below - above) / total;
        }
        const double growth = 3.0 - (t.m + t.n) * params.delta / 2.0 - params.C * total + transfer;
        out.active[i] = params.sigma * s.dormant[i] + s.active[i] * growth;
        out.dormant[i] = params.p * t.m * params.delta * params.C * s.active[i] * total -
                         (params.sigma + params.kappa) * s.dormant[i];
        if (with_mutation && t.m + t.n > 0) {
            double parents = 0.0;
            if (t.m > 0) parents += s.active[grid.index({t.m - 1, t.n})];
            if (t.n > 0) parents += s.active[grid.index({t.m, t.n - 1})];
            out.active[i] += (kTraitExtent - (t.m + t.n - 1) * params.delta / 2.0) * mutation * parents;
        }
        if (!std::isfinite(out.active[i]) || !std::isfinite(out.dormant[i])) {
            throw NumericalError("meanfield: non-finite derivative at trait " + to_string(t));
        }
    }
}

}  // namespace

DensityState::DensityState(int max_index)
    : L(max_index),
      active((max_index + 1) * (max_index + 1), 0.0),
      dormant((max_index + 1) * (max_index + 1), 0.0) {}

double DensityState::total_active() const {
    return std::accumulate(active.begin(), active.end(), 0.0);
}

DensityState initial_densities(const ModelParams& params) {
    const PopulationState counts = initial_state(params);
    const double K = params.carrying_capacity();
    DensityState out(counts.L);
    for (std::size_t i = 0; i < counts.active.size(); ++i) {
        out.active[i] = static_cast<double>(counts.active[i]) / K;
        out.dormant[i] = static_cast<double>(counts.dormant[i]) / K;
    }
    return out;
}

DensityState full_rhs(const DensityState& state, const ModelParams& params, bool with_mutation) {
    DensityState out;
    rhs_into(state, params, with_mutation, out);
    return out;
}

std::array<double, 2> resident_pair_rhs(double z_a, double z_d, TraitIndex trait,
                                        const ModelParams& params) {
    const double x = trait.x(params);
    return {(net_growth(trait, params) - params.C * z_a) * z_a + params.sigma * z_d,
            params.C * params.p * x * z_a * z_a - (params.kappa + params.sigma) * z_d};
}

std::vector<double> MeanFieldPath::times_logK() const {
    const double lk = std::log(params.carrying_capacity());
    std::vector<double> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) out[j] = times[j] / lk;
    return out;
}

std::vector<std::vector<double>> MeanFieldPath::exponents() const {
    const double K = params.carrying_capacity();
    const double lk = std::log(K);
    const std::size_t traits = states.empty() ? 0 : states.front().active.size();
    std::vector<std::vector<double>> out(traits, std::vector<double>(states.size()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        for (std::size_t i = 0; i < traits; ++i) {
            out[i][j] = std::log(1.0 + K * (states[j].active[i] + states[j].dormant[i])) / lk;
        }
    }
    return out;
}

double default_euler_step(const ModelParams& params, double horizon_logK) {
    const double K = params.carrying_capacity();
    return horizon_logK * std::log(K) * std::max(1.0 / K, 1e-5);
}

MeanFieldPath integrate_euler(const DensityState& initial, const ModelParams& params,
                              double horizon_logK, const EulerOptions& options) {
    params.validate();
    const double K = params.carrying_capacity();
    const double dt = options.dt > 0.0 ? options.dt : default_euler_step(params, horizon_logK);
    const double raw_horizon = horizon_logK * std::log(K);
    const auto steps = static_cast<long long>(std::ceil(raw_horizon / dt - 1e-9));
    const double bound = 10.0 * (kTraitExtent / params.C);
    const int samples = std::max(2, options.samples);

    MeanFieldPath path;
    path.params = params;
    path.dt = dt;
    path.steps = steps;

    DensityState state = initial;
    DensityState deriv;
    long long next_sample = 0;
    int sample_index = 0;
    auto sample_step = [&](int j) {
        return static_cast<long long>(std::llround(static_cast<double>(steps) * j / (samples - 1)));
    };
    next_sample = sample_step(0);

    for (long long k = 0; k <= steps; ++k) {
        const double t = std::min(static_cast<double>(k) * dt, raw_horizon);
        if (k == next_sample) {
            state.time = t;
            path.times.push_back(t);
            path.states.push_back(state);
            ++sample_index;
            next_sample = sample_index < samples ? sample_step(sample_index) : -1;
            // Distinct sample indices can round to the same step on very short runs.
            while (next_sample == k && sample_index < samples) {
                ++sample_index;
                next_sample = sample_index < samples ? sample_step(sample_index) : -1;
            }
        }
        if (k == steps) break;
        const double h = std::min(dt, raw_horizon - t);
        rhs_into(state, params, options.with_mutation, deriv);
        for (std::size_t i = 0; i < state.active.size(); ++i) {
            state.active[i] += h * deriv.active[i];
            state.dormant[i] += h * deriv.dormant[i];
            if (options.clamp) {
                if (state.active[i] < 1.0 / K) state.active[i] = 0.0;
                if (state.dormant[i] < 1.0 / K) state.dormant[i] = 0.0;
            }
            if (!std::isfinite(state.active[i]) || !std::isfinite(state.dormant[i]) ||
                state.active[i] > bound || state.dormant[i] > bound) {
                throw NumericalError("meanfield: density left the a priori bound at step " +
                                     std::to_string(k + 1));
            }
        }
    }
    return path;
}

DensityState integrate_rk4(const DensityState& initial, const ModelParams& params, double t_end,
                           double dt, bool with_mutation) {
    const int count = static_cast<int>(initial.active.size());
    auto pack = [&](const DensityState& s) {
        Vec y(2 * count);
        for (int i = 0; i < count; ++i) {
            y[i] = s.active[i];
            y[count + i] = s.dormant[i];
        }
        return y;
    };
    DensityState scratch(initial.L), deriv;
    auto f = [&](double, const Vec& y, Vec& dy) {
        for (int i = 0; i < count; ++i) {
            scratch.active[i] = y[i];
            scratch.dormant[i] = y[count + i];
        }
        rhs_into(scratch, params, with_mutation, deriv);
        for (int i = 0; i < count; ++i) {
            dy[i] = deriv.active[i];
            dy[count + i] = deriv.dormant[i];
        }
    };
    const Vec y = rk4_integrate(f, pack(initial), initial.time, t_end, dt);
    DensityState out(initial.L);
    for (int i = 0; i < count; ++i) {
        out.active[i] = y[i];
        out.dormant[i] = y[count + i];
    }
    out.time = t_end;
    return out;
}

}  // namespace adl
