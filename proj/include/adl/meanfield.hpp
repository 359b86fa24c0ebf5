#pragma once

#include <array>
#include <optional>
#include <vector>

#include "adl/model.hpp"

namespace adl {

// Densities are counts divided by K.
struct DensityState {
    int L = 0;
    std::vector<double> active;
    std::vector<double> dormant;
    double time = 0.0;  // raw time

    DensityState() = default;
    explicit DensityState(int max_index);

    double total_active() const;
};

// initial_state(params) divided by K.
DensityState initial_densities(const ModelParams& params);

// Derivative of the grid system; time in the result is left at 0.
DensityState full_rhs(const DensityState& state, const ModelParams& params, bool with_mutation);

std::array<double, 2> resident_pair_rhs(double z_a, double z_d, TraitIndex trait,
                                        const ModelParams& params);

struct EulerOptions {
    double dt = 0.0;  // raw time step; 0 selects T log K max(1/K, 1e-5)
    bool clamp = false;  // snap densities below 1/K to zero after each step
    bool with_mutation = true;
    int samples = 2001;  // stored states, evenly spaced in steps
};

struct MeanFieldPath {
    ModelParams params;
    double dt = 0.0;
    long long steps = 0;
    std::vector<double> times;  // raw time
    std::vector<DensityState> states;

    std::vector<double> times_logK() const;
    // log(1 + K (x^a + x^d)) / log K per trait: result[trait][sample].
    std::vector<std::vector<double>> exponents() const;
};

double default_euler_step(const ModelParams& params, double horizon_logK);

// Forward Euler on [0, horizon_logK log K]. Throws NumericalError on non-finite values or
// when a density exceeds 10 (4/C).
MeanFieldPath integrate_euler(const DensityState& initial, const ModelParams& params,
                              double horizon_logK, const EulerOptions& options = {});

// Same system integrated with fixed-step RK4 (used to validate the Euler scheme).
DensityState integrate_rk4(const DensityState& initial, const ModelParams& params, double t_end,
                           double dt, bool with_mutation);

}  // namespace adl
