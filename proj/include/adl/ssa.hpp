#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "adl/model.hpp"

namespace adl {

enum class Channel : int {
    birth_clone,
    birth_mut_dorm,
    birth_mut_hgt,
    death_active,
    to_dormant,
    death_dormant,
    wake,
    transfer,
};
inline constexpr int kChannelCount = 8;
using ChannelCounts = std::array<std::uint64_t, kChannelCount>;

struct SamplingSpec {
    int points = 1000;  // uniform grid on [0, horizon] in log K units
    std::vector<double> times_logK;  // explicit grid; overrides `points` when non-empty

    std::vector<double> grid(double horizon_logK) const;
};

struct SimTrajectory {
    ModelParams params;
    std::uint64_t seed = 0;
    double horizon_logK = 0.0;
    std::vector<double> times;  // raw time
    std::vector<std::vector<std::int64_t>> active;   // [sample][trait]
    std::vector<std::vector<std::int64_t>> dormant;  // [sample][trait]
    std::vector<ChannelCounts> channel_counts;       // cumulative, per sample
    std::vector<std::uint64_t> events;               // cumulative, per sample
    bool extinct = false;  // total rate hit zero before the horizon

    double log_K() const;
    std::vector<double> times_logK() const;
};

// Exact direct-method simulation from `initial`; time starts at initial.time.
SimTrajectory simulate(const ModelParams& params, const PopulationState& initial,
                       double horizon_logK, std::uint64_t seed, const SamplingSpec& sampling = {});

// Starts from initial_state(params).
SimTrajectory simulate(const ModelParams& params, double horizon_logK, std::uint64_t seed,
                       const SamplingSpec& sampling = {});

// Replicates r = 0..count-1 run with seed ^ r, spread over worker threads.
std::vector<SimTrajectory> simulate_replicates(const ModelParams& params, double horizon_logK,
                                               std::uint64_t seed, int count,
                                               const SamplingSpec& sampling = {});

// log(1 + active + dormant) / log K per trait: result[trait][sample].
std::vector<std::vector<double>> exponents(const SimTrajectory& traj);

}  // namespace adl
