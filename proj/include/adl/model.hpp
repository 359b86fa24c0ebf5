#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adl {

// Trait-space extent and birth-rate intercept. Fixed by the model.
inline constexpr double kTraitExtent = 4.0;

struct ModelParams {
    double delta = 1.0;   // lattice spacing
    double C = 1.0;       // competition coefficient
    double p = 0.2;       // dormancy-initiation coefficient
    double tau = 0.0;     // transfer rate
    double kappa = 0.0;   // dormant death rate
    double sigma = 1.0;   // resuscitation rate
    double alpha = 0.5;   // mutation exponent
    std::optional<double> K;  // carrying capacity; unset for limit computations

    // Largest lattice index, floor(4/delta).
    int L() const;
    int trait_count() const { return (L() + 1) * (L() + 1); }
    // Throws ConfigError naming the first violated invariant.
    void validate() const;
    double carrying_capacity() const;  // throws if K is unset
};

struct TraitIndex {
    int m = 0;  // dormancy index
    int n = 0;  // transfer index

    double x(const ModelParams& params) const { return m * params.delta; }
    double y(const ModelParams& params) const { return n * params.delta; }
    auto operator<=>(const TraitIndex&) const = default;
};

std::string to_string(TraitIndex trait);

// Flat indexing of the (L+1) x (L+1) lattice, row-major in m.
struct TraitGrid {
    int L = 0;

    explicit TraitGrid(int max_index) : L(max_index) {}
    explicit TraitGrid(const ModelParams& params) : L(params.L()) {}

    int size() const { return (L + 1) * (L + 1); }
    int index(TraitIndex t) const { return t.m * (L + 1) + t.n; }
    TraitIndex trait(int index) const { return {index / (L + 1), index % (L + 1)}; }
    bool contains(TraitIndex t) const { return t.m >= 0 && t.n >= 0 && t.m <= L && t.n <= L; }
    std::vector<TraitIndex> traits() const;
};

struct PopulationState {
    int L = 0;
    std::vector<std::int64_t> active;
    std::vector<std::int64_t> dormant;
    double time = 0.0;  // raw time

    PopulationState() = default;
    explicit PopulationState(int max_index);

    std::int64_t total_active() const;
    std::int64_t total_dormant() const;
    std::int64_t total(int index) const { return active[index] + dormant[index]; }
};

struct TraitRates {
    double birth_clone = 0.0;
    double birth_mut_dorm = 0.0;  // offspring at (m+1, n)
    double birth_mut_hgt = 0.0;   // offspring at (m, n+1)
    double death_active = 0.0;
    double to_dormant = 0.0;
    double death_dormant = 0.0;
    double wake = 0.0;
    // convert_to[u]: one active individual of this trait becomes trait u (n_u > n).
    std::vector<double> convert_to;

    double total() const;
};

struct RateTable {
    int L = 0;
    std::vector<TraitRates> traits;

    double total() const;
};

double birth_rate(TraitIndex trait, const ModelParams& params);

RateTable build_rate_table(const PopulationState& state, const ModelParams& params);

PopulationState initial_state(const ModelParams& params);

// floor(K^e) with protection against pow() landing just below an integer.
std::int64_t floor_power(double K, double exponent);

}  // namespace adl
