#include "adl/model.hpp"

#include <cmath>
#include <numeric>

#include "adl/errors.hpp"

namespace adl {

int ModelParams::L() const {
    // The small offset keeps spacings like 4/3 from losing a lattice point to rounding.
    return static_cast<int>(std::floor(kTraitExtent / delta + 1e-12));
}

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!std::isfinite(delta) || !(delta > 0.0 && delta < kTraitExtent)) fail("delta ∈ (0, 4)");
    if (!std::isfinite(p) || !(p > 0.0 && p < 0.25)) fail("p ∈ (0, 1/4)");
    if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 1.0)) fail("alpha ∈ (0, 1)");
    if (!std::isfinite(sigma) || !(sigma > 0.0)) fail("sigma > 0");
    if (!std::isfinite(kappa) || !(kappa >= 0.0)) fail("kappa ≥ 0");
    if (!std::isfinite(tau) || !(tau >= 0.0)) fail("tau ≥ 0");
    if (!std::isfinite(C) || !(C > 0.0)) fail("C > 0");
    if (L() < 1) fail("delta: L = floor(4/delta) must be ≥ 1");
    if (K) {
        if (!std::isfinite(*K) || *K < 1.0 || std::floor(*K) != *K) fail("K: positive integer");
    }
}

double ModelParams::carrying_capacity() const {
    if (!K) throw ConfigError("K: required for finite-population computations");
    return *K;
}

std::string to_string(TraitIndex trait) {
    return "(" + std::to_string(trait.m) + "," + std::to_string(trait.n) + ")";
}

std::vector<TraitIndex> TraitGrid::traits() const {
    std::vector<TraitIndex> out;
    out.reserve(size());
    for (int i = 0; i < size(); ++i) out.push_back(trait(i));
    return out;
}

PopulationState::PopulationState(int max_index)
    : L(max_index),
      active((max_index + 1) * (max_index + 1), 0),
      dormant((max_index + 1) * (max_index + 1), 0) {}

std::int64_t PopulationState::total_active() const {
    return std::accumulate(active.begin(), active.end(), std::int64_t{0});
}

std::int64_t PopulationState::total_dormant() const {
    return std::accumulate(dormant.begin(), dormant.end(), std::int64_t{0});
}

double TraitRates::total() const {
    double s = birth_clone + birth_mut_dorm + birth_mut_hgt + death_active + to_dormant +
               death_dormant + wake;
    for (double r : convert_to) s += r;
    return s;
}

double RateTable::total() const {
    double s = 0.0;
    for (const auto& t : traits) s += t.total();
    return s;
}

double birth_rate(TraitIndex trait, const ModelParams& params) {
    return kTraitExtent - (trait.m + trait.n) * params.delta / 2.0;
}

RateTable build_rate_table(const PopulationState& state, const ModelParams& params) {
    const TraitGrid grid(state.L);
    const int count = grid.size();
    RateTable table;
    table.L = state.L;
    table.traits.assign(count, TraitRates{});
    for (auto& t : table.traits) t.convert_to.assign(count, 0.0);

    const std::int64_t total_active = state.total_active();
    if (total_active + state.total_dormant() == 0) return table;

    const double K = params.carrying_capacity();
    const double mutation_half = 0.5 * std::pow(K, -params.alpha);
    const double crowding = params.C * static_cast<double>(total_active) / K;

    for (int i = 0; i < count; ++i) {
        const TraitIndex trait = grid.trait(i);
        const double A = static_cast<double>(state.active[i]);
        const double D = static_cast<double>(state.dormant[i]);
        auto& r = table.traits[i];
        const double births = A * birth_rate(trait, params);
        const bool dorm_target = grid.contains({trait.m + 1, trait.n});
        const bool hgt_target = grid.contains({trait.m, trait.n + 1});
        r.birth_mut_dorm = dorm_target ? births * mutation_half : 0.0;
        r.birth_mut_hgt = hgt_target ? births * mutation_half : 0.0;
        r.birth_clone =
            births * (1.0 - mutation_half * ((dorm_target ? 1 : 0) + (hgt_target ? 1 : 0)));
        const double px = params.p * trait.x(params);
        r.death_active = A * (1.0 + (1.0 - px) * crowding);
        r.to_dormant = A * px * crowding;
        r.death_dormant = D * params.kappa;
        r.wake = D * params.sigma;
        if (total_active > 0) {
            for (int u = 0; u < count; ++u) {
                if (grid.trait(u).n > trait.n) {
                    r.convert_to[u] = params.tau * A * static_cast<double>(state.active[u]) /
                                      static_cast<double>(total_active);
                }
            }
        }
    }
    return table;
}

std::int64_t floor_power(double K, double exponent) {
    const double v = std::pow(K, exponent);
    const double nearest = std::round(v);
    if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v)) return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::floor(v));
}

PopulationState initial_state(const ModelParams& params) {
    const double K = params.carrying_capacity();
    const TraitGrid grid(params);
    PopulationState state(grid.L);
    for (int i = 0; i < grid.size(); ++i) {
        const TraitIndex t = grid.trait(i);
        if (t.m == 0 && t.n == 0) {
            state.active[i] = static_cast<std::int64_t>(std::floor(3.0 * K / params.C));
            continue;
        }
        const double e = (t.m + t.n) * params.alpha;
        if (e >= 1.0) continue;
        const std::int64_t c = floor_power(K, 1.0 - e);
        state.active[i] = c;
        if (t.m >= 1) state.dormant[i] = c;
    }
    return state;
}

}  // namespace adl
