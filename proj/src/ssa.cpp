#include "adl/ssa.hpp"

#include <cmath>
#include <limits>

#include "adl/errors.hpp"
#include "adl/parallel.hpp"
#include "adl/rng.hpp"

namespace adl {

namespace {

constexpr std::int64_t kCountMax = std::numeric_limits<std::int64_t>::max();

// Aggregated event categories. Individual channels are resolved inside a category.
enum Category { kBirth, kNaturalDeath, kCrowding, kDormantDeath, kWake, kTransfer, kCategoryCount };

// Population plus running sums that make the total rate O(L) to evaluate.
class Engine {
public:
    Engine(const ModelParams& params, const PopulationState& initial)
        : grid_(initial.L),
          L_(initial.L),
          K_(params.carrying_capacity()),
          delta_(params.delta),
          C_(params.C),
          tau_(params.tau),
          kappa_(params.kappa),
          sigma_(params.sigma),
          mutation_half_(0.5 * std::pow(K_, -params.alpha)),
          active_(initial.active),
          dormant_(initial.dormant),
          rows_(L_ + 1, 0) {
        const int count = grid_.size();
        birth_.resize(count);
        dormancy_.resize(count);
        for (int i = 0; i < count; ++i) {
            const TraitIndex t = grid_.trait(i);
            birth_[i] = birth_rate(t, params);
            dormancy_[i] = params.p * t.x(params);
            if (active_[i] < 0 || dormant_[i] < 0) throw ConfigError("initial state: negative count");
            total_active_ += active_[i];
            total_dormant_ += dormant_[i];
            weighted_level_ += active_[i] * (t.m + t.n);
            rows_[t.n] += active_[i];
        }
    }

    double total_rate() {
        const double A = static_cast<double>(total_active_);
        const double D = static_cast<double>(total_dormant_);
        rates_[kBirth] = kTraitExtent * A - 0.5 * delta_ * static_cast<double>(weighted_level_);
        rates_[kNaturalDeath] = A;
        rates_[kCrowding] = A * C_ * A / K_;
        rates_[kDormantDeath] = kappa_ * D;
        rates_[kWake] = sigma_ * D;
        double pairs = 0.0;
        if (total_active_ > 0 && tau_ > 0.0) {
            double below = 0.0;
            for (int n = 0; n <= L_; ++n) {
                pairs += static_cast<double>(rows_[n]) * below;
                below += static_cast<double>(rows_[n]);
            }
            pairs *= tau_ / A;
        }
        rates_[kTransfer] = pairs;
        double total = 0.0;
        for (double r : rates_) total += r;
        return total;
    }

    // Applies one event; `total` is the value last returned by total_rate().
    void fire(double total, SplitMix64& rng, ChannelCounts& counts) {
        double u = rng.uniform() * total;
        int cat = 0;
        while (cat < kCategoryCount - 1 && u >= rates_[cat]) u -= rates_[cat++];
        // Skip categories with zero rate that rounding might land on.
        while (rates_[cat] <= 0.0 && cat > 0) --cat;
        switch (cat) {
            case kBirth: {
                const int i = pick_weighted_birth(u);
                const TraitIndex t = grid_.trait(i);
                const double v = rng.uniform();
                if (v < mutation_half_ && t.m < L_) {
                    add_active(grid_.index({t.m + 1, t.n}), +1);
                    ++counts[static_cast<int>(Channel::birth_mut_dorm)];
                } else if (v >= mutation_half_ && v < 2.0 * mutation_half_ && t.n < L_) {
                    add_active(grid_.index({t.m, t.n + 1}), +1);
                    ++counts[static_cast<int>(Channel::birth_mut_hgt)];
                } else {
                    add_active(i, +1);
                    ++counts[static_cast<int>(Channel::birth_clone)];
                }
                break;
            }
            case kNaturalDeath: {
                add_active(pick_active(u), -1);
                ++counts[static_cast<int>(Channel::death_active)];
                break;
            }
            case kCrowding: {
                const int i = pick_active(u / (C_ * static_cast<double>(total_active_) / K_));
                if (rng.uniform() < dormancy_[i]) {
                    add_active(i, -1);
                    ++dormant_[i];
                    ++total_dormant_;
                    ++counts[static_cast<int>(Channel::to_dormant)];
                } else {
                    add_active(i, -1);
                    ++counts[static_cast<int>(Channel::death_active)];
                }
                break;
            }
            case kDormantDeath: {
                const int i = pick_dormant(u / kappa_);
                --dormant_[i];
                --total_dormant_;
                ++counts[static_cast<int>(Channel::death_dormant)];
                break;
            }
            case kWake: {
                const int i = pick_dormant(u / sigma_);
                --dormant_[i];
                --total_dormant_;
                add_active(i, +1);
                ++counts[static_cast<int>(Channel::wake)];
                break;
            }
            case kTransfer: {
                fire_transfer(u * static_cast<double>(total_active_) / tau_, rng);
                ++counts[static_cast<int>(Channel::transfer)];
                break;
            }
            default: break;
        }
    }

    void snapshot(std::vector<std::int64_t>& active, std::vector<std::int64_t>& dormant) const {
        active = active_;
        dormant = dormant_;
    }

private:
    void add_active(int i, int delta) {
        if (delta > 0 && active_[i] == kCountMax) throw OverflowError("count overflow at trait " + to_string(grid_.trait(i)));
        active_[i] += delta;
        total_active_ += delta;
        const TraitIndex t = grid_.trait(i);
        weighted_level_ += delta * (t.m + t.n);
        rows_[t.n] += delta;
    }

    int pick_weighted_birth(double u) const {
        const int count = grid_.size();
        int last = -1;
        for (int i = 0; i < count; ++i) {
            if (active_[i] == 0) continue;
            last = i;
            const double w = static_cast<double>(active_[i]) * birth_[i];
            if (u < w) return i;
            u -= w;
        }
        return last;
    }

    int pick_active(double u) const {
        const int count = grid_.size();
        int last = -1;
        for (int i = 0; i < count; ++i) {
            if (active_[i] == 0) continue;
            last = i;
            if (u < static_cast<double>(active_[i])) return i;
            u -= static_cast<double>(active_[i]);
        }
        return last;
    }

    int pick_dormant(double u) const {
        const int count = grid_.size();
        int last = -1;
        for (int i = 0; i < count; ++i) {
            if (dormant_[i] == 0) continue;
            last = i;
            if (u < static_cast<double>(dormant_[i])) return i;
            u -= static_cast<double>(dormant_[i]);
        }
        return last;
    }

    int pick_in_row(int n, double u) const {
        int last = -1;
        for (int m = 0; m <= L_; ++m) {
            const int i = grid_.index({m, n});
            if (active_[i] == 0) continue;
            last = i;
            if (u < static_cast<double>(active_[i])) return i;
            u -= static_cast<double>(active_[i]);
        }
        return last;
    }

    // u is uniform on [0, sum_n rows[n] * below[n]): picks the donor row, then the
    // recipient row below it, then a trait within each row.
    void fire_transfer(double u, SplitMix64& rng) {
        double below = 0.0;
        int donor_row = -1;
        double donor_below = 0.0;
        for (int n = 0; n <= L_; ++n) {
            const double w = static_cast<double>(rows_[n]) * below;
            if (w > 0.0) {
                donor_row = n;
                donor_below = below;
                if (u < w) break;
                u -= w;
            }
            below += static_cast<double>(rows_[n]);
        }
        if (donor_row < 0) return;
        const int donor = pick_in_row(donor_row, rng.uniform() * static_cast<double>(rows_[donor_row]));
        double r = rng.uniform() * donor_below;
        int recipient_row = -1;
        for (int n = 0; n < donor_row; ++n) {
            if (rows_[n] == 0) continue;
            recipient_row = n;
            if (r < static_cast<double>(rows_[n])) break;
            r -= static_cast<double>(rows_[n]);
        }
        const int recipient = pick_in_row(recipient_row, r);
        add_active(recipient, -1);
        add_active(donor, +1);
    }

    TraitGrid grid_;
    int L_;
    double K_, delta_, C_, tau_, kappa_, sigma_, mutation_half_;
    std::vector<double> birth_;
    std::vector<double> dormancy_;
    std::vector<std::int64_t> active_;
    std::vector<std::int64_t> dormant_;
    std::vector<std::int64_t> rows_;
    std::int64_t total_active_ = 0;
    std::int64_t total_dormant_ = 0;
    std::int64_t weighted_level_ = 0;  // sum of active counts times (m+n)
    std::array<double, kCategoryCount> rates_{};
};

}  // namespace

std::vector<double> SamplingSpec::grid(double horizon_logK) const {
    if (!times_logK.empty()) return times_logK;
    if (points < 2) throw ConfigError("sampling: at least two points");
    std::vector<double> out(points);
    for (int j = 0; j < points; ++j) out[j] = horizon_logK * j / (points - 1);
    return out;
}

double SimTrajectory::log_K() const { return std::log(params.carrying_capacity()); }

std::vector<double> SimTrajectory::times_logK() const {
    std::vector<double> out(times.size());
    const double lk = log_K();
    for (std::size_t j = 0; j < times.size(); ++j) out[j] = times[j] / lk;
    return out;
}

SimTrajectory simulate(const ModelParams& params, const PopulationState& initial,
                       double horizon_logK, std::uint64_t seed, const SamplingSpec& sampling) {
    params.validate();
    const double K = params.carrying_capacity();
    if (K < 2.0) throw ConfigError("K: must be at least 2 for the log K timescale");
    const double log_K = std::log(K);

    SimTrajectory traj;
    traj.params = params;
    traj.seed = seed;
    traj.horizon_logK = horizon_logK;
    const std::vector<double> grid = sampling.grid(horizon_logK);
    for (std::size_t j = 1; j < grid.size(); ++j) {
        if (!(grid[j] > grid[j - 1])) throw ConfigError("sampling: times must increase strictly");
    }

    Engine engine(params, initial);
    SplitMix64 rng(seed);
    ChannelCounts counts{};
    std::uint64_t events = 0;
    double t = initial.time;
    std::size_t next = 0;

    auto record_until = [&](double limit) {
        while (next < grid.size() && grid[next] * log_K < limit) {
            traj.times.push_back(grid[next] * log_K);
            traj.active.emplace_back();
            traj.dormant.emplace_back();
            engine.snapshot(traj.active.back(), traj.dormant.back());
            traj.channel_counts.push_back(counts);
            traj.events.push_back(events);
            ++next;
        }
    };

    const double raw_horizon = horizon_logK * log_K;
    while (next < grid.size()) {
        const double total = engine.total_rate();
        if (!(total > 0.0)) {
            traj.extinct = true;
            record_until(std::numeric_limits<double>::infinity());
            break;
        }
        const double dt = rng.exponential(total);
        record_until(t + dt);
        if (t + dt > raw_horizon) {
            record_until(std::numeric_limits<double>::infinity());
            break;
        }
        t += dt;
        engine.fire(total, rng, counts);
        ++events;
    }
    return traj;
}

SimTrajectory simulate(const ModelParams& params, double horizon_logK, std::uint64_t seed,
                       const SamplingSpec& sampling) {
    return simulate(params, initial_state(params), horizon_logK, seed, sampling);
}

std::vector<SimTrajectory> simulate_replicates(const ModelParams& params, double horizon_logK,
                                               std::uint64_t seed, int count,
                                               const SamplingSpec& sampling) {
    std::vector<SimTrajectory> out(count);
    const PopulationState initial = initial_state(params);
    parallel_for(count, [&](int r) {
        out[r] = simulate(params, initial, horizon_logK, replicate_seed(seed, r), sampling);
    });
    return out;
}

std::vector<std::vector<double>> exponents(const SimTrajectory& traj) {
    const double K = traj.params.carrying_capacity();
    if (K < 2.0) throw ConfigError("K: must be at least 2 for exponents");
    const double log_K = std::log(K);
    const std::size_t traits = traj.active.empty() ? 0 : traj.active.front().size();
    std::vector<std::vector<double>> out(traits, std::vector<double>(traj.times.size()));
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        for (std::size_t i = 0; i < traits; ++i) {
            const double n = static_cast<double>(traj.active[j][i] + traj.dormant[j][i]);
            out[i][j] = std::log(1.0 + n) / log_K;
        }
    }
    return out;
}

}  // namespace adl
