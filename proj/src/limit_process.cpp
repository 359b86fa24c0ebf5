#include "adl/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adl/errors.hpp"

namespace adl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Exponent values closer than this are treated as equal when picking the active piece.
constexpr double kValueTol = 1e-12;
// Events must lie strictly after the current time by at least this much.
constexpr double kTimeTol = 1e-13;

std::vector<int> ancestry_order(const TraitGrid& grid) {
    std::vector<int> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const TraitIndex ta = grid.trait(a), tb = grid.trait(b);
        return ta.m + ta.n < tb.m + tb.n;
    });
    return order;
}

double line_at(const EnvelopeLine& line, double start, double t) {
    return line.value + line.slope * (t - start);
}

double fitness_or_throw(TraitIndex invader, TraitIndex driver, const ModelParams& params,
                        FitnessMode mode) {
    const auto s = invasion_fitness(invader, driver, params, mode);
    if (!s) throw ConfigError("fitness: undefined against unfit resident " + to_string(driver));
    return *s;
}

}  // namespace

std::string to_string(Termination reason) {
    switch (reason) {
        case Termination::horizon_reached: return "horizon-reached";
        case Termination::nonunique_argmax: return "nonunique-argmax";
        case Termination::fitness_sign_failure: return "fitness-sign-failure";
        case Termination::invader_unfit: return "invader-unfit";
        case Termination::simultaneous_extinction: return "simultaneous-extinction";
        case Termination::coexistence_accumulation: return "coexistence-accumulation";
        case Termination::degenerate_equal_slope: return "degenerate-equal-slope";
        case Termination::phase_limit: return "phase-limit";
    }
    return "unknown";
}

std::string to_string(LimitMode mode) {
    return mode == LimitMode::standard ? "standard" : "extended";
}

std::string to_string(Regime regime) {
    return regime == Regime::resident ? "resident" : "dominant";
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::piece_switch: return "piece-switch";
        case EventKind::zero_hit: return "zero-hit";
        case EventKind::activation: return "activation";
        case EventKind::meet: return "meet";
        case EventKind::recovery: return "recovery";
        case EventKind::none: return "none";
    }
    return "unknown";
}

const PiecewiseLinear& LimitTrajectory::beta(TraitIndex trait) const {
    return betas[TraitGrid(params).index(trait)];
}

double LimitTrajectory::end_time() const { return betas.empty() ? 0.0 : betas.front().end(); }

std::vector<TraitIndex> LimitTrajectory::residents() const {
    std::vector<TraitIndex> out;
    for (const auto& ph : phases) out.push_back(ph.resident);
    return out;
}

double PhaseState::value(int trait, double t) const {
    double best = 0.0;
    for (const auto& line : lines[trait]) best = std::max(best, line_at(line, start, t));
    return best;
}

double PhaseState::right_slope(int trait, double t) const {
    double best_value = -kInf;
    for (const auto& line : lines[trait]) best_value = std::max(best_value, line_at(line, start, t));
    if (best_value < -kValueTol) return 0.0;
    double slope = -kInf;
    for (const auto& line : lines[trait]) {
        if (line_at(line, start, t) >= best_value - kValueTol) slope = std::max(slope, line.slope);
    }
    if (best_value <= kValueTol) return std::max(slope, 0.0);
    return slope;
}

double PhaseState::driver_value(double t) const { return value(driver, t); }

double PhaseState::driver_slope() const { return fitness[driver]; }

std::vector<double> initial_exponents(const ModelParams& params) {
    const TraitGrid grid(params);
    std::vector<double> out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const TraitIndex t = grid.trait(i);
        out[i] = std::max(0.0, 1.0 - (t.m + t.n) * params.alpha);
    }
    return out;
}

PhaseState begin_phase(const ModelParams& params, double start, TraitIndex driver, Regime regime,
                       const std::vector<double>& start_values) {
    PhaseState st;
    st.grid = TraitGrid(params);
    st.alpha = params.alpha;
    st.start = start;
    st.driver = st.grid.index(driver);
    st.regime = regime;
    st.driver_fit = is_fit(driver, params);
    st.start_values = start_values;
    const int count = st.grid.size();
    st.fitness.assign(count, 0.0);
    st.activation.assign(count, kInf);
    st.lines.assign(count, {});

    const FitnessMode fmode =
        regime == Regime::resident ? FitnessMode::resident_relative : FitnessMode::extended;
    for (int i = 0; i < count; ++i) {
        if (regime == Regime::resident && i == st.driver) continue;
        st.fitness[i] = fitness_or_throw(st.grid.trait(i), driver, params, fmode);
    }

    for (const int i : ancestry_order(st.grid)) {
        const TraitIndex t = st.grid.trait(i);
        const double v = start_values[i];
        const double s = st.fitness[i];
        std::vector<int> parents;
        if (t.m > 0) parents.push_back(st.grid.index({t.m - 1, t.n}));
        if (t.n > 0) parents.push_back(st.grid.index({t.m, t.n - 1}));

        auto& lines = st.lines[i];
        if (v > 0.0) {
            st.activation[i] = start;
            lines.push_back({v, s, i});
        } else if (!parents.empty() && s > 0.0) {
            // Dormant own growth starts once a parent exponent first reaches alpha.
            double t_act = kInf;
            for (const int par : parents) {
                for (const auto& line : st.lines[par]) {
                    if (line.value >= st.alpha) {
                        t_act = start;
                    } else if (line.slope > 0.0) {
                        t_act = std::min(t_act, start + (st.alpha - line.value) / line.slope);
                    }
                }
            }
            if (t_act < kInf) {
                st.activation[i] = t_act;
                lines.push_back({s * (start - t_act), s, i});
            }
        }
        for (const int par : parents) {
            for (const auto& line : st.lines[par]) {
                EnvelopeLine shifted{line.value - st.alpha, line.slope, line.source};
                auto same = std::find_if(lines.begin(), lines.end(), [&](const EnvelopeLine& l) {
                    return l.source == shifted.source;
                });
                if (same == lines.end()) {
                    lines.push_back(shifted);
                } else if (same->source != i) {
                    same->value = std::max(same->value, shifted.value);
                }
            }
        }
    }
    return st;
}

LimitEvent next_event(const PhaseState& st, double after) {
    const double t = after;
    LimitEvent best{kInf, EventKind::none, -1};
    auto consider = [&](double time, EventKind kind, int trait) {
        if (time > t + kTimeTol && time < best.time) best = {time, kind, trait};
    };

    const int count = st.grid.size();
    for (int i = 0; i < count; ++i) {
        const double v = st.value(i, t);
        const double s = st.right_slope(i, t);
        for (const auto& line : st.lines[i]) {
            if (line.slope <= s) continue;
            const double cross = t + (v - line_at(line, st.start, t)) / (line.slope - s);
            consider(cross, EventKind::piece_switch, i);
        }
        if (v > 0.0 && s < 0.0) consider(t + v / -s, EventKind::zero_hit, i);
        if (st.activation[i] < kInf) consider(st.activation[i], EventKind::activation, i);
    }

    // Meets: another exponent reaching the driver's.
    double meet = kInf;
    int meet_trait = -1;
    const double d = st.driver_value(t);
    const double ds = st.right_slope(st.driver, t);
    for (int i = 0; i < count; ++i) {
        if (i == st.driver) continue;
        for (const auto& line : st.lines[i]) {
            if (line.slope <= ds) continue;
            const double lv = line_at(line, st.start, t);
            const double when = lv >= d - kValueTol ? t : t + (d - lv) / (line.slope - ds);
            if (when < meet) {
                meet = when;
                meet_trait = i;
            }
        }
    }
    if (ds < 0.0 && d > 0.0 && t + d / -ds < meet) {
        // The driver sinks to zero where every other trait already sits.
        meet = t + d / -ds;
        meet_trait = -1;
    }

    double recovery = kInf;
    if (st.regime == Regime::dominant && st.driver_fit && ds > 0.0) {
        recovery = std::max(t, t + (1.0 - d) / ds);
    }

    if (meet <= best.time && meet <= recovery && meet < kInf) return {meet, EventKind::meet, meet_trait};
    if (recovery <= best.time && recovery < kInf) return {recovery, EventKind::recovery, st.driver};
    return best;
}

std::optional<Accumulation> detect_coexistence(const LimitTrajectory& traj,
                                               const CoexistenceOptions& options) {
    const auto& phases = traj.phases;
    const int k = static_cast<int>(phases.size());
    if (k < options.min_phases) return std::nullopt;
    auto same = [&](int a, int b) {
        return phases[a].resident == phases[b].resident && phases[a].regime == phases[b].regime;
    };
    int period = 0;
    for (int P = 2; 3 * P <= k; ++P) {
        bool periodic = true;
        for (int j = k - 2 * P; j < k && periodic; ++j) periodic = same(j, j - P);
        if (periodic) {
            period = P;
            break;
        }
    }
    if (period == 0) return std::nullopt;

    Accumulation acc;
    acc.period = period;
    for (int c = 3; c >= 1; --c) {
        const int first = k - c * period;
        const int last = first + period - 1;
        acc.cycle_durations.push_back(phases[last].end - phases[first].start);
    }
    const double r1 = acc.cycle_durations[1] / acc.cycle_durations[0];
    const double r2 = acc.cycle_durations[2] / acc.cycle_durations[1];
    if (std::abs(r2 - r1) > options.ratio_stability || !(r2 < options.max_ratio)) return std::nullopt;

    for (int j = k - period; j < k; ++j) {
        if (std::find(acc.cycle_traits.begin(), acc.cycle_traits.end(), phases[j].resident) ==
            acc.cycle_traits.end()) {
            acc.cycle_traits.push_back(phases[j].resident);
        }
    }
    const double boundary = phases.back().end;
    double lo = kInf, hi = -kInf;
    for (const TraitIndex t : acc.cycle_traits) {
        const double v = traj.beta(t)(boundary);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo > options.convergence_gap) return std::nullopt;

    acc.ratio = r2;
    acc.time = boundary + acc.cycle_durations[2] * r2 / (1.0 - r2);
    return acc;
}

LimitTrajectory run_limit(const ModelParams& params, double horizon, LimitMode mode,
                          const LimitOptions& options) {
    params.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon: must be positive and finite");
    const TraitGrid grid(params);
    const TraitIndex origin{0, 0};
    if (!is_fit(origin, params)) throw ConfigError("trait (0,0) must be fit");
    check_nonzero_fitness(params, options.tie_tolerance);

    LimitTrajectory traj;
    traj.params = params;
    traj.mode = mode;
    traj.horizon = horizon;

    std::vector<double> values = initial_exponents(params);
    for (int i = 0; i < grid.size(); ++i) traj.betas.emplace_back(0.0, values[i]);

    int driver = grid.index(origin);
    Regime regime = Regime::resident;
    double t = 0.0;
    const double tol = options.tie_tolerance;

    auto stop = [&](Termination reason) { traj.termination = reason; };

    while (true) {
        if (static_cast<int>(traj.phases.size()) >= options.max_phases) {
            stop(Termination::phase_limit);
            break;
        }
        const PhaseState st = begin_phase(params, t, grid.trait(driver), regime, values);
        const double phase_start = t;
        LimitEvent ev;
        bool reached_horizon = false;
        while (true) {
            ev = next_event(st, t);
            const double until = std::min(ev.time, horizon);
            if (until > t) {
                for (int i = 0; i < grid.size(); ++i) {
                    traj.betas[i].extend(until, st.right_slope(i, t), st.value(i, until));
                }
                t = until;
            }
            if (ev.time >= horizon) {
                reached_horizon = true;
                break;
            }
            if (ev.kind == EventKind::meet || ev.kind == EventKind::recovery) break;
        }
        if (reached_horizon) {
            traj.phases.push_back({phase_start, horizon, grid.trait(driver), regime});
            stop(Termination::horizon_reached);
            break;
        }
        if (t <= phase_start) {
            // Another exponent already rises above the driver's at the phase start.
            stop(regime == Regime::dominant || mode == LimitMode::extended
                     ? Termination::degenerate_equal_slope
                     : Termination::nonunique_argmax);
            break;
        }
        traj.phases.push_back({phase_start, t, grid.trait(driver), regime});

        for (int i = 0; i < grid.size(); ++i) {
            values[i] = st.value(i, t);
            if (values[i] < kValueTol) values[i] = 0.0;
        }

        if (ev.kind == EventKind::recovery) {
            values[driver] = 1.0;
            traj.betas[driver].set_end_value(1.0);
            regime = Regime::resident;
            continue;
        }

        // (a) unique argmax among the non-driver traits.
        int best = -1, second = -1;
        for (int i = 0; i < grid.size(); ++i) {
            if (i == driver) continue;
            if (best < 0 || values[i] > values[best]) {
                second = best;
                best = i;
            } else if (second < 0 || values[i] > values[second]) {
                second = i;
            }
        }
        if (values[driver] <= 0.0 || (second >= 0 && values[best] - values[second] <= tol)) {
            stop(Termination::nonunique_argmax);
            break;
        }
        const TraitIndex old_t = grid.trait(driver);
        const TraitIndex new_t = grid.trait(best);
        values[best] = values[driver];
        traj.betas[best].set_end_value(values[best]);

        // (b) fitness signs and viability of the newcomer.
        const bool new_fit = is_fit(new_t, params);
        const bool macroscopic = values[best] >= 1.0 - tol;
        Regime next_regime = Regime::resident;
        if (new_fit && macroscopic) {
            const double s_old = *invasion_fitness(old_t, new_t, params, FitnessMode::resident_relative);
            const double s_new = regime == Regime::resident
                                     ? *invasion_fitness(new_t, old_t, params, FitnessMode::resident_relative)
                                     : 1.0;
            if (!(s_old < 0.0 && s_new > 0.0)) {
                stop(Termination::fitness_sign_failure);
                break;
            }
        } else {
            if (mode == LimitMode::standard) {
                stop(new_fit ? Termination::fitness_sign_failure : Termination::invader_unfit);
                break;
            }
            // Dominance: the old driver must fall below the newcomer right away.
            const double s_old = *invasion_fitness(old_t, new_t, params, FitnessMode::extended);
            const double s_new = *invasion_fitness(new_t, new_t, params, FitnessMode::extended);
            if (s_old >= s_new - tol) {
                stop(Termination::degenerate_equal_slope);
                break;
            }
            next_regime = Regime::dominant;
        }

        // (c) no other trait may go extinct exactly at the switch.
        bool simultaneous = false;
        const double probe = std::max(phase_start, t - tol);
        for (int i = 0; i < grid.size() && !simultaneous; ++i) {
            if (i == driver || values[i] > 0.0) continue;
            simultaneous = traj.betas[i](probe) > kValueTol;
        }
        if (simultaneous) {
            stop(Termination::simultaneous_extinction);
            break;
        }

        driver = best;
        regime = next_regime;

        if (options.detect_coexistence) {
            if (auto acc = detect_coexistence(traj, options.coexistence)) {
                traj.accumulation = acc;
                traj.accumulation_point = acc->time;
                stop(Termination::coexistence_accumulation);
                break;
            }
        }
    }
    return traj;
}

}  // namespace adl
