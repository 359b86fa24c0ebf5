#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adl/fitness.hpp"
#include "adl/model.hpp"
#include "adl/piecewise_linear.hpp"

namespace adl {

enum class LimitMode { standard, extended };

// Who sets the slopes during a phase: a macroscopic resident at exponent 1, or
// (extended mode only) the largest trait of a population that is o(K).
enum class Regime { resident, dominant };

enum class Termination {
    horizon_reached,
    nonunique_argmax,
    fitness_sign_failure,
    invader_unfit,
    simultaneous_extinction,
    coexistence_accumulation,
    degenerate_equal_slope,
    phase_limit,
};

std::string to_string(Termination reason);
std::string to_string(LimitMode mode);
std::string to_string(Regime regime);

struct Phase {
    double start = 0.0;
    double end = 0.0;
    TraitIndex resident;
    Regime regime = Regime::resident;
};

struct Accumulation {
    double time = 0.0;     // extrapolated accumulation point
    double ratio = 0.0;    // contraction of successive cycle durations
    int period = 0;        // phases per cycle
    std::vector<TraitIndex> cycle_traits;
    std::vector<double> cycle_durations;  // last three full cycles
};

struct CoexistenceOptions {
    int min_phases = 6;
    double max_ratio = 1.0 - 1e-6;
    double ratio_stability = 1e-3;
    // Spread of the cycle traits' exponents at the last cycle end.
    double convergence_gap = 1e-6;
};

struct LimitOptions {
    double tie_tolerance = 1e-9;
    bool detect_coexistence = true;
    CoexistenceOptions coexistence;
    int max_phases = 100000;
};

struct LimitTrajectory {
    ModelParams params;
    LimitMode mode = LimitMode::standard;
    double horizon = 0.0;
    std::vector<Phase> phases;
    std::vector<PiecewiseLinear> betas;  // indexed by TraitGrid
    Termination termination = Termination::horizon_reached;
    std::optional<double> accumulation_point;
    std::optional<Accumulation> accumulation;

    const PiecewiseLinear& beta(TraitIndex trait) const;
    // Last time covered by the betas: the horizon or the stopping time.
    double end_time() const;
    std::vector<TraitIndex> residents() const;
};

// One affine candidate inside a trait's max expression, valid on the whole phase.
struct EnvelopeLine {
    double value = 0.0;  // at phase start
    double slope = 0.0;
    int source = 0;      // trait whose own line this is (shifted down by alpha per step)
};

struct PhaseState {
    TraitGrid grid{1};
    double alpha = 0.5;
    double start = 0.0;
    int driver = 0;
    Regime regime = Regime::resident;
    bool driver_fit = true;
    std::vector<double> start_values;
    std::vector<double> fitness;     // slope of each trait's own line
    std::vector<double> activation;  // start of each own line, +inf if none
    std::vector<std::vector<EnvelopeLine>> lines;

    double value(int trait, double t) const;
    // Right derivative of the trait's exponent at t.
    double right_slope(int trait, double t) const;
    double driver_value(double t) const;
    double driver_slope() const;
};

// Slopes follow the regime: resident-relative fitness against a resident,
// extended fitness against a dominant trait.
PhaseState begin_phase(const ModelParams& params, double start, TraitIndex driver, Regime regime,
                       const std::vector<double>& start_values);

enum class EventKind { piece_switch, zero_hit, activation, meet, recovery, none };

std::string to_string(EventKind kind);

struct LimitEvent {
    double time = 0.0;
    EventKind kind = EventKind::none;
    int trait = -1;
};

// Earliest event at or after `after`. Meets take precedence over simultaneous events.
LimitEvent next_event(const PhaseState& state, double after);

std::optional<Accumulation> detect_coexistence(const LimitTrajectory& trajectory,
                                               const CoexistenceOptions& options = {});

// Exponents at time zero: (1 - (m+n) alpha) v 0.
std::vector<double> initial_exponents(const ModelParams& params);

LimitTrajectory run_limit(const ModelParams& params, double horizon,
                          LimitMode mode = LimitMode::standard, const LimitOptions& options = {});

}  // namespace adl
