#pragma once

#include <optional>
#include <vector>

#include "adl/model.hpp"

namespace adl {

struct Equilibrium {
    double z_a = 0.0;
    double z_d = 0.0;
};

enum class FitnessMode { resident_relative, extended };
enum class FitnessCase { one_type, bi_type };

// Ingredients of an invasion fitness: the growth summands and switching
// coefficients of the invader's 2x2 mean matrix [[r1, sigma1], [sigma2, r2]].
struct FitnessSpec {
    double r1 = 0.0;
    double r2 = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    FitnessMode mode = FitnessMode::resident_relative;
    FitnessCase kind = FitnessCase::one_type;
};

// 3 - (x+y)/2: net logistic growth of a trait on its own.
double net_growth(TraitIndex trait, const ModelParams& params);
bool is_fit(TraitIndex trait, const ModelParams& params);

Equilibrium equilibrium(TraitIndex trait, const ModelParams& params);

// C times the resident's equilibrium active density; the crowding an invader feels.
double resident_pressure(TraitIndex resident, const ModelParams& params);

// Largest eigenvalue of [[r1, sigma1], [sigma2, r2]] for sigma1*sigma2 >= 0.
double dominant_eigenvalue(double r1, double r2, double sigma1, double sigma2);

// Empty in resident-relative mode when the resident is unfit.
std::optional<FitnessSpec> fitness_spec(TraitIndex invader, TraitIndex resident,
                                        const ModelParams& params, FitnessMode mode);
double evaluate(const FitnessSpec& spec);

std::optional<double> invasion_fitness(TraitIndex invader, TraitIndex resident,
                                       const ModelParams& params, FitnessMode mode);

class FitnessMatrix {
public:
    FitnessMatrix(const ModelParams& params, FitnessMode mode);

    const std::optional<double>& at(TraitIndex invader, TraitIndex resident) const;
    int L() const { return grid_.L; }
    FitnessMode mode() const { return mode_; }

private:
    TraitGrid grid_;
    FitnessMode mode_;
    std::vector<std::optional<double>> entries_;
};

inline FitnessMatrix fitness_matrix(const ModelParams& params, FitnessMode mode) {
    return FitnessMatrix(params, mode);
}

// Throws ConfigError if some distinct pair with a fit resident has |S| <= tol.
void check_nonzero_fitness(const ModelParams& params, double tol = 1e-9);

}  // namespace adl
