#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "adl/piecewise_linear.hpp"

namespace adl {

inline constexpr double kNoImmigration = -std::numeric_limits<double>::infinity();

// Bi-type branching process with immigration at rate K^c e^{a t} into the first type.
// Type 1 switches to type 2 at rate sigma1, type 2 back at rate sigma2.
struct BBPIParams {
    double b1 = 0.0, b2 = 0.0;
    double d1 = 0.0, d2 = 0.0;
    double sigma1 = 1.0, sigma2 = 1.0;
    double a = 0.0;
    double c = kNoImmigration;  // immigration size exponent; -inf switches it off
    double beta = 0.0, gamma = 0.0;  // initial sizes floor(K^beta - 1), floor(K^gamma - 1)
    double K = 1000.0;

    double r1() const { return b1 - d1 - sigma1; }
    double r2() const { return b2 - d2 - sigma2; }
    double discriminant() const;  // sqrt((r1 - r2)^2 + 4 sigma1 sigma2)
    double lambda() const;
    double lambda_tilde() const;
    bool has_immigration() const { return c > kNoImmigration; }
    double immigration_rate(double t) const;
    // Throws ConfigError naming the violated field.
    void validate() const;
};

// One-dimensional branching process with immigration (the sigma1 = 0 reduction).
struct BPIParams {
    double b = 0.0, d = 0.0;
    double a = 0.0;
    double c = kNoImmigration;
    double beta = 0.0;
    double K = 1000.0;

    double r() const { return b - d; }
    void validate() const;
};

// Mean from (K^beta - 1, K^gamma - 1).
std::array<double, 2> bbpi_mean(const BBPIParams& params, double t);
// Mean from an explicit starting point.
std::array<double, 2> bbpi_mean(const BBPIParams& params, double t, double x0, double y0);

struct SecondMoments {
    double var_x = 0.0;
    double var_y = 0.0;
    double cov = 0.0;
};

// `exact` uses the covariance source -sigma1 x - sigma2 y obtained from the jump
// structure; `dominating` uses the coarser source (r1 + 2 d1) x + (r2 + 2 d2) y + K^c e^{a t}.
enum class SecondMomentSystem { exact, dominating };

// RK4 with step halving; throws NumericalError if the step does not settle.
SecondMoments bbpi_second_moments(const BBPIParams& params, double t,
                                  SecondMomentSystem system = SecondMomentSystem::exact);
SecondMoments bbpi_second_moments(const BBPIParams& params, double t, double x0, double y0,
                                  SecondMomentSystem system = SecondMomentSystem::exact);

// Limit of log(1 + X + Y)/log K on [0, horizon] in log K units. Throws ConfigError when
// the convergence hypotheses fail.
PiecewiseLinear bbpi_limit_beta(const BBPIParams& params, double horizon);
PiecewiseLinear bpi_limit_beta(const BPIParams& params, double horizon);

struct BBPIPath {
    std::vector<double> times;  // raw time
    std::vector<std::int64_t> x;
    std::vector<std::int64_t> y;
    std::uint64_t immigrants = 0;  // immigration events over [0, horizon]
    std::uint64_t events = 0;
};

// Exact simulation on [0, horizon] (raw time) sampled at `sample_times` (sorted, inside
// the horizon); an empty list samples 1001 uniform points. Immigration arrival times are
// drawn by inverting the integrated intensity.
BBPIPath bbpi_simulate(const BBPIParams& params, double horizon, std::uint64_t seed,
                       const std::vector<double>& sample_times = {});
BBPIPath bpi_simulate(const BPIParams& params, double horizon, std::uint64_t seed,
                      const std::vector<double>& sample_times = {});

std::vector<BBPIPath> bbpi_simulate_replicates(const BBPIParams& params, double horizon,
                                               std::uint64_t seed, int count,
                                               const std::vector<double>& sample_times = {});

// Interval [K^{c - abar eps}, K^{c + abar eps}] with abar = 2 (|lambda| v |a|).
std::array<double, 2> strong_mutation_window(const BBPIParams& params, double eps);

}  // namespace adl
