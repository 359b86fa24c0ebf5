#include "adl/branching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adl/errors.hpp"
#include "adl/model.hpp"
#include "adl/ode.hpp"
#include "adl/parallel.hpp"
#include "adl/rng.hpp"

namespace adl {

namespace {

constexpr double kResonanceTol = 1e-9;
constexpr std::int64_t kPopulationMax = std::int64_t{1} << 62;

// Eigenvalues of [[r1, s2], [s1, r2]] without cancellation in the smaller one.
std::array<double, 2> eigenpair(double r1, double r2, double s1, double s2) {
    const double trace = r1 + r2;
    const double det = r1 * r2 - s1 * s2;
    const double root = std::sqrt((r1 - r2) * (r1 - r2) + 4.0 * s1 * s2);
    double hi, lo;
    if (trace >= 0.0) {
        hi = 0.5 * (trace + root);
        lo = hi != 0.0 ? det / hi : 0.5 * (trace - root);
    } else {
        lo = 0.5 * (trace - root);
        hi = det / lo;
    }
    return {hi, lo};
}

// Integral of e^{rate (t - s)} e^{a s} over [0, t].
double immigration_kernel(double a, double rate, double t) {
    const double gap = a - rate;
    if (std::abs(gap) < kResonanceTol) return t * std::exp(rate * t);
    return std::exp(rate * t) * std::expm1(gap * t) / gap;
}

std::int64_t initial_size(double K, double exponent) {
    return std::max<std::int64_t>(0, floor_power(K, exponent) - 1);
}

void check_nonneg(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(name) + " must be finite and >= 0");
    }
}

void check_immigration(double a, double c) {
    if (!std::isfinite(a)) throw ConfigError("a must be finite");
    if (std::isnan(c) || c == std::numeric_limits<double>::infinity()) {
        throw ConfigError("c must be finite or -inf");
    }
}

double intensity(double K, double a, double c, double t) {
    if (c == kNoImmigration) return 0.0;
    return std::exp(c * std::log(K) + a * t);
}

// Time until the next arrival of a Poisson process with intensity I0 e^{a s}, s >= 0.
double next_arrival(double I0, double a, SplitMix64& rng) {
    if (I0 <= 0.0) return std::numeric_limits<double>::infinity();
    const double mass = -std::log(rng.uniform_open());
    if (a == 0.0) return mass / I0;
    const double arg = a * mass / I0;
    if (arg <= -1.0) return std::numeric_limits<double>::infinity();
    return std::log1p(arg) / a;
}

struct Rates {
    double b1, b2, d1, d2, s1, s2, a, c, K;
};

std::vector<double> default_samples(double horizon) {
    std::vector<double> out(1001);
    for (int j = 0; j <= 1000; ++j) out[j] = horizon * j / 1000.0;
    return out;
}

BBPIPath run_path(const Rates& r, std::int64_t x0, std::int64_t y0, double horizon,
                  std::uint64_t seed, const std::vector<double>& requested) {
    const std::vector<double> samples = requested.empty() ? default_samples(horizon) : requested;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (samples[j] < 0.0 || samples[j] > horizon || (j > 0 && samples[j] < samples[j - 1])) {
            throw ConfigError("sample times must be sorted inside [0, horizon]");
        }
    }
    BBPIPath path;
    path.times = samples;
    path.x.reserve(samples.size());
    path.y.reserve(samples.size());

    SplitMix64 rng(seed);
    std::int64_t x = x0, y = y0;
    double t = 0.0;
    std::size_t next = 0;
    auto record_until = [&](double limit) {
        while (next < samples.size() && samples[next] < limit) {
            path.x.push_back(x);
            path.y.push_back(y);
            ++next;
        }
    };

    while (true) {
        const double xd = static_cast<double>(x), yd = static_cast<double>(y);
        const double w[6] = {r.b1 * xd, r.b2 * yd, r.s1 * xd, r.s2 * yd, r.d1 * xd, r.d2 * yd};
        double total = 0.0;
        for (double v : w) total += v;
        const double wait_pop =
            total > 0.0 ? rng.exponential(total) : std::numeric_limits<double>::infinity();
        const double wait_imm = next_arrival(intensity(r.K, r.a, r.c, t), r.a, rng);
        const double wait = std::min(wait_pop, wait_imm);
        if (!(t + wait <= horizon)) break;
        t += wait;
        record_until(t);
        ++path.events;
        if (wait_imm < wait_pop) {
            ++x;
            ++path.immigrants;
        } else {
            double u = rng.uniform() * total;
            int k = 0;
            while (k < 5 && u >= w[k]) u -= w[k++];
            while (w[k] <= 0.0 && k > 0) --k;
            switch (k) {
                case 0: ++x; break;
                case 1: ++y; break;
                case 2: --x; ++y; break;
                case 3: ++x; --y; break;
                case 4: --x; break;
                default: --y; break;
            }
        }
        if (x >= kPopulationMax || y >= kPopulationMax) {
            throw OverflowError("branching simulation: population exceeded 2^62 at t = " +
                                std::to_string(t));
        }
    }
    record_until(std::numeric_limits<double>::infinity());
    return path;
}

PiecewiseLinear limit_beta(double start, double growth, double a, double c, double horizon) {
    if (std::isnan(start) || start < 0.0) throw ConfigError("initial exponent must be >= 0");
    if (!(horizon >= 0.0)) throw ConfigError("horizon must be >= 0");
    if (c > start) throw ConfigError("hypothesis c <= beta v gamma violated");
    if (!(start > 0.0) && c == 0.0) throw ConfigError("hypothesis beta v gamma > 0 or c != 0 violated");

    std::vector<double> intercepts{0.0};
    std::vector<double> slopes{0.0};
    if (start > 0.0) {
        intercepts.push_back(start);
        slopes.push_back(growth);
        if (c != kNoImmigration) {
            intercepts.push_back(c);
            slopes.push_back(a);
        }
    } else if (c != kNoImmigration && a > 0.0) {
        const double rate = std::max(growth, a);
        intercepts.push_back(-rate * std::abs(c) / a);
        slopes.push_back(rate);
    }
    return PiecewiseLinear::upper_envelope(intercepts, slopes, 0.0, horizon);
}

}  // namespace

double BBPIParams::discriminant() const {
    return std::sqrt((r1() - r2()) * (r1() - r2()) + 4.0 * sigma1 * sigma2);
}

double BBPIParams::lambda() const { return eigenpair(r1(), r2(), sigma1, sigma2)[0]; }

double BBPIParams::lambda_tilde() const { return eigenpair(r1(), r2(), sigma1, sigma2)[1]; }

double BBPIParams::immigration_rate(double t) const { return intensity(K, a, c, t); }

void BBPIParams::validate() const {
    check_nonneg(b1, "b1");
    check_nonneg(b2, "b2");
    check_nonneg(d1, "d1");
    check_nonneg(d2, "d2");
    if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) throw ConfigError("sigma1 must be > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be > 0");
    check_immigration(a, c);
    check_nonneg(beta, "beta");
    check_nonneg(gamma, "gamma");
    if (!(K > 1.0) || !std::isfinite(K)) throw ConfigError("K must be > 1");
}

void BPIParams::validate() const {
    check_nonneg(b, "b");
    check_nonneg(d, "d");
    check_immigration(a, c);
    check_nonneg(beta, "beta");
    if (!(K > 1.0) || !std::isfinite(K)) throw ConfigError("K must be > 1");
}

std::array<double, 2> bbpi_mean(const BBPIParams& params, double t) {
    return bbpi_mean(params, t, std::pow(params.K, params.beta) - 1.0,
                     std::pow(params.K, params.gamma) - 1.0);
}

std::array<double, 2> bbpi_mean(const BBPIParams& params, double t, double x0, double y0) {
    const double r1 = params.r1(), s1 = params.sigma1, s2 = params.sigma2;
    const auto [hi, lo] = eigenpair(r1, params.r2(), s1, s2);
    const double gap = hi - lo;
    // Spectral projectors P_hi = (M - lo I)/gap and P_lo = (hi I - M)/gap.
    const double e_hi = std::exp(hi * t), e_lo = std::exp(lo * t);
    const double r2 = params.r2();
    const double px = ((r1 - lo) * x0 + s2 * y0) / gap;
    const double py = (s1 * x0 + (r2 - lo) * y0) / gap;
    const double qx = ((hi - r1) * x0 - s2 * y0) / gap;
    const double qy = (-s1 * x0 + (hi - r2) * y0) / gap;
    double x = e_hi * px + e_lo * qx;
    double y = e_hi * py + e_lo * qy;
    if (params.has_immigration()) {
        const double Kc = std::exp(params.c * std::log(params.K));
        const double g_hi = immigration_kernel(params.a, hi, t);
        const double g_lo = immigration_kernel(params.a, lo, t);
        x += Kc * ((r1 - lo) * g_hi + (hi - r1) * g_lo) / gap;
        y += Kc * s1 * (g_hi - g_lo) / gap;
    }
    return {x, y};
}

SecondMoments bbpi_second_moments(const BBPIParams& params, double t, SecondMomentSystem system) {
    return bbpi_second_moments(params, t, std::pow(params.K, params.beta) - 1.0,
                               std::pow(params.K, params.gamma) - 1.0, system);
}

SecondMoments bbpi_second_moments(const BBPIParams& params, double t, double x0, double y0,
                                  SecondMomentSystem system) {
    if (t <= 0.0) return {};
    const double r1 = params.r1(), r2 = params.r2();
    const double s1 = params.sigma1, s2 = params.sigma2;
    const double b1 = params.b1, b2 = params.b2, d1 = params.d1, d2 = params.d2;
    auto f = [&](double s, const Vec& u, Vec& du) {
        const auto [x, y] = bbpi_mean(params, s, x0, y0);
        const double imm = params.immigration_rate(s);
        du[0] = 2.0 * r1 * u[0] + 2.0 * s2 * u[2] + (b1 + d1 + s1) * x + s2 * y + imm;
        du[1] = 2.0 * r2 * u[1] + 2.0 * s1 * u[2] + (b2 + d2 + s2) * y + s1 * x;
        const double source = system == SecondMomentSystem::exact
                                  ? -s1 * x - s2 * y
                                  : (r1 + 2.0 * d1) * x + (r2 + 2.0 * d2) * y + imm;
        du[2] = s1 * u[0] + s2 * u[1] + (r1 + r2) * u[2] + source;
    };
    const Vec zero(3, 0.0);
    double h = std::min(0.01, t / 10.0);
    Vec coarse = rk4_integrate(f, zero, 0.0, t, h);
    for (int halving = 0; halving < 16; ++halving) {
        h /= 2.0;
        Vec fine = rk4_integrate(f, zero, 0.0, t, h);
        double diff = 0.0, scale = 1.0;
        for (int i = 0; i < 3; ++i) {
            diff = std::max(diff, std::abs(fine[i] - coarse[i]));
            scale = std::max(scale, std::abs(fine[i]));
        }
        coarse = std::move(fine);
        if (!std::isfinite(diff)) break;
        if (diff <= 1e-10 * scale) return {coarse[0], coarse[1], coarse[2]};
    }
    throw NumericalError("second moments: RK4 step halving did not converge");
}

PiecewiseLinear bbpi_limit_beta(const BBPIParams& params, double horizon) {
    params.validate();
    return limit_beta(std::max(params.beta, params.gamma), params.lambda(), params.a, params.c,
                      horizon);
}

PiecewiseLinear bpi_limit_beta(const BPIParams& params, double horizon) {
    params.validate();
    return limit_beta(params.beta, params.r(), params.a, params.c, horizon);
}

BBPIPath bbpi_simulate(const BBPIParams& params, double horizon, std::uint64_t seed,
                       const std::vector<double>& sample_times) {
    params.validate();
    const Rates r{params.b1, params.b2, params.d1, params.d2, params.sigma1,
                  params.sigma2, params.a, params.c, params.K};
    const auto x0 = initial_size(params.K, params.beta);
    const auto y0 = initial_size(params.K, params.gamma);
    return run_path(r, x0, y0, horizon, seed, sample_times);
}

BBPIPath bpi_simulate(const BPIParams& params, double horizon, std::uint64_t seed,
                      const std::vector<double>& sample_times) {
    params.validate();
    const Rates r{params.b, 0.0, params.d, 0.0, 0.0, 0.0, params.a, params.c, params.K};
    const auto x0 = initial_size(params.K, params.beta);
    return run_path(r, x0, 0, horizon, seed, sample_times);
}

std::vector<BBPIPath> bbpi_simulate_replicates(const BBPIParams& params, double horizon,
                                               std::uint64_t seed, int count,
                                               const std::vector<double>& sample_times) {
    std::vector<BBPIPath> out(std::max(0, count));
    parallel_for(count, [&](int r) {
        out[r] = bbpi_simulate(params, horizon, replicate_seed(seed, static_cast<std::uint64_t>(r)),
                               sample_times);
    });
    return out;
}

std::array<double, 2> strong_mutation_window(const BBPIParams& params, double eps) {
    const double abar = 2.0 * std::max(std::abs(params.lambda()), std::abs(params.a));
    return {std::pow(params.K, params.c - abar * eps), std::pow(params.K, params.c + abar * eps)};
}

}  // namespace adl
