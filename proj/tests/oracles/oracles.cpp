#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZero = 1e-12;

double transfer_sign(double invader_y, double resident_y) {
    return invader_y > resident_y ? 1.0 : (invader_y < resident_y ? -1.0 : 0.0);
}

double net(adl::TraitIndex t, const adl::ModelParams& p) {
    return 3.0 - (t.m + t.n) * p.delta / 2.0;
}

double dominant(double a, double b, double c, double d) {
    Eigen::Matrix2d mean;
    mean << a, b, c, d;
    return Eigen::EigenSolver<Eigen::Matrix2d>(mean).eigenvalues().real().maxCoeff();
}

}  // namespace

std::array<double, 2> resident_equilibrium(adl::TraitIndex resident, const adl::ModelParams& p) {
    const double growth = net(resident, p);
    if (growth <= 0.0) return {0.0, 0.0};
    const double x = resident.m * p.delta;
    // z_d = C p x z_a^2 / (kappa + sigma) substituted into the active equation.
    const double active = growth / (p.C * (1.0 - p.sigma * p.p * x / (p.kappa + p.sigma)));
    return {active, p.C * p.p * x * active * active / (p.kappa + p.sigma)};
}

double fitness(adl::TraitIndex invader, adl::TraitIndex resident, const adl::ModelParams& p,
               bool extended) {
    const double birth = 4.0 - (invader.m + invader.n) * p.delta / 2.0;
    const double transfer = p.tau * transfer_sign(invader.n * p.delta, resident.n * p.delta);
    const double x = invader.m * p.delta;
    if (extended) {
        const double r1 = birth - 1.0 + transfer;
        if (invader.m == 0) return r1;
        return dominant(r1, 0.0, p.sigma, -(p.kappa + p.sigma));
    }
    const double za = resident_equilibrium(resident, p)[0];
    const double r1 = birth - (1.0 + p.C * za) + transfer;
    if (invader.m == 0) return r1;
    return dominant(r1, p.C * p.p * x * za, p.sigma, -(p.kappa + p.sigma));
}

ForwardConstruction::ForwardConstruction(const adl::ModelParams& params, double horizon,
                                         bool extended, double dt)
    : params_(params), grid_(params) {
    const int count = grid_.size();
    order_.resize(count);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
        const auto ta = grid_.trait(a), tb = grid_.trait(b);
        return ta.m + ta.n < tb.m + tb.n;
    });

    std::vector<double> values(count);
    for (int i = 0; i < count; ++i) {
        const auto t = grid_.trait(i);
        values[i] = std::max(0.0, 1.0 - (t.m + t.n) * params.alpha);
    }
    std::vector<std::vector<int>> parent_lists(count);
    for (int i = 0; i < count; ++i) {
        const auto tr = grid_.trait(i);
        if (tr.m > 0) parent_lists[i].push_back(grid_.index({tr.m - 1, tr.n}));
        if (tr.n > 0) parent_lists[i].push_back(grid_.index({tr.m, tr.n - 1}));
    }
    auto parents_of = [&](int i) -> const std::vector<int>& { return parent_lists[i]; };
    int driver = 0;
    bool dominant_regime = false;
    double t = 0.0;

    while (t < horizon) {
        Phase ph;
        ph.start = t;
        ph.driver = driver;
        ph.dominant = dominant_regime;
        ph.start_values = values;
        ph.slopes.assign(count, 0.0);
        ph.activation.assign(count, kInf);
        for (int i = 0; i < count; ++i) {
            if (!dominant_regime && i == driver) continue;
            ph.slopes[i] = fitness(grid_.trait(i), grid_.trait(driver), params, dominant_regime);
        }
        const bool driver_fit = net(grid_.trait(driver), params) > 0.0;

        for (int i = 0; i < count; ++i) {
            if (values[i] > 0.0) continue;
            for (int par : parents_of(i)) {
                if (values[par] >= params.alpha) ph.activation[i] = t;
            }
        }

        auto event_at = [&](const std::vector<double>& v) {
            for (int j = 0; j < count; ++j) {
                if (j != driver && v[j] >= v[driver]) return true;
            }
            return dominant_regime && driver_fit && v[driver] >= 1.0;
        };

        double t_prev = t;
        double event = kInf;
        for (long long k = 1; event == kInf; ++k) {
            const double tn = std::min(ph.start + k * dt, horizon);
            // Activations inside (t_prev, tn], in ancestry order so parents are final.
            while (true) {
                const auto at_tn = evaluate(ph, tn);
                int i = -1;
                for (int j : order_) {
                    if (ph.start_values[j] > 0.0 || ph.activation[j] < kInf) continue;
                    for (int par : parents_of(j)) {
                        if (at_tn[par] >= params.alpha) i = j;
                    }
                    if (i >= 0) break;
                }
                if (i < 0) break;
                const auto& parents = parents_of(i);
                auto reached = [&](double when) {
                    const auto v = evaluate(ph, when);
                    return std::any_of(parents.begin(), parents.end(),
                                       [&](int par) { return v[par] >= params.alpha; });
                };
                double lo = t_prev, hi = tn;
                for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    (reached(mid) ? hi : lo) = mid;
                }
                ph.activation[i] = hi;
            }
            if (event_at(evaluate(ph, tn))) {
                double lo = t_prev, hi = tn;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    (event_at(evaluate(ph, mid)) ? hi : lo) = mid;
                }
                event = hi;
            } else if (tn >= horizon) {
                break;
            }
            t_prev = tn;
        }
        if (event == kInf) {
            ph.end = horizon;
            phases_.push_back(ph);
            t = horizon;
            break;
        }
        ph.end = event;
        phases_.push_back(ph);
        t = event;
        if (event - ph.start < 1e-12) break;

        values = evaluate(ph, t);
        for (double& v : values) {
            if (v < kZero) v = 0.0;
        }
        if (dominant_regime && driver_fit && values[driver] >= 1.0 - 1e-12) {
            bool someone_met = false;
            for (int j = 0; j < count; ++j) someone_met |= j != driver && values[j] >= values[driver];
            if (!someone_met) {
                values[driver] = 1.0;
                dominant_regime = false;
                continue;
            }
        }
        int best = -1, second = -1;
        for (int j = 0; j < count; ++j) {
            if (j == driver) continue;
            if (best < 0 || values[j] > values[best]) {
                second = best;
                best = j;
            } else if (second < 0 || values[j] > values[second]) {
                second = j;
            }
        }
        if (values[driver] <= 0.0 || (second >= 0 && values[best] - values[second] <= 1e-9)) break;
        values[best] = values[driver];
        const auto old_t = grid_.trait(driver), new_t = grid_.trait(best);
        const bool new_fit = net(new_t, params) > 0.0;
        if (new_fit && values[best] >= 1.0 - 1e-9) {
            const bool old_loses = fitness(old_t, new_t, params) < 0.0;
            const bool new_wins = dominant_regime || fitness(new_t, old_t, params) > 0.0;
            if (!(old_loses && new_wins)) break;
            dominant_regime = false;
        } else {
            if (!extended) break;
            if (fitness(old_t, new_t, params, true) >= fitness(new_t, new_t, params, true) - 1e-9) break;
            dominant_regime = true;
        }
        driver = best;
    }
    end_ = t;
}

std::vector<double> ForwardConstruction::evaluate(const Phase& ph, double t) const {
    std::vector<double> v(grid_.size(), 0.0);
    for (int i : order_) v[i] = evaluate_one(ph, v, i, t);
    return v;
}

double ForwardConstruction::evaluate_one(const Phase& ph, const std::vector<double>& known, int i,
                                         double t) const {
    double own = 0.0;
    if (ph.start_values[i] > 0.0) {
        own = ph.start_values[i] + ph.slopes[i] * (t - ph.start);
    } else if (t >= ph.activation[i]) {
        own = ph.slopes[i] * (t - ph.activation[i]);
    }
    double best = std::max(own, 0.0);
    const auto tr = grid_.trait(i);
    if (tr.m > 0) best = std::max(best, known[grid_.index({tr.m - 1, tr.n})] - params_.alpha);
    if (tr.n > 0) best = std::max(best, known[grid_.index({tr.m, tr.n - 1})] - params_.alpha);
    return best;
}

double ForwardConstruction::value(int trait, double t) const {
    if (phases_.empty()) throw std::logic_error("empty construction");
    auto it = std::upper_bound(phases_.begin(), phases_.end(), t,
                               [](double when, const Phase& ph) { return when < ph.end; });
    if (it == phases_.end()) --it;
    return evaluate(*it, std::clamp(t, it->start, it->end))[trait];
}

std::vector<adl::TraitIndex> ForwardConstruction::drivers() const {
    std::vector<adl::TraitIndex> out;
    for (const auto& ph : phases_) out.push_back(grid_.trait(ph.driver));
    return out;
}

}  // namespace oracle
