#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace adl {

using Vec = std::vector<double>;

// One classical Runge-Kutta step for y' = f(t, y). f writes the derivative into its
// third argument.
template <class F>
void rk4_step(const F& f, double t, Vec& y, double h, Vec (&work)[5]) {
    const std::size_t n = y.size();
    for (auto& w : work) w.resize(n);
    Vec& k1 = work[0];
    Vec& k2 = work[1];
    Vec& k3 = work[2];
    Vec& k4 = work[3];
    Vec& tmp = work[4];
    f(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Fixed-step RK4 from t0 to t1; the last step is shortened to land on t1.
template <class F>
Vec rk4_integrate(const F& f, Vec y, double t0, double t1, double h) {
    Vec work[5];
    const auto steps = static_cast<long long>(std::ceil((t1 - t0) / h - 1e-9));
    for (long long k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        rk4_step(f, t, y, std::min(h, t1 - t), work);
    }
    return y;
}

// RK4 with step halving until two successive results agree to `tol` in sup-norm.
template <class F>
Vec rk4_adaptive(const F& f, const Vec& y0, double t0, double t1, double h, double tol,
                 int max_halvings = 20) {
    Vec coarse = rk4_integrate(f, y0, t0, t1, h);
    for (int k = 0; k < max_halvings; ++k) {
        h /= 2.0;
        Vec fine = rk4_integrate(f, y0, t0, t1, h);
        double diff = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
        coarse = std::move(fine);
        if (diff <= tol) break;
    }
    return coarse;
}

}  // namespace adl
