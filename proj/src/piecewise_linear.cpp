#include "adl/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adl {

PiecewiseLinear::PiecewiseLinear(double start_time, double start_value)
    : breakpoints_{start_time}, values_{start_value} {}

void PiecewiseLinear::extend(double end_time, double slope, double end_value) {
    if (breakpoints_.empty()) throw std::logic_error("PiecewiseLinear: extend before start");
    if (!(end_time > breakpoints_.back())) return;
    if (!slopes_.empty()) {
        const double last = slopes_.back();
        if (std::abs(slope - last) <= 1e-14 * std::max(1.0, std::abs(last))) {
            breakpoints_.back() = end_time;
            values_.back() = end_value;
            return;
        }
    }
    breakpoints_.push_back(end_time);
    values_.push_back(end_value);
    slopes_.push_back(slope);
}

void PiecewiseLinear::extend(double end_time, double slope) {
    extend(end_time, slope, values_.back() + slope * (end_time - breakpoints_.back()));
}

void PiecewiseLinear::set_end_value(double value) { values_.back() = value; }

std::size_t PiecewiseLinear::segment_index(double t) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, slopes_.empty() ? 0 : slopes_.size() - 1);
}

double PiecewiseLinear::operator()(double t) const {
    if (breakpoints_.empty()) return 0.0;
    if (t <= breakpoints_.front()) return values_.front();
    if (t >= breakpoints_.back()) return values_.back();
    const std::size_t i = segment_index(t);
    return values_[i] + slopes_[i] * (t - breakpoints_[i]);
}

double PiecewiseLinear::slope_at(double t) const {
    if (slopes_.empty() || t < breakpoints_.front() || t >= breakpoints_.back()) return 0.0;
    return slopes_[segment_index(t)];
}

PiecewiseLinear PiecewiseLinear::upper_envelope(const std::vector<double>& intercepts,
                                                const std::vector<double>& slopes, double t0,
                                                double t1) {
    const std::size_t n = intercepts.size();
    auto value = [&](std::size_t i, double t) { return intercepts[i] + slopes[i] * t; };
    auto argmax_at = [&](double t) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            const double v = value(i, t);
            const double b = value(best, t);
            if (v > b + 1e-14 || (v >= b - 1e-14 && slopes[i] > slopes[best])) best = i;
        }
        return best;
    };
    std::size_t cur = argmax_at(t0);
    PiecewiseLinear out(t0, value(cur, t0));
    double t = t0;
    while (t < t1) {
        double next = t1;
        std::size_t next_line = cur;
        for (std::size_t i = 0; i < n; ++i) {
            if (slopes[i] <= slopes[cur]) continue;
            const double cross = (intercepts[cur] - intercepts[i]) / (slopes[i] - slopes[cur]);
            if (cross > t && cross < next) {
                next = cross;
                next_line = i;
            }
        }
        out.extend(next, slopes[cur], value(cur, next));
        t = next;
        if (next_line == cur) break;
        cur = argmax_at(t);
        if (slopes[cur] <= slopes[next_line]) cur = next_line;
    }
    return out;
}

}  // namespace adl
