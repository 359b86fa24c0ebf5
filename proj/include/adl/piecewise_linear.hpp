#pragma once

#include <cstddef>
#include <vector>

namespace adl {

// Continuous piecewise affine function on [breakpoints.front(), breakpoints.back()].
// Segment i runs from breakpoints[i] to breakpoints[i+1] with slopes[i]; values hold
// the function at each breakpoint. Outside the domain the end values are held constant.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(double start_time, double start_value);

    // Appends a segment ending at `end_time` with the given slope. `end_value` is
    // stored as the breakpoint value; collinear continuations are merged.
    void extend(double end_time, double slope, double end_value);
    void extend(double end_time, double slope);
    // Overwrites the last breakpoint value (used to pin exact values at phase ends).
    void set_end_value(double value);

    double operator()(double t) const;
    // Slope of the segment containing t, taking the right segment at a breakpoint.
    double slope_at(double t) const;

    bool empty() const { return breakpoints_.empty(); }
    double start() const { return breakpoints_.front(); }
    double end() const { return breakpoints_.back(); }
    double end_value() const { return values_.back(); }
    std::size_t segment_count() const { return slopes_.size(); }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }

    // Builds the upper envelope max_i(intercepts[i] + slopes[i] * t) on [t0, t1].
    static PiecewiseLinear upper_envelope(const std::vector<double>& intercepts,
                                          const std::vector<double>& slopes, double t0,
                                          double t1);

private:
    std::size_t segment_index(double t) const;

    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

}  // namespace adl
