#pragma once

#include <span>
#include <vector>

namespace poweruct {

/// Order of a power mean: a finite real p >= 1 or the +infinity limit.
class PowerOrder {
public:
    static PowerOrder finite(double p);
    static PowerOrder plus_infinity();

    bool is_infinite() const { return infinite_; }

    /// Finite order value; throws if the order is +infinity.
    double value() const;

    bool operator==(const PowerOrder&) const = default;

private:
    PowerOrder(double p, bool infinite) : p_(p), infinite_(infinite) {}
    double p_;
    bool infinite_;
};

/// Non-negative values with strictly positive weights, same length.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;

    WeightedSample(std::vector<double> values_in, std::vector<double> weights_in);
};

/// Chord/maximizer quantities of the difference and ratio bounds between two
/// power-mean orders over values confined to [l, U].
struct HoelderBounds {
    double l = 0;       // lower value bound, > 0
    double U = 0;       // upper value bound, >= l
    double p = 0;
    double q = 0;
    double C = 1;       // U / l
    double a = 0;       // chord slope of x^{q/p} between l^p and U^p
    double b = 0;       // chord intercept
    double x_star = 0;  // maximizer of h(x) = x^{1/p} - (a x + b)^{1/q}
    double theta = 0;   // (x_star - l^p) / (U^p - l^p), in [0, 1]
    double H = 0;       // difference bound, >= 0
    double L = 1;       // ratio bound, >= 1
};

/// Weighted power mean (sum_i w_i x_i^p / sum_i w_i)^{1/p}; the +infinity
/// order returns max(values). Finite orders p > 1 are evaluated after
/// rescaling by the maximum so that huge orders neither overflow nor collapse
/// to zero. The result is clamped into [min(values), max(values)].
double power_mean(std::span<const double> values, std::span<const double> weights,
                  PowerOrder order);

double power_mean(const WeightedSample& sample, PowerOrder order);

/// Weighted arithmetic mean clamped into the value hull. Shared by the p = 1
/// power-mean path and the reference average backup so the two stay bit-equal.
double weighted_average(std::span<const double> values, std::span<const double> weights);

/// Bound quantities for orders p > q >= 1 over values in [l, U], 0 < l <= U.
/// The maximizer of h is located by a bracketing scan plus golden-section
/// refinement to 1e-12 absolute tolerance. U == l degenerates to H = 0, L = 1.
HoelderBounds hoelder_bounds(double l, double U, double p, double q);

/// Two-sided tail bound for the deviation of a unit-weight power mean of n
/// i.i.d. draws (supported on [l, U] inside [range_lo, range_hi]) from the
/// common mean: 2 exp(H_{p,1}) exp(-2 n eps^2 / (range_hi - range_lo)^2).
/// May exceed 1, in which case it is vacuous.
double concentration_bound(long n, double epsilon, double p, double l, double U,
                           double range_lo, double range_hi);

}  // namespace poweruct
