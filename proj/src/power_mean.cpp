#include <poweruct/power_mean.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace poweruct {

PowerOrder PowerOrder::finite(double p) {
    if (!std::isfinite(p) || p < 1.0)
        throw std::invalid_argument("power mean order must be a finite real >= 1");
    return PowerOrder(p, false);
}

PowerOrder PowerOrder::plus_infinity() {
    return PowerOrder(std::numeric_limits<double>::infinity(), true);
}

double PowerOrder::value() const {
    if (infinite_) throw std::logic_error("PowerOrder: +infinity has no finite value");
    return p_;
}

WeightedSample::WeightedSample(std::vector<double> values_in, std::vector<double> weights_in)
    : values(std::move(values_in)), weights(std::move(weights_in)) {
    if (values.empty()) throw std::invalid_argument("empty sample");
    if (values.size() != weights.size())
        throw std::invalid_argument("values and weights must have the same length");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
        if (v < 0.0) throw std::invalid_argument("values must be non-negative");
    }
    for (double w : weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("non-finite value");
        if (w <= 0.0) throw std::invalid_argument("weights must be strictly positive");
    }
}

namespace {

void validate(std::span<const double> values, std::span<const double> weights) {
    if (values.empty()) throw std::invalid_argument("empty sample");
    if (values.size() != weights.size())
        throw std::invalid_argument("values and weights must have the same length");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("non-finite value");
    for (double w : weights)
        if (!std::isfinite(w) || w <= 0.0) throw std::invalid_argument("non-finite value");
}

}  // namespace

double weighted_average(std::span<const double> values, std::span<const double> weights) {
    validate(values, weights);
    double lo = values[0], hi = values[0];
    double sum = 0.0, total_weight = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
        total_weight += weights[i];
        sum += weights[i] * values[i];
    }
    return std::clamp(sum / total_weight, lo, hi);
}

double power_mean(std::span<const double> values, std::span<const double> weights,
                  PowerOrder order) {
    validate(values, weights);
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (order.is_infinite()) return hi;
    const double p = order.value();
    if (p == 1.0) return weighted_average(values, weights);
    if (hi == 0.0) return 0.0;

    // Rescale by the maximum: every ratio is in [0, 1], so x^p cannot
    // overflow for any order and the leading term never underflows.
    double sum = 0.0, total_weight = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        total_weight += weights[i];
        sum += weights[i] * std::pow(values[i] / hi, p);
    }
    return std::clamp(hi * std::pow(sum / total_weight, 1.0 / p), lo, hi);
}

double power_mean(const WeightedSample& sample, PowerOrder order) {
    return power_mean(sample.values, sample.weights, order);
}

HoelderBounds hoelder_bounds(double l, double U, double p, double q) {
    if (!(l > 0.0)) throw std::invalid_argument("Lemma 2 requires l > 0");
    if (!(U >= l) || !std::isfinite(U)) throw std::invalid_argument("requires U >= l");
    if (!(q >= 1.0) || !(p > q)) throw std::invalid_argument("requires p > q");

    HoelderBounds hb;
    hb.l = l;
    hb.U = U;
    hb.p = p;
    hb.q = q;
    hb.C = U / l;

    const double lp = std::pow(l, p), Up = std::pow(U, p);
    const double lq = std::pow(l, q), Uq = std::pow(U, q);

    if (U == l) {
        // Degenerate range: all values equal, both bounds collapse. The chord
        // coefficients are filled with their U -> l limits.
        hb.a = (q / p) * std::pow(l, q - p);
        hb.b = lq - hb.a * lp;
        hb.x_star = lp;
        hb.theta = 0.0;
        hb.H = 0.0;
        hb.L = 1.0;
        return hb;
    }

    hb.a = (Uq - lq) / (Up - lp);
    hb.b = (Up * lq - Uq * lp) / (Up - lp);

    const double inv_p = 1.0 / p, inv_q = 1.0 / q;
    auto h = [&](double x) { return std::pow(x, inv_p) - std::pow(hb.a * x + hb.b, inv_q); };

    // h vanishes at both endpoints and is maximized strictly inside. Bracket
    // the peak with a coarse scan, then refine by golden section.
    constexpr int kScanPoints = 1024;
    const double width = Up - lp;
    double best_x = lp + 0.5 * width, best_h = h(best_x);
    for (int i = 1; i < kScanPoints; ++i) {
        const double x = lp + width * static_cast<double>(i) / kScanPoints;
        const double hx = h(x);
        if (hx > best_h) {
            best_h = hx;
            best_x = x;
        }
    }
    double left = std::max(lp, best_x - width / kScanPoints);
    double right = std::min(Up, best_x + width / kScanPoints);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = right - kInvPhi * (right - left);
    double x2 = left + kInvPhi * (right - left);
    double h1 = h(x1), h2 = h(x2);
    while (right - left > 1e-12) {
        if (h1 < h2) {
            left = x1;
            x1 = x2;
            h1 = h2;
            x2 = left + kInvPhi * (right - left);
            h2 = h(x2);
        } else {
            right = x2;
            x2 = x1;
            h2 = h1;
            x1 = right - kInvPhi * (right - left);
            h1 = h(x1);
        }
    }
    hb.x_star = 0.5 * (left + right);
    hb.theta = std::clamp((hb.x_star - lp) / (Up - lp), 0.0, 1.0);

    const double theta = hb.theta;
    hb.H = std::pow(theta * Up + (1.0 - theta) * lp, inv_p) -
           std::pow(theta * Uq + (1.0 - theta) * lq, inv_q);
    hb.H = std::max(hb.H, 0.0);

    const double Cp = std::pow(hb.C, p), Cq = std::pow(hb.C, q);
    hb.L = std::pow(q * (Cp - Cq) / ((p - q) * (Cq - 1.0)), inv_p) *
           std::pow(p * (Cq - Cp) / ((q - p) * (Cp - 1.0)), -inv_q);
    return hb;
}

double concentration_bound(long n, double epsilon, double p, double l, double U,
                           double range_lo, double range_hi) {
    if (n < 1) throw std::invalid_argument("concentration_bound: n must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("concentration_bound: epsilon must be > 0");
    if (!(p >= 1.0)) throw std::invalid_argument("concentration_bound: p must be >= 1");
    if (!(range_hi > range_lo))
        throw std::invalid_argument("concentration_bound: empty value range");
    // H_{1,1} = 0: at p = 1 the classical Hoeffding bound is recovered.
    const double H = (p == 1.0) ? 0.0 : hoelder_bounds(l, U, p, 1.0).H;
    const double width = range_hi - range_lo;
    // Unit weights: W = n and sum w_i^2 = n, so the exponent is -2 n eps^2 / width^2.
    return 2.0 * std::exp(H) *
           std::exp(-2.0 * static_cast<double>(n) * epsilon * epsilon / (width * width));
}

}  // namespace poweruct
