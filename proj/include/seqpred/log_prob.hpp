#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "seqpred/errors.hpp"

namespace seqpred {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Base-2 logarithm of a probability. -inf encodes probability zero.
// All probability accumulation in the artifact happens on these values;
// raw probabilities only appear for single conditional steps.
class LogProb {
  public:
    LogProb() : bits_(0.0) {} // probability one

    static LogProb zero() { return LogProb(kNegInf, unchecked{}); }
    static LogProb one() { return LogProb(0.0, unchecked{}); }

    static LogProb from_bits(double b) {
        // Tolerate tiny positive drift from log-sum-exp round-off.
        if (b > 0.0) {
            if (b > 1e-9) throw ContractViolation("LogProb above 0 bits: " + std::to_string(b));
            b = 0.0;
        }
        return LogProb(b, unchecked{});
    }

    static LogProb from_prob(double p) {
        if (p < 0.0 || p > 1.0 + 1e-12) throw InputError("probability out of [0,1]: " + std::to_string(p));
        return p <= 0.0 ? zero() : from_bits(std::log2(std::min(p, 1.0)));
    }

    double bits() const { return bits_; }
    double prob() const { return std::exp2(bits_); }
    bool is_zero() const { return bits_ == kNegInf; }

    // Product of probabilities.
    LogProb operator*(LogProb o) const { return LogProb(bits_ + o.bits_, unchecked{}); }

  private:
    struct unchecked {};
    LogProb(double b, unchecked) : bits_(b) {}
    double bits_;
};

// log2(2^a + 2^b), safe at -inf.
inline double log2_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp2(lo - hi)) / M_LN2;
}

inline double log2_sum_exp(std::span<const double> v) {
    double hi = kNegInf;
    for (double x : v)
        if (x > hi) hi = x;
    if (hi == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v)
        if (x != kNegInf) s += std::exp2(x - hi);
    return hi + std::log2(s);
}

inline double binary_entropy_bits(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

} // namespace seqpred
