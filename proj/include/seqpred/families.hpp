#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

#include "seqpred/measures.hpp"

namespace seqpred {

using BigInt = boost::multiprecision::cpp_int;

// log2 of a positive big integer to double precision.
double log2_bigint(const BigInt& x);

// Number of length-n_j binary extensions of a prefix with `ones` ones in
// `len` symbols whose total ones-frequency lies within eps of p_star:
// a window sum of binomial coefficients, exact.
BigInt count_extensions(long ones, long len, long n_j, double eps, double p_star);

// Countable Dirac mixture over near-p* typical sequences, truncated to
// horizons n_j = 2^j (j <= j_max) and bands eps_l = 2^-l (l <= l_max).
// Each representative is identified with its length-n_j prefix and weighted
// weight(l) weight(j)/|S_j^l|; probabilities reduce to compatibility counts.
struct TypicalMixtureSpec {
    double p_star = 1.0 / 3.0;
    int j_max = 12;
    int l_max = 6;

    void validate() const {
        if (!(p_star > 0.0 && p_star < 1.0)) throw InputError("typical: p_star must be in (0,1)");
        if (j_max < 1 || l_max < 1) throw InputError("typical: truncation bounds must be >= 1");
    }
    long max_horizon() const { return 1L << j_max; }
};

// log2 of the (sub-normalized) truncated-mixture probability of a binary
// prefix. -inf when the prefix is atypical at every truncated scale.
double typical_mixture_log2(const TypicalMixtureSpec& spec, const Seq& prefix);

// Piecewise-iid binary source with change frequency bounded by alpha.
// sample_rate is the Bernoulli rate of the change indicator (defaults to
// alpha); the count is thinned to floor(alpha n) either way, so the output
// is always a member of the alpha-bounded class.
struct ChangePointSpec {
    double alpha = 1.0 / 64.0;
    int n = 0;
    std::optional<double> sample_rate;                 // default: alpha
    std::optional<std::vector<double>> theta_list;     // adversarial parameters, cycled
    std::optional<std::vector<int>> change_times;      // fixed grid instead of Bernoulli draws

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("changepoint: alpha must be in (0,1)");
        if (n < 1) throw InputError("changepoint: horizon must be >= 1");
        if (sample_rate && !(*sample_rate >= 0.0 && *sample_rate < 1.0))
            throw InputError("changepoint: sample_rate must be in [0,1)");
    }
};

struct ChangePointTrace {
    Seq x;
    std::vector<int> change_times; // 1-based start indices of segments after the first
    std::vector<double> thetas;    // one per segment
    std::vector<char> is_change;   // per position (1-based semantics, index t-1)
    std::vector<double> theta_at;  // active parameter per position
    int thinned_changes = 0;       // changes dropped by the alpha n cap
};

ChangePointTrace gen_changepoint(const ChangePointSpec& spec, std::uint64_t seed);

// V for the Bernoulli change-point family: alpha (1 - 1/2 log2 alpha) bits.
double changepoint_value(double alpha);

// Bayesian switching predictor: a Bernoulli(alpha_hat) prior over change
// sequences with a fresh add-1/2 estimator per segment. The conditional is
// the posterior-weighted average of segment-estimator conditionals; O(t) per
// step, O(n^2) per sequence.
class SwitchingKT final : public ProcessMeasure {
  public:
    SwitchingKT(Alphabet a, double alpha_hat);
    std::string name() const override;
    std::unique_ptr<StepCursor> start() const override;
    double alpha_hat() const { return alpha_hat_; }

    // Posterior over the most recent change time (segment start s = 1..t+1)
    // after consuming `prefix`.
    Eigen::VectorXd change_posterior(const Seq& prefix) const;

  private:
    double alpha_hat_;
};

// log2 probability assigned by the oracle that restarts an add-1/2 estimator
// at the given segment starts (1-based, excluding the first segment).
double kt_restart_oracle_log2(const Seq& x, const std::vector<int>& change_times, Alphabet a);

} // namespace seqpred
