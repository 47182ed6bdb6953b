#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqpred/alphabet.hpp"
#include "seqpred/log_prob.hpp"

namespace seqpred {

class ProcessMeasure;
using MeasurePtr = std::shared_ptr<const ProcessMeasure>;

// Incremental evaluator owned by a single evaluation pass. dist() is the
// conditional distribution of the next symbol given everything advanced so
// far; advance() is only called with symbols of positive conditional
// probability (MeasureScan below enforces the zero-probability convention).
class StepCursor {
  public:
    virtual ~StepCursor() = default;
    virtual Eigen::VectorXd dist() const = 0;
    virtual void advance(Symbol a) = 0;
    virtual std::unique_ptr<StepCursor> clone() const = 0;
};

// A probability measure on one-way infinite sequences, queried through
// conditional next-symbol distributions. Sequence probability is by
// definition the product of conditionals, which makes Kolmogorov consistency
// hold by construction. Objects are immutable after construction; evaluation
// creates per-pass cursors, so concurrent use is safe.
class ProcessMeasure {
  public:
    explicit ProcessMeasure(Alphabet a) : alpha_(a) {}
    virtual ~ProcessMeasure() = default;

    const Alphabet& alphabet() const { return alpha_; }
    virtual std::string name() const = 0;
    virtual std::unique_ptr<StepCursor> start() const = 0;

    // Conditional distribution after `prefix`; uniform once the prefix has
    // probability zero (the conditional is otherwise undefined).
    Eigen::VectorXd cond_dist(const Seq& prefix) const;

    LogProb log_prob(const Seq& x) const;

  private:
    Alphabet alpha_;
};

// Drives a cursor over symbols, accumulating the log2 sequence probability
// and applying the probability-zero convention: after a symbol of conditional
// probability zero the scan is dead, dist() is uniform and log2_prob() stays
// at -inf. Copyable (clones the underlying cursor), so tree traversals can
// branch cheaply.
class MeasureScan {
  public:
    explicit MeasureScan(const ProcessMeasure& m)
        : alpha_(m.alphabet()), cur_(m.start()), log2p_(0.0), dead_(false) {}

    MeasureScan(const MeasureScan& o)
        : alpha_(o.alpha_), cur_(o.cur_ ? o.cur_->clone() : nullptr), log2p_(o.log2p_), dead_(o.dead_) {}
    MeasureScan& operator=(const MeasureScan& o) {
        alpha_ = o.alpha_;
        cur_ = o.cur_ ? o.cur_->clone() : nullptr;
        log2p_ = o.log2p_;
        dead_ = o.dead_;
        return *this;
    }
    MeasureScan(MeasureScan&&) = default;
    MeasureScan& operator=(MeasureScan&&) = default;

    Eigen::VectorXd dist() const {
        if (dead_) return Eigen::VectorXd::Constant(alpha_.size(), 1.0 / alpha_.size());
        return cur_->dist();
    }

    void advance(Symbol a) {
        if (dead_) return;
        double p = cur_->dist()(a);
        if (p <= 0.0) {
            dead_ = true;
            log2p_ = kNegInf;
            return;
        }
        log2p_ += std::log2(p);
        cur_->advance(a);
    }

    double log2_prob() const { return log2p_; }
    bool dead() const { return dead_; }

  private:
    Alphabet alpha_;
    std::unique_ptr<StepCursor> cur_;
    double log2p_;
    bool dead_;
};

// Sequence probability depends on the prefix only through its symbol counts.
// Declared by estimators that admit the sufficient-statistic dynamic program.
class CountSufficient {
  public:
    virtual ~CountSufficient() = default;
    virtual double log2_prob_counts(const Eigen::VectorXi& counts) const = 0;
};

// ---------------------------------------------------------------------------
// Concrete families
// ---------------------------------------------------------------------------

class UniformIID final : public ProcessMeasure, public CountSufficient {
  public:
    explicit UniformIID(Alphabet a) : ProcessMeasure(a) {}
    std::string name() const override { return "uniform"; }
    std::unique_ptr<StepCursor> start() const override;
    double log2_prob_counts(const Eigen::VectorXi& counts) const override {
        return -alphabet().bits() * counts.sum();
    }
};

class IIDCategorical final : public ProcessMeasure, public CountSufficient {
  public:
    IIDCategorical(Alphabet a, Eigen::VectorXd theta);
    std::string name() const override;
    std::unique_ptr<StepCursor> start() const override;
    const Eigen::VectorXd& theta() const { return theta_; }
    double log2_prob_counts(const Eigen::VectorXi& counts) const override;

  private:
    Eigen::VectorXd theta_;
};

// Binary shorthand: P(1) = p.
MeasurePtr bernoulli(double p);

class MarkovChain final : public ProcessMeasure {
  public:
    MarkovChain(Alphabet a, Eigen::VectorXd initial, Eigen::MatrixXd transition);
    std::string name() const override { return "markov"; }
    std::unique_ptr<StepCursor> start() const override;
    const Eigen::VectorXd& initial() const { return initial_; }
    const Eigen::MatrixXd& transition() const { return transition_; }

  private:
    Eigen::VectorXd initial_;
    Eigen::MatrixXd transition_; // row s = P(next | current = s)
};

// Add-1/2 count-based estimator: P(a | prefix) = (count_a + 1/2) / (t + A/2).
class KTEstimator final : public ProcessMeasure, public CountSufficient {
  public:
    explicit KTEstimator(Alphabet a) : ProcessMeasure(a) {}
    std::string name() const override { return "kt"; }
    std::unique_ptr<StepCursor> start() const override;
    double log2_prob_counts(const Eigen::VectorXi& counts) const override;
};

// Point mass on one infinite sequence given by a finite prefix followed by a
// periodic tail. Finite representation, exact log-probs.
class DiracMeasure final : public ProcessMeasure {
  public:
    DiracMeasure(Alphabet a, Seq head, Seq period);
    std::string name() const override;
    std::unique_ptr<StepCursor> start() const override;
    Symbol symbol_at(std::size_t t) const {
        return t < head_.size() ? head_[t] : period_[(t - head_.size()) % period_.size()];
    }
    const Seq& head() const { return head_; }
    const Seq& period() const { return period_; }

  private:
    Seq head_;
    Seq period_;
};

class FiniteMixture final : public ProcessMeasure {
  public:
    struct Component {
        double weight; // > 0; normalized to sum 1 at construction
        MeasurePtr measure;
    };

    FiniteMixture(Alphabet a, std::vector<Component> components);
    std::string name() const override;
    std::unique_ptr<StepCursor> start() const override;

    const std::vector<Component>& components() const { return components_; }

    // Posterior over components given `prefix`: w_j mu_j(prefix) normalized.
    // Throws DegenerateConditioning when every component gives the prefix
    // probability zero.
    Eigen::VectorXd posterior_weights(const Seq& prefix) const;

  private:
    std::vector<Component> components_;
};

// 1/2 m + 1/2 uniform-iid; guarantees -log2 nu(x_{1..n}) <= n*M + 1 for all x.
MeasurePtr mix_with_uniform(MeasurePtr m);

// ---------------------------------------------------------------------------
// Weight schedule: weight(k) = w / ((k+1) * log2^2(k+1)) for k >= 1, with the
// normalizer w making the series sum to one. The shift by one avoids the
// k = 1 singularity of w/(k log^2 k) while keeping -log2 weight(l) growing as
// log2 l + 2 log2 log2 l + O(1).
// ---------------------------------------------------------------------------

double schedule_normalizer(); // w (approx 0.98655105)
double schedule_weight(int k);

} // namespace seqpred
