#include "seqpred/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seqpred {

namespace {

constexpr double kDistTol = 1e-12;

void check_dist(const Eigen::VectorXd& v, const char* what) {
    if ((v.array() < -kDistTol).any())
        throw InputError(std::string(what) + ": negative probability entry");
    if (std::abs(v.sum() - 1.0) > kDistTol)
        throw InputError(std::string(what) + ": probabilities sum to " + std::to_string(v.sum()));
}

} // namespace

Eigen::VectorXd ProcessMeasure::cond_dist(const Seq& prefix) const {
    alphabet().validate(prefix);
    MeasureScan s(*this);
    for (Symbol a : prefix) s.advance(a);
    return s.dist();
}

LogProb ProcessMeasure::log_prob(const Seq& x) const {
    alphabet().validate(x);
    MeasureScan s(*this);
    for (Symbol a : x) s.advance(a);
    return s.dead() ? LogProb::zero() : LogProb::from_bits(s.log2_prob());
}

// ---------------------------------------------------------------------------
// UniformIID
// ---------------------------------------------------------------------------

namespace {

class ConstCursor final : public StepCursor {
  public:
    explicit ConstCursor(Eigen::VectorXd d) : d_(std::move(d)) {}
    Eigen::VectorXd dist() const override { return d_; }
    void advance(Symbol) override {}
    std::unique_ptr<StepCursor> clone() const override { return std::make_unique<ConstCursor>(d_); }

  private:
    Eigen::VectorXd d_;
};

} // namespace

std::unique_ptr<StepCursor> UniformIID::start() const {
    return std::make_unique<ConstCursor>(Eigen::VectorXd::Constant(alphabet().size(), 1.0 / alphabet().size()));
}

// ---------------------------------------------------------------------------
// IIDCategorical
// ---------------------------------------------------------------------------

IIDCategorical::IIDCategorical(Alphabet a, Eigen::VectorXd theta) : ProcessMeasure(a), theta_(std::move(theta)) {
    if (theta_.size() != a.size()) throw InputError("iid: theta size does not match alphabet");
    check_dist(theta_, "iid theta");
}

std::string IIDCategorical::name() const {
    std::ostringstream os;
    os << "iid(";
    for (int i = 0; i < theta_.size(); ++i) os << (i ? "," : "") << theta_(i);
    os << ")";
    return os.str();
}

std::unique_ptr<StepCursor> IIDCategorical::start() const { return std::make_unique<ConstCursor>(theta_); }

double IIDCategorical::log2_prob_counts(const Eigen::VectorXi& counts) const {
    double lp = 0.0;
    for (int a = 0; a < counts.size(); ++a) {
        if (counts(a) == 0) continue;
        if (theta_(a) <= 0.0) return kNegInf;
        lp += counts(a) * std::log2(theta_(a));
    }
    return lp;
}

MeasurePtr bernoulli(double p) {
    Eigen::VectorXd th(2);
    th << 1.0 - p, p;
    return std::make_shared<IIDCategorical>(Alphabet(2), th);
}

// ---------------------------------------------------------------------------
// MarkovChain
// ---------------------------------------------------------------------------

MarkovChain::MarkovChain(Alphabet a, Eigen::VectorXd initial, Eigen::MatrixXd transition)
    : ProcessMeasure(a), initial_(std::move(initial)), transition_(std::move(transition)) {
    if (initial_.size() != a.size() || transition_.rows() != a.size() || transition_.cols() != a.size())
        throw InputError("markov: dimensions do not match alphabet");
    check_dist(initial_, "markov initial");
    for (int s = 0; s < a.size(); ++s) check_dist(transition_.row(s).transpose(), "markov transition row");
}

namespace {

class MarkovCursor final : public StepCursor {
  public:
    MarkovCursor(const MarkovChain* m) : m_(m), last_(-1) {}
    Eigen::VectorXd dist() const override {
        return last_ < 0 ? m_->initial() : m_->transition().row(last_).transpose();
    }
    void advance(Symbol a) override { last_ = a; }
    std::unique_ptr<StepCursor> clone() const override { return std::make_unique<MarkovCursor>(*this); }

  private:
    const MarkovChain* m_;
    int last_;
};

} // namespace

std::unique_ptr<StepCursor> MarkovChain::start() const { return std::make_unique<MarkovCursor>(this); }

// ---------------------------------------------------------------------------
// KTEstimator
// ---------------------------------------------------------------------------

namespace {

class KTCursor final : public StepCursor {
  public:
    explicit KTCursor(int a) : counts_(Eigen::VectorXi::Zero(a)), total_(0) {}
    Eigen::VectorXd dist() const override {
        int a = static_cast<int>(counts_.size());
        return (counts_.cast<double>().array() + 0.5) / (total_ + 0.5 * a);
    }
    void advance(Symbol s) override {
        counts_(s) += 1;
        total_ += 1;
    }
    std::unique_ptr<StepCursor> clone() const override { return std::make_unique<KTCursor>(*this); }

  private:
    Eigen::VectorXi counts_;
    int total_;
};

} // namespace

std::unique_ptr<StepCursor> KTEstimator::start() const { return std::make_unique<KTCursor>(alphabet().size()); }

double KTEstimator::log2_prob_counts(const Eigen::VectorXi& counts) const {
    // prod_a Gamma(k_a + 1/2)/Gamma(1/2) over Gamma(n + A/2)/Gamma(A/2).
    int a = alphabet().size();
    int n = counts.sum();
    double lp = 0.0;
    for (int i = 0; i < counts.size(); ++i) lp += std::lgamma(counts(i) + 0.5) - std::lgamma(0.5);
    lp -= std::lgamma(n + 0.5 * a) - std::lgamma(0.5 * a);
    return lp / M_LN2;
}

// ---------------------------------------------------------------------------
// DiracMeasure
// ---------------------------------------------------------------------------

DiracMeasure::DiracMeasure(Alphabet a, Seq head, Seq period)
    : ProcessMeasure(a), head_(std::move(head)), period_(std::move(period)) {
    if (period_.empty()) throw InputError("dirac: period must be nonempty");
    a.validate(head_);
    a.validate(period_);
}

std::string DiracMeasure::name() const {
    return "dirac(" + seq_to_string(head_) + "|" + seq_to_string(period_) + ")";
}

namespace {

class DiracCursor final : public StepCursor {
  public:
    DiracCursor(const DiracMeasure* m) : m_(m), t_(0) {}
    Eigen::VectorXd dist() const override {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(m_->alphabet().size());
        d(m_->symbol_at(t_)) = 1.0;
        return d;
    }
    void advance(Symbol a) override {
        // Off-path symbols kill the scan before advance() is reached.
        (void)a;
        ++t_;
    }
    std::unique_ptr<StepCursor> clone() const override { return std::make_unique<DiracCursor>(*this); }

  private:
    const DiracMeasure* m_;
    std::size_t t_;
};

} // namespace

std::unique_ptr<StepCursor> DiracMeasure::start() const { return std::make_unique<DiracCursor>(this); }

// ---------------------------------------------------------------------------
// FiniteMixture
// ---------------------------------------------------------------------------

FiniteMixture::FiniteMixture(Alphabet a, std::vector<Component> components)
    : ProcessMeasure(a), components_(std::move(components)) {
    if (components_.empty()) throw InputError("mixture: needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!c.measure) throw InputError("mixture: null component");
        if (c.measure->alphabet() != a) throw InputError("mixture: component alphabet mismatch");
        if (!(c.weight > 0.0)) throw InputError("mixture: weights must be positive");
        total += c.weight;
    }
    for (auto& c : components_) c.weight /= total;
}

std::string FiniteMixture::name() const {
    std::ostringstream os;
    os << "mix[";
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (i) os << "+";
        os << components_[i].weight << "*" << components_[i].measure->name();
        if (i >= 2 && components_.size() > 4) {
            os << "+...(" << components_.size() << " components)";
            break;
        }
    }
    os << "]";
    return os.str();
}

namespace {

class MixtureCursor final : public StepCursor {
  public:
    explicit MixtureCursor(const FiniteMixture* m) : m_(m) {
        scans_.reserve(m->components().size());
        logw_.resize(m->components().size());
        for (std::size_t j = 0; j < m->components().size(); ++j) {
            scans_.emplace_back(*m->components()[j].measure);
            logw_[j] = std::log2(m->components()[j].weight);
        }
    }

    Eigen::VectorXd dist() const override {
        const double z = log2_sum_exp(logw_);
        Eigen::VectorXd d = Eigen::VectorXd::Zero(m_->alphabet().size());
        if (z == kNegInf) { // conditioning on a mixture-null prefix: uniform
            d.setConstant(1.0 / m_->alphabet().size());
            return d;
        }
        for (std::size_t j = 0; j < scans_.size(); ++j) {
            if (logw_[j] == kNegInf) continue;
            d += std::exp2(logw_[j] - z) * scans_[j].dist();
        }
        return d;
    }

    void advance(Symbol a) override {
        for (std::size_t j = 0; j < scans_.size(); ++j) {
            if (logw_[j] == kNegInf) continue;
            double p = scans_[j].dist()(a);
            logw_[j] = p > 0.0 ? logw_[j] + std::log2(p) : kNegInf;
            scans_[j].advance(a);
        }
    }

    std::unique_ptr<StepCursor> clone() const override { return std::make_unique<MixtureCursor>(*this); }

    const std::vector<double>& log_weights() const { return logw_; }

  private:
    const FiniteMixture* m_;
    std::vector<MeasureScan> scans_;
    std::vector<double> logw_; // log2(w_j) + log2 mu_j(consumed prefix)
};

} // namespace

std::unique_ptr<StepCursor> FiniteMixture::start() const { return std::make_unique<MixtureCursor>(this); }

Eigen::VectorXd FiniteMixture::posterior_weights(const Seq& prefix) const {
    alphabet().validate(prefix);
    MixtureCursor cur(this);
    for (Symbol a : prefix) cur.advance(a);
    const auto& lw = cur.log_weights();
    double z = log2_sum_exp(lw);
    if (z == kNegInf)
        throw DegenerateConditioning("posterior_weights: prefix has probability zero under every component");
    Eigen::VectorXd post(static_cast<int>(lw.size()));
    for (std::size_t j = 0; j < lw.size(); ++j)
        post(static_cast<int>(j)) = lw[j] == kNegInf ? 0.0 : std::exp2(lw[j] - z);
    return post;
}

MeasurePtr mix_with_uniform(MeasurePtr m) {
    Alphabet a = m->alphabet();
    std::vector<FiniteMixture::Component> comps;
    comps.push_back({0.5, std::move(m)});
    comps.push_back({0.5, std::make_shared<UniformIID>(a)});
    return std::make_shared<FiniteMixture>(a, std::move(comps));
}

// ---------------------------------------------------------------------------
// Weight schedule
// ---------------------------------------------------------------------------

double schedule_normalizer() {
    // 1/w = sum_{j>=2} 1/(j log2^2 j); partial sum to 2^21 plus midpoint
    // integral tail ln^2(2)/ln(N+1/2), accurate to ~1e-13.
    static const double w = [] {
        const long n = 1L << 21;
        double s = 0.0;
        for (long j = n; j >= 2; --j) {
            double l = std::log2(static_cast<double>(j));
            s += 1.0 / (static_cast<double>(j) * l * l);
        }
        s += (M_LN2 * M_LN2) / std::log(static_cast<double>(n) + 0.5);
        return 1.0 / s;
    }();
    return w;
}

double schedule_weight(int k) {
    if (k < 1) throw InputError("schedule_weight: k must be >= 1");
    double l = std::log2(static_cast<double>(k) + 1.0);
    return schedule_normalizer() / ((static_cast<double>(k) + 1.0) * l * l);
}

} // namespace seqpred
