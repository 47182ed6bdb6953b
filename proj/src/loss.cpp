#include "seqpred/loss.hpp"

#include <cmath>
#include <thread>

#include "seqpred/rng.hpp"

namespace seqpred {

namespace {

struct ExactState {
    int n;
    std::size_t leaf_cap;
    std::size_t leaves = 0;
    double sum_bits = 0.0;
    bool infinite = false;
    Seq path;
};

// DFS over the prefix tree carrying both scans; prunes mu-null subtrees.
bool exact_rec(ExactState& st, const MeasureScan& mu, const MeasureScan& rho, int depth) {
    if (mu.dead()) return true; // subtree carries no mu-mass
    if (depth == st.n) {
        if (++st.leaves > st.leaf_cap)
            throw CapExceeded("exact_dn: explored leaves exceed cap of " + std::to_string(st.leaf_cap));
        if (rho.dead()) {
            st.infinite = true;
            return false; // path holds the witness
        }
        st.sum_bits += std::exp2(mu.log2_prob()) * (mu.log2_prob() - rho.log2_prob());
        return true;
    }
    const int a = static_cast<int>(mu.dist().size());
    for (Symbol s = 0; s < a; ++s) {
        MeasureScan cm = mu;
        MeasureScan cr = rho;
        cm.advance(s);
        cr.advance(s);
        st.path.push_back(s);
        if (!exact_rec(st, cm, cr, depth + 1)) return false;
        st.path.pop_back();
    }
    return true;
}

} // namespace

LossReport exact_dn(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, std::size_t leaf_cap) {
    if (mu.alphabet() != rho.alphabet()) throw InputError("exact_dn: alphabet mismatch");
    if (n < 0) throw InputError("exact_dn: negative horizon");
    ExactState st{n, leaf_cap};
    MeasureScan sm(mu), sr(rho);
    exact_rec(st, sm, sr, 0);
    LossReport r;
    r.method = "exact";
    r.n = n;
    if (st.infinite) {
        r.dn_bits = kPosInf;
        r.per_symbol = kPosInf;
        r.infinity_witness = st.path;
    } else {
        // KL is nonnegative; clear round-off just below zero.
        r.dn_bits = (st.sum_bits < 0.0 && st.sum_bits > -1e-9) ? 0.0 : st.sum_bits;
        r.per_symbol = n > 0 ? r.dn_bits / n : 0.0;
    }
    return r;
}

namespace {

struct DpState {
    const Eigen::VectorXd* theta;
    const CountSufficient* rho;
    int n;
    double sum_bits = 0.0;
    bool infinite = false;
    Eigen::VectorXi counts;
    std::size_t terms = 0;
    std::size_t cap;
    Seq* witness_out;
};

// Enumerates count vectors (compositions of n); each contributes
// multinomial(n; counts) * prod theta^count * (log2 mu - log2 rho).
void dp_rec(DpState& st, int sym, int remaining, double log2_coef_mu) {
    // log2_coef_mu accumulates log2[ n!/(prod k!) * prod theta^k ] so far.
    if (log2_coef_mu == kNegInf) return; // a positive count on a zero-theta symbol
    const int a = static_cast<int>(st.theta->size());
    if (sym == a - 1) {
        st.counts(sym) = remaining;
        double th = (*st.theta)(sym);
        if (remaining > 0 && th <= 0.0) {
            st.counts(sym) = 0;
            return;
        }
        double lmu_seq = 0.0; // log2 of one sequence's mu-probability
        for (int i = 0; i < a; ++i)
            if (st.counts(i) > 0) lmu_seq += st.counts(i) * std::log2((*st.theta)(i));
        double lcoef = log2_coef_mu;
        if (remaining > 0) lcoef += remaining * std::log2(th);
        lcoef += -(std::lgamma(remaining + 1.0)) / M_LN2;
        // lcoef now equals log2[ multinomial * prod theta^k ] = log2 P(count vector)
        if (++st.terms > st.cap) throw CapExceeded("dp_dn_iid: composition count exceeds cap");
        double lrho = st.rho->log2_prob_counts(st.counts);
        if (lrho == kNegInf) {
            st.infinite = true;
            if (st.witness_out) {
                st.witness_out->clear();
                for (int i = 0; i < a; ++i)
                    st.witness_out->insert(st.witness_out->end(), st.counts(i), static_cast<Symbol>(i));
            }
        } else if (!st.infinite) {
            st.sum_bits += std::exp2(lcoef) * (lmu_seq - lrho);
        }
        st.counts(sym) = 0;
        return;
    }
    double th = (*st.theta)(sym);
    for (int k = 0; k <= remaining; ++k) {
        if (k > 0 && th <= 0.0) break;
        st.counts(sym) = k;
        double l = log2_coef_mu - std::lgamma(k + 1.0) / M_LN2 + (k > 0 ? k * std::log2(th) : 0.0);
        dp_rec(st, sym + 1, remaining - k, l);
    }
    st.counts(sym) = 0;
}

} // namespace

LossReport dp_dn_iid(const Eigen::VectorXd& theta, const ProcessMeasure& rho, int n, std::size_t comp_cap) {
    const auto* cs = dynamic_cast<const CountSufficient*>(&rho);
    if (!cs) throw ContractViolation("dp_dn_iid: rho \"" + rho.name() + "\" does not declare count-sufficiency");
    if (theta.size() != rho.alphabet().size()) throw InputError("dp_dn_iid: theta size mismatch");
    if (std::abs(theta.sum() - 1.0) > 1e-12 || (theta.array() < 0.0).any())
        throw InputError("dp_dn_iid: theta is not a distribution");
    if (n < 0) throw InputError("dp_dn_iid: negative horizon");

    Seq witness;
    DpState st{&theta, cs, n, 0.0, false, Eigen::VectorXi::Zero(theta.size()), 0, comp_cap, &witness};
    dp_rec(st, 0, n, std::lgamma(n + 1.0) / M_LN2);

    LossReport r;
    r.method = "dp";
    r.n = n;
    if (st.infinite) {
        r.dn_bits = r.per_symbol = kPosInf;
        r.infinity_witness = witness;
    } else {
        r.dn_bits = (st.sum_bits < 0.0 && st.sum_bits > -1e-9) ? 0.0 : st.sum_bits;
        r.per_symbol = n > 0 ? r.dn_bits / n : 0.0;
    }
    return r;
}

LossReport mc_dn(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, long samples, std::uint64_t seed,
                 int threads) {
    if (mu.alphabet() != rho.alphabet()) throw InputError("mc_dn: alphabet mismatch");
    if (samples < 2) throw InputError("mc_dn: needs at least 2 samples");
    if (threads < 1) threads = 1;

    std::vector<double> vals(static_cast<std::size_t>(samples), 0.0);
    std::optional<Seq> witness;
    bool infinite = false;
    std::mutex witness_mx;

    auto run_range = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            SplitMix64 g = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(i));
            MeasureScan sm(mu), sr(rho);
            Seq x;
            x.reserve(static_cast<std::size_t>(n));
            for (int t = 0; t < n; ++t) {
                Eigen::VectorXd d = sm.dist();
                double u = g.next_double();
                int a = static_cast<int>(d.size());
                int pick = a - 1;
                double acc = 0.0;
                for (int s = 0; s < a; ++s) {
                    acc += d(s);
                    if (u < acc) {
                        pick = s;
                        break;
                    }
                }
                // Never sample a zero-probability continuation off round-off.
                while (d(pick) <= 0.0 && pick > 0) --pick;
                sm.advance(static_cast<Symbol>(pick));
                sr.advance(static_cast<Symbol>(pick));
                x.push_back(static_cast<Symbol>(pick));
            }
            if (sr.dead()) {
                std::lock_guard<std::mutex> lk(witness_mx);
                infinite = true;
                if (!witness) witness = x;
            } else {
                vals[static_cast<std::size_t>(i)] = sm.log2_prob() - sr.log2_prob();
            }
        }
    };

    if (threads == 1) {
        run_range(0, samples);
    } else {
        std::vector<std::thread> pool;
        long chunk = (samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            long lo = t * chunk, hi = std::min<long>(samples, lo + chunk);
            if (lo < hi) pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    LossReport r;
    r.method = "mc";
    r.n = n;
    r.samples = samples;
    r.seed = seed;
    if (infinite) {
        r.dn_bits = r.per_symbol = kPosInf;
        r.infinity_witness = witness;
        return r;
    }
    // Deterministic reduction in sample order regardless of thread count.
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(samples);
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    double var = ss / static_cast<double>(samples - 1);
    r.dn_bits = mean;
    r.per_symbol = n > 0 ? mean / n : 0.0;
    r.stderr_bits = std::sqrt(var / static_cast<double>(samples));
    return r;
}

std::vector<LossReport> dbar_proxy(const ProcessMeasure& mu, const ProcessMeasure& rho, const std::vector<int>& n_grid,
                                   long mc_samples, std::uint64_t seed, std::size_t leaf_cap) {
    std::vector<LossReport> out;
    out.reserve(n_grid.size());
    const auto* iid = dynamic_cast<const IIDCategorical*>(&mu);
    const bool rho_cs = dynamic_cast<const CountSufficient*>(&rho) != nullptr;
    for (int n : n_grid) {
        if (iid && rho_cs && static_cast<std::size_t>(n) <= leaf_cap) {
            out.push_back(dp_dn_iid(iid->theta(), rho, n, leaf_cap));
            continue;
        }
        bool fits = true;
        try {
            pow_checked(mu.alphabet().size(), n, leaf_cap);
        } catch (const CapExceeded&) {
            fits = false;
        }
        if (fits) {
            out.push_back(exact_dn(mu, rho, n, leaf_cap));
        } else {
            // Above the cap a point-mass mu still enumerates exactly (one path).
            try {
                out.push_back(exact_dn(mu, rho, n, leaf_cap));
            } catch (const CapExceeded&) {
                out.push_back(mc_dn(mu, rho, n, mc_samples, seed));
            }
        }
    }
    return out;
}

ClassLoss class_loss(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho, int n, std::size_t leaf_cap) {
    if (c.empty()) throw InputError("class_loss: empty class");
    ClassLoss out;
    out.per_symbol = -kPosInf;
    for (std::size_t i = 0; i < c.size(); ++i) {
        LossReport r = exact_dn(*c[i], rho, n, leaf_cap);
        if (r.per_symbol > out.per_symbol) {
            out.per_symbol = r.per_symbol;
            out.argmax = i;
        }
        out.reports.push_back(std::move(r));
    }
    return out;
}

RegretReport regret_n(const ProcessMeasure& nu_env, const ProcessMeasure& mu_ref, const ProcessMeasure& rho, int n,
                      std::size_t leaf_cap) {
    LossReport a = exact_dn(nu_env, rho, n, leaf_cap);
    LossReport b = exact_dn(nu_env, mu_ref, n, leaf_cap);
    RegretReport r;
    r.n = n;
    r.dn_rho = a.dn_bits;
    r.dn_mu = b.dn_bits;
    if (a.dn_bits == kPosInf && b.dn_bits == kPosInf)
        r.regret_bits = std::numeric_limits<double>::quiet_NaN(); // both references fail on nu
    else
        r.regret_bits = a.dn_bits - b.dn_bits;
    r.nu_id = nu_env.name();
    r.mu_id = mu_ref.name();
    r.rho_id = rho.name();
    return r;
}

} // namespace seqpred
