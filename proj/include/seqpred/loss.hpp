#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqpred/measures.hpp"

namespace seqpred {

// Leaves an exhaustive enumeration may visit before giving up. Subtrees of
// mu-probability zero are pruned first, so a point mass stays cheap at any
// horizon.
inline constexpr std::size_t kDefaultLeafCap = std::size_t(1) << 22;

// d_n is +inf exactly when some sequence has mu(x) > 0 and rho(x) = 0; the
// witness records one such sequence. Infinity is a value, not an error.
struct LossReport {
    std::string method; // exact | dp | mc
    int n = 0;
    double dn_bits = 0.0;
    double per_symbol = 0.0;
    double stderr_bits = 0.0; // mc only
    long samples = 0;         // mc only
    std::uint64_t seed = 0;   // mc only
    std::optional<Seq> infinity_witness;

    bool finite() const { return dn_bits != kPosInf; }
};

struct RegretReport {
    int n = 0;
    double regret_bits = 0.0; // d_n(nu, rho) - d_n(nu, mu); may be negative
    double dn_rho = 0.0;
    double dn_mu = 0.0;
    std::string nu_id, mu_id, rho_id;
};

// Expected cumulative KL divergence sum_x mu(x) log2(mu(x)/rho(x)) over X^n,
// by depth-first enumeration with mu-null pruning.
LossReport exact_dn(const ProcessMeasure& mu, const ProcessMeasure& rho, int n,
                    std::size_t leaf_cap = kDefaultLeafCap);

// Same quantity for iid mu and a count-sufficient rho, via the sufficient-
// statistic dynamic program over count vectors. rho must implement
// CountSufficient or this throws ContractViolation.
LossReport dp_dn_iid(const Eigen::VectorXd& theta, const ProcessMeasure& rho, int n,
                     std::size_t comp_cap = kDefaultLeafCap);

// Unbiased Monte Carlo estimate: sample x ~ mu, average log2(mu(x)/rho(x)).
// Deterministic given (seed); sample i draws from SplitMix64::for_stream(seed, i),
// so the result is independent of the worker count.
LossReport mc_dn(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, long samples, std::uint64_t seed,
                 int threads = 1);

// Finite-horizon trace (n, d_n/n). Picks the cheapest applicable exact method,
// falling back to Monte Carlo above the exhaustive cap. Evidence about the
// limsup d-bar, never a verdict.
std::vector<LossReport> dbar_proxy(const ProcessMeasure& mu, const ProcessMeasure& rho,
                                   const std::vector<int>& n_grid, long mc_samples = 10000,
                                   std::uint64_t seed = 1, std::size_t leaf_cap = kDefaultLeafCap);

struct ClassLoss {
    double per_symbol = 0.0; // max_i d_n(mu_i, rho)/n
    std::size_t argmax = 0;  // lowest index on ties
    std::vector<LossReport> reports;
};

ClassLoss class_loss(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho, int n,
                     std::size_t leaf_cap = kDefaultLeafCap);

RegretReport regret_n(const ProcessMeasure& nu_env, const ProcessMeasure& mu_ref, const ProcessMeasure& rho, int n,
                      std::size_t leaf_cap = kDefaultLeafCap);

} // namespace seqpred
