#pragma once

#include <string>
#include <vector>

#include "seqpred/loss.hpp"
#include "seqpred/measures.hpp"

namespace seqpred {

// Joint table cap for the capacity iteration: |C| * A^n entries.
inline constexpr std::size_t kDefaultJointCap = std::size_t(1) << 24;

struct CapacityResult {
    int n = 0;
    double value_bits_per_symbol = 0.0; // midpoint of the certified sandwich
    double upper = 0.0;                 // max_i d_n(mu_i, rho*)/n, >= value
    double lower = 0.0;                 // Bayes risk of rho* under W*, <= value
    double gap = 0.0;                   // (upper - lower)/2
    Eigen::VectorXd prior;              // W*
    std::shared_ptr<const FiniteMixture> bayes_mixture; // barycentre of W*
    int iterations = 0;
    bool converged = false;
};

// E_{W} d_n(mu_i, rho) / n over a finite class.
double bayes_risk(const Eigen::VectorXd& w, const ProcessMeasure& rho, const std::vector<MeasurePtr>& c, int n,
                  std::size_t leaf_cap = kDefaultLeafCap);

// Alternating minimization over the prior/barycentre pair (the classical
// capacity iteration), run on the |C| x A^n joint in the log domain. Stops
// when the sandwich half-width falls under tol (per symbol).
CapacityResult capacity_iterate(const std::vector<MeasurePtr>& c, int n, double tol = 1e-6, int max_iter = 200000,
                                std::size_t joint_cap = kDefaultJointCap);

struct MinimaxGapReport {
    double upper = 0.0;
    double lower = 0.0;
    double gap = 0.0; // upper - lower, <= 2 tol at convergence
    CapacityResult details;
    // Finite-horizon, finite-class evidence only; the asymptotic question
    // whether the upper and lower values coincide is open.
    std::string caveat;
};

MinimaxGapReport minimax_gap(const std::vector<MeasurePtr>& c, int n, double tol = 1e-6,
                             std::size_t joint_cap = kDefaultJointCap);

struct AdmissibilityReport {
    int n = 0;
    double dn_rho_bits = 0.0;       // d_n(mu, rho)
    double dn_rho_prime_bits = 0.0; // d_n(mu, (rho+mu)/2), always <= 1 bit
    double improvement_bits = 0.0;
    bool dominated_at_n = false; // improvement beyond 1 bit
    MeasurePtr rho_prime;
};

// The complete-class observation at finite horizon: blending mu into any rho
// caps the loss on mu at one bit, so rho is improvable whenever it loses more.
AdmissibilityReport admissibility_check(MeasurePtr rho, MeasurePtr mu, int n,
                                        std::size_t leaf_cap = kDefaultLeafCap);

} // namespace seqpred
