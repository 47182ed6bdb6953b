#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seqpred/loss.hpp"
#include "seqpred/measures.hpp"

namespace seqpred {

// Sorted radix-A encodings of length-n sequences. Set algebra (difference,
// union, intersection) dominates the covering cost, so sets stay as sorted
// integer vectors.
using SeqSet = std::vector<std::uint32_t>;

// log2 probabilities of every x in X^n under one measure, indexed by encoding.
Eigen::ArrayXd tabulate_log2(const ProcessMeasure& m, int n, std::size_t cap = kDefaultLeafCap);

// Level geometry for horizon n with k cells: cell 1 is
// [-(log2 n)/n, M/k], interior cells ((i-1)M/k, iM/k], cell k runs to M + 1/n.
struct LevelParams {
    int n;
    int k;
    double m_bits; // alphabet bits per symbol

    LevelParams(int n_, int k_, double m_) : n(n_), k(k_), m_bits(m_) {
        if (n_ < 1 || k_ < 1) throw InputError("LevelParams: n and k must be >= 1");
    }
    double lo() const { return -std::log2(static_cast<double>(n)) / n; }
    double hi() const { return m_bits + 1.0 / n; }
    // 1-based cell index for a per-symbol score already validated in [lo, hi].
    int cell_of(double score) const {
        for (int i = 1; i < k; ++i)
            if (score <= i * m_bits / k) return i;
        return k;
    }
};

// The likelihood set T_mu^n and its partition into k level cells, with the
// per-sequence log2(mu/rho) cached alongside each cell.
struct LevelPartition {
    std::string mu_id;
    LevelParams params;
    SeqSet t_mu;                           // union of the cells
    double complement_mu_mass = 0.0;       // mu(X^n \ T_mu^n), <= 1/n by Markov
    std::vector<SeqSet> cells;             // k disjoint sets
    std::vector<std::vector<double>> cell_ratio_bits; // log2(mu/rho) per member
};

// T_mu^n = { x : mu(x)/rho(x) >= 1/n }. rho must be positive on X^n
// (smooth it with mix_with_uniform first).
SeqSet likelihood_set(const ProcessMeasure& mu, const ProcessMeasure& rho, int n,
                      std::size_t cap = kDefaultLeafCap);

LevelPartition level_partition(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, int k,
                               std::size_t cap = kDefaultLeafCap);

struct GreedyStep {
    int l;                 // 1-based step index
    int component;         // index into the class
    double covered_mass;   // m_l: rho-mass newly covered at this step
    std::size_t covered_count;
};

struct GreedyCoverResult {
    int n = 0, k = 0, i = 0;
    std::vector<GreedyStep> steps; // steps with m_l > 0, in order
    int termination_step = 0;      // first l with m_l = 0 (= steps.size() + 1)
    SeqSet covered;                // T at termination
    // covered_after[j] = union of the first j+1 steps' cells, for audits.
    std::vector<SeqSet> covered_after;
};

// The greedy covering for cell (n, k, i): repeatedly pick the class member
// whose level cell adds the most rho-mass, lowest index on ties.
GreedyCoverResult greedy_cover(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho, int n, int k, int i,
                               std::size_t cap = kDefaultLeafCap);

// Margin exponent of the covering argument; must exceed M/k.
struct SlackParams {
    double a;
    SlackParams(double a_, double m_bits, int k) : a(a_) {
        if (!(a_ > m_bits / k))
            throw InputError("SlackParams: a must exceed M/k = " + std::to_string(m_bits / k));
    }
    // l* = ceil(2^((i M/k + a) n + 1)); +inf when out of integer range.
    double l_star(double m_bits, int k, int i, int n) const {
        double e = (i * m_bits / k + a) * n + 1.0;
        return e > 62.0 ? kPosInf : std::ceil(std::exp2(e));
    }
};

struct CellProvenance {
    int n, k, i;
    std::vector<GreedyStep> steps;
    double inner_weight_sum; // sum of schedule weights over realized steps
};

// Outputs of the construction: the per-cell mixtures, the combined predictor,
// and enough provenance to audit every inequality afterwards.
struct ExtractedMixture {
    std::vector<MeasurePtr> class_members;
    std::vector<std::pair<int, int>> grid; // (n, k) pairs actually used
    double slack_a;
    std::vector<CellProvenance> cells;
    // Deduplicated class-member weights of the combined mixture, normalized.
    std::vector<std::pair<int, double>> component_weights;
    MeasurePtr nu;        // the combined mixture over class members
    MeasurePtr predictor; // mix_with_uniform(nu): the object to predict with
};

ExtractedMixture assemble(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho,
                          const std::vector<std::pair<int, int>>& grid, SlackParams slack,
                          std::size_t cap = kDefaultLeafCap);

// phi = sum_j weight(j) nu_j over a list of already-extracted predictors,
// one per reference predictor rho_j.
MeasurePtr combine_predictors(const std::vector<MeasurePtr>& nus);

struct AuditCellRow {
    std::string mu_id;
    int cell_i = 0;
    double covered_mass = 0.0;     // mu-mass of the covered part of the cell
    double exceptional_mass = 0.0; // mu-mass left uncovered at step min(l*, L*)
    double exceptional_bound = 0.0; // 2^(-a n + 1)
    double bound_rhs_bits = 0.0;   // (a + M/k) n + log2 n + B(n, k, i, a)
    double max_violation_bits = -kPosInf; // max over covered x of lhs - rhs
    bool pass = true;
};

struct AuditHeadlineRow {
    std::string mu_id;
    double dn_nu_bits = 0.0;
    double dn_rho_bits = 0.0;
};

struct AuditReport {
    bool pass = true;
    std::vector<std::string> failures; // human-readable, names mu, i, x
    std::vector<AuditCellRow> cells;
    std::vector<AuditHeadlineRow> headline;
    std::string b_formula; // the explicit constant used, recorded for transparency
    double slack_a = 0.0;
    int n = 0, k = 0;
};

// Verifies, with explicit constants and 1e-9 log-domain slack, every
// inequality the construction promises at (n, k):
//   - Markov bound mu(X^n \ T_mu^n) <= 1/n
//   - two-sided cell bounds on log2(mu/rho)
//   - greedy residual rho(cell \ T_l) <= m_{l+1} <= 1/(l+1)
//   - exceptional mass <= 2^(-a n + 1)
//   - the per-sequence chain -log2 nu(x) <= -log2 rho(x) + (a + M/k) n
//     + log2 n + B, with B = -log2(w_n w_k / k) + (1 + 2 log2((i M/k + a) n + 2))
//     - log2 w
// plus the headline d_n(mu, nu) vs d_n(mu, rho) comparison for every member.
AuditReport dominance_audit(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho,
                            const ExtractedMixture& extracted, int n, int k, SlackParams slack,
                            std::size_t cap = kDefaultLeafCap);

} // namespace seqpred
