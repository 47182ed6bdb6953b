#include "seqpred/cover.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace seqpred {

namespace {

constexpr double kSlackBits = 1e-9;

void tabulate_rec(const MeasureScan& s, int depth, int n, int a, std::uint32_t code, Eigen::ArrayXd& out) {
    if (depth == n) {
        out(static_cast<Eigen::Index>(code)) = s.dead() ? kNegInf : s.log2_prob();
        return;
    }
    for (Symbol sym = 0; sym < a; ++sym) {
        MeasureScan c = s;
        c.advance(sym);
        tabulate_rec(c, depth + 1, n, a, code * static_cast<std::uint32_t>(a) + sym, out);
    }
}

double set_mass(const SeqSet& s, const Eigen::ArrayXd& log2p) {
    double m = 0.0;
    for (std::uint32_t x : s) {
        double l = log2p(static_cast<Eigen::Index>(x));
        if (l != kNegInf) m += std::exp2(l);
    }
    return m;
}

} // namespace

Eigen::ArrayXd tabulate_log2(const ProcessMeasure& m, int n, std::size_t cap) {
    std::size_t total = pow_checked(m.alphabet().size(), n, cap);
    Eigen::ArrayXd out(static_cast<Eigen::Index>(total));
    MeasureScan s(m);
    tabulate_rec(s, 0, n, m.alphabet().size(), 0, out);
    return out;
}

namespace {

LevelPartition partition_from_tables(const std::string& mu_id, const Eigen::ArrayXd& mu_bits,
                                     const Eigen::ArrayXd& rho_bits, int n, int k, double m_bits) {
    LevelParams params(n, k, m_bits);
    LevelPartition part{mu_id, params, {}, 0.0, std::vector<SeqSet>(k), std::vector<std::vector<double>>(k)};

    const double thresh = -std::log2(static_cast<double>(n)); // ratio >= 1/n in bits
    double outside = 0.0;
    for (Eigen::Index x = 0; x < mu_bits.size(); ++x) {
        double lm = mu_bits(x);
        if (lm == kNegInf) continue; // zero mu-mass: never in T, never counted outside either way
        double lr = rho_bits(x);
        if (lr == kNegInf)
            throw ContractViolation("level_partition: rho vanishes on a sequence; smooth rho with mix_with_uniform");
        double ratio = lm - lr;
        if (ratio < thresh) {
            outside += std::exp2(lm);
            continue;
        }
        double score = ratio / n;
        if (score < params.lo() - kSlackBits || score > params.hi() + kSlackBits)
            throw ContractViolation("level_partition: score " + std::to_string(score) +
                                    " outside U_k; Eq. boundedness not enforced for rho");
        int i = params.cell_of(score);
        part.t_mu.push_back(static_cast<std::uint32_t>(x));
        part.cells[static_cast<std::size_t>(i - 1)].push_back(static_cast<std::uint32_t>(x));
        part.cell_ratio_bits[static_cast<std::size_t>(i - 1)].push_back(ratio);
    }
    part.complement_mu_mass = outside;
    if (outside > 1.0 / n + kSlackBits)
        throw ContractViolation("level_partition: Markov bound violated: mass outside T = " + std::to_string(outside));
    return part;
}

} // namespace

SeqSet likelihood_set(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, std::size_t cap) {
    return level_partition(mu, rho, n, 1, cap).t_mu;
}

LevelPartition level_partition(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, int k, std::size_t cap) {
    if (mu.alphabet() != rho.alphabet()) throw InputError("level_partition: alphabet mismatch");
    Eigen::ArrayXd mu_bits = tabulate_log2(mu, n, cap);
    Eigen::ArrayXd rho_bits = tabulate_log2(rho, n, cap);
    return partition_from_tables(mu.name(), mu_bits, rho_bits, n, k, mu.alphabet().bits());
}

namespace {

GreedyCoverResult greedy_from_partitions(const std::vector<LevelPartition>& parts, const Eigen::ArrayXd& rho_bits,
                                         int n, int k, int i) {
    GreedyCoverResult res;
    res.n = n;
    res.k = k;
    res.i = i;

    std::vector<char> covered_flag(static_cast<std::size_t>(rho_bits.size()), 0);
    SeqSet covered;

    for (int l = 1;; ++l) {
        double best = 0.0;
        int best_j = -1;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            double mass = 0.0;
            for (std::uint32_t x : parts[j].cells[static_cast<std::size_t>(i - 1)])
                if (!covered_flag[x]) mass += std::exp2(rho_bits(static_cast<Eigen::Index>(x)));
            if (mass > best) {
                best = mass;
                best_j = static_cast<int>(j);
            }
        }
        if (best_j < 0 || best <= 0.0) {
            res.termination_step = l;
            break;
        }
        std::size_t added = 0;
        for (std::uint32_t x : parts[static_cast<std::size_t>(best_j)].cells[static_cast<std::size_t>(i - 1)]) {
            if (!covered_flag[x]) {
                covered_flag[x] = 1;
                covered.push_back(x);
                ++added;
            }
        }
        res.steps.push_back({l, best_j, best, added});
        std::sort(covered.begin(), covered.end());
        res.covered_after.push_back(covered);
    }
    res.covered = covered;
    return res;
}

} // namespace

GreedyCoverResult greedy_cover(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho, int n, int k, int i,
                               std::size_t cap) {
    if (c.empty()) throw InputError("greedy_cover: empty class");
    if (i < 1 || i > k) throw InputError("greedy_cover: cell index out of range");
    for (const auto& m : c)
        if (m->alphabet() != rho.alphabet()) throw InputError("greedy_cover: alphabet mismatch");

    Eigen::ArrayXd rho_bits = tabulate_log2(rho, n, cap);
    std::vector<LevelPartition> parts;
    parts.reserve(c.size());
    for (const auto& m : c)
        parts.push_back(partition_from_tables(m->name(), tabulate_log2(*m, n, cap), rho_bits, n, k,
                                              rho.alphabet().bits()));
    return greedy_from_partitions(parts, rho_bits, n, k, i);
}

ExtractedMixture assemble(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho,
                          const std::vector<std::pair<int, int>>& grid, SlackParams slack, std::size_t cap) {
    if (c.empty()) throw InputError("assemble: empty class");
    if (grid.empty()) throw InputError("assemble: empty grid");
    const Alphabet alpha = rho.alphabet();
    for (const auto& m : c)
        if (m->alphabet() != alpha) throw InputError("assemble: alphabet mismatch");
    for (auto [n, k] : grid) SlackParams check(slack.a, alpha.bits(), k); // a > M/k on every grid row

    ExtractedMixture out;
    out.class_members = c;
    out.grid = grid;
    out.slack_a = slack.a;

    std::map<int, double> raw_weights; // class index -> accumulated raw weight
    for (auto [n, k] : grid) {
        Eigen::ArrayXd rho_bits = tabulate_log2(rho, n, cap);
        std::vector<LevelPartition> parts;
        for (const auto& m : c)
            parts.push_back(partition_from_tables(m->name(), tabulate_log2(*m, n, cap), rho_bits, n, k,
                                                  alpha.bits()));
        double outer = schedule_weight(n) * schedule_weight(k) / k;
        for (int i = 1; i <= k; ++i) {
            GreedyCoverResult g = greedy_from_partitions(parts, rho_bits, n, k, i);
            if (g.steps.empty()) continue; // empty cell contributes nothing
            double inner_sum = 0.0;
            for (const auto& st : g.steps) inner_sum += schedule_weight(st.l);
            for (const auto& st : g.steps)
                raw_weights[st.component] += outer * schedule_weight(st.l) / inner_sum;
            out.cells.push_back({n, k, i, g.steps, inner_sum});
        }
    }
    if (raw_weights.empty()) throw ContractViolation("assemble: every cell came out empty");

    double total = 0.0;
    for (const auto& [idx, w] : raw_weights) total += w;
    std::vector<FiniteMixture::Component> comps;
    for (const auto& [idx, w] : raw_weights) {
        out.component_weights.push_back({idx, w / total});
        comps.push_back({w / total, c[static_cast<std::size_t>(idx)]});
    }
    out.nu = std::make_shared<FiniteMixture>(alpha, std::move(comps));
    out.predictor = mix_with_uniform(out.nu);
    return out;
}

MeasurePtr combine_predictors(const std::vector<MeasurePtr>& nus) {
    if (nus.empty()) throw InputError("combine_predictors: empty list");
    std::vector<FiniteMixture::Component> comps;
    for (std::size_t j = 0; j < nus.size(); ++j)
        comps.push_back({schedule_weight(static_cast<int>(j) + 1), nus[j]});
    return std::make_shared<FiniteMixture>(nus.front()->alphabet(), std::move(comps));
}

AuditReport dominance_audit(const std::vector<MeasurePtr>& c, const ProcessMeasure& rho,
                            const ExtractedMixture& extracted, int n, int k, SlackParams slack, std::size_t cap) {
    AuditReport rep;
    rep.n = n;
    rep.k = k;
    rep.slack_a = slack.a;
    rep.b_formula = "B(n,k,i,a) = -log2(w_n*w_k/k) + (1 + 2*log2((i*M/k + a)*n + 2)) - log2(w)";

    const Alphabet alpha = rho.alphabet();
    const double m_bits = alpha.bits();
    SlackParams check(slack.a, m_bits, k);

    Eigen::ArrayXd rho_bits = tabulate_log2(rho, n, cap);
    Eigen::ArrayXd nu_bits = tabulate_log2(*extracted.predictor, n, cap);

    std::vector<LevelPartition> parts;
    std::vector<Eigen::ArrayXd> mu_tables;
    for (const auto& m : c) {
        mu_tables.push_back(tabulate_log2(*m, n, cap));
        parts.push_back(partition_from_tables(m->name(), mu_tables.back(), rho_bits, n, k, m_bits));
    }

    auto fail = [&rep](const std::string& msg) {
        rep.pass = false;
        rep.failures.push_back(msg);
    };

    const double log2_w = std::log2(schedule_normalizer());
    const double wn = schedule_weight(n), wk = schedule_weight(k);

    for (int i = 1; i <= k; ++i) {
        GreedyCoverResult g = greedy_from_partitions(parts, rho_bits, n, k, i);

        // Residual bound: after every realized step l, every member's cell has
        // rho(cell \ T_l) <= m_{l+1} <= 1/(l+1), and m_l itself is <= 1/l.
        for (std::size_t s = 0; s < g.steps.size(); ++s) {
            const auto& st = g.steps[s];
            if (st.covered_mass > 1.0 / st.l + kSlackBits)
                fail("greedy m_l > 1/l at (i=" + std::to_string(i) + ", l=" + std::to_string(st.l) + ")");
            if (s + 1 < g.steps.size() && g.steps[s + 1].covered_mass > st.covered_mass + kSlackBits)
                fail("greedy m_l increased at (i=" + std::to_string(i) + ", l=" + std::to_string(st.l + 1) + ")");
            double next_m = s + 1 < g.steps.size() ? g.steps[s + 1].covered_mass : 0.0;
            for (std::size_t j = 0; j < parts.size(); ++j) {
                double resid = 0.0;
                const SeqSet& cell = parts[j].cells[static_cast<std::size_t>(i - 1)];
                const SeqSet& cov = g.covered_after[s];
                for (std::uint32_t x : cell)
                    if (!std::binary_search(cov.begin(), cov.end(), x))
                        resid += std::exp2(rho_bits(static_cast<Eigen::Index>(x)));
                if (resid > next_m + kSlackBits)
                    fail("greedy residual above m_{l+1} for " + parts[j].mu_id + " at (i=" + std::to_string(i) +
                         ", l=" + std::to_string(st.l) + ")");
            }
        }

        const double l_star = slack.l_star(m_bits, k, i, n);
        const std::size_t realized = g.steps.size();
        const std::size_t lm = l_star == kPosInf
                                   ? realized
                                   : std::min<std::size_t>(realized, static_cast<std::size_t>(l_star));
        const SeqSet& covered = lm == 0 ? SeqSet{} : g.covered_after[lm - 1];

        const double b_const = -std::log2(wn * wk / k) + 1.0 + 2.0 * std::log2((i * m_bits / k + slack.a) * n + 2.0) -
                               log2_w;
        const double rhs = (slack.a + m_bits / k) * n + std::log2(static_cast<double>(n)) + b_const;
        const double exc_bound = std::exp2(-slack.a * n + 1.0);

        for (std::size_t j = 0; j < parts.size(); ++j) {
            AuditCellRow row;
            row.mu_id = parts[j].mu_id;
            row.cell_i = i;
            row.bound_rhs_bits = rhs;
            row.exceptional_bound = exc_bound;

            const SeqSet& cell = parts[j].cells[static_cast<std::size_t>(i - 1)];
            const auto& ratios = parts[j].cell_ratio_bits[static_cast<std::size_t>(i - 1)];
            const Eigen::ArrayXd& mu_b = mu_tables[j];

            for (std::size_t t = 0; t < cell.size(); ++t) {
                std::uint32_t x = cell[t];
                // Two-sided cell bounds (the quantized-score consequences).
                double up = (i * m_bits / k) * n + 1.0;
                double down = ((i - 1) * m_bits / k) * n - std::log2(static_cast<double>(n));
                if (ratios[t] > up + kSlackBits)
                    fail("cell upper bound violated for " + row.mu_id + " i=" + std::to_string(i) + " x=" +
                         seq_to_string(decode_seq(x, n, alpha.size())));
                if (ratios[t] < down - kSlackBits)
                    fail("cell lower bound violated for " + row.mu_id + " i=" + std::to_string(i) + " x=" +
                         seq_to_string(decode_seq(x, n, alpha.size())));

                double mu_mass = std::exp2(mu_b(static_cast<Eigen::Index>(x)));
                if (std::binary_search(covered.begin(), covered.end(), x)) {
                    row.covered_mass += mu_mass;
                    double lhs = -nu_bits(static_cast<Eigen::Index>(x)) + rho_bits(static_cast<Eigen::Index>(x));
                    row.max_violation_bits = std::max(row.max_violation_bits, lhs - rhs);
                    if (lhs > rhs + kSlackBits) {
                        row.pass = false;
                        fail("dominance chain violated for " + row.mu_id + " i=" + std::to_string(i) + " x=" +
                             seq_to_string(decode_seq(x, n, alpha.size())) + " by " + std::to_string(lhs - rhs) +
                             " bits");
                    }
                } else {
                    row.exceptional_mass += mu_mass;
                }
            }
            if (row.exceptional_mass > exc_bound + kSlackBits) {
                row.pass = false;
                fail("exceptional mass " + std::to_string(row.exceptional_mass) + " above 2^(-an+1) for " +
                     row.mu_id + " i=" + std::to_string(i));
            }
            rep.cells.push_back(std::move(row));
        }
    }

    for (const auto& m : c) {
        AuditHeadlineRow h;
        h.mu_id = m->name();
        h.dn_nu_bits = exact_dn(*m, *extracted.predictor, n, cap).dn_bits;
        h.dn_rho_bits = exact_dn(*m, rho, n, cap).dn_bits;
        rep.headline.push_back(h);
    }
    return rep;
}

} // namespace seqpred
