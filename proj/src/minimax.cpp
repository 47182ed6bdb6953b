#include "seqpred/minimax.hpp"

#include <cmath>

#include "seqpred/cover.hpp"

namespace seqpred {

double bayes_risk(const Eigen::VectorXd& w, const ProcessMeasure& rho, const std::vector<MeasurePtr>& c, int n,
                  std::size_t leaf_cap) {
    if (static_cast<std::size_t>(w.size()) != c.size()) throw InputError("bayes_risk: |W| != |C|");
    double r = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (w(static_cast<int>(i)) == 0.0) continue;
        r += w(static_cast<int>(i)) * exact_dn(*c[i], rho, n, leaf_cap).per_symbol;
    }
    return r;
}

CapacityResult capacity_iterate(const std::vector<MeasurePtr>& c, int n, double tol, int max_iter,
                                std::size_t joint_cap) {
    if (c.empty()) throw InputError("capacity_iterate: empty class");
    if (!(tol > 0.0)) throw InputError("capacity_iterate: tol must be positive");
    const Alphabet alpha = c.front()->alphabet();
    for (const auto& m : c)
        if (m->alphabet() != alpha) throw InputError("capacity_iterate: alphabet mismatch");

    const std::size_t x_count = pow_checked(alpha.size(), n, joint_cap / c.size());
    const int cn = static_cast<int>(c.size());

    // L(i, x) = log2 mu_i(x); P = 2^L. Exact joint, no sampling noise inside
    // the fixed-point loop.
    Eigen::MatrixXd l_bits(cn, static_cast<Eigen::Index>(x_count));
    for (int i = 0; i < cn; ++i) l_bits.row(i) = tabulate_log2(*c[static_cast<std::size_t>(i)], n).transpose();
    Eigen::MatrixXd p = l_bits.unaryExpr([](double v) { return v == kNegInf ? 0.0 : std::exp2(v); });

    Eigen::VectorXd w = Eigen::VectorXd::Constant(cn, 1.0 / cn);
    Eigen::VectorXd risk_bits(cn); // D_i = d_n(mu_i, barycentre) in bits
    double upper = kPosInf, lower = 0.0;
    int it = 0;
    bool converged = false;

    while (it < max_iter) {
        ++it;
        Eigen::VectorXd mix = (w.transpose() * p).transpose(); // barycentre probabilities on X^n
        for (int i = 0; i < cn; ++i) {
            double d = 0.0;
            for (Eigen::Index x = 0; x < mix.size(); ++x) {
                double px = p(i, x);
                if (px > 0.0) d += px * (l_bits(i, x) - std::log2(mix(x)));
            }
            risk_bits(i) = d;
        }
        upper = risk_bits.maxCoeff() / n;
        lower = w.dot(risk_bits) / n;
        if (upper - lower <= 2.0 * tol) {
            converged = true;
            break;
        }
        // Prior reweighting: W_i <- W_i 2^{D_i}, normalized.
        Eigen::VectorXd lw = risk_bits;
        for (int i = 0; i < cn; ++i) lw(i) = w(i) > 0.0 ? std::log2(w(i)) + risk_bits(i) : kNegInf;
        double z = log2_sum_exp(std::span<const double>(lw.data(), static_cast<std::size_t>(lw.size())));
        for (int i = 0; i < cn; ++i) w(i) = lw(i) == kNegInf ? 0.0 : std::exp2(lw(i) - z);
    }

    CapacityResult res;
    res.n = n;
    res.prior = w;
    res.upper = upper;
    res.lower = lower;
    res.gap = (upper - lower) / 2.0;
    res.value_bits_per_symbol = (upper + lower) / 2.0;
    res.iterations = it;
    res.converged = converged;
    std::vector<FiniteMixture::Component> comps;
    for (int i = 0; i < cn; ++i)
        if (w(i) > 0.0) comps.push_back({w(i), c[static_cast<std::size_t>(i)]});
    res.bayes_mixture = std::make_shared<FiniteMixture>(alpha, std::move(comps));
    return res;
}

MinimaxGapReport minimax_gap(const std::vector<MeasurePtr>& c, int n, double tol, std::size_t joint_cap) {
    MinimaxGapReport rep;
    rep.details = capacity_iterate(c, n, tol, 200000, joint_cap);
    rep.upper = rep.details.upper;
    rep.lower = rep.details.lower;
    rep.gap = rep.upper - rep.lower;
    rep.caveat = "finite-horizon, finite-class evidence only; asymptotic upper/lower coincidence is open";
    return rep;
}

AdmissibilityReport admissibility_check(MeasurePtr rho, MeasurePtr mu, int n, std::size_t leaf_cap) {
    AdmissibilityReport rep;
    rep.n = n;

    std::vector<FiniteMixture::Component> comps;
    comps.push_back({0.5, rho});
    comps.push_back({0.5, mu});
    auto rho_prime = std::make_shared<FiniteMixture>(rho->alphabet(), std::move(comps));

    rep.dn_rho_bits = exact_dn(*mu, *rho, n, leaf_cap).dn_bits;
    rep.dn_rho_prime_bits = exact_dn(*mu, *rho_prime, n, leaf_cap).dn_bits;
    if (rep.dn_rho_prime_bits > 1.0 + 1e-9)
        throw ContractViolation("admissibility_check: d_n(mu, (rho+mu)/2) above one bit");
    rep.improvement_bits = rep.dn_rho_bits - rep.dn_rho_prime_bits;
    rep.dominated_at_n = rep.improvement_bits > 1.0;
    rep.rho_prime = rho_prime;
    return rep;
}

} // namespace seqpred
