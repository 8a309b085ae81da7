#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "truthbound/bipartite_graph.hpp"
#include "truthbound/synthesis.hpp"

namespace truthbound {

// Per-item posterior over the binary label, normalized per item.
struct LabelPosterior {
    std::vector<double> plus;   // mu_i(+1)
    std::vector<double> minus;  // mu_i(-1)

    std::size_t size() const { return plus.size(); }
};

struct EmConfig {
    PriorParams prior;
    double label_prior_plus = 0.5;
    double tolerance = 1e-8;
    int max_iterations = 500;

    void validate() const {
        prior.validate();
        if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
        if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
        if (!(label_prior_plus > 0.0) || !(label_prior_plus < 1.0))
            throw std::invalid_argument("label_prior_plus must be in (0,1)");
    }
};

struct EmEstimate {
    std::vector<double> theta_hat;
    LabelPosterior posterior;
    int iterations = 0;
    bool converged = false;
    std::vector<double> delta_trace;  // max-abs theta change per iteration
};

namespace detail {

inline void check_theta_interior(const std::vector<double>& theta) {
    for (double t : theta)
        if (!(t > 0.0) || !(t < 1.0))
            throw std::domain_error("theta must be strictly inside (0,1)");
}

}  // namespace detail

// Label posterior given current reliabilities: per item,
// mu_i(x) proportional to P(z_i=x) * prod_u theta_u^{n_ui^x} (1-theta_u)^{n_ui^{-x}},
// accumulated in log domain and normalized with max subtraction. Items with
// no reviews get the label prior.
inline LabelPosterior e_step(const BipartiteGraph& g, const ReviewSamples& r,
                             const std::vector<double>& theta, const EmConfig& cfg) {
    detail::check_theta_interior(theta);
    const double lp0 = std::log(cfg.label_prior_plus);
    const double lm0 = std::log(1.0 - cfg.label_prior_plus);
    std::vector<double> lp(g.num_items, lp0), lm(g.num_items, lm0);
    for (const auto& c : r.counts) {
        const double lt = std::log(theta[c.reviewer]);
        const double lf = std::log1p(-theta[c.reviewer]);
        lp[c.item] += c.n_plus * lt + c.n_minus * lf;
        lm[c.item] += c.n_minus * lt + c.n_plus * lf;
    }
    LabelPosterior mu;
    mu.plus.resize(g.num_items);
    mu.minus.resize(g.num_items);
    for (int i = 0; i < g.num_items; ++i) {
        const double m = std::max(lp[i], lm[i]);
        const double ep = std::exp(lp[i] - m), em = std::exp(lm[i] - m);
        mu.plus[i] = ep / (ep + em);
        mu.minus[i] = em / (ep + em);
    }
    return mu;
}

// Closed-form reliability update:
// theta_u = (sum_i sum_x n_ui^x mu_i(x) + alpha - 1) / (|R_u.| + alpha + beta - 2).
inline std::vector<double> m_step(const BipartiteGraph& g, const ReviewSamples& r,
                                  const LabelPosterior& mu, const EmConfig& cfg) {
    const double a = cfg.prior.alpha, b = cfg.prior.beta;
    std::vector<double> num(g.num_reviewers, a - 1.0);
    std::vector<double> den(g.num_reviewers, a + b - 2.0);
    for (const auto& c : r.counts) {
        num[c.reviewer] += c.n_plus * mu.plus[c.item] + c.n_minus * mu.minus[c.item];
        den[c.reviewer] += c.n_plus + c.n_minus;
    }
    std::vector<double> theta(g.num_reviewers);
    for (int u = 0; u < g.num_reviewers; ++u) theta[u] = num[u] / den[u];
    return theta;
}

// Log posterior of theta up to an additive constant; items decouple given
// theta, so the latent-label sum is a per-item two-term logsumexp.
inline double exact_log_posterior(const BipartiteGraph& g, const ReviewSamples& r,
                                  const std::vector<double>& theta, const EmConfig& cfg) {
    detail::check_theta_interior(theta);
    const double a = cfg.prior.alpha, b = cfg.prior.beta;
    double value = 0.0;
    for (double t : theta) value += (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t);
    std::vector<double> lp(g.num_items, std::log(cfg.label_prior_plus));
    std::vector<double> lm(g.num_items, std::log(1.0 - cfg.label_prior_plus));
    for (const auto& c : r.counts) {
        const double lt = std::log(theta[c.reviewer]);
        const double lf = std::log1p(-theta[c.reviewer]);
        lp[c.item] += c.n_plus * lt + c.n_minus * lf;
        lm[c.item] += c.n_minus * lt + c.n_plus * lf;
    }
    for (int i = 0; i < g.num_items; ++i) {
        const double m = std::max(lp[i], lm[i]);
        value += m + std::log(std::exp(lp[i] - m) + std::exp(lm[i] - m));
    }
    return value;
}

// Alternates E and M steps from the prior mean until the max-abs theta change
// drops below tolerance or the iteration cap is hit. The returned posterior is
// recomputed at the final theta.
inline EmEstimate run_em(const BipartiteGraph& g, const ReviewSamples& r, const EmConfig& cfg) {
    cfg.validate();
    EmEstimate est;
    est.theta_hat.assign(g.num_reviewers, cfg.prior.mean());
    for (int it = 0; it < cfg.max_iterations; ++it) {
        LabelPosterior mu = e_step(g, r, est.theta_hat, cfg);
        std::vector<double> next = m_step(g, r, mu, cfg);
        double delta = 0.0;
        for (int u = 0; u < g.num_reviewers; ++u)
            delta = std::max(delta, std::abs(next[u] - est.theta_hat[u]));
        est.theta_hat = std::move(next);
        est.delta_trace.push_back(delta);
        est.iterations = it + 1;
        if (delta < cfg.tolerance) {
            est.converged = true;
            break;
        }
    }
    est.posterior = e_step(g, r, est.theta_hat, cfg);
    return est;
}

}  // namespace truthbound
