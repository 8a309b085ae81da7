#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "truthbound/em.hpp"
#include "truthbound/synthesis.hpp"

namespace truthbound {

// Diagonal of the information matrix at the estimate; off-diagonal entries
// are identically zero in this model, so only the diagonal is stored.
struct ObservedInformation {
    std::vector<double> diagonal;  // I_uu per reviewer
    PriorParams prior;
};

struct BoundReport {
    std::vector<double> mse_lower;   // 1 / I_uu
    std::vector<double> rmse_lower;  // sqrt(1 / I_uu)
    double mean_rmse_lower = 0.0;
};

// Prior-curvature information: I_uu = (alpha-1)/theta^2 + (beta-1)/(1-theta)^2.
// Boundary theta is an error; no silent clamping here.
inline ObservedInformation observed_information(const std::vector<double>& theta_hat,
                                                const PriorParams& prior) {
    if (!(prior.alpha > 1.0) || !(prior.beta > 1.0))
        throw std::invalid_argument("observed_information requires alpha > 1 and beta > 1");
    ObservedInformation info;
    info.prior = prior;
    info.diagonal.reserve(theta_hat.size());
    for (double t : theta_hat) {
        if (!(t > 0.0) || !(t < 1.0))
            throw std::domain_error("observed_information: theta_hat must be in (0,1)");
        info.diagonal.push_back((prior.alpha - 1.0) / (t * t) +
                                (prior.beta - 1.0) / ((1.0 - t) * (1.0 - t)));
    }
    return info;
}

// Curvature of the expected complete-data log posterior at the estimate:
// the prior terms plus the posterior-weighted count terms. Grows with the
// number of reviews a reviewer received, so the implied bound shrinks as
// data accumulates.
inline ObservedInformation complete_data_information(const BipartiteGraph& g,
                                                     const ReviewSamples& r,
                                                     const LabelPosterior& mu,
                                                     const std::vector<double>& theta_hat,
                                                     const PriorParams& prior) {
    ObservedInformation info = observed_information(theta_hat, prior);
    if (theta_hat.size() != static_cast<std::size_t>(g.num_reviewers))
        throw std::invalid_argument("complete_data_information: theta size mismatch");
    for (const auto& c : r.counts) {
        const double t = theta_hat[c.reviewer];
        const double t2 = t * t, q2 = (1.0 - t) * (1.0 - t);
        const double mp = mu.plus[c.item], mm = mu.minus[c.item];
        info.diagonal[c.reviewer] += mp * (c.n_plus / t2 + c.n_minus / q2) +
                                     mm * (c.n_minus / t2 + c.n_plus / q2);
    }
    return info;
}

// Reliability value of maximum uncertainty, the minimizer of the
// prior-curvature information: setting the derivative of
// (alpha-1)/t^2 + (beta-1)/(1-t)^2 to zero gives
// ((1-t)/t)^3 = (beta-1)/(alpha-1), so t = 1 / (1 + ((beta-1)/(alpha-1))^{1/3}).
inline double theta_star(const PriorParams& prior) {
    if (!(prior.alpha > 1.0) || !(prior.beta > 1.0))
        throw std::invalid_argument("theta_star requires alpha > 1 and beta > 1");
    return 1.0 / (1.0 + std::cbrt((prior.beta - 1.0) / (prior.alpha - 1.0)));
}

inline BoundReport bcrlb_report(const ObservedInformation& info) {
    BoundReport report;
    report.mse_lower.reserve(info.diagonal.size());
    report.rmse_lower.reserve(info.diagonal.size());
    for (double d : info.diagonal) {
        if (!(d > 0.0))
            throw std::invalid_argument("bcrlb_report: information must be positive");
        report.mse_lower.push_back(1.0 / d);
        report.rmse_lower.push_back(std::sqrt(1.0 / d));
    }
    if (!report.rmse_lower.empty())
        report.mean_rmse_lower =
            std::accumulate(report.rmse_lower.begin(), report.rmse_lower.end(), 0.0) /
            report.rmse_lower.size();
    return report;
}

}  // namespace truthbound
