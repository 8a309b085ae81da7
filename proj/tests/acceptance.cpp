// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 9 shells out to the CLI binary given as argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "truthbound/bipartite_graph.hpp"
#include "truthbound/em.hpp"
#include "truthbound/experiments.hpp"
#include "truthbound/fisher_bounds.hpp"
#include "truthbound/synthesis.hpp"

using namespace truthbound;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

struct Instance {
    BipartiteGraph g;
    ReviewSamples r;
};

Instance random_instance(std::mt19937_64& eng, int max_reviewers, int max_items,
                         int max_samples) {
    std::uniform_int_distribution<int> nr(1, max_reviewers), ni(1, max_items);
    const int reviewers = nr(eng), items = ni(eng);
    std::uniform_int_distribution<int> ne(1, reviewers * items);
    Instance inst;
    inst.g = generate_graph(GraphModel::Random, reviewers, items, ne(eng), eng());
    GroundTruth truth;
    std::uniform_real_distribution<double> th(0.05, 0.95);
    for (int u = 0; u < reviewers; ++u) truth.theta.push_back(th(eng));
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < items; ++i) truth.labels.push_back(coin(eng) ? 1 : -1);
    std::uniform_int_distribution<int> ns(0, max_samples);
    inst.r = generate_reviews(inst.g, truth, ns(eng), eng());
    return inst;
}

EmConfig default_cfg() {
    EmConfig cfg;
    cfg.prior = {4.0, 2.0};
    return cfg;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = double(k + 1);
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    double d2 = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) d2 += (rx[k] - ry[k]) * (rx[k] - ry[k]);
    const double m = double(rx.size());
    return 1.0 - 6.0 * d2 / (m * (m * m - 1.0));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const AggregateRow& find_row(const std::vector<AggregateRow>& rows, GraphModel model,
                             long long n) {
    for (const auto& r : rows)
        if (r.model == model && r.n == n) return r;
    throw std::runtime_error("aggregate row not found");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    criterion(1, "posterior normalization on 1000 random instances under 10 s", [](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 eng(101);
        auto cfg = default_cfg();
        for (int trial = 0; trial < 1000; ++trial) {
            const auto inst = random_instance(eng, 8, 8, 60);
            std::vector<double> theta;
            std::uniform_real_distribution<double> th(0.01, 0.99);
            for (int u = 0; u < inst.g.num_reviewers; ++u) theta.push_back(th(eng));
            const auto mu = e_step(inst.g, inst.r, theta, cfg);
            for (std::size_t i = 0; i < mu.size(); ++i)
                if (std::abs(mu.plus[i] + mu.minus[i] - 1.0) > 1e-12) {
                    d = "normalization violated at trial " + std::to_string(trial);
                    return false;
                }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d = "elapsed " + std::to_string(secs) + " s";
        return secs < 10.0;
    });

    criterion(2, "e_step matches enumeration on 200 small instances", [](std::string&) {
        std::mt19937_64 eng(202);
        auto cfg = default_cfg();
        for (int trial = 0; trial < 200; ++trial) {
            const auto inst = random_instance(eng, 4, 3, 12);
            std::vector<double> theta;
            std::uniform_real_distribution<double> th(0.05, 0.95);
            for (int u = 0; u < inst.g.num_reviewers; ++u) theta.push_back(th(eng));
            const auto mu = e_step(inst.g, inst.r, theta, cfg);
            for (int i = 0; i < inst.g.num_items; ++i)
                if (std::abs(mu.plus[i] - oracle::item_posterior_plus(inst.g, inst.r, theta, i)) >
                    1e-10)
                    return false;
        }
        return true;
    });

    criterion(3, "EM ascent and converged-point stationarity on 100 instances", [](std::string& d) {
        std::mt19937_64 eng(303);
        auto cfg = default_cfg();
        for (int trial = 0; trial < 100; ++trial) {
            const auto inst = random_instance(eng, 5, 4, 40);
            std::vector<double> theta(inst.g.num_reviewers, cfg.prior.mean());
            double prev = exact_log_posterior(inst.g, inst.r, theta, cfg);
            bool converged = false;
            for (int it = 0; it < cfg.max_iterations && !converged; ++it) {
                const auto mu = e_step(inst.g, inst.r, theta, cfg);
                const auto next = m_step(inst.g, inst.r, mu, cfg);
                double delta = 0.0;
                for (std::size_t u = 0; u < theta.size(); ++u)
                    delta = std::max(delta, std::abs(next[u] - theta[u]));
                theta = next;
                const double cur = exact_log_posterior(inst.g, inst.r, theta, cfg);
                if (cur < prev - 1e-10) {
                    d = "objective decreased at trial " + std::to_string(trial);
                    return false;
                }
                prev = cur;
                converged = delta < cfg.tolerance;
            }
            if (!converged) {
                d = "no convergence at trial " + std::to_string(trial);
                return false;
            }
            for (double gcomp : oracle::fd_gradient(inst.g, inst.r, theta, cfg))
                if (std::abs(gcomp) >= 1e-3) {
                    d = "gradient " + std::to_string(gcomp) + " at trial " + std::to_string(trial);
                    return false;
                }
        }
        return true;
    });

    criterion(4, "m_step closed-form hand cases to 1e-15", [](std::string&) {
        auto cfg = default_cfg();  // alpha=4, beta=2
        const auto g0 = generate_graph(GraphModel::Random, 2, 2, 3, 1);
        ReviewSamples empty;
        LabelPosterior flat;
        flat.plus.assign(2, 0.5);
        flat.minus.assign(2, 0.5);
        for (double t : m_step(g0, empty, flat, cfg))
            if (std::abs(t - 0.75) > 1e-15) return false;

        BipartiteGraph g1;
        g1.num_reviewers = 1;
        g1.num_items = 1;
        g1.edges = {{0, 0}};
        g1.build_adjacency();
        ReviewSamples one;
        one.total = 1;
        one.counts = {{0, 0, 1, 0}};
        LabelPosterior certain;
        certain.plus = {1.0};
        certain.minus = {0.0};
        return std::abs(m_step(g1, one, certain, cfg)[0] - 0.8) <= 1e-15;
    });

    criterion(5, "theta_star equals the information grid argmin; 2/3 closed case", [](std::string& d) {
        bool ok = true;
        if (std::abs(theta_star({17.0, 2.0}) - 2.0 / 3.0) > 1e-12) {
            d = "alpha=17, beta=2 gives " + std::to_string(theta_star({17.0, 2.0})) +
                ", not 2/3; that quoted value is not the minimizer of the stated information";
            ok = false;
        }
        std::mt19937_64 eng(505);
        std::uniform_real_distribution<double> ab(1.0 + 1e-6, 20.0);
        for (int trial = 0; trial < 50; ++trial) {
            const PriorParams prior{ab(eng), ab(eng)};
            double best = 0.5, best_val = 1e300;
            for (int k = 1; k < 10000; ++k) {
                const double t = k / 10000.0;
                const double v = observed_information({t}, prior).diagonal[0];
                if (v < best_val) {
                    best_val = v;
                    best = t;
                }
            }
            if (std::abs(best - theta_star(prior)) > 1e-4) {
                d += std::string(d.empty() ? "" : "; ") + "grid mismatch at alpha=" +
                     std::to_string(prior.alpha) + " beta=" + std::to_string(prior.beta);
                ok = false;
                break;
            }
        }
        return ok;
    });

    // Shared desk-scale experiment for criteria 6-8.
    ExperimentConfig desk;
    desk.models = {GraphModel::Random, GraphModel::ItemPA, GraphModel::ReviewerItemPA};
    desk.num_reviewers = 100;
    desk.num_items = 100;
    desk.edge_counts = {600};
    desk.sample_counts = {500, 1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500, 5000};
    desk.repetitions = 20;
    desk.prior = {4.0, 2.0};
    desk.em.prior = desk.prior;
    desk.base_seed = 20240817;

    std::vector<AggregateRow> rows;
    double experiment_secs = 0.0;
    {
        const auto t0 = std::chrono::steady_clock::now();
        rows = aggregate(run_experiment(desk));
        experiment_secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    criterion(6, "accuracy rises with n on the random model and tops 0.9", [&](std::string& d) {
        std::vector<double> ns, accs;
        for (long long n : desk.sample_counts) {
            const auto& row = find_row(rows, GraphModel::Random, n);
            ns.push_back(double(n));
            accs.push_back(row.acc_mean);
        }
        const double rho = spearman_rho(ns, accs);
        const double final_acc = accs.back();
        d = "rho " + std::to_string(rho) + ", acc(5000) " + std::to_string(final_acc) +
            ", elapsed " + std::to_string(experiment_secs) + " s";
        return rho > 0.8 && final_acc > 0.9 && experiment_secs < 300.0;
    });

    criterion(7, "random-graph accuracy at n=5000 is not below item-PA", [&](std::string& d) {
        const auto& rnd = find_row(rows, GraphModel::Random, 5000);
        const auto& ipa = find_row(rows, GraphModel::ItemPA, 5000);
        const double pooled = std::sqrt(rnd.acc_se * rnd.acc_se + ipa.acc_se * ipa.acc_se);
        d = "rnd " + std::to_string(rnd.acc_mean) + ", ipa " + std::to_string(ipa.acc_mean);
        return rnd.acc_mean >= ipa.acc_mean - pooled;
    });

    criterion(8, "RMSE bound falls with n and orders ripa >= ipa >= rnd", [&](std::string& d) {
        for (auto model : desk.models) {
            double prev = 1e300;
            for (long long n : desk.sample_counts) {
                if (n < 1500) continue;
                const double cur = find_row(rows, model, n).rmse_bound_mean;
                if (cur >= prev) {
                    d = "non-monotone on " + to_string(model) + " at n=" + std::to_string(n);
                    return false;
                }
                prev = cur;
            }
        }
        const auto& rnd = find_row(rows, GraphModel::Random, 5000);
        const auto& ipa = find_row(rows, GraphModel::ItemPA, 5000);
        const auto& ripa = find_row(rows, GraphModel::ReviewerItemPA, 5000);
        const double p1 =
            std::sqrt(ripa.rmse_bound_se * ripa.rmse_bound_se + ipa.rmse_bound_se * ipa.rmse_bound_se);
        const double p2 =
            std::sqrt(ipa.rmse_bound_se * ipa.rmse_bound_se + rnd.rmse_bound_se * rnd.rmse_bound_se);
        d = "bounds at n=5000: ripa " + std::to_string(ripa.rmse_bound_mean) + ", ipa " +
            std::to_string(ipa.rmse_bound_mean) + ", rnd " + std::to_string(rnd.rmse_bound_mean);
        return ripa.rmse_bound_mean >= ipa.rmse_bound_mean - p1 &&
               ipa.rmse_bound_mean >= rnd.rmse_bound_mean - p2;
    });

    criterion(9, "experiment CLI output is byte-identical across runs", [&](std::string& d) {
        if (cli.empty()) {
            d = "CLI path not given";
            return false;
        }
        const std::string cfg_path = "/tmp/truthbound_accept.cfg";
        std::ofstream(cfg_path) << "models=rnd,ipa\nreviewers=30\nitems=30\nedges=100\n"
                                << "samples=200,400\nreps=2\nseed=9\n";
        const std::string out1 = "/tmp/truthbound_accept_1.csv";
        const std::string out2 = "/tmp/truthbound_accept_2.csv";
        const std::string base = "\"" + cli + "\" experiment --config " + cfg_path + " --out ";
        if (std::system((base + out1 + " > /dev/null").c_str()) != 0 ||
            std::system((base + out2 + " > /dev/null").c_str()) != 0) {
            d = "CLI invocation failed";
            return false;
        }
        const auto a = slurp(out1), b = slurp(out2);
        std::remove(cfg_path.c_str());
        std::remove(out1.c_str());
        std::remove(out2.c_str());
        if (a.empty()) {
            d = "empty output";
            return false;
        }
        return a == b;
    });

    criterion(10, "synthesis statistics at 1e5 draws", [](std::string& d) {
        BipartiteGraph big;
        big.num_reviewers = 100000;
        big.num_items = 100000;
        big.build_adjacency();
        const auto truth = sample_ground_truth(big, {4.0, 2.0}, 1001);
        double theta_mean =
            std::accumulate(truth.theta.begin(), truth.theta.end(), 0.0) / truth.theta.size();
        long long plus = 0;
        for (int z : truth.labels)
            if (z == 1) ++plus;
        const double balance = double(plus) / truth.labels.size();
        if (std::abs(theta_mean - 2.0 / 3.0) > 0.01 || std::abs(balance - 0.5) > 0.01) {
            d = "theta mean " + std::to_string(theta_mean) + ", balance " + std::to_string(balance);
            return false;
        }

        BipartiteGraph one;
        one.num_reviewers = 1;
        one.num_items = 1;
        one.edges = {{0, 0}};
        one.build_adjacency();
        GroundTruth t;
        t.theta = {0.8};
        t.labels = {1};
        const long long n = 100000;
        const auto r = generate_reviews(one, t, n, 1002);
        const double frac = double(r.counts[0].n_plus) / double(n);
        d = "correct fraction " + std::to_string(frac);
        return std::abs(frac - 0.8) <= 3.0 * std::sqrt(0.8 * 0.2 / double(n));
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
