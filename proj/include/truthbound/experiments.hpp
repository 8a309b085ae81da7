#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "truthbound/bipartite_graph.hpp"
#include "truthbound/em.hpp"
#include "truthbound/fisher_bounds.hpp"
#include "truthbound/rng.hpp"
#include "truthbound/synthesis.hpp"

namespace truthbound {

struct ExperimentConfig {
    std::vector<GraphModel> models;
    int num_reviewers = 100;
    int num_items = 100;
    std::vector<long long> edge_counts;
    std::vector<long long> sample_counts;
    int repetitions = 20;
    PriorParams prior;
    EmConfig em;
    std::uint64_t base_seed = 1;

    void validate() const {
        if (models.empty() || edge_counts.empty() || sample_counts.empty())
            throw std::invalid_argument("experiment config: lists must be non-empty");
        if (repetitions < 1)
            throw std::invalid_argument("experiment config: repetitions must be >= 1");
        if (num_reviewers <= 0 || num_items <= 0)
            throw std::invalid_argument("experiment config: counts must be positive");
        for (long long e : edge_counts)
            if (e <= 0) throw std::invalid_argument("experiment config: edge counts must be positive");
        for (long long n : sample_counts)
            if (n <= 0) throw std::invalid_argument("experiment config: sample counts must be positive");
        em.validate();
    }
};

struct RunResult {
    GraphModel model = GraphModel::Random;
    long long num_edges = 0;
    long long n = 0;
    int repetition = 0;
    double accuracy = 0.0;
    double mean_rmse_bound = 0.0;
    double empirical_rmse = 0.0;
    int em_iterations = 0;
    bool converged = false;
};

struct AggregateRow {
    GraphModel model = GraphModel::Random;
    long long num_edges = 0;
    long long n = 0;
    double acc_mean = 0.0, acc_se = 0.0;
    double rmse_bound_mean = 0.0, rmse_bound_se = 0.0;
    double emp_rmse_mean = 0.0, emp_rmse_se = 0.0;
};

// Threshold at 1/2 on mu_i(+1); an exact tie classifies as +1 so unreviewed
// items get a deterministic label.
inline std::vector<int> classify_items(const LabelPosterior& mu) {
    std::vector<int> labels(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) labels[i] = mu.plus[i] >= 0.5 ? 1 : -1;
    return labels;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.empty() || predicted.size() != truth.size())
        throw std::invalid_argument("accuracy: label lists must be non-empty and equal length");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / predicted.size();
}

inline double empirical_rmse(const std::vector<double>& theta_hat, const GroundTruth& truth) {
    if (theta_hat.size() != truth.theta.size())
        throw std::invalid_argument("empirical_rmse: length mismatch");
    double ss = 0.0;
    for (std::size_t u = 0; u < theta_hat.size(); ++u) {
        const double d = theta_hat[u] - truth.theta[u];
        ss += d * d;
    }
    return std::sqrt(ss / theta_hat.size());
}

// Child seed for one grid cell: a splitmix64 hash chain over the base seed,
// model tag, edge count, sample count, and repetition index.
inline std::uint64_t child_seed(std::uint64_t base_seed, GraphModel model, long long num_edges,
                                long long n, int repetition) {
    std::uint64_t s = mix_seed(base_seed, static_cast<std::uint64_t>(model) + 1);
    s = mix_seed(s, static_cast<std::uint64_t>(num_edges));
    s = mix_seed(s, static_cast<std::uint64_t>(n));
    s = mix_seed(s, static_cast<std::uint64_t>(repetition));
    return s;
}

// One full grid sweep, model-major, then edges, then n, then repetition.
// Every cell regenerates graph, ground truth, and reviews from its own
// derived seeds, runs EM, and scores the estimate.
inline std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<RunResult> results;
    results.reserve(cfg.models.size() * cfg.edge_counts.size() * cfg.sample_counts.size() *
                    cfg.repetitions);
    for (GraphModel model : cfg.models) {
        for (long long edges : cfg.edge_counts) {
            for (long long n : cfg.sample_counts) {
                for (int rep = 0; rep < cfg.repetitions; ++rep) {
                    try {
                        std::uint64_t cs = child_seed(cfg.base_seed, model, edges, n, rep);
                        const auto g = generate_graph(model, cfg.num_reviewers, cfg.num_items,
                                                      edges, mix_seed(cs, 1));
                        const auto truth = sample_ground_truth(g, cfg.prior, mix_seed(cs, 2));
                        const auto reviews = generate_reviews(g, truth, n, mix_seed(cs, 3));
                        const auto est = run_em(g, reviews, cfg.em);
                        const auto info = complete_data_information(g, reviews, est.posterior,
                                                                    est.theta_hat, cfg.prior);
                        RunResult res;
                        res.model = model;
                        res.num_edges = edges;
                        res.n = n;
                        res.repetition = rep;
                        res.accuracy = accuracy(classify_items(est.posterior), truth.labels);
                        res.mean_rmse_bound = bcrlb_report(info).mean_rmse_lower;
                        res.empirical_rmse = empirical_rmse(est.theta_hat, truth);
                        res.em_iterations = est.iterations;
                        res.converged = est.converged;
                        results.push_back(res);
                    } catch (const std::exception& e) {
                        throw std::runtime_error("experiment cell (model=" + to_string(model) +
                                                 ", edges=" + std::to_string(edges) +
                                                 ", n=" + std::to_string(n) +
                                                 ", rep=" + std::to_string(rep) +
                                                 ") failed: " + e.what());
                    }
                }
            }
        }
    }
    return results;
}

// One row per (model, edges, n): mean and standard error over repetitions.
inline std::vector<AggregateRow> aggregate(const std::vector<RunResult>& results) {
    std::map<std::tuple<int, long long, long long>, std::vector<const RunResult*>> cells;
    for (const auto& r : results)
        cells[{static_cast<int>(r.model), r.num_edges, r.n}].push_back(&r);
    if (cells.empty()) return {};
    const std::size_t reps = cells.begin()->second.size();
    std::vector<AggregateRow> rows;
    for (const auto& [key, runs] : cells) {
        if (runs.size() != reps)
            throw std::invalid_argument("aggregate: incomplete grid at (model=" +
                                        to_string(static_cast<GraphModel>(std::get<0>(key))) +
                                        ", edges=" + std::to_string(std::get<1>(key)) +
                                        ", n=" + std::to_string(std::get<2>(key)) + ")");
        auto mean_se = [&](auto getter) {
            double mean = 0.0;
            for (const auto* r : runs) mean += getter(*r);
            mean /= runs.size();
            double var = 0.0;
            for (const auto* r : runs) {
                const double d = getter(*r) - mean;
                var += d * d;
            }
            const double se = runs.size() > 1
                                  ? std::sqrt(var / (runs.size() - 1)) / std::sqrt(double(runs.size()))
                                  : 0.0;
            return std::pair<double, double>(mean, se);
        };
        AggregateRow row;
        row.model = static_cast<GraphModel>(std::get<0>(key));
        row.num_edges = std::get<1>(key);
        row.n = std::get<2>(key);
        std::tie(row.acc_mean, row.acc_se) = mean_se([](const RunResult& r) { return r.accuracy; });
        std::tie(row.rmse_bound_mean, row.rmse_bound_se) =
            mean_se([](const RunResult& r) { return r.mean_rmse_bound; });
        std::tie(row.emp_rmse_mean, row.emp_rmse_se) =
            mean_se([](const RunResult& r) { return r.empirical_rmse; });
        rows.push_back(row);
    }
    return rows;
}

namespace detail {

inline std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline void write_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "model,edges,n,acc_mean,acc_se,rmse_bound_mean,rmse_bound_se,"
           "emp_rmse_mean,emp_rmse_se\n";
    for (const auto& r : rows) {
        out << to_string(r.model) << "," << r.num_edges << "," << r.n << ","
            << detail::fmt_g(r.acc_mean) << "," << detail::fmt_g(r.acc_se) << ","
            << detail::fmt_g(r.rmse_bound_mean) << "," << detail::fmt_g(r.rmse_bound_se) << ","
            << detail::fmt_g(r.emp_rmse_mean) << "," << detail::fmt_g(r.emp_rmse_se) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_details_csv(const std::vector<RunResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "model,edges,n,rep,accuracy,mean_rmse_bound,empirical_rmse,iterations,converged\n";
    for (const auto& r : results) {
        out << to_string(r.model) << "," << r.num_edges << "," << r.n << "," << r.repetition
            << "," << detail::fmt_g(r.accuracy) << "," << detail::fmt_g(r.mean_rmse_bound) << ","
            << detail::fmt_g(r.empirical_rmse) << "," << r.em_iterations << ","
            << (r.converged ? 1 : 0) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Plain-text key=value config, lists comma-separated. Unknown keys are errors.
inline ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    ExperimentConfig cfg;
    cfg.models = {GraphModel::Random};
    cfg.edge_counts = {600};
    cfg.sample_counts = {500, 1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500, 5000};

    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value: " + line);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        try {
            if (key == "models") {
                cfg.models.clear();
                for (const auto& m : split(val)) cfg.models.push_back(parse_graph_model(m));
            } else if (key == "reviewers") {
                cfg.num_reviewers = std::stoi(val);
            } else if (key == "items") {
                cfg.num_items = std::stoi(val);
            } else if (key == "edges") {
                cfg.edge_counts.clear();
                for (const auto& e : split(val)) cfg.edge_counts.push_back(std::stoll(e));
            } else if (key == "samples") {
                cfg.sample_counts.clear();
                for (const auto& n : split(val)) cfg.sample_counts.push_back(std::stoll(n));
            } else if (key == "reps") {
                cfg.repetitions = std::stoi(val);
            } else if (key == "alpha") {
                cfg.prior.alpha = std::stod(val);
            } else if (key == "beta") {
                cfg.prior.beta = std::stod(val);
            } else if (key == "label_prior_plus") {
                cfg.em.label_prior_plus = std::stod(val);
            } else if (key == "tol") {
                cfg.em.tolerance = std::stod(val);
            } else if (key == "max_iters") {
                cfg.em.max_iterations = std::stoi(val);
            } else if (key == "seed") {
                cfg.base_seed = std::stoull(val);
            } else {
                throw std::runtime_error("unknown key: " + key);
            }
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": bad value for " + key + ": " + val);
        }
    }
    cfg.em.prior = cfg.prior;
    return cfg;
}

// Desk preset runs in minutes; paper preset mirrors the published setup.
inline ExperimentConfig experiment_preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.models = {GraphModel::Random, GraphModel::ItemPA, GraphModel::ReviewerItemPA};
    cfg.sample_counts = {500, 1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500, 5000};
    if (name == "desk") {
        cfg.num_reviewers = 100;
        cfg.num_items = 100;
        cfg.edge_counts = {200, 400, 600, 800, 1000};
        cfg.repetitions = 20;
    } else if (name == "paper") {
        cfg.num_reviewers = 500;
        cfg.num_items = 500;
        cfg.edge_counts = {1000, 2000, 3000, 4000, 5000};
        cfg.repetitions = 100;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    cfg.em.prior = cfg.prior;
    return cfg;
}

}  // namespace truthbound
