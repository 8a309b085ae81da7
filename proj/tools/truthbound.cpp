#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "truthbound/bipartite_graph.hpp"
#include "truthbound/em.hpp"
#include "truthbound/experiments.hpp"
#include "truthbound/fisher_bounds.hpp"
#include "truthbound/synthesis.hpp"

namespace {

using namespace truthbound;

void write_estimate(const EmEstimate& est, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "reviewers " << est.theta_hat.size() << " items " << est.posterior.size()
        << " iterations " << est.iterations << " converged " << (est.converged ? 1 : 0) << "\n";
    for (std::size_t u = 0; u < est.theta_hat.size(); ++u)
        out << "theta " << u << " " << est.theta_hat[u] << "\n";
    for (std::size_t i = 0; i < est.posterior.size(); ++i)
        out << "mu " << i << " " << est.posterior.plus[i] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_estimate_theta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<double> theta;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("theta ", 0) != 0) continue;
        std::istringstream ls(line);
        std::string kw;
        std::size_t idx;
        double v;
        if (!(ls >> kw >> idx >> v))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed theta line: " + line);
        if (theta.size() <= idx) theta.resize(idx + 1);
        theta[idx] = v;
    }
    if (theta.empty()) throw std::runtime_error(path + ": no theta lines found");
    return theta;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reviewer reliability inference and estimation-error bounds on "
                 "constrained review topologies"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a reviewer-item bipartite graph");
    std::string model_name = "rnd", out_path;
    int reviewers = 500, items = 500;
    long long edge_count = 3000;
    std::uint64_t seed = 1;
    gen->add_option("--model", model_name, "Graph model: rnd, ipa, or ripa");
    gen->add_option("--reviewers", reviewers, "Number of reviewers")->required();
    gen->add_option("--items", items, "Number of items")->required();
    gen->add_option("--edges", edge_count, "Number of distinct edges")->required();
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", out_path, "Output graph path")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample ground truth and review events");
    std::string graph_path, truth_path, reviews_path;
    double alpha = 4.0, beta = 2.0;
    long long samples = 5000;
    sim->add_option("--graph", graph_path, "Input graph path")->required();
    sim->add_option("--alpha", alpha, "Beta prior alpha (> 1)");
    sim->add_option("--beta", beta, "Beta prior beta (> 1, < alpha)");
    sim->add_option("--samples", samples, "Number of review events")->required();
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--out-truth", truth_path, "Output ground-truth path")->required();
    sim->add_option("--out-reviews", reviews_path, "Output review-samples path")->required();

    // infer
    auto* inf = app.add_subcommand("infer", "Estimate reviewer reliabilities and item labels");
    double tol = 1e-8;
    int max_iters = 500;
    inf->add_option("--graph", graph_path, "Input graph path")->required();
    inf->add_option("--reviews", reviews_path, "Input review-samples path")->required();
    inf->add_option("--alpha", alpha, "Beta prior alpha (> 1)");
    inf->add_option("--beta", beta, "Beta prior beta (> 1, < alpha)");
    inf->add_option("--tol", tol, "Convergence tolerance on max-abs theta change");
    inf->add_option("--max-iters", max_iters, "Iteration cap");
    inf->add_option("--out", out_path, "Output estimate path")->required();

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Estimation-error lower bounds from an estimate");
    std::string estimate_path;
    bnd->add_option("--estimate", estimate_path, "Estimate file from `infer`")->required();
    bnd->add_option("--alpha", alpha, "Beta prior alpha (> 1)");
    bnd->add_option("--beta", beta, "Beta prior beta (> 1, < alpha)");
    bnd->add_option("--out", out_path, "Output CSV path")->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a full simulation grid");
    std::string config_path, preset, details_path;
    exp->add_option("--config", config_path, "key=value experiment config file");
    exp->add_option("--preset", preset, "Built-in config: desk or paper");
    exp->add_option("--out", out_path, "Output aggregate CSV path")->required();
    exp->add_option("--details", details_path, "Optional per-run detail CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        using namespace truthbound;
        if (gen->parsed()) {
            const auto g = generate_graph(parse_graph_model(model_name), reviewers, items,
                                          edge_count, seed);
            save_graph(g, out_path);
            std::cout << "wrote " << out_path << " (" << g.edges.size() << " edges)\n";
        } else if (sim->parsed()) {
            const auto g = load_graph(graph_path);
            PriorParams prior{alpha, beta};
            const auto truth = sample_ground_truth(g, prior, seed);
            const auto reviews = generate_reviews(g, truth, samples, mix_seed(seed, 1));
            save_ground_truth(truth, truth_path);
            save_samples(reviews, reviews_path);
            std::cout << "wrote " << truth_path << " and " << reviews_path << " ("
                      << reviews.total << " samples)\n";
        } else if (inf->parsed()) {
            const auto g = load_graph(graph_path);
            const auto reviews = load_samples(reviews_path);
            EmConfig cfg;
            cfg.prior = {alpha, beta};
            cfg.tolerance = tol;
            cfg.max_iterations = max_iters;
            const auto est = run_em(g, reviews, cfg);
            write_estimate(est, out_path);
            std::cout << "wrote " << out_path << " (" << est.iterations << " iterations, "
                      << (est.converged ? "converged" : "not converged") << ")\n";
        } else if (bnd->parsed()) {
            const auto theta = read_estimate_theta(estimate_path);
            const auto info = observed_information(theta, PriorParams{alpha, beta});
            const auto report = bcrlb_report(info);
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
            out << "reviewer,information,mse_lower,rmse_lower\n";
            for (std::size_t u = 0; u < theta.size(); ++u)
                out << u << "," << detail::fmt_g(info.diagonal[u]) << ","
                    << detail::fmt_g(report.mse_lower[u]) << ","
                    << detail::fmt_g(report.rmse_lower[u]) << "\n";
            out << "mean,,," << detail::fmt_g(report.mean_rmse_lower) << "\n";
            if (!out) throw std::runtime_error("write failed: " + out_path);
            std::cout << "wrote " << out_path << " (mean RMSE lower bound "
                      << report.mean_rmse_lower << ")\n";
        } else if (exp->parsed()) {
            if (config_path.empty() == preset.empty())
                throw std::invalid_argument("experiment: give exactly one of --config, --preset");
            const auto cfg = config_path.empty() ? experiment_preset(preset)
                                                 : parse_experiment_config(config_path);
            const auto results = run_experiment(cfg);
            write_csv(aggregate(results), out_path);
            if (!details_path.empty()) write_details_csv(results, details_path);
            std::cout << "wrote " << out_path << " (" << results.size() << " runs)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
