#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "truthbound/bipartite_graph.hpp"
#include "truthbound/rng.hpp"

namespace truthbound {

// Beta(alpha, beta) prior on reviewer reliability. alpha > beta encodes the
// majority-reliable assumption; alpha, beta > 1 keeps the information matrix
// positive and the reliability update strictly interior.
struct PriorParams {
    double alpha = 4.0;
    double beta = 2.0;

    void validate() const {
        if (!(alpha > 1.0) || !(beta > 1.0))
            throw std::invalid_argument("prior requires alpha > 1 and beta > 1");
        if (!(alpha > beta))
            throw std::invalid_argument("prior requires alpha > beta");
    }
    double mean() const { return alpha / (alpha + beta); }
    double mode() const { return (alpha - 1.0) / (alpha + beta - 2.0); }
};

struct GroundTruth {
    std::vector<double> theta;  // per-reviewer correctness probability
    std::vector<int> labels;    // per-item true label, +1 or -1
};

struct ReviewCount {
    int reviewer = 0;
    int item = 0;
    long long n_plus = 0;   // +1 reviews by this reviewer of this item
    long long n_minus = 0;  // -1 reviews

    friend bool operator==(const ReviewCount&, const ReviewCount&) = default;
};

// Aggregated review events, sparse over edges, sorted by (reviewer, item).
struct ReviewSamples {
    long long total = 0;
    std::vector<ReviewCount> counts;

    friend bool operator==(const ReviewSamples&, const ReviewSamples&) = default;
};

inline GroundTruth sample_ground_truth(const BipartiteGraph& g, const PriorParams& prior,
                                       std::uint64_t seed) {
    prior.validate();
    auto eng = make_engine(seed);
    GroundTruth truth;
    truth.theta.resize(g.num_reviewers);
    // Beta via the two-Gamma construction.
    std::gamma_distribution<double> ga(prior.alpha, 1.0), gb(prior.beta, 1.0);
    for (auto& t : truth.theta) {
        double x = ga(eng), y = gb(eng);
        t = x / (x + y);
    }
    truth.labels.resize(g.num_items);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& z : truth.labels) z = uni(eng) < 0.5 ? 1 : -1;
    return truth;
}

// Draws n review events: an edge uniformly at random with replacement, then a
// review that matches the item's true label with probability theta_u.
inline ReviewSamples generate_reviews(const BipartiteGraph& g, const GroundTruth& truth,
                                      long long n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("generate_reviews: n must be nonnegative");
    if (n > 0 && g.edges.empty())
        throw std::invalid_argument("generate_reviews: graph has no edges");
    if (truth.theta.size() != static_cast<std::size_t>(g.num_reviewers) ||
        truth.labels.size() != static_cast<std::size_t>(g.num_items))
        throw std::invalid_argument("generate_reviews: truth sizes do not match graph");

    auto eng = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pick_edge(0, g.edges.empty() ? 0 : g.edges.size() - 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // per-edge (n_plus, n_minus), indexed like g.edges
    std::vector<std::pair<long long, long long>> acc(g.edges.size(), {0, 0});
    for (long long k = 0; k < n; ++k) {
        std::size_t e = pick_edge(eng);
        const auto& [u, i] = g.edges[e];
        int r = uni(eng) <= truth.theta[u] ? truth.labels[i] : -truth.labels[i];
        if (r == 1)
            ++acc[e].first;
        else
            ++acc[e].second;
    }

    ReviewSamples samples;
    samples.total = n;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (acc[e].first == 0 && acc[e].second == 0) continue;
        samples.counts.push_back(
            {g.edges[e].first, g.edges[e].second, acc[e].first, acc[e].second});
    }
    return samples;
}

inline void save_samples(const ReviewSamples& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "n " << r.total << "\n";
    for (const auto& c : r.counts)
        out << c.reviewer << " " << c.item << " " << c.n_plus << " " << c.n_minus << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline ReviewSamples load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: missing header");
    ReviewSamples r;
    {
        std::istringstream hs(line);
        std::string kw;
        if (!(hs >> kw >> r.total) || kw != "n" || r.total < 0)
            throw std::runtime_error(path + ":1: malformed header: " + line);
    }
    int lineno = 1;
    long long sum = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        ReviewCount c;
        if (!(ls >> c.reviewer >> c.item >> c.n_plus >> c.n_minus))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed count line: " + line);
        if (c.reviewer < 0 || c.item < 0 || c.n_plus < 0 || c.n_minus < 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": negative value: " + line);
        sum += c.n_plus + c.n_minus;
        r.counts.push_back(c);
    }
    if (sum != r.total)
        throw std::runtime_error(path + ": count total " + std::to_string(sum) +
                                 " does not match header n " + std::to_string(r.total));
    return r;
}

inline void save_ground_truth(const GroundTruth& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "reviewers " << t.theta.size() << " items " << t.labels.size() << "\n";
    out.precision(17);
    for (std::size_t u = 0; u < t.theta.size(); ++u)
        out << "theta " << u << " " << t.theta[u] << "\n";
    for (std::size_t i = 0; i < t.labels.size(); ++i)
        out << "label " << i << " " << t.labels[i] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ":1: missing header");
    std::size_t nr = 0, ni = 0;
    {
        std::istringstream hs(line);
        std::string kw1, kw2;
        if (!(hs >> kw1 >> nr >> kw2 >> ni) || kw1 != "reviewers" || kw2 != "items")
            throw std::runtime_error(path + ":1: malformed header: " + line);
    }
    GroundTruth t;
    t.theta.assign(nr, 0.0);
    t.labels.assign(ni, 0);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kw;
        std::size_t idx;
        if (!(ls >> kw >> idx))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed line");
        if (kw == "theta" && idx < nr) {
            if (!(ls >> t.theta[idx]))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad theta");
        } else if (kw == "label" && idx < ni) {
            if (!(ls >> t.labels[idx]) || (t.labels[idx] != 1 && t.labels[idx] != -1))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad label");
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown line: " + line);
        }
    }
    return t;
}

}  // namespace truthbound
