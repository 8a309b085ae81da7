#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "truthbound/rng.hpp"

namespace truthbound {

using Edge = std::pair<int, int>;  // (reviewer, item)

enum class GraphModel { Random, ItemPA, ReviewerItemPA };

inline std::string to_string(GraphModel m) {
    switch (m) {
        case GraphModel::Random: return "rnd";
        case GraphModel::ItemPA: return "ipa";
        case GraphModel::ReviewerItemPA: return "ripa";
    }
    throw std::logic_error("unknown graph model");
}

inline GraphModel parse_graph_model(const std::string& s) {
    if (s == "rnd") return GraphModel::Random;
    if (s == "ipa") return GraphModel::ItemPA;
    if (s == "ripa") return GraphModel::ReviewerItemPA;
    throw std::invalid_argument("unknown graph model: " + s);
}

// Reviewer-item topology. Edges are a set of distinct pairs, stored sorted;
// items_of[u] and reviewers_of[i] are the two adjacency projections.
struct BipartiteGraph {
    int num_reviewers = 0;
    int num_items = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> items_of;      // I_u
    std::vector<std::vector<int>> reviewers_of;  // V_i

    void build_adjacency() {
        items_of.assign(num_reviewers, {});
        reviewers_of.assign(num_items, {});
        for (const auto& [u, i] : edges) {
            items_of[u].push_back(i);
            reviewers_of[i].push_back(u);
        }
    }

    friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
        return a.num_reviewers == b.num_reviewers && a.num_items == b.num_items &&
               a.edges == b.edges;
    }
};

// Draws edges one at a time until num_edges distinct edges exist. Endpoint
// weighting per model; preferential choices weight by current degree + 1,
// realized by sampling uniformly from a node list that starts with one entry
// per node and grows by one entry per accepted edge. Duplicate edges are
// rejected and redrawn.
inline BipartiteGraph generate_graph(GraphModel model, int num_reviewers, int num_items,
                                     long long num_edges, std::uint64_t seed) {
    if (num_reviewers <= 0 || num_items <= 0)
        throw std::invalid_argument("generate_graph: counts must be positive");
    if (num_edges <= 0)
        throw std::invalid_argument("generate_graph: num_edges must be positive");
    if (num_edges > static_cast<long long>(num_reviewers) * num_items)
        throw std::invalid_argument("generate_graph: num_edges exceeds reviewers*items");

    auto eng = make_engine(seed);
    std::uniform_int_distribution<int> uni_reviewer(0, num_reviewers - 1);
    std::uniform_int_distribution<int> uni_item(0, num_items - 1);

    std::vector<int> reviewer_pool(num_reviewers);
    std::vector<int> item_pool(num_items);
    for (int u = 0; u < num_reviewers; ++u) reviewer_pool[u] = u;
    for (int i = 0; i < num_items; ++i) item_pool[i] = i;

    auto pick = [&](std::vector<int>& pool) {
        std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
        return pool[d(eng)];
    };

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(num_edges) * 2);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(num_edges));

    while (static_cast<long long>(edges.size()) < num_edges) {
        int u, i;
        switch (model) {
            case GraphModel::Random:
                u = uni_reviewer(eng);
                i = uni_item(eng);
                break;
            case GraphModel::ItemPA:
                u = uni_reviewer(eng);
                i = pick(item_pool);
                break;
            case GraphModel::ReviewerItemPA:
                u = pick(reviewer_pool);
                i = pick(item_pool);
                break;
        }
        std::uint64_t key = static_cast<std::uint64_t>(u) * num_items + i;
        if (!seen.insert(key).second) continue;
        edges.emplace_back(u, i);
        reviewer_pool.push_back(u);
        item_pool.push_back(i);
    }

    std::sort(edges.begin(), edges.end());

    BipartiteGraph g;
    g.num_reviewers = num_reviewers;
    g.num_items = num_items;
    g.edges = std::move(edges);
    g.build_adjacency();
    return g;
}

inline std::pair<std::vector<int>, std::vector<int>> degree_sequences(const BipartiteGraph& g) {
    std::vector<int> rdeg(g.num_reviewers, 0), ideg(g.num_items, 0);
    for (const auto& [u, i] : g.edges) {
        ++rdeg[u];
        ++ideg[i];
    }
    return {std::move(rdeg), std::move(ideg)};
}

inline void save_graph(const BipartiteGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "reviewers " << g.num_reviewers << " items " << g.num_items
        << " edges " << g.edges.size() << "\n";
    for (const auto& [u, i] : g.edges) out << u << " " << i << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline BipartiteGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: missing header");
    BipartiteGraph g;
    long long num_edges = -1;
    {
        std::istringstream hs(line);
        std::string kw1, kw2, kw3;
        if (!(hs >> kw1 >> g.num_reviewers >> kw2 >> g.num_items >> kw3 >> num_edges) ||
            kw1 != "reviewers" || kw2 != "items" || kw3 != "edges")
            throw std::runtime_error(path + ":1: malformed header: " + line);
    }
    if (g.num_reviewers <= 0 || g.num_items <= 0 || num_edges < 0)
        throw std::runtime_error(path + ":1: invalid sizes");
    g.edges.reserve(static_cast<std::size_t>(num_edges));
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int u, i;
        if (!(ls >> u >> i))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed edge line: " + line);
        if (u < 0 || u >= g.num_reviewers || i < 0 || i >= g.num_items)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": edge index out of range: " + line);
        g.edges.emplace_back(u, i);
    }
    if (static_cast<long long>(g.edges.size()) != num_edges)
        throw std::runtime_error(path + ": edge count mismatch: header says " +
                                 std::to_string(num_edges) + ", found " +
                                 std::to_string(g.edges.size()));
    std::sort(g.edges.begin(), g.edges.end());
    for (std::size_t k = 1; k < g.edges.size(); ++k)
        if (g.edges[k] == g.edges[k - 1])
            throw std::runtime_error(path + ": duplicate edge (" +
                                     std::to_string(g.edges[k].first) + "," +
                                     std::to_string(g.edges[k].second) + ")");
    g.build_adjacency();
    return g;
}

}  // namespace truthbound
