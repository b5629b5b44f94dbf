// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Slow reference implementations used only by the tests. Nothing here calls
// into the library except for translating ids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

/// Adjacency-list ball, vertices numbered in BFS order from 0.
struct Graph {
    int d = 0;
    int radius = 0;
    std::vector<std::vector<std::uint32_t>> adj;
    std::vector<int> depth;

    std::size_t size() const { return adj.size(); }
};

inline Graph build_ball(int d, int radius) {
    Graph g;
    g.d = d;
    g.radius = radius;
    g.adj.emplace_back();
    g.depth.push_back(0);
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        if (g.depth[v] == radius) {
            continue;
        }
        const int kids = v == 0 ? d : d - 1;
        for (int c = 0; c < kids; ++c) {
            const auto w = static_cast<std::uint32_t>(g.adj.size());
            g.adj.emplace_back();
            g.depth.push_back(g.depth[v] + 1);
            g.adj[v].push_back(w);
            g.adj[w].push_back(v);
            queue.push_back(w);
        }
    }
    return g;
}

inline std::vector<int> bfs(const Graph& g, std::uint32_t src) {
    std::vector<int> dist(g.size(), -1);
    std::deque<std::uint32_t> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto w : g.adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

inline std::vector<std::vector<int>> all_pairs(const Graph& g) {
    std::vector<std::vector<int>> out;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        out.push_back(bfs(g, v));
    }
    return out;
}

/// Hull as the fixed point of deleting degree-1 vertices outside V.
inline std::vector<std::uint32_t> hull_by_pruning(const Graph& g, const std::vector<std::uint32_t>& vs) {
    std::set<std::uint32_t> keep(vs.begin(), vs.end());
    std::vector<char> alive(g.size(), 1);
    std::vector<int> deg(g.size());
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        deg[v] = static_cast<int>(g.adj[v].size());
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::uint32_t v = 0; v < g.size(); ++v) {
            if (alive[v] && deg[v] <= 1 && !keep.count(v)) {
                alive[v] = 0;
                changed = true;
                for (auto w : g.adj[v]) {
                    if (alive[w]) {
                        --deg[w];
                    }
                }
            }
        }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        if (alive[v]) {
            out.push_back(v);
        }
    }
    return out;
}

/// Minimum distance over all pairs of hull vertices.
inline int hull_distance_brute(const Graph& g, const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    const auto ha = hull_by_pruning(g, a);
    const auto hb = hull_by_pruning(g, b);
    int best = 1 << 30;
    for (auto x : ha) {
        const auto dist = bfs(g, x);
        for (auto y : hb) {
            best = std::min(best, dist[y]);
        }
    }
    return best;
}

// -- non-backtracking matrix ------------------------------------------------

using Edge = std::pair<std::uint32_t, std::uint32_t>;

inline std::vector<Edge> directed_edges(const Graph& g) {
    std::vector<Edge> out;
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        for (auto v : g.adj[u]) {
            out.emplace_back(u, v);
        }
    }
    return out;
}

using Dense = std::vector<std::vector<double>>;

/// B[f][e] = 1 when e = (a,b), f = (b,c), c != a.
inline Dense nb_matrix(const std::vector<Edge>& edges) {
    const std::size_t m = edges.size();
    Dense b(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (edges[i].second == edges[j].first && edges[j].second != edges[i].first) {
                b[j][i] = 1.0;
            }
        }
    }
    return b;
}

inline Dense multiply(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) {
            if (a[i][l] == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    return c;
}

inline Dense power(const Dense& a, int k) {
    Dense r(a.size(), std::vector<double>(a.size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i][i] = 1.0;
    }
    for (int i = 0; i < k; ++i) {
        r = multiply(a, r);
    }
    return r;
}

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double max_eigenvalue(Dense a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-22) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) {
                    continue;
                }
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    double best = a[0][0];
    for (std::size_t i = 1; i < n; ++i) {
        best = std::max(best, a[i][i]);
    }
    return best;
}

/// Spectral norm of M as sqrt of the top eigenvalue of M^T M.
inline double spectral_norm(const Dense& m) {
    const std::size_t n = m.size();
    Dense g(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) {
            if (m[l][i] == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                g[i][j] += m[l][i] * m[l][j];
            }
        }
    }
    return std::sqrt(max_eigenvalue(std::move(g)));
}

// -- enumeration -------------------------------------------------------------

/// Calls fn on every word in {0..m-1}^n.
inline void for_each_word(std::size_t n, std::uint32_t m, const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
    std::vector<std::uint32_t> w(n, 0);
    while (true) {
        fn(w);
        std::size_t i = 0;
        while (i < n && ++w[i] == m) {
            w[i++] = 0;
        }
        if (i == n) {
            return;
        }
    }
}

/// Textbook correlation of (a, b) pairs with equal weights.
inline double correlation(const std::vector<std::pair<double, double>>& xs) {
    double ma = 0, mb = 0;
    for (auto [a, b] : xs) {
        ma += a;
        mb += b;
    }
    ma /= static_cast<double>(xs.size());
    mb /= static_cast<double>(xs.size());
    double cab = 0, caa = 0, cbb = 0;
    for (auto [a, b] : xs) {
        cab += (a - ma) * (b - mb);
        caa += (a - ma) * (a - ma);
        cbb += (b - mb) * (b - mb);
    }
    return cab / std::sqrt(caa * cbb);
}

} // namespace oracle
