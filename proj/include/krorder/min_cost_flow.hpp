#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "krorder/core.hpp"

namespace krorder {

struct FlowEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double cost = 0.0;
  double capacity = std::numeric_limits<double>::infinity();
};

struct FlowResult {
  std::vector<double> flow;  // one entry per input edge
  double cost = 0.0;
};

/// Min-cost flow with real supplies (positive = source, negative = sink) and
/// nonnegative edge costs, by successive shortest paths over reduced costs.
///
/// Each augmentation saturates the bottleneck residual arc exactly, so the
/// number of augmentations is finite even with real-valued data.
inline FlowResult min_cost_flow(std::span<const double> supplies, std::span<const FlowEdge> edges) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = supplies.size();

  double positive = 0.0;
  double scale = 0.0;
  for (double s : supplies) {
    if (!std::isfinite(s)) throw Error(ErrorCode::MalformedInput, "non-finite supply");
    if (s > 0.0) positive += s;
    scale += std::abs(s);
  }
  if (std::abs(compensated_sum(supplies)) > tolerances().mass * std::max(1.0, scale)) {
    throw Error(ErrorCode::Unbalanced,
                "supplies sum to " + std::to_string(compensated_sum(supplies)));
  }
  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) throw Error(ErrorCode::MalformedInput, "edge endpoint out of range");
    if (!(e.cost >= 0.0) || !std::isfinite(e.cost)) {
      throw Error(ErrorCode::MalformedInput, "edge costs must be finite and nonnegative");
    }
    if (!(e.capacity >= 0.0)) throw Error(ErrorCode::MalformedInput, "negative capacity");
  }

  FlowResult result;
  result.flow.assign(edges.size(), 0.0);
  if (positive == 0.0) return result;

  // Residual network: nodes 0..n-1 plus super source S = n and sink T = n + 1.
  struct Arc {
    std::size_t to;
    std::size_t rev;
    double cost;
    double cap;   // forward residual capacity (may be +inf)
    double flow;  // flow pushed on the forward arc
    std::ptrdiff_t edge;  // input edge index, -1 for terminal / reverse arcs
    bool reverse;
  };
  const std::size_t S = n;
  const std::size_t T = n + 1;
  const std::size_t V = n + 2;
  std::vector<std::vector<Arc>> g(V);
  auto add_arc = [&](std::size_t u, std::size_t v, double cost, double cap, std::ptrdiff_t id) {
    g[u].push_back({v, g[v].size(), cost, cap, 0.0, id, false});
    g[v].push_back({u, g[u].size() - 1, -cost, 0.0, 0.0, -1, true});
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    add_arc(edges[e].from, edges[e].to, edges[e].cost, edges[e].capacity,
            static_cast<std::ptrdiff_t>(e));
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (supplies[v] > 0.0) add_arc(S, v, 0.0, supplies[v], -1);
    if (supplies[v] < 0.0) add_arc(v, T, 0.0, -supplies[v], -1);
  }

  auto residual = [](const Arc& a, const std::vector<std::vector<Arc>>& graph) {
    if (!a.reverse) return a.cap - a.flow;
    return graph[a.to][a.rev].flow;
  };

  const double eps = tolerances().mass * std::max(1.0, positive);
  std::vector<double> potential(V, 0.0), dist(V);
  std::vector<std::size_t> prev_node(V), prev_arc(V);
  std::vector<bool> done(V);
  double remaining = positive;
  const std::size_t max_rounds = 4 * (edges.size() + V) * (V + 1) + 100;

  for (std::size_t round = 0; remaining > eps; ++round) {
    if (round > max_rounds) {
      throw Error(ErrorCode::NumericalBreakdown, "min-cost flow failed to converge");
    }
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), false);
    dist[S] = 0.0;
    // Dense Dijkstra; graphs here have a few dozen nodes.
    for (std::size_t it = 0; it < V; ++it) {
      std::size_t u = V;
      for (std::size_t v = 0; v < V; ++v) {
        if (!done[v] && dist[v] < kInf && (u == V || dist[v] < dist[u])) u = v;
      }
      if (u == V) break;
      done[u] = true;
      for (std::size_t k = 0; k < g[u].size(); ++k) {
        const Arc& a = g[u][k];
        if (residual(a, g) <= 0.0) continue;
        const double reduced = std::max(0.0, a.cost + potential[u] - potential[a.to]);
        if (dist[u] + reduced < dist[a.to]) {
          dist[a.to] = dist[u] + reduced;
          prev_node[a.to] = u;
          prev_arc[a.to] = k;
        }
      }
    }
    if (dist[T] == kInf) {
      throw Error(ErrorCode::Disconnected,
                  "remaining supply " + std::to_string(remaining) + " cannot reach any sink");
    }
    for (std::size_t v = 0; v < V; ++v) potential[v] += std::min(dist[v], dist[T]);

    double push = kInf;
    for (std::size_t v = T; v != S; v = prev_node[v]) {
      push = std::min(push, residual(g[prev_node[v]][prev_arc[v]], g));
    }
    for (std::size_t v = T; v != S; v = prev_node[v]) {
      Arc& a = g[prev_node[v]][prev_arc[v]];
      if (a.reverse) {
        g[a.to][a.rev].flow -= push;
      } else {
        a.flow += push;
      }
    }
    remaining -= push;
  }

  std::vector<double> terms;
  for (std::size_t u = 0; u < n; ++u) {
    for (const Arc& a : g[u]) {
      if (a.reverse || a.edge < 0) continue;
      result.flow[static_cast<std::size_t>(a.edge)] = a.flow;
      terms.push_back(a.flow * a.cost);
    }
  }
  result.cost = compensated_sum(terms);
  return result;
}

}  // namespace krorder
