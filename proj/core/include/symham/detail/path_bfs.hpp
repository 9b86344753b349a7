#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace symham {
namespace detail {

// Shared clock-path closure: breadth-first exploration of a reversible
// rewrite system whose reachability graph must be a simple path.
//
// Action: attached data-register action per directed edge; must provide
// fields `kind`, `ring_bond`, `dagger` (see tchain::GateAction).
template <class Config, class Action>
struct PathMove {
  Config to;
  Action action;  // forward-direction action
  bool forward;
};

template <class Config, class Action>
struct PathClosure {
  std::vector<Config> nodes;          // ordered from one endpoint
  std::vector<Action> edge_actions;   // action along nodes[k] -> nodes[k+1]
  int initial_index = 0;
};

template <class Config, class Action, class MovesFn, class KeyFn>
PathClosure<Config, Action> bfs_path(const Config& init, MovesFn&& moves, KeyFn&& key,
                                     size_t node_cap, const char* who) {
  std::vector<Config> nodes;
  std::unordered_map<std::string, int> index_of;
  struct Edge {
    int a, b;
    Action action;
  };
  std::vector<Edge> edges;
  std::map<std::pair<int, int>, size_t> edge_seen;

  nodes.push_back(init);
  index_of[key(init)] = 0;
  std::queue<int> todo;
  todo.push(0);

  const auto fail = [&](const std::string& what, const Config& c) {
    throw std::runtime_error(std::string(who) + ": " + what + " at " + key(c));
  };

  while (!todo.empty()) {
    const int cur = todo.front();
    todo.pop();
    const Config c = nodes[static_cast<size_t>(cur)];
    for (PathMove<Config, Action>& mv : moves(c)) {
      const std::string k = key(mv.to);
      auto it = index_of.find(k);
      int nb;
      if (it == index_of.end()) {
        nb = static_cast<int>(nodes.size());
        nodes.push_back(mv.to);
        index_of[k] = nb;
        todo.push(nb);
        if (nodes.size() > node_cap)
          throw std::runtime_error(std::string(who) + ": configuration closure too large");
      } else {
        nb = it->second;
      }
      const int from = mv.forward ? cur : nb;
      const int to = mv.forward ? nb : cur;
      const auto ekey = std::make_pair(std::min(from, to), std::max(from, to));
      auto es = edge_seen.find(ekey);
      if (es == edge_seen.end()) {
        edge_seen[ekey] = edges.size();
        edges.push_back({from, to, mv.action});
      } else {
        const Edge& old = edges[es->second];
        const bool same = old.a == from && old.b == to && old.action.kind == mv.action.kind &&
                          old.action.ring_bond == mv.action.ring_bond &&
                          old.action.dagger == mv.action.dagger;
        if (!same) fail("branching detected (parallel transitions)", c);
      }
    }
  }

  std::vector<int> degree(nodes.size(), 0);
  for (const Edge& e : edges) {
    ++degree[static_cast<size_t>(e.a)];
    ++degree[static_cast<size_t>(e.b)];
  }
  for (size_t k = 0; k < nodes.size(); ++k)
    if (degree[k] > 2) fail("branching detected", nodes[k]);
  if (edges.size() + 1 != nodes.size()) fail("reachability graph is not a path", init);
  int endpoints = 0;
  for (size_t k = 0; k < nodes.size(); ++k)
    if (degree[k] <= 1) ++endpoints;
  if (nodes.size() > 1 && endpoints != 2) fail("expected exactly two endpoints", init);

  std::vector<std::vector<std::pair<int, size_t>>> adj(nodes.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    adj[static_cast<size_t>(edges[e].a)].push_back({edges[e].b, e});
    adj[static_cast<size_t>(edges[e].b)].push_back({edges[e].a, e});
  }
  int start = 0;
  for (size_t k = 0; k < nodes.size(); ++k)
    if (degree[k] <= 1) {
      start = static_cast<int>(k);
      break;
    }
  if (degree[0] <= 1) start = 0;  // prefer the BFS origin as the path head

  PathClosure<Config, Action> path;
  std::vector<int> order;
  std::vector<char> used(nodes.size(), 0);
  int cur = start;
  used[static_cast<size_t>(cur)] = 1;
  order.push_back(cur);
  while (order.size() < nodes.size()) {
    bool advanced = false;
    for (auto [nb, e] : adj[static_cast<size_t>(cur)]) {
      if (used[static_cast<size_t>(nb)]) continue;
      Action act = edges[e].action;
      if (edges[e].a != cur) act.dagger = !act.dagger;
      path.edge_actions.push_back(act);
      used[static_cast<size_t>(nb)] = 1;
      order.push_back(nb);
      cur = nb;
      advanced = true;
      break;
    }
    if (!advanced) throw std::logic_error(std::string(who) + ": path walk failed");
  }
  for (int idx : order) path.nodes.push_back(nodes[static_cast<size_t>(idx)]);
  path.initial_index =
      static_cast<int>(std::find(order.begin(), order.end(), 0) - order.begin());
  return path;
}

}  // namespace detail
}  // namespace symham
