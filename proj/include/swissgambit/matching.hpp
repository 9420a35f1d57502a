#pragma once

// Maximum-cardinality matching on small general graphs (Edmonds' blossom
// algorithm) and on bipartite graphs (augmenting paths). Used by the pairing
// engine to prune searches that cannot be completed.

#include <functional>
#include <span>
#include <vector>

namespace swissgambit {

// Adjacency oracle over local vertex indices 0..n-1.
using AdjacencyFn = std::function<bool(int, int)>;

class BlossomMatcher {
 public:
  // Size of a maximum matching in the graph on n vertices.
  int solve(int n, const std::vector<std::vector<int>>& adj) {
    n_ = n;
    adj_ = &adj;
    match_.assign(static_cast<std::size_t>(n), -1);
    parent_.assign(static_cast<std::size_t>(n), -1);
    base_.assign(static_cast<std::size_t>(n), 0);
    used_.assign(static_cast<std::size_t>(n), 0);
    blossom_.assign(static_cast<std::size_t>(n), 0);
    int size = 0;
    // Greedy start; most calls finish here.
    for (int v = 0; v < n; ++v) {
      if (match_[idx(v)] != -1) continue;
      for (int to : adj[idx(v)]) {
        if (match_[idx(to)] == -1) {
          match_[idx(to)] = v;
          match_[idx(v)] = to;
          ++size;
          break;
        }
      }
    }
    for (int v = 0; v < n && 2 * size + 1 < n; ++v) {
      if (match_[idx(v)] != -1) continue;
      int u = find_path(v);
      if (u == -1) continue;
      ++size;
      while (u != -1) {
        const int pv = parent_[idx(u)];
        const int ppv = match_[idx(pv)];
        match_[idx(u)] = pv;
        match_[idx(pv)] = u;
        u = ppv;
      }
    }
    return size;
  }

  const std::vector<int>& mate() const { return match_; }

 private:
  static std::size_t idx(int v) { return static_cast<std::size_t>(v); }

  int lca(int a, int b) {
    seen_.assign(static_cast<std::size_t>(n_), 0);
    std::vector<char>& seen = seen_;
    for (;;) {
      a = base_[idx(a)];
      seen[idx(a)] = 1;
      if (match_[idx(a)] == -1) break;
      a = parent_[idx(match_[idx(a)])];
    }
    for (;;) {
      b = base_[idx(b)];
      if (seen[idx(b)]) return b;
      b = parent_[idx(match_[idx(b)])];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base_[idx(v)] != b) {
      blossom_[idx(base_[idx(v)])] = 1;
      blossom_[idx(base_[idx(match_[idx(v)])])] = 1;
      parent_[idx(v)] = child;
      child = match_[idx(v)];
      v = parent_[idx(match_[idx(v)])];
    }
  }

  int find_path(int root) {
    std::fill(used_.begin(), used_.end(), 0);
    std::fill(parent_.begin(), parent_.end(), -1);
    for (int i = 0; i < n_; ++i) base_[idx(i)] = i;
    used_[idx(root)] = 1;
    queue_.clear();
    queue_.push_back(root);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int v = queue_[head];
      for (int to : (*adj_)[idx(v)]) {
        if (base_[idx(v)] == base_[idx(to)] || match_[idx(v)] == to) continue;
        if (to == root || (match_[idx(to)] != -1 && parent_[idx(match_[idx(to)])] != -1)) {
          const int cur = lca(v, to);
          std::fill(blossom_.begin(), blossom_.end(), 0);
          mark_path(v, cur, to);
          mark_path(to, cur, v);
          for (int i = 0; i < n_; ++i) {
            if (blossom_[idx(base_[idx(i)])]) {
              base_[idx(i)] = cur;
              if (!used_[idx(i)]) {
                used_[idx(i)] = 1;
                queue_.push_back(i);
              }
            }
          }
        } else if (parent_[idx(to)] == -1) {
          parent_[idx(to)] = v;
          if (match_[idx(to)] == -1) return to;
          used_[idx(match_[idx(to)])] = 1;
          queue_.push_back(match_[idx(to)]);
        }
      }
    }
    return -1;
  }

  int n_ = 0;
  const std::vector<std::vector<int>>* adj_ = nullptr;
  std::vector<int> match_, parent_, base_;
  std::vector<char> used_, blossom_, seen_;
  std::vector<int> queue_;
};

// Maximum matching size on the subgraph induced by `vertices`.
template <typename Compatible>
int max_matching_size(std::span<const int> vertices, Compatible&& compatible) {
  const int n = static_cast<int>(vertices.size());
  // Buffers are reused across calls; pairing runs this in tight loops.
  thread_local std::vector<std::vector<int>> adj;
  thread_local BlossomMatcher matcher;
  if (adj.size() < vertices.size()) adj.resize(vertices.size());
  for (int i = 0; i < n; ++i) adj[static_cast<std::size_t>(i)].clear();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (compatible(vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)])) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        adj[static_cast<std::size_t>(j)].push_back(i);
      }
  return matcher.solve(n, adj);
}

template <typename Compatible>
bool has_perfect_matching(std::span<const int> vertices, Compatible&& compatible) {
  if (vertices.size() % 2 != 0) return false;
  return 2 * max_matching_size(vertices, compatible) == static_cast<int>(vertices.size());
}

// Whether every vertex in `left` can be matched to a distinct vertex in `right`.
template <typename Compatible>
bool saturates_left(std::span<const int> left, std::span<const int> right, Compatible&& compatible) {
  if (left.size() > right.size()) return false;
  std::vector<int> owner(right.size(), -1);
  std::vector<char> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t l) {
    for (std::size_t r = 0; r < right.size(); ++r) {
      if (visited[r] || !compatible(left[l], right[r])) continue;
      visited[r] = 1;
      if (owner[r] == -1 || augment(static_cast<std::size_t>(owner[r]))) {
        owner[r] = static_cast<int>(l);
        return true;
      }
    }
    return false;
  };
  for (std::size_t l = 0; l < left.size(); ++l) {
    visited.assign(right.size(), 0);
    if (!augment(l)) return false;
  }
  return true;
}

}  // namespace swissgambit
