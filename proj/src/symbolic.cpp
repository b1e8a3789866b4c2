#include "halfic/symbolic.hpp"

#include <algorithm>
#include <climits>
#include <stdexcept>
#include <utility>

namespace halfic {

bool FillPattern::contains(int i, int j) const {
  if (j < 0 || j >= n) return false;
  const auto begin = row_idx.begin() + col_ptr[j];
  const auto end = row_idx.begin() + col_ptr[j + 1];
  return std::binary_search(begin, end, i);
}

namespace {

// Full symmetric adjacency without the diagonal, rows sorted.
struct Graph {
  std::vector<int> ptr;
  std::vector<int> adj;
};

Graph adjacency(const SparseSpd& a) {
  Graph g;
  g.ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  for (int j = 0; j < a.n; ++j) {
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      if (i == j) continue;
      ++g.ptr[i + 1];
      ++g.ptr[j + 1];
    }
  }
  for (int v = 0; v < a.n; ++v) g.ptr[v + 1] += g.ptr[v];
  g.adj.resize(g.ptr.back());
  std::vector<int> fill(g.ptr.begin(), g.ptr.end() - 1);
  for (int j = 0; j < a.n; ++j) {
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      if (i == j) continue;
      g.adj[fill[i]++] = j;
      g.adj[fill[j]++] = i;
    }
  }
  return g;
}

// Finds the columns j < row admitted in `row`. A search state is a vertex
// together with the largest interior vertex on the path that reached it; a
// state is kept only if it improves that maximum, since a path with a smaller
// interior maximum and no more edges admits every endpoint the other does.
class RowSearch {
 public:
  explicit RowSearch(int n) : best_(n, INT_MAX), is_endpoint_(n, 0) {}

  void run(const Graph& g, int row, int level, std::vector<int>& cols) {
    cols.clear();
    frontier_.clear();
    frontier_.emplace_back(row, -1);
    for (int depth = 1; depth <= level + 1 && !frontier_.empty(); ++depth) {
      next_.clear();
      for (const auto& [u, interior_max] : frontier_) {
        const int through = (u == row) ? -1 : std::max(interior_max, u);
        if (through >= row - 1) continue;  // no endpoint left between through and row
        for (int p = g.ptr[u]; p < g.ptr[u + 1]; ++p) {
          const int w = g.adj[p];
          if (w >= row) continue;
          if (w > through && !is_endpoint_[w]) {
            is_endpoint_[w] = 1;
            cols.push_back(w);
          }
          if (through < best_[w]) {
            if (best_[w] == INT_MAX) touched_.push_back(w);
            best_[w] = through;
            next_.emplace_back(w, through);
          }
        }
      }
      std::swap(frontier_, next_);
    }
    for (int v : touched_) best_[v] = INT_MAX;
    for (int v : cols) is_endpoint_[v] = 0;
    touched_.clear();
    std::sort(cols.begin(), cols.end());
  }

 private:
  std::vector<int> best_;
  std::vector<char> is_endpoint_;
  std::vector<int> touched_;
  std::vector<std::pair<int, int>> frontier_, next_;
};

}  // namespace

FillPattern ic_pattern(const SparseSpd& a, int level) {
  if (level < 0) throw std::invalid_argument("ic_pattern: level must be non-negative");
  const Graph g = adjacency(a);

  // Row-wise strict lower pattern, then transposed into columns.
  std::vector<int> row_ptr(static_cast<std::size_t>(a.n) + 1, 0);
  std::vector<int> row_cols;
  RowSearch search(a.n);
  std::vector<int> cols;
  for (int i = 0; i < a.n; ++i) {
    search.run(g, i, level, cols);
    row_cols.insert(row_cols.end(), cols.begin(), cols.end());
    row_ptr[i + 1] = static_cast<int>(row_cols.size());
  }

  FillPattern pat;
  pat.n = a.n;
  pat.level = level;
  pat.col_ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  for (int j = 0; j < a.n; ++j) pat.col_ptr[j + 1] = 1;  // diagonal
  for (int c : row_cols) ++pat.col_ptr[c + 1];
  for (int j = 0; j < a.n; ++j) pat.col_ptr[j + 1] += pat.col_ptr[j];
  pat.row_idx.resize(pat.col_ptr.back());

  std::vector<int> fill(pat.col_ptr.begin(), pat.col_ptr.end() - 1);
  for (int j = 0; j < a.n; ++j) pat.row_idx[fill[j]++] = j;
  // Rows visited in increasing order keep every column sorted.
  for (int i = 0; i < a.n; ++i)
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) pat.row_idx[fill[row_cols[p]]++] = i;
  return pat;
}

}  // namespace halfic
