#pragma once

#include <vector>

#include "halfic/sparse.hpp"

namespace halfic {

/// Lower-triangular target pattern of an incomplete factor, compressed by
/// column with sorted rows; the diagonal leads every column.
struct FillPattern {
  int n = 0;
  int level = 0;
  std::vector<int> col_ptr{0};
  std::vector<int> row_idx;

  std::size_t nnz() const { return row_idx.size(); }
  bool contains(int i, int j) const;
};

/// Level-of-fill pattern for IC(level).
///
/// Position (i, j), j < i, is admitted iff the adjacency graph of A has a path
/// from i to j of at most level + 1 edges whose interior vertices are all
/// numbered below j. Each row is found by its own depth-limited search, so
/// rows are independent of one another.
FillPattern ic_pattern(const SparseSpd& a, int level);

}  // namespace halfic
