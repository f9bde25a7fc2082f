#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "granmilp/errors.hpp"
#include "granmilp/sparse.hpp"

namespace granmilp {

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  [[nodiscard]] std::size_t size() const { return end - begin; }
  [[nodiscard]] bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

/// `count` contiguous ranges over [0, total) whose sizes differ by at most one.
inline std::vector<IndexRange> split_even(std::size_t total, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::Validation, "split_even: zero blocks");
  if (count > total) count = total;
  std::vector<IndexRange> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t len = total / count + (k < total % count ? 1 : 0);
    out.push_back({start, start + len});
    start += len;
  }
  return out;
}

struct BlockPartition {
  std::vector<IndexRange> primal_blocks;
  std::vector<IndexRange> dual_blocks;
  std::vector<std::vector<std::size_t>> primal_to_dual;  // essential dual neighbors per primal block
  std::vector<std::vector<std::size_t>> dual_to_primal;

  [[nodiscard]] std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& v : primal_to_dual) e += v.size();
    return e;
  }

  [[nodiscard]] std::set<std::pair<std::size_t, std::size_t>> edges() const {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < primal_to_dual.size(); ++i)
      for (auto q : primal_to_dual[i]) out.insert({i, q});
    return out;
  }
};

inline void check_cover(const std::vector<IndexRange>& blocks, std::size_t total, const char* what) {
  std::size_t expect = 0;
  for (const auto& r : blocks) {
    if (r.begin != expect || r.end <= r.begin)
      throw Error(ErrorKind::Validation, std::string(what) + " blocks must be contiguous, nonempty and ordered");
    expect = r.end;
  }
  if (expect != total) throw Error(ErrorKind::Validation, std::string(what) + " blocks do not cover all indices");
}

/// Edge (i, q) iff some row of dual block q has a structural nonzero in a
/// column of primal block i.
inline void derive_essential_neighbors(const CsrMatrix<double>& A, BlockPartition& part) {
  check_cover(part.primal_blocks, A.cols, "primal");
  if (A.rows > 0) check_cover(part.dual_blocks, A.rows, "dual");
  std::vector<std::size_t> owner(A.cols);
  for (std::size_t i = 0; i < part.primal_blocks.size(); ++i)
    for (std::size_t k = part.primal_blocks[i].begin; k < part.primal_blocks[i].end; ++k) owner[k] = i;

  part.primal_to_dual.assign(part.primal_blocks.size(), {});
  part.dual_to_primal.assign(part.dual_blocks.size(), {});
  for (std::size_t q = 0; q < part.dual_blocks.size(); ++q) {
    std::set<std::size_t> hit;
    for (std::size_t j = part.dual_blocks[q].begin; j < part.dual_blocks[q].end; ++j)
      for (auto col : A.row_cols(j)) hit.insert(owner[col]);
    for (auto i : hit) {
      part.dual_to_primal[q].push_back(i);
      part.primal_to_dual[i].push_back(q);
    }
  }
}

inline BlockPartition make_partition(const CsrMatrix<double>& A, std::vector<IndexRange> primal,
                                     std::vector<IndexRange> dual) {
  BlockPartition part{std::move(primal), std::move(dual), {}, {}};
  derive_essential_neighbors(A, part);
  return part;
}

/// One agent per primal coordinate and per constraint row.
inline BlockPartition scalar_partition(const CsrMatrix<double>& A) {
  return make_partition(A, split_even(A.cols, A.cols), A.rows ? split_even(A.rows, A.rows) : std::vector<IndexRange>{});
}

}  // namespace granmilp
