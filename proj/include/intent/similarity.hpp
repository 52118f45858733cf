#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace intent {

struct MatchBlock {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t size = 0;
};

namespace detail {

// Longest common contiguous run in a[alo,ahi) x b[blo,bhi). Among equally
// long runs, the one starting earliest in `a`, then earliest in `b`.
template <class T>
MatchBlock longest_match(std::span<const T> a, std::size_t alo, std::size_t ahi, std::span<const T> b,
                         std::size_t blo, std::size_t bhi) {
  MatchBlock best{alo, blo, 0};
  // run[j] = length of the common run ending at a[i-1], b[j-1]
  std::vector<std::size_t> prev(bhi - blo + 1, 0), cur(bhi - blo + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    for (std::size_t j = blo; j < bhi; ++j) {
      const std::size_t k = j - blo + 1;
      cur[k] = a[i] == b[j] ? prev[k - 1] + 1 : 0;
      if (cur[k] > best.size) {
        best = {i + 1 - cur[k], j + 1 - cur[k], cur[k]};
      } else if (cur[k] == best.size && cur[k] > 0) {
        const std::size_t ai = i + 1 - cur[k];
        const std::size_t bj = j + 1 - cur[k];
        if (ai < best.a || (ai == best.a && bj < best.b)) best = {ai, bj, cur[k]};
      }
    }
    std::swap(prev, cur);
    std::fill(cur.begin(), cur.end(), 0);
  }
  return best;
}

template <class T>
std::size_t matched(std::span<const T> a, std::size_t alo, std::size_t ahi, std::span<const T> b, std::size_t blo,
                    std::size_t bhi) {
  if (alo >= ahi || blo >= bhi) return 0;
  const auto m = longest_match(a, alo, ahi, b, blo, bhi);
  if (m.size == 0) return 0;
  return m.size + matched(a, alo, m.a, b, blo, m.b) + matched(a, m.a + m.size, ahi, b, m.b + m.size, bhi);
}

}  // namespace detail

/// Ratcliff-Obershelp gestalt similarity, 2*M / (|a| + |b|), where M counts
/// symbols matched by recursive longest-common-substring decomposition.
/// The decomposition depends on argument order through its tie rule, so M
/// is the larger of the two orders. Two empty sequences are identical (1.0).
template <class T>
double similarity(std::span<const T> a, std::span<const T> b) {
  if (a.empty() && b.empty()) return 1.0;
  const auto m = std::max(detail::matched(a, 0, a.size(), b, 0, b.size()), detail::matched(b, 0, b.size(), a, 0, a.size()));
  return 2.0 * static_cast<double>(m) / static_cast<double>(a.size() + b.size());
}

template <class T>
double similarity(const std::vector<T>& a, const std::vector<T>& b) {
  return similarity(std::span<const T>(a), std::span<const T>(b));
}

}  // namespace intent
