#include "excal/multiindex.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace excal {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

const std::vector<MultiIndex>& multi_indices(int n, int k) {
  static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<MultiIndex> out;
  if (k >= 0 && k <= n) {
    MultiIndex mi(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) mi[static_cast<std::size_t>(i)] = i;
    while (true) {
      out.push_back(mi);
      int j = k - 1;
      while (j >= 0 && mi[static_cast<std::size_t>(j)] == n - k + j) --j;
      if (j < 0) break;
      ++mi[static_cast<std::size_t>(j)];
      for (int l = j + 1; l < k; ++l)
        mi[static_cast<std::size_t>(l)] = mi[static_cast<std::size_t>(l - 1)] + 1;
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

int mi_rank(const MultiIndex& mi, int n) {
  // Lexicographic rank of an increasing tuple: count tuples preceding it.
  int k = static_cast<int>(mi.size());
  std::int64_t rank = 0;
  int prev = -1;
  for (int pos = 0; pos < k; ++pos) {
    for (int c = prev + 1; c < mi[static_cast<std::size_t>(pos)]; ++c)
      rank += binomial(n - 1 - c, k - 1 - pos);
    prev = mi[static_cast<std::size_t>(pos)];
  }
  return static_cast<int>(rank);
}

MultiIndex mi_complement(const MultiIndex& mi, int n) {
  MultiIndex out;
  out.reserve(static_cast<std::size_t>(n) - mi.size());
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    if (j < mi.size() && mi[j] == i) ++j;
    else out.push_back(i);
  }
  return out;
}

int merge_sign(const MultiIndex& a, const MultiIndex& b) {
  int inversions = 0;
  for (int x : a) {
    for (int y : b) {
      if (x == y) return 0;
      if (x > y) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

MultiIndex mi_union(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool mi_contains(const MultiIndex& a, const MultiIndex& b) {
  return std::includes(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace excal
