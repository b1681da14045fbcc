#pragma once

// Sorted multi-index bookkeeping for components of k-vectors and k-forms.
// Indices are strictly increasing tuples over [0, n); component storage is
// dense in lexicographic order. All permutation signs come from explicit
// inversion counting.

#include <cstdint>
#include <vector>

namespace excal {

using MultiIndex = std::vector<int>;

std::int64_t binomial(int n, int k);

/// All strictly increasing k-tuples over [0, n), lexicographic order.
const std::vector<MultiIndex>& multi_indices(int n, int k);

/// Position of a sorted multi-index in the lexicographic enumeration.
int mi_rank(const MultiIndex& mi, int n);

/// Sorted complement of mi in [0, n).
MultiIndex mi_complement(const MultiIndex& mi, int n);

/// Sign of the permutation sorting the concatenation (a, b) of two sorted
/// disjoint multi-indices; 0 if they intersect.
int merge_sign(const MultiIndex& a, const MultiIndex& b);

/// Sorted union of two disjoint sorted multi-indices.
MultiIndex mi_union(const MultiIndex& a, const MultiIndex& b);

/// True if sorted b is a subset of sorted a.
bool mi_contains(const MultiIndex& a, const MultiIndex& b);

}  // namespace excal
