#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace calib {

// Strictly increasing index tuples in [0, dim), enumerated lexicographically.
// They index the coefficient arrays of alternating forms.
using MultiIndex = std::vector<int>;

inline std::int64_t binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::int64_t v = 1;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// All k-element multi-indices on [0, dim), lexicographic order.
inline std::vector<MultiIndex> multi_indices(int dim, int k)
{
    std::vector<MultiIndex> out;
    if (k < 0 || k > dim) return out;
    MultiIndex c(k);
    for (int i = 0; i < k; ++i) c[i] = i;
    while (true) {
        out.push_back(c);
        int i = k - 1;
        while (i >= 0 && c[i] == dim - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

// Position of a sorted multi-index in the lexicographic enumeration.
inline int lex_rank(const MultiIndex& idx, int dim)
{
    const int k = static_cast<int>(idx.size());
    std::int64_t r = 0;
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int t = prev + 1; t < idx[i]; ++t) r += binomial(dim - 1 - t, k - 1 - i);
        prev = idx[i];
    }
    return static_cast<int>(r);
}

// Sign of the permutation sorting an index tuple; 0 if entries repeat.
// The tuple is sorted in place.
inline int sort_sign(MultiIndex& idx)
{
    int sign = 1;
    const int k = static_cast<int>(idx.size());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j + 1 < k - i; ++j) {
            if (idx[j] == idx[j + 1]) return 0;
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sign = -sign;
            }
        }
    return sign;
}

// Merge two sorted multi-indices; sign of the shuffle, 0 on overlap.
inline int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& merged)
{
    merged.resize(a.size() + b.size());
    std::size_t i = 0, j = 0, m = 0;
    std::int64_t inversions = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return 0;
        if (a[i] < b[j]) {
            merged[m++] = a[i++];
        } else {
            // b[j] jumps over the remaining entries of a
            inversions += static_cast<std::int64_t>(a.size() - i);
            merged[m++] = b[j++];
        }
    }
    while (i < a.size()) merged[m++] = a[i++];
    while (j < b.size()) merged[m++] = b[j++];
    return (inversions % 2 == 0) ? 1 : -1;
}

inline MultiIndex complement_index(const MultiIndex& idx, int dim)
{
    MultiIndex out;
    out.reserve(dim - idx.size());
    std::size_t p = 0;
    for (int t = 0; t < dim; ++t) {
        if (p < idx.size() && idx[p] == t) {
            ++p;
        } else {
            out.push_back(t);
        }
    }
    return out;
}

} // namespace calib
