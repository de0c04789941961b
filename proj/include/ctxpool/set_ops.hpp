#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ctxpool {

// Set algebra over sorted, duplicate-free id vectors. Works for both entity
// and relation ids (same underlying integer type).
using IdSet = std::vector<std::uint32_t>;

inline bool set_contains(const IdSet& s, std::uint32_t x) {
  return std::binary_search(s.begin(), s.end(), x);
}

// a subset-of b.
inline bool is_subset(const IdSet& a, const IdSet& b) {
  auto ib = b.begin();
  for (std::uint32_t x : a) {
    ib = std::lower_bound(ib, b.end(), x);
    if (ib == b.end() || *ib != x) return false;
    ++ib;
  }
  return true;
}

inline void intersect_into(const IdSet& a, const IdSet& b, IdSet& out) {
  out.clear();
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
}

inline IdSet set_intersect(const IdSet& a, const IdSet& b) {
  IdSet out;
  intersect_into(a, b, out);
  return out;
}

inline std::size_t intersect_size(const IdSet& a, const IdSet& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

inline std::size_t union_size(const IdSet& a, const IdSet& b) {
  return a.size() + b.size() - intersect_size(a, b);
}

inline void sort_unique(IdSet& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace ctxpool
