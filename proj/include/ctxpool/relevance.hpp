#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ctxpool/kg.hpp"
#include "ctxpool/set_ops.hpp"

namespace ctxpool {

enum class MetricKind { precision, recall };

// Relevance value kept as an exact integer ratio; conversion to floating point
// happens only when a caller asks for it. A zero denominator means the score
// is undefined, and an undefined score compares below every threshold.
struct RelevanceScore {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  bool defined() const { return den != 0; }

  double value() const {
    if (!defined()) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(num) / static_cast<double>(den);
  }

  // Strict comparison against a threshold; false whenever undefined.
  bool exceeds(double threshold) const {
    return den != 0 &&
           static_cast<double>(num) > threshold * static_cast<double>(den);
  }

  friend bool operator==(const RelevanceScore&, const RelevanceScore&) = default;
};

namespace detail {

// |{e : nr subset-of NR_e}| via sorted-list intersection, smallest list first.
// An empty nr is satisfied by every entity in the vocabulary.
inline std::uint64_t entities_with_all(const KnowledgeGraph& g, const IdSet& nr) {
  if (nr.empty()) return g.num_entities();
  std::vector<const IdSet*> lists;
  lists.reserve(nr.size());
  for (RelationId r : nr) lists.push_back(&g.entities_with_relation(r));
  std::sort(lists.begin(), lists.end(),
            [](const IdSet* a, const IdSet* b) { return a->size() < b->size(); });
  IdSet acc = *lists[0];
  IdSet tmp;
  for (std::size_t i = 1; i < lists.size() && !acc.empty(); ++i) {
    intersect_into(acc, *lists[i], tmp);
    acc.swap(tmp);
  }
  return acc.size();
}

inline std::uint64_t entities_with_all_and(const KnowledgeGraph& g, const IdSet& nr,
                                           RelationId r) {
  if (nr.empty()) return g.relation_entity_count(r);
  std::vector<const IdSet*> lists;
  lists.reserve(nr.size() + 1);
  for (RelationId x : nr) lists.push_back(&g.entities_with_relation(x));
  lists.push_back(&g.entities_with_relation(r));
  std::sort(lists.begin(), lists.end(),
            [](const IdSet* a, const IdSet* b) { return a->size() < b->size(); });
  IdSet acc = *lists[0];
  IdSet tmp;
  for (std::size_t i = 1; i < lists.size() && !acc.empty(); ++i) {
    intersect_into(acc, *lists[i], tmp);
    acc.swap(tmp);
  }
  return acc.size();
}

// Validates ids and returns nr as a proper set (sorted, duplicate-free), so
// callers may pass relation lists in any order.
inline IdSet check_relation_set(const KnowledgeGraph& g, const IdSet& nr) {
  for (RelationId r : nr)
    if (r >= g.num_relation_ids())
      throw LookupError("relation id " + std::to_string(r) + " out of range");
  IdSet s = nr;
  sort_unique(s);
  return s;
}

}  // namespace detail

// Of the entities whose neighborhood covers nr, the fraction whose
// neighborhood also contains r. Undefined when no entity covers nr.
inline RelevanceScore rel_precision(const KnowledgeGraph& g, const IdSet& nr,
                                    RelationId r) {
  IdSet set = detail::check_relation_set(g, nr);
  if (r >= g.num_relation_ids())
    throw LookupError("relation id " + std::to_string(r) + " out of range");
  RelevanceScore s;
  s.den = detail::entities_with_all(g, set);
  s.num = s.den == 0 ? 0 : detail::entities_with_all_and(g, set, r);
  return s;
}

// Of the entities whose neighborhood contains r, the fraction whose
// neighborhood also covers nr. Undefined when r occurs nowhere.
inline RelevanceScore rel_recall(const KnowledgeGraph& g, const IdSet& nr,
                                 RelationId r) {
  IdSet set = detail::check_relation_set(g, nr);
  if (r >= g.num_relation_ids())
    throw LookupError("relation id " + std::to_string(r) + " out of range");
  RelevanceScore s;
  s.den = g.relation_entity_count(r);
  s.num = s.den == 0 ? 0 : detail::entities_with_all_and(g, set, r);
  return s;
}

// |a intersect b| / |a union b| over relation sets; 0 when both are empty.
inline double jaccard_similarity(const IdSet& a, const IdSet& b) {
  std::size_t inter = intersect_size(a, b);
  std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace ctxpool
