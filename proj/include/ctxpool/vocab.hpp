#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxpool/errors.hpp"

namespace ctxpool {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Suffix marking inverse relations in serialized artifacts. Resolution always
// tries an exact vocabulary match first, so a raw relation whose name happens
// to end in the marker still resolves to itself.
inline constexpr std::string_view kInverseSuffix = "_inv";

// Interns entity and relation names into dense ids, assigned in first-appearance
// order. Only forward relations are stored; inverse relations occupy the id
// range [num_relations, 2*num_relations) and are derived arithmetically.
class Vocabulary {
 public:
  EntityId intern_entity(std::string_view name) {
    auto it = entity_ids_.find(std::string(name));
    if (it != entity_ids_.end()) return it->second;
    EntityId id = static_cast<EntityId>(entity_names_.size());
    entity_names_.emplace_back(name);
    entity_ids_.emplace(entity_names_.back(), id);
    return id;
  }

  RelationId intern_relation(std::string_view name) {
    auto it = relation_ids_.find(std::string(name));
    if (it != relation_ids_.end()) return it->second;
    RelationId id = static_cast<RelationId>(relation_names_.size());
    relation_names_.emplace_back(name);
    relation_ids_.emplace(relation_names_.back(), id);
    return id;
  }

  std::optional<EntityId> entity_id(std::string_view name) const {
    auto it = entity_ids_.find(std::string(name));
    if (it == entity_ids_.end()) return std::nullopt;
    return it->second;
  }

  // Resolves a relation name as serialized: exact match first, then the
  // inverse-suffix form of a known forward relation.
  std::optional<RelationId> relation_id(std::string_view name) const {
    auto it = relation_ids_.find(std::string(name));
    if (it != relation_ids_.end()) return it->second;
    if (name.size() > kInverseSuffix.size() &&
        name.substr(name.size() - kInverseSuffix.size()) == kInverseSuffix) {
      auto base = relation_ids_.find(
          std::string(name.substr(0, name.size() - kInverseSuffix.size())));
      if (base != relation_ids_.end()) return inverse(base->second);
    }
    return std::nullopt;
  }

  const std::string& entity_name(EntityId id) const {
    if (id >= entity_names_.size())
      throw LookupError("entity id " + std::to_string(id) + " out of range");
    return entity_names_[id];
  }

  std::string relation_name(RelationId id) const {
    std::size_t n = relation_names_.size();
    if (id < n) return relation_names_[id];
    if (id < 2 * n) return relation_names_[id - n] + std::string(kInverseSuffix);
    throw LookupError("relation id " + std::to_string(id) + " out of range");
  }

  std::size_t num_entities() const { return entity_names_.size(); }
  // Forward relations only.
  std::size_t num_relations() const { return relation_names_.size(); }
  // Size of the augmented relation id space.
  std::size_t num_relation_ids() const { return 2 * relation_names_.size(); }

  // Involution over the augmented id space: forward <-> inverse.
  RelationId inverse(RelationId id) const {
    std::size_t n2 = num_relation_ids();
    if (n2 == 0 || id >= n2)
      throw LookupError("relation id " + std::to_string(id) + " out of range");
    return static_cast<RelationId>((id + relation_names_.size()) % n2);
  }

  bool is_inverse(RelationId id) const {
    return id >= relation_names_.size() && id < num_relation_ids();
  }

 private:
  std::vector<std::string> entity_names_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, RelationId> relation_ids_;
};

namespace detail {

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

// Nearest vocabulary names by edit distance, for "did you mean" messages.
inline std::vector<std::string> suggest_names(std::string_view query,
                                              const std::vector<std::string>& candidates,
                                              std::size_t k = 3) {
  std::vector<std::pair<std::size_t, const std::string*>> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates)
    ranked.emplace_back(detail::edit_distance(query, c), &c);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return *a.second < *b.second;
            });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i)
    out.push_back(*ranked[i].second);
  return out;
}

}  // namespace ctxpool
