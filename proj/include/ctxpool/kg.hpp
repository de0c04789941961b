#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxpool/errors.hpp"
#include "ctxpool/set_ops.hpp"
#include "ctxpool/util.hpp"
#include "ctxpool/vocab.hpp"

namespace ctxpool {

struct Triple {
  EntityId h;
  RelationId r;
  EntityId t;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Forward-only counts, computed from the stored triples (not the vocabulary),
// so a graph loaded against an inherited, larger vocabulary still reports
// what its own files contain.
struct GraphStats {
  std::size_t num_relations = 0;
  std::size_t num_entities = 0;
  std::size_t num_triples = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

enum class InverseAugmentation { enabled, disabled };
enum class RelationPolicy { extend, require_known };

// Parses a tab-separated triple file (head, relation, tail per line) into the
// supplied vocabulary. Blank lines are skipped; anything else malformed is a
// ParseError with its line number. Duplicate triples collapse to one (set
// semantics); first-appearance order is kept. Under RelationPolicy::require_known
// a relation name absent from the vocabulary is an InductiveContractError
// (testing graphs may introduce entities, never relations).
inline std::vector<Triple> load_triples(const std::string& path, Vocabulary& vocab,
                                        RelationPolicy policy = RelationPolicy::extend) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open triple file: " + path);
  std::vector<Triple> out;
  std::set<Triple> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError(path, lineno,
                       "expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw ParseError(path, lineno, "empty field");
    RelationId r;
    if (policy == RelationPolicy::require_known) {
      auto id = vocab.relation_id(fields[1]);
      if (!id || vocab.is_inverse(*id))
        throw InductiveContractError(path + ":" + std::to_string(lineno) +
                                     ": relation not seen at training time: " +
                                     std::string(fields[1]));
      r = *id;
    } else {
      r = vocab.intern_relation(fields[1]);
    }
    EntityId h = vocab.intern_entity(fields[0]);
    EntityId t = vocab.intern_entity(fields[2]);
    Triple tr{h, r, t};
    if (seen.insert(tr).second) out.push_back(tr);
  }
  return out;
}

struct LoadResult {
  std::vector<Triple> triples;
  Vocabulary vocab;
};

inline LoadResult load_triples(const std::string& path) {
  LoadResult res;
  res.triples = load_triples(path, res.vocab);
  return res;
}

// Immutable triple store over dense ids. Built once from forward triples;
// by default every (h, r, t) is augmented with (t, inverse(r), h), after which
// all indexes are fixed:
//   neighbor_relations(e)     relations (forward or inverse) leaving e
//   entities_with_relation(r) entities whose neighborhood contains r
//   neighbors(e, r)           tails of edges (e, r, *)
// Lookups return sorted views; nothing is recomputed per query.
class KnowledgeGraph {
 public:
  KnowledgeGraph(std::vector<Triple> forward, Vocabulary vocab,
                 InverseAugmentation aug = InverseAugmentation::enabled)
      : vocab_(std::move(vocab)) {
    for (const Triple& t : forward) {
      if (t.h >= vocab_.num_entities() || t.t >= vocab_.num_entities() ||
          t.r >= vocab_.num_relations())
        throw DataError("triple references id outside the vocabulary");
    }
    forward_ = std::move(forward);
    std::sort(forward_.begin(), forward_.end());
    forward_.erase(std::unique(forward_.begin(), forward_.end()), forward_.end());

    edges_ = forward_;
    if (aug == InverseAugmentation::enabled) {
      edges_.reserve(2 * forward_.size());
      for (const Triple& t : forward_)
        edges_.push_back(Triple{t.t, vocab_.inverse(t.r), t.h});
      std::sort(edges_.begin(), edges_.end());
      edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    adj_.resize(vocab_.num_entities());
    for (const Triple& t : edges_) adj_[t.h].emplace_back(t.r, t.t);

    entity_nr_.resize(vocab_.num_entities());
    relation_entities_.resize(vocab_.num_relation_ids());
    for (EntityId e = 0; e < adj_.size(); ++e) {
      RelationId last = 0;
      bool first = true;
      for (const auto& [r, t] : adj_[e]) {
        if (first || r != last) {
          entity_nr_[e].push_back(r);
          relation_entities_[r].push_back(e);
          last = r;
          first = false;
        }
      }
    }
  }

  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<Triple>& forward_triples() const { return forward_; }
  const std::vector<Triple>& edges() const { return edges_; }
  std::size_t num_entities() const { return adj_.size(); }
  std::size_t num_relation_ids() const { return relation_entities_.size(); }

  // NR_e: distinct relations on edges leaving e.
  const IdSet& neighbor_relations(EntityId e) const {
    check_entity(e);
    return entity_nr_[e];
  }

  // Entities whose neighborhood contains r.
  const IdSet& entities_with_relation(RelationId r) const {
    check_relation(r);
    return relation_entities_[r];
  }

  std::size_t relation_entity_count(RelationId r) const {
    return entities_with_relation(r).size();
  }

  // Edges (e, r, *) as a sorted view of (relation, tail) pairs.
  std::span<const std::pair<RelationId, EntityId>> neighbors(EntityId e,
                                                             RelationId r) const {
    check_entity(e);
    check_relation(r);
    const auto& row = adj_[e];
    auto lo = std::lower_bound(row.begin(), row.end(),
                               std::make_pair(r, EntityId{0}));
    auto hi = std::upper_bound(lo, row.end(),
                               std::make_pair(r, std::numeric_limits<EntityId>::max()));
    if (lo == hi) return {};
    return {&*lo, static_cast<std::size_t>(hi - lo)};
  }

  bool has_edge(EntityId h, RelationId r, EntityId t) const {
    check_entity(h);
    check_relation(r);
    const auto& row = adj_[h];
    return std::binary_search(row.begin(), row.end(), std::make_pair(r, t));
  }

  // NR_r: every relation co-occurring with r in some entity neighborhood.
  IdSet neighbor_relations_of_relation(RelationId r) const {
    check_relation(r);
    IdSet out;
    for (EntityId e : relation_entities_[r])
      out.insert(out.end(), entity_nr_[e].begin(), entity_nr_[e].end());
    sort_unique(out);
    return out;
  }

  RelationId inverse(RelationId r) const { return vocab_.inverse(r); }

  GraphStats stats() const {
    GraphStats s;
    s.num_triples = forward_.size();
    IdSet ents, rels;
    ents.reserve(2 * forward_.size());
    rels.reserve(forward_.size());
    for (const Triple& t : forward_) {
      ents.push_back(t.h);
      ents.push_back(t.t);
      rels.push_back(t.r);
    }
    sort_unique(ents);
    sort_unique(rels);
    s.num_entities = ents.size();
    s.num_relations = rels.size();
    return s;
  }

 private:
  void check_entity(EntityId e) const {
    if (e >= adj_.size())
      throw LookupError("entity id " + std::to_string(e) + " out of range");
  }
  void check_relation(RelationId r) const {
    if (r >= relation_entities_.size())
      throw LookupError("relation id " + std::to_string(r) + " out of range");
  }

  Vocabulary vocab_;
  std::vector<Triple> forward_;
  std::vector<Triple> edges_;
  std::vector<std::vector<std::pair<RelationId, EntityId>>> adj_;
  std::vector<IdSet> entity_nr_;
  std::vector<IdSet> relation_entities_;
};

inline KnowledgeGraph build_graph(std::vector<Triple> forward, Vocabulary vocab,
                                  InverseAugmentation aug = InverseAugmentation::enabled) {
  return KnowledgeGraph(std::move(forward), std::move(vocab), aug);
}

}  // namespace ctxpool
