#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ctxpool/cnf.hpp"
#include "ctxpool/kg.hpp"
#include "ctxpool/relevance.hpp"

namespace ctxpool {

// A frontier element: an entity to expand next, tagged with the relation of
// the edge that reached it. The tag decides which trained family guides the
// expansion (namely the family of its inverse).
struct FrontierEdge {
  EntityId entity;
  RelationId via;

  friend auto operator<=>(const FrontierEdge&, const FrontierEdge&) = default;
};

using Frontier = std::vector<FrontierEdge>;  // sorted, duplicate-free

// Hop-layered query-specific subgraph. layers has exactly the requested
// length; trailing layers stay empty once the frontier dies out.
struct ContextGraph {
  std::vector<std::vector<Triple>> layers;
  std::vector<Triple> union_edges;
};

inline constexpr std::size_t kUnlimitedEdges = std::numeric_limits<std::size_t>::max();

// Singleton relevance of a candidate expansion relation against the inverse
// of the frontier relation, both metrics. This is the score that decides
// admission when the guiding table was trained with singletons.
struct ContextScore {
  RelevanceScore precision;
  RelevanceScore recall;
};

inline ContextScore score_generator(const KnowledgeGraph& g, RelationId frontier_rel,
                                    RelationId candidate) {
  RelationId target = g.inverse(frontier_rel);
  return ContextScore{rel_precision(g, IdSet{candidate}, target),
                      rel_recall(g, IdSet{candidate}, target)};
}

// Relations admitted for expanding e, given the relation we arrived through:
// the trained family of inverse(via), narrowed to e's own neighborhood.
inline IdSet node_selector(const KnowledgeGraph& g, const Cnf& cnf, EntityId e,
                           RelationId via) {
  return cnf_generate(g, cnf, e, g.inverse(via));
}

struct StepResult {
  std::vector<Triple> edges;  // sorted, duplicate-free
  Frontier next;
};

// One expansion step: every frontier entity contributes all its edges labeled
// with an admitted relation; the tails become the next frontier.
inline StepResult context_pooling_step(const KnowledgeGraph& g, const Frontier& frontier,
                                       const Cnf& cnf,
                                       std::size_t max_layer_edges = kUnlimitedEdges) {
  StepResult res;
  for (const FrontierEdge& fe : frontier) {
    IdSet admitted = node_selector(g, cnf, fe.entity, fe.via);
    for (RelationId r : admitted) {
      for (const auto& [rel, tail] : g.neighbors(fe.entity, r)) {
        res.edges.push_back(Triple{fe.entity, rel, tail});
        res.next.push_back(FrontierEdge{tail, rel});
      }
    }
  }
  std::sort(res.edges.begin(), res.edges.end());
  res.edges.erase(std::unique(res.edges.begin(), res.edges.end()), res.edges.end());
  std::sort(res.next.begin(), res.next.end());
  res.next.erase(std::unique(res.next.begin(), res.next.end()), res.next.end());
  if (res.edges.size() > max_layer_edges)
    throw CapacityError("layer produced " + std::to_string(res.edges.size()) +
                        " edges, exceeding the cap of " +
                        std::to_string(max_layer_edges));
  return res;
}

// Expands the query (h, r, ?) for `hops` layers and unions them. The seed
// frontier is (h, inverse(r)), so the first selection asks what should
// surround the head of an r-edge. Tail queries (?, r, t) are handled by the
// caller rewriting them to (t, inverse(r), ?) first.
inline ContextGraph build_context_graph(const KnowledgeGraph& g, EntityId h,
                                        RelationId r, std::size_t hops, const Cnf& cnf,
                                        std::size_t max_layer_edges = kUnlimitedEdges) {
  if (hops < 1) throw UsageError("hop count must be at least 1");
  if (h >= g.num_entities())
    throw LookupError("entity id " + std::to_string(h) + " out of range");
  if (r >= g.num_relation_ids())
    throw LookupError("relation id " + std::to_string(r) + " out of range");
  ContextGraph cg;
  cg.layers.resize(hops);
  Frontier frontier{FrontierEdge{h, g.inverse(r)}};
  for (std::size_t l = 0; l < hops; ++l) {
    if (frontier.empty()) break;
    StepResult step = context_pooling_step(g, frontier, cnf, max_layer_edges);
    cg.layers[l] = std::move(step.edges);
    frontier = std::move(step.next);
  }
  for (const auto& layer : cg.layers)
    cg.union_edges.insert(cg.union_edges.end(), layer.begin(), layer.end());
  std::sort(cg.union_edges.begin(), cg.union_edges.end());
  cg.union_edges.erase(std::unique(cg.union_edges.begin(), cg.union_edges.end()),
                       cg.union_edges.end());
  return cg;
}

// Tab-separated export: hop, head, relation, tail — sorted by that tuple with
// names compared bytewise. '#' lines carry the column legend and any caller
// provenance; an empty context graph exports headers only. Re-exporting the
// same graph is byte-identical.
inline void export_context_graph(const ContextGraph& cg, const Vocabulary& vocab,
                                 std::ostream& out,
                                 const std::vector<std::string>& extra_comments = {}) {
  for (const auto& line : extra_comments) out << "# " << line << "\n";
  out << "#hop\thead\trelation\ttail\n";
  struct Row {
    std::size_t hop;
    std::string h, r, t;
  };
  std::vector<Row> rows;
  for (std::size_t l = 0; l < cg.layers.size(); ++l)
    for (const Triple& e : cg.layers[l])
      rows.push_back(Row{l + 1, vocab.entity_name(e.h), vocab.relation_name(e.r),
                         vocab.entity_name(e.t)});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.hop != b.hop) return a.hop < b.hop;
    if (a.h != b.h) return a.h < b.h;
    if (a.r != b.r) return a.r < b.r;
    return a.t < b.t;
  });
  for (const Row& row : rows)
    out << row.hop << '\t' << row.h << '\t' << row.r << '\t' << row.t << '\n';
}

}  // namespace ctxpool
