#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ctxpool/cnf.hpp"
#include "ctxpool/kg.hpp"
#include "ctxpool/relevance.hpp"
#include "ctxpool/util.hpp"

namespace ctxpool {

// Reference implementations kept deliberately naive: they rebuild entity
// neighborhoods from the raw edge list and count by explicit subset checks,
// sharing none of the indexed fast paths they are used to validate.

namespace detail {

inline std::vector<IdSet> naive_neighborhoods(const KnowledgeGraph& g) {
  std::vector<IdSet> nr(g.num_entities());
  for (const Triple& t : g.edges()) nr[t.h].push_back(t.r);
  for (IdSet& s : nr) sort_unique(s);
  return nr;
}

inline bool naive_subset(const IdSet& needle, const IdSet& hay) {
  for (RelationId r : needle) {
    bool found = false;
    for (RelationId x : hay)
      if (x == r) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace detail

inline RelevanceScore naive_relevance(const KnowledgeGraph& g, const IdSet& nr,
                                      RelationId r, MetricKind kind) {
  IdSet query = nr;
  sort_unique(query);
  IdSet with_r = query;
  with_r.push_back(r);
  sort_unique(with_r);
  auto neighborhoods = detail::naive_neighborhoods(g);
  std::uint64_t num = 0, den = 0;
  for (const IdSet& ne : neighborhoods) {
    bool denom_hit = kind == MetricKind::precision
                         ? detail::naive_subset(query, ne)
                         : detail::naive_subset(IdSet{r}, ne);
    if (denom_hit) ++den;
    if (detail::naive_subset(with_r, ne)) ++num;
  }
  return RelevanceScore{num, den};
}

// Direct family construction for one relation: every subset of the relations
// co-occurring with r (r itself excluded), kept when realized inside some
// observed neighborhood and scored naively. Thresholds are applied exactly as
// given — deliberately unvalidated so callers can pass vacuous bounds.
inline std::vector<ScoredSet> brute_force_cnf(const KnowledgeGraph& g, RelationId r,
                                              const TrainConfig& cfg) {
  auto neighborhoods = detail::naive_neighborhoods(g);
  IdSet pool;
  for (const IdSet& ne : neighborhoods)
    if (detail::naive_subset(IdSet{r}, ne))
      for (RelationId x : ne)
        if (x != r) pool.push_back(x);
  sort_unique(pool);
  if (pool.size() > 20)
    throw CapacityError("brute-force enumeration over " +
                        std::to_string(pool.size()) + " relations is unreasonable");

  std::size_t lo = cfg.set_sizes ? cfg.set_sizes->lo : 0;
  std::size_t hi = cfg.set_sizes ? cfg.set_sizes->hi : SIZE_MAX;
  std::vector<ScoredSet> family;
  for (std::uint64_t mask = 0; mask < (1ull << pool.size()); ++mask) {
    IdSet subset;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (1ull << i)) subset.push_back(pool[i]);
    if (subset.size() < lo || subset.size() >= hi) continue;
    bool realized = false;
    for (const IdSet& ne : neighborhoods)
      if (detail::naive_subset(subset, ne)) {
        realized = true;
        break;
      }
    if (!realized) continue;
    RelevanceScore pre = naive_relevance(g, subset, r, MetricKind::precision);
    RelevanceScore rec = naive_relevance(g, subset, r, MetricKind::recall);
    if (passes_thresholds(cfg.metric, pre, rec, cfg.threshold_pre, cfg.threshold_rec))
      family.push_back(ScoredSet{std::move(subset), pre, rec});
  }
  std::sort(family.begin(), family.end(), [](const ScoredSet& a, const ScoredSet& b) {
    return canonical_set_less(a.rels, b.rels);
  });
  return family;
}

// Random sparse graph for differential testing: a handful of entities and
// forward relations, edge count around twice the entity count, self-loops and
// isolated entities allowed. Shape varies with the rng state.
inline KnowledgeGraph random_graph(Rng& rng, std::size_t max_entities = 50,
                                   std::size_t max_relations = 8,
                                   InverseAugmentation aug = InverseAugmentation::enabled) {
  std::size_t n_e = 2 + rng.below(max_entities > 2 ? max_entities - 1 : 1);
  std::size_t n_r = 1 + rng.below(max_relations);
  Vocabulary vocab;
  for (std::size_t i = 0; i < n_e; ++i) vocab.intern_entity("e" + std::to_string(i));
  for (std::size_t j = 0; j < n_r; ++j) vocab.intern_relation("r" + std::to_string(j));
  std::size_t n_edges = 1 + rng.below(3 * n_e);
  std::vector<Triple> triples;
  triples.reserve(n_edges);
  for (std::size_t k = 0; k < n_edges; ++k)
    triples.push_back(Triple{static_cast<EntityId>(rng.below(n_e)),
                             static_cast<RelationId>(rng.below(n_r)),
                             static_cast<EntityId>(rng.below(n_e))});
  return KnowledgeGraph(std::move(triples), std::move(vocab), aug);
}

// ---- synthetic graphs with known structure ----------------------------------

// Population of num_entities draw entities named e0..; for each relation rj an
// independent Bernoulli(relation_probs[j]) decides whether the entity gets one
// rj-edge to a fresh sink. Sinks absorb edges without ever gaining any of
// their own, and inverse augmentation is off, so neighborhood memberships are
// exactly the independent draws.
struct SyntheticSpec {
  std::size_t num_entities = 0;
  std::vector<double> relation_probs;
  std::uint64_t seed = 0;
};

inline KnowledgeGraph generate_synthetic(const SyntheticSpec& spec) {
  Vocabulary vocab;
  for (std::size_t i = 0; i < spec.num_entities; ++i)
    vocab.intern_entity("e" + std::to_string(i));
  for (std::size_t j = 0; j < spec.relation_probs.size(); ++j)
    vocab.intern_relation("r" + std::to_string(j));
  Rng rng(spec.seed);
  std::vector<Triple> triples;
  std::size_t sink = 0;
  for (std::size_t i = 0; i < spec.num_entities; ++i)
    for (std::size_t j = 0; j < spec.relation_probs.size(); ++j)
      if (rng.bernoulli(spec.relation_probs[j])) {
        EntityId t = vocab.intern_entity("s" + std::to_string(sink++));
        triples.push_back(Triple{static_cast<EntityId>(i),
                                 static_cast<RelationId>(j), t});
      }
  return KnowledgeGraph(std::move(triples), std::move(vocab),
                        InverseAugmentation::disabled);
}

// Three relations where r1 and r2 co-occur exactly (every entity has both or
// neither) while r0 stays independent — the configuration under which the
// product identities must fail. All counts are exact by construction:
// recall({r1,r2}, r0) = 1/2 but the singleton product is 1/4.
inline KnowledgeGraph make_correlated_fixture(std::size_t population = 1000) {
  Vocabulary vocab;
  for (std::size_t i = 0; i < population; ++i)
    vocab.intern_entity("e" + std::to_string(i));
  vocab.intern_relation("r0");
  vocab.intern_relation("r1");
  vocab.intern_relation("r2");
  std::vector<Triple> triples;
  std::size_t sink = 0;
  auto add = [&](std::size_t e, RelationId r) {
    EntityId t = vocab.intern_entity("s" + std::to_string(sink++));
    triples.push_back(Triple{static_cast<EntityId>(e), r, t});
  };
  for (std::size_t i = 0; i < population; ++i) {
    if (i % 2 == 0) add(i, 0);
    if (i < population / 2) {
      add(i, 1);
      add(i, 2);
    }
  }
  return KnowledgeGraph(std::move(triples), std::move(vocab),
                        InverseAugmentation::disabled);
}

// ---- independence identity checks --------------------------------------------
//
// On a graph whose neighborhood memberships are independent per relation, the
// relevance of a set factors into its singletons:
//   recall(NR', r)                    = prod_i recall({ri}, r)
//   precision(NR', r) * P(r)^(|NR'|-1) = prod_i precision({ri}, r)
// with P(r) = |{e : r in NR_e}| / population. Deviations are measured on
// sampled (NR', r) combinations with all relations distinct.

struct IdentityStats {
  double max_dev = 0;
  double mean_dev = 0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

struct IndependenceReport {
  IdentityStats precision;
  IdentityStats recall;
  std::size_t population = 0;
};

// set_size = 2 checks the pairwise identities; larger sizes the extension.
// population is the number of entities subject to the membership draws (sink
// targets are not draws and take no part in P(r)).
inline IndependenceReport verify_independence_identities(const KnowledgeGraph& g,
                                                         std::size_t population,
                                                         std::size_t set_size,
                                                         std::size_t num_samples,
                                                         std::uint64_t seed) {
  if (set_size < 2) throw UsageError("identity checks need set sizes of at least 2");
  std::size_t nrel = g.vocab().num_relations();
  if (nrel < set_size + 1)
    throw UsageError("graph has too few relations for the requested set size");
  Rng rng(seed);
  IndependenceReport report;
  report.population = population;
  double pre_sum = 0, rec_sum = 0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    // set_size + 1 distinct relations; the last is the target r.
    IdSet chosen;
    while (chosen.size() < set_size + 1) {
      RelationId cand = static_cast<RelationId>(rng.below(nrel));
      if (!set_contains(chosen, cand)) {
        chosen.push_back(cand);
        std::sort(chosen.begin(), chosen.end());
      }
    }
    // Rotate which element is the target so r is not biased toward large ids.
    std::size_t pick = static_cast<std::size_t>(rng.below(chosen.size()));
    std::swap(chosen[pick], chosen[chosen.size() - 1]);
    RelationId r = chosen.back();
    IdSet nr(chosen.begin(), chosen.end() - 1);
    std::sort(nr.begin(), nr.end());

    RelevanceScore set_pre = rel_precision(g, nr, r);
    RelevanceScore set_rec = rel_recall(g, nr, r);
    std::uint64_t r_count = g.relation_entity_count(r);
    if (!set_pre.defined() || !set_rec.defined() || r_count == 0 || population == 0) {
      ++report.precision.skipped;
      ++report.recall.skipped;
      continue;
    }
    double p_r = static_cast<double>(r_count) / static_cast<double>(population);
    double pre_prod = 1, rec_prod = 1;
    bool ok = true;
    for (RelationId ri : nr) {
      RelevanceScore p = rel_precision(g, IdSet{ri}, r);
      RelevanceScore c = rel_recall(g, IdSet{ri}, r);
      if (!p.defined() || !c.defined()) {
        ok = false;
        break;
      }
      pre_prod *= p.value();
      rec_prod *= c.value();
    }
    if (!ok) {
      ++report.precision.skipped;
      ++report.recall.skipped;
      continue;
    }
    double pre_dev =
        std::abs(set_pre.value() * std::pow(p_r, static_cast<double>(set_size - 1)) -
                 pre_prod);
    double rec_dev = std::abs(set_rec.value() - rec_prod);
    report.precision.max_dev = std::max(report.precision.max_dev, pre_dev);
    report.recall.max_dev = std::max(report.recall.max_dev, rec_dev);
    pre_sum += pre_dev;
    rec_sum += rec_dev;
    ++report.precision.samples;
    ++report.recall.samples;
  }
  if (report.precision.samples) {
    report.precision.mean_dev = pre_sum / report.precision.samples;
    report.recall.mean_dev = rec_sum / report.recall.samples;
  }
  return report;
}

// Pairwise form (the base case of the identities above).
inline IndependenceReport verify_pair_identities(const KnowledgeGraph& g,
                                                 std::size_t population,
                                                 std::size_t num_samples,
                                                 std::uint64_t seed) {
  return verify_independence_identities(g, population, 2, num_samples, seed);
}

}  // namespace ctxpool
