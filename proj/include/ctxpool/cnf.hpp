#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "ctxpool/kg.hpp"
#include "ctxpool/relevance.hpp"
#include "ctxpool/set_ops.hpp"
#include "ctxpool/util.hpp"

namespace ctxpool {

enum class CnfAlgorithm { exhaustive, optimized };
enum class MetricMode { precision_only, recall_only, both };

inline std::string to_string(CnfAlgorithm a) {
  return a == CnfAlgorithm::exhaustive ? "exhaustive" : "optimized";
}

inline std::string to_string(MetricMode m) {
  switch (m) {
    case MetricMode::precision_only: return "precision";
    case MetricMode::recall_only: return "recall";
    default: return "both";
  }
}

inline std::optional<MetricMode> parse_metric_mode(std::string_view s) {
  if (s == "precision") return MetricMode::precision_only;
  if (s == "recall") return MetricMode::recall_only;
  if (s == "both") return MetricMode::both;
  return std::nullopt;
}

inline std::optional<CnfAlgorithm> parse_algorithm(std::string_view s) {
  if (s == "exhaustive") return CnfAlgorithm::exhaustive;
  if (s == "optimized") return CnfAlgorithm::optimized;
  return std::nullopt;
}

// Half-open size window [lo, hi) for exhaustive candidate sets.
struct SizeRange {
  std::size_t lo = 0;
  std::size_t hi = 0;

  friend bool operator==(const SizeRange&, const SizeRange&) = default;
};

struct TrainConfig {
  CnfAlgorithm algorithm = CnfAlgorithm::optimized;
  MetricMode metric = MetricMode::both;
  double threshold_pre = 1e-2;
  double threshold_rec = 1e-2;
  // Exhaustive only; absent means every subset size is admitted.
  std::optional<SizeRange> set_sizes;
  // Without a size window, a neighborhood whose subset space would exceed
  // 2^neighborhood_cap aborts training instead of silently exploding.
  std::size_t neighborhood_cap = 20;
  unsigned threads = 0;  // 0 = hardware concurrency
};

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.threshold_pre > 0.0 && cfg.threshold_pre < 1.0))
    throw UsageError("precision threshold must lie strictly between 0 and 1");
  if (!(cfg.threshold_rec > 0.0 && cfg.threshold_rec < 1.0))
    throw UsageError("recall threshold must lie strictly between 0 and 1");
  if (cfg.set_sizes) {
    if (cfg.algorithm != CnfAlgorithm::exhaustive)
      throw UsageError("a set-size range applies to exhaustive training only");
    if (cfg.set_sizes->lo >= cfg.set_sizes->hi)
      throw UsageError("set-size range must satisfy lo < hi");
  }
}

inline bool passes_thresholds(MetricMode mode, const RelevanceScore& pre,
                              const RelevanceScore& rec, double thr_pre,
                              double thr_rec) {
  switch (mode) {
    case MetricMode::precision_only: return pre.exceeds(thr_pre);
    case MetricMode::recall_only: return rec.exceeds(thr_rec);
    default: return pre.exceeds(thr_pre) && rec.exceeds(thr_rec);
  }
}

// A neighbor-relation set together with the scores it earned at training time.
struct ScoredSet {
  IdSet rels;  // sorted, never contains the owning relation
  RelevanceScore precision;
  RelevanceScore recall;

  friend bool operator==(const ScoredSet&, const ScoredSet&) = default;
};

// Canonical family order: larger sets first, ties lexicographic by sorted ids.
// Generation walks this order with strict improvement, so the largest
// similarity-maximizing set wins deterministically.
inline bool canonical_set_less(const IdSet& a, const IdSet& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a < b;
}

struct ScoredNeighbor {
  RelationId rel;
  RelevanceScore precision;
  RelevanceScore recall;

  friend bool operator==(const ScoredNeighbor&, const ScoredNeighbor&) = default;
};

// Families of scored neighbor sets, one family per relation id (forward and
// inverse). Relations never observed at training time have empty families.
struct ExhaustiveCnf {
  std::vector<std::vector<ScoredSet>> families;
  MetricMode metric = MetricMode::both;
  double threshold_pre = 0;
  double threshold_rec = 0;

  const std::vector<ScoredSet>& family(RelationId r) const {
    if (r >= families.size())
      throw LookupError("relation id " + std::to_string(r) + " out of range");
    return families[r];
  }

  friend bool operator==(const ExhaustiveCnf&, const ExhaustiveCnf&) = default;
};

// Singleton neighbor tables: for each relation, the individually relevant
// neighbor relations with their scores, sorted by relation id.
struct OptimizedCnf {
  std::vector<std::vector<ScoredNeighbor>> entries;
  MetricMode metric = MetricMode::both;
  double threshold_pre = 0;
  double threshold_rec = 0;

  const std::vector<ScoredNeighbor>& entry(RelationId r) const {
    if (r >= entries.size())
      throw LookupError("relation id " + std::to_string(r) + " out of range");
    return entries[r];
  }

  friend bool operator==(const OptimizedCnf&, const OptimizedCnf&) = default;
};

using Cnf = std::variant<ExhaustiveCnf, OptimizedCnf>;

namespace detail {

struct IdSetHash {
  std::size_t operator()(const IdSet& v) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint32_t x : v) {
      h ^= x;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Distinct entity neighborhoods with multiplicities, plus a relation-indexed
// view. Both trainers work per distinct neighborhood rather than per entity:
// identical neighborhoods yield identical candidate sets and scores.
struct NeighborhoodCensus {
  std::vector<IdSet> sets;                      // deterministic (sorted) order
  std::vector<std::uint32_t> mult;              // entities sharing each set
  std::vector<std::vector<std::uint32_t>> by_relation;  // relation -> set indexes

  static NeighborhoodCensus build(const KnowledgeGraph& g) {
    std::map<IdSet, std::uint32_t> counts;
    for (EntityId e = 0; e < g.num_entities(); ++e) {
      const IdSet& nr = g.neighbor_relations(e);
      if (!nr.empty()) ++counts[nr];
    }
    NeighborhoodCensus c;
    c.sets.reserve(counts.size());
    c.mult.reserve(counts.size());
    c.by_relation.resize(g.num_relation_ids());
    for (auto& [set, m] : counts) {
      std::uint32_t idx = static_cast<std::uint32_t>(c.sets.size());
      for (RelationId r : set) c.by_relation[r].push_back(idx);
      c.sets.push_back(set);
      c.mult.push_back(m);
    }
    return c;
  }
};

// Subset enumeration state for one query relation: walks every subset of each
// candidate pool in lexicographic DFS order, carrying the entity list of the
// current prefix as an incrementally intersected view. A per-relation visited
// table memoizes (subset, relation) scores across neighborhoods sharing
// subsets, which changes cost, never results.
class SubsetScorer {
 public:
  SubsetScorer(const KnowledgeGraph& g, const TrainConfig& cfg, RelationId ri)
      : g_(g),
        cfg_(cfg),
        ri_(ri),
        ri_entities_(g.entities_with_relation(ri)),
        lo_(cfg.set_sizes ? cfg.set_sizes->lo : 0),
        hi_(cfg.set_sizes ? cfg.set_sizes->hi : SIZE_MAX) {}

  void run_pool(const IdSet& pool, std::vector<ScoredSet>& out) {
    if (!cfg_.set_sizes && pool.size() > cfg_.neighborhood_cap)
      throw CapacityError("relation " + g_.vocab().relation_name(ri_) +
                          ": neighborhood of size " + std::to_string(pool.size()) +
                          " exceeds the subset-enumeration cap of " +
                          std::to_string(cfg_.neighborhood_cap) +
                          " (set a size range to proceed)");
    if (bufs_.size() < pool.size() + 1) bufs_.resize(pool.size() + 1);
    prefix_.clear();
    if (0 >= lo_ && 0 < hi_) emit_empty(out);
    if (hi_ > 1)
      for (std::size_t i = 0; i < pool.size(); ++i)
        descend(pool, i, std::span<const EntityId>(g_.entities_with_relation(pool[i])), out);
  }

 private:
  void emit_empty(std::vector<ScoredSet>& out) {
    if (!visited_.insert(IdSet{}).second) return;
    RelevanceScore pre{ri_entities_.size(), g_.num_entities()};
    RelevanceScore rec{ri_entities_.size(), ri_entities_.size()};
    if (passes_thresholds(cfg_.metric, pre, rec, cfg_.threshold_pre, cfg_.threshold_rec))
      out.push_back(ScoredSet{IdSet{}, pre, rec});
  }

  static std::size_t span_intersect_size(std::span<const EntityId> a, const IdSet& b) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) ++ia;
      else if (*ib < *ia) ++ib;
      else { ++n; ++ia; ++ib; }
    }
    return n;
  }

  void descend(const IdSet& pool, std::size_t idx, std::span<const EntityId> ents,
               std::vector<ScoredSet>& out) {
    if (ents.empty()) return;  // all supersets score undefined, never pass
    prefix_.push_back(pool[idx]);
    std::size_t depth = prefix_.size();
    if (depth >= lo_ && depth < hi_ && visited_.insert(prefix_).second) {
      std::uint64_t num = span_intersect_size(ents, ri_entities_);
      RelevanceScore pre{num, ents.size()};
      RelevanceScore rec{num, ri_entities_.size()};
      if (passes_thresholds(cfg_.metric, pre, rec, cfg_.threshold_pre, cfg_.threshold_rec))
        out.push_back(ScoredSet{prefix_, pre, rec});
    }
    if (depth + 1 < hi_) {
      for (std::size_t j = idx + 1; j < pool.size(); ++j) {
        IdSet& buf = bufs_[depth + 1];
        const IdSet& next = g_.entities_with_relation(pool[j]);
        buf.clear();
        std::set_intersection(ents.begin(), ents.end(), next.begin(), next.end(),
                              std::back_inserter(buf));
        descend(pool, j, std::span<const EntityId>(buf), out);
      }
    }
    prefix_.pop_back();
  }

  const KnowledgeGraph& g_;
  const TrainConfig& cfg_;
  RelationId ri_;
  const IdSet& ri_entities_;
  std::size_t lo_, hi_;
  IdSet prefix_;
  std::vector<IdSet> bufs_;
  std::unordered_set<IdSet, IdSetHash> visited_;
};

}  // namespace detail

// Trains families by enumerating, for each relation r, the subsets of every
// observed neighborhood containing r (minus r itself) and keeping those whose
// scores strictly exceed the active thresholds. Scores are exact ratios
// |entities covering S and r| over |entities covering S| (precision) or over
// |entities with r| (recall).
inline ExhaustiveCnf cnf_train_exhaustive(const KnowledgeGraph& g,
                                          const TrainConfig& cfg) {
  TrainConfig local = cfg;
  local.algorithm = CnfAlgorithm::exhaustive;
  validate(local);
  auto census = detail::NeighborhoodCensus::build(g);
  ExhaustiveCnf cnf;
  cnf.metric = local.metric;
  cnf.threshold_pre = local.threshold_pre;
  cnf.threshold_rec = local.threshold_rec;
  cnf.families.resize(g.num_relation_ids());
  parallel_for(g.num_relation_ids(), local.threads, [&](std::size_t ri) {
    const auto& with_ri = census.by_relation[ri];
    if (with_ri.empty()) return;
    detail::SubsetScorer scorer(g, local, static_cast<RelationId>(ri));
    auto& family = cnf.families[ri];
    IdSet pool;
    for (std::uint32_t idx : with_ri) {
      const IdSet& nbhd = census.sets[idx];
      pool.clear();
      for (RelationId r : nbhd)
        if (r != ri) pool.push_back(r);
      scorer.run_pool(pool, family);
    }
    std::sort(family.begin(), family.end(),
              [](const ScoredSet& a, const ScoredSet& b) {
                return canonical_set_less(a.rels, b.rels);
              });
  });
  return cnf;
}

// Trains singleton tables from pairwise neighborhood co-occurrence counts.
// Each (candidate, relation) pair is scored once; the scores coincide exactly
// with the size-1 stratum of exhaustive training.
inline OptimizedCnf cnf_train_optimized(const KnowledgeGraph& g,
                                        const TrainConfig& cfg) {
  TrainConfig local = cfg;
  local.algorithm = CnfAlgorithm::optimized;
  validate(local);
  auto census = detail::NeighborhoodCensus::build(g);
  std::size_t n2 = g.num_relation_ids();
  OptimizedCnf cnf;
  cnf.metric = local.metric;
  cnf.threshold_pre = local.threshold_pre;
  cnf.threshold_rec = local.threshold_rec;
  cnf.entries.resize(n2);

  // |{e : a, b both in NR_e}| for every relation pair, via distinct
  // neighborhoods weighted by multiplicity. Dense when the relation id space
  // is small, per-relation hash maps otherwise.
  const bool dense = n2 <= 4096;
  std::vector<std::uint32_t> mat;
  std::vector<std::map<RelationId, std::uint32_t>> sparse;
  if (dense) mat.assign(n2 * n2, 0);
  else sparse.resize(n2);
  for (std::size_t s = 0; s < census.sets.size(); ++s) {
    const IdSet& set = census.sets[s];
    std::uint32_t m = census.mult[s];
    for (std::size_t i = 0; i < set.size(); ++i)
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        if (dense) {
          mat[std::size_t(set[i]) * n2 + set[j]] += m;
          mat[std::size_t(set[j]) * n2 + set[i]] += m;
        } else {
          sparse[set[i]][set[j]] += m;
          sparse[set[j]][set[i]] += m;
        }
      }
  }

  parallel_for(n2, local.threads, [&](std::size_t ri) {
    std::uint64_t cnt_ri = g.relation_entity_count(static_cast<RelationId>(ri));
    if (cnt_ri == 0) return;
    auto consider = [&](RelationId cand, std::uint64_t both) {
      if (both == 0 || cand == ri) return;
      RelevanceScore pre{both, g.relation_entity_count(cand)};
      RelevanceScore rec{both, cnt_ri};
      if (passes_thresholds(local.metric, pre, rec, local.threshold_pre,
                            local.threshold_rec))
        cnf.entries[ri].push_back(ScoredNeighbor{cand, pre, rec});
    };
    if (dense) {
      for (std::size_t cand = 0; cand < n2; ++cand)
        consider(static_cast<RelationId>(cand), mat[ri * n2 + cand]);
    } else {
      for (const auto& [cand, both] : sparse[ri]) consider(cand, both);
    }
  });
  return cnf;
}

// The set in r's family most similar to the head entity's neighborhood:
// Jaccard similarity compared as exact fractions, strict improvement over zero
// while walking canonical order, so the largest maximizing set wins. Null when
// nothing overlaps.
inline const ScoredSet* cnf_select_exhaustive(const KnowledgeGraph& g,
                                              const ExhaustiveCnf& cnf, EntityId h,
                                              RelationId r) {
  const auto& family = cnf.family(r);
  const IdSet& nr_h = g.neighbor_relations(h);
  std::uint64_t best_num = 0, best_den = 1;
  const ScoredSet* best = nullptr;
  for (const ScoredSet& cand : family) {
    std::uint64_t inter = intersect_size(cand.rels, nr_h);
    std::uint64_t uni = cand.rels.size() + nr_h.size() - inter;
    if (uni == 0) continue;  // both empty: similarity undefined, never wins
    if (inter * best_den > best_num * uni) {
      best_num = inter;
      best_den = uni;
      best = &cand;
    }
  }
  return best;
}

// The winning set's overlap with the head's neighborhood (empty if no winner).
inline IdSet cnf_generate_exhaustive(const KnowledgeGraph& g, const ExhaustiveCnf& cnf,
                                     EntityId h, RelationId r) {
  const ScoredSet* best = cnf_select_exhaustive(g, cnf, h, r);
  if (!best) return {};
  return set_intersect(best->rels, g.neighbor_relations(h));
}

// Singleton table lookup: the trained neighbors of r present around h.
inline IdSet cnf_generate_optimized(const KnowledgeGraph& g, const OptimizedCnf& cnf,
                                    EntityId h, RelationId r) {
  const auto& entry = cnf.entry(r);
  const IdSet& nr_h = g.neighbor_relations(h);
  IdSet out;
  auto it = nr_h.begin();
  for (const ScoredNeighbor& n : entry) {
    it = std::lower_bound(it, nr_h.end(), n.rel);
    if (it == nr_h.end()) break;
    if (*it == n.rel) out.push_back(n.rel);
  }
  return out;
}

inline IdSet cnf_generate(const KnowledgeGraph& g, const Cnf& cnf, EntityId h,
                          RelationId r) {
  if (const auto* ex = std::get_if<ExhaustiveCnf>(&cnf))
    return cnf_generate_exhaustive(g, *ex, h, r);
  return cnf_generate_optimized(g, std::get<OptimizedCnf>(cnf), h, r);
}

// ---- serialization ----------------------------------------------------------
//
//   #cnf-version 1
//   #algorithm exhaustive|optimized
//   #metric precision|recall|both
//   #threshold_pre <value>
//   #threshold_rec <value>
//   relation<TAB>pre num/den<TAB>rec num/den<TAB>neighbor[,neighbor...]
//
// Additional '#' lines after the five headers are free-form comments (the CLI
// records provenance there) and are ignored on read. Records are sorted by
// relation name, then canonical set order; neighbor names within a record are
// sorted bytewise. Scores stay exact rationals, so a round trip is lossless
// and re-serialization is byte-identical.

namespace detail {

inline void check_serializable_name(const std::string& name, bool forbid_comma) {
  if (name.empty() || name[0] == '#' || name.find('\t') != std::string::npos ||
      name.find('\n') != std::string::npos ||
      (forbid_comma && name.find(',') != std::string::npos))
    throw FormatError("relation name not serializable: " + name);
}

inline std::string score_text(const RelevanceScore& s) {
  return std::to_string(s.num) + "/" + std::to_string(s.den);
}

inline RelevanceScore parse_score(std::string_view text, std::size_t lineno) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos)
    throw FormatError(lineno, "score is not a num/den ratio");
  RelevanceScore s;
  auto p1 = std::from_chars(text.data(), text.data() + slash, s.num);
  auto p2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), s.den);
  if (p1.ec != std::errc{} || p1.ptr != text.data() + slash ||
      p2.ec != std::errc{} || p2.ptr != text.data() + text.size())
    throw FormatError(lineno, "score is not a num/den ratio");
  return s;
}

inline void write_headers(std::ostream& out, CnfAlgorithm algo, MetricMode metric,
                          double thr_pre, double thr_rec,
                          const std::vector<std::string>& extra) {
  out << "#cnf-version 1\n";
  out << "#algorithm " << to_string(algo) << "\n";
  out << "#metric " << to_string(metric) << "\n";
  out << "#threshold_pre " << format_double(thr_pre) << "\n";
  out << "#threshold_rec " << format_double(thr_rec) << "\n";
  for (const auto& line : extra) out << "# " << line << "\n";
}

}  // namespace detail

inline void serialize_cnf(const ExhaustiveCnf& cnf, const Vocabulary& vocab,
                          std::ostream& out,
                          const std::vector<std::string>& extra_comments = {}) {
  detail::write_headers(out, CnfAlgorithm::exhaustive, cnf.metric,
                        cnf.threshold_pre, cnf.threshold_rec, extra_comments);
  std::vector<std::pair<std::string, RelationId>> order;
  for (RelationId r = 0; r < cnf.families.size(); ++r)
    if (!cnf.families[r].empty()) order.emplace_back(vocab.relation_name(r), r);
  std::sort(order.begin(), order.end());
  for (const auto& [name, r] : order) {
    detail::check_serializable_name(name, false);
    for (const ScoredSet& s : cnf.families[r]) {
      std::vector<std::string> members;
      members.reserve(s.rels.size());
      for (RelationId m : s.rels) {
        std::string mn = vocab.relation_name(m);
        detail::check_serializable_name(mn, true);
        members.push_back(std::move(mn));
      }
      std::sort(members.begin(), members.end());
      out << name << '\t' << detail::score_text(s.precision) << '\t'
          << detail::score_text(s.recall) << '\t';
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out << ',';
        out << members[i];
      }
      out << '\n';
    }
  }
}

inline void serialize_cnf(const OptimizedCnf& cnf, const Vocabulary& vocab,
                          std::ostream& out,
                          const std::vector<std::string>& extra_comments = {}) {
  detail::write_headers(out, CnfAlgorithm::optimized, cnf.metric,
                        cnf.threshold_pre, cnf.threshold_rec, extra_comments);
  struct Row {
    std::string rel, neighbor;
    const ScoredNeighbor* entry;
  };
  std::vector<Row> rows;
  for (RelationId r = 0; r < cnf.entries.size(); ++r) {
    if (cnf.entries[r].empty()) continue;
    std::string name = vocab.relation_name(r);
    detail::check_serializable_name(name, false);
    for (const ScoredNeighbor& n : cnf.entries[r]) {
      std::string nn = vocab.relation_name(n.rel);
      detail::check_serializable_name(nn, false);
      rows.push_back(Row{name, std::move(nn), &n});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    return a.neighbor < b.neighbor;
  });
  for (const Row& row : rows)
    out << row.rel << '\t' << detail::score_text(row.entry->precision) << '\t'
        << detail::score_text(row.entry->recall) << '\t' << row.neighbor << '\n';
}

inline void serialize_cnf(const Cnf& cnf, const Vocabulary& vocab, std::ostream& out,
                          const std::vector<std::string>& extra_comments = {}) {
  if (const auto* ex = std::get_if<ExhaustiveCnf>(&cnf))
    serialize_cnf(*ex, vocab, out, extra_comments);
  else
    serialize_cnf(std::get<OptimizedCnf>(cnf), vocab, out, extra_comments);
}

inline Cnf deserialize_cnf(std::istream& in, const Vocabulary& vocab) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "#cnf-version 1")
    throw FormatError(lineno ? lineno : 1,
                      "expected '#cnf-version 1' header");
  auto header_value = [&](std::string_view key) -> std::string {
    if (!next_line())
      throw FormatError(lineno + 1, "truncated header: missing " + std::string(key));
    std::string prefix = "#" + std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0)
      throw FormatError(lineno, "expected '#" + std::string(key) + "' header");
    return line.substr(prefix.size());
  };

  auto algo = parse_algorithm(header_value("algorithm"));
  if (!algo) throw FormatError(lineno, "unknown algorithm");
  auto metric = parse_metric_mode(header_value("metric"));
  if (!metric) throw FormatError(lineno, "unknown metric mode");
  auto parse_thr = [&](std::string text) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      throw FormatError(lineno, "threshold is not a number");
    return v;
  };
  double thr_pre = parse_thr(header_value("threshold_pre"));
  double thr_rec = parse_thr(header_value("threshold_rec"));

  auto resolve = [&](std::string_view name) -> RelationId {
    auto id = vocab.relation_id(name);
    if (!id)
      throw FormatError(lineno, "unknown relation: " + std::string(name));
    return *id;
  };

  ExhaustiveCnf ex;
  OptimizedCnf opt;
  bool exhaustive = *algo == CnfAlgorithm::exhaustive;
  ex.metric = opt.metric = *metric;
  ex.threshold_pre = opt.threshold_pre = thr_pre;
  ex.threshold_rec = opt.threshold_rec = thr_rec;
  ex.families.resize(exhaustive ? vocab.num_relation_ids() : 0);
  opt.entries.resize(exhaustive ? 0 : vocab.num_relation_ids());
  std::vector<std::unordered_set<IdSet, detail::IdSetHash>> seen(
      vocab.num_relation_ids());

  while (next_line()) {
    if (line.empty()) continue;
    if (line[0] == '#') continue;  // provenance comments
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw FormatError(lineno, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    RelationId r = resolve(fields[0]);
    RelevanceScore pre = detail::parse_score(fields[1], lineno);
    RelevanceScore rec = detail::parse_score(fields[2], lineno);
    IdSet members;
    if (exhaustive) {
      if (!fields[3].empty())
        for (std::string_view part : split(fields[3], ','))
          members.push_back(resolve(part));
      sort_unique(members);
    } else {
      if (fields[3].empty())
        throw FormatError(lineno, "missing neighbor relation");
      members.push_back(resolve(fields[3]));
    }
    if (!seen[r].insert(members).second)
      throw FormatError(lineno, "duplicate record for relation " +
                                    std::string(fields[0]));
    if (exhaustive)
      ex.families[r].push_back(ScoredSet{std::move(members), pre, rec});
    else
      opt.entries[r].push_back(ScoredNeighbor{members[0], pre, rec});
  }

  if (exhaustive) {
    for (auto& family : ex.families)
      std::sort(family.begin(), family.end(),
                [](const ScoredSet& a, const ScoredSet& b) {
                  return canonical_set_less(a.rels, b.rels);
                });
    return ex;
  }
  for (auto& entry : opt.entries)
    std::sort(entry.begin(), entry.end(),
              [](const ScoredNeighbor& a, const ScoredNeighbor& b) {
                return a.rel < b.rel;
              });
  return opt;
}

}  // namespace ctxpool
