// Command-line front end: stats, train, query, pool, verify, bench.
//
// Exit codes: 0 success, 2 usage, 3 data, 4 capacity, 5 verification failure,
// 1 anything else.

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctxpool/bench.hpp"
#include "ctxpool/cnf.hpp"
#include "ctxpool/errors.hpp"
#include "ctxpool/kg.hpp"
#include "ctxpool/oracle.hpp"
#include "ctxpool/pooling.hpp"
#include "ctxpool/relevance.hpp"
#include "ctxpool/util.hpp"
#include "ctxpool/version.hpp"
#include "ctxpool/vocab.hpp"

namespace fs = std::filesystem;
using namespace ctxpool;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// --files values name splits inside the dataset directory.
std::vector<std::string> parse_files(const std::string& csv) {
  std::vector<std::string> out;
  for (std::string_view part : split(csv, ',')) {
    if (part != "train" && part != "valid" && part != "test")
      throw UsageError("unknown split '" + std::string(part) +
                       "' (expected train, valid, or test)");
    out.emplace_back(part);
  }
  if (out.empty()) throw UsageError("--files must name at least one split");
  return out;
}

std::optional<SizeRange> parse_size_range(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("--set-sizes expects LO:HI");
  SizeRange r;
  try {
    r.lo = std::stoull(std::string(parts[0]));
    r.hi = std::stoull(std::string(parts[1]));
  } catch (const std::exception&) {
    throw UsageError("--set-sizes expects integers LO:HI");
  }
  return r;
}

using InputList = std::vector<std::pair<std::string, std::string>>;  // path, digest

std::string split_path(const std::string& dir, const std::string& split) {
  return dir + "/" + split + ".txt";
}

void require_split_files(const std::string& dir, const std::vector<std::string>& files) {
  if (!fs::is_directory(dir)) throw UsageError("not a dataset directory: " + dir);
  for (const auto& f : files)
    if (!fs::is_regular_file(split_path(dir, f)))
      throw UsageError("dataset file missing: " + split_path(dir, f));
}

struct LoadedTriples {
  std::vector<Triple> triples;
  Vocabulary vocab;
  InputList inputs;
};

LoadedTriples load_splits(const std::string& dir, const std::vector<std::string>& files,
                          const Vocabulary* base, RelationPolicy policy) {
  require_split_files(dir, files);
  LoadedTriples out;
  if (base) out.vocab = *base;
  for (const auto& f : files) {
    std::string path = split_path(dir, f);
    auto t = load_triples(path, out.vocab, policy);
    out.triples.insert(out.triples.end(), t.begin(), t.end());
    out.inputs.emplace_back(path, file_digest(path));
  }
  return out;
}

std::vector<std::string> provenance_lines(
    const InputList& inputs, const std::vector<std::pair<std::string, std::string>>& config) {
  std::vector<std::string> lines;
  lines.push_back("engine " + std::string(kEngineName) + " " + std::string(kEngineVersion));
  for (const auto& [path, digest] : inputs)
    lines.push_back("input " + path + " fnv1a64=" + digest);
  for (const auto& [k, v] : config) lines.push_back("config " + k + "=" + v);
  return lines;
}

EntityId resolve_entity(const Vocabulary& v, const std::string& name) {
  if (auto id = v.entity_id(name)) return *id;
  std::vector<std::string> all;
  all.reserve(v.num_entities());
  for (EntityId i = 0; i < v.num_entities(); ++i) all.push_back(v.entity_name(i));
  throw UsageError("unknown entity '" + name +
                   "'; nearest: " + join(suggest_names(name, all), ", "));
}

RelationId resolve_relation(const Vocabulary& v, const std::string& name) {
  if (auto id = v.relation_id(name)) return *id;
  std::vector<std::string> all;
  all.reserve(v.num_relation_ids());
  for (RelationId i = 0; i < v.num_relation_ids(); ++i) all.push_back(v.relation_name(i));
  throw UsageError("unknown relation '" + name +
                   "'; nearest: " + join(suggest_names(name, all), ", "));
}

unsigned env_default_threads() {
  const char* s = std::getenv("CONTEXT_POOL_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  unsigned long v = std::strtoul(s, &end, 10);
  if (!end || *end != '\0' || v == 0 || v > 4096)
    throw UsageError("CONTEXT_POOL_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

// ---- stats -------------------------------------------------------------------

struct StatsOpts {
  std::string dir;
};

void run_stats(const StatsOpts& o) {
  std::vector<std::string> splits{"train", "valid", "test"};
  require_split_files(o.dir, splits);
  std::cout << "#dataset " << o.dir << "\n";
  std::cout << "#split\trelations\tentities\ttriples\n";
  std::vector<Triple> all_triples;
  Vocabulary all_vocab;
  for (const auto& split : splits) {
    std::string path = split_path(o.dir, split);
    auto loaded = load_triples(path);
    GraphStats s =
        KnowledgeGraph(loaded.triples, loaded.vocab, InverseAugmentation::disabled)
            .stats();
    std::cout << split << "\t" << s.num_relations << "\t" << s.num_entities << "\t"
              << s.num_triples << "\n";
    auto merged = load_triples(path, all_vocab);
    all_triples.insert(all_triples.end(), merged.begin(), merged.end());
  }
  GraphStats s =
      KnowledgeGraph(std::move(all_triples), std::move(all_vocab),
                     InverseAugmentation::disabled)
          .stats();
  std::cout << "all\t" << s.num_relations << "\t" << s.num_entities << "\t"
            << s.num_triples << "\n";
}

// ---- train -------------------------------------------------------------------

struct TrainOpts {
  std::string dir;
  std::string files = "train";
  std::string algorithm = "optimized";
  std::string metric = "both";
  double threshold_pre = 1e-2;
  double threshold_rec = 1e-2;
  std::string set_sizes;
  std::size_t cap = 20;
  unsigned threads = 0;
  std::string out;
};

TrainConfig make_train_config(const TrainOpts& o) {
  TrainConfig cfg;
  auto algo = parse_algorithm(o.algorithm);
  if (!algo) throw UsageError("unknown algorithm: " + o.algorithm);
  cfg.algorithm = *algo;
  auto metric = parse_metric_mode(o.metric);
  if (!metric) throw UsageError("unknown metric mode: " + o.metric);
  cfg.metric = *metric;
  cfg.threshold_pre = o.threshold_pre;
  cfg.threshold_rec = o.threshold_rec;
  cfg.set_sizes = parse_size_range(o.set_sizes);
  cfg.neighborhood_cap = o.cap;
  cfg.threads = o.threads;
  return cfg;
}

std::vector<std::pair<std::string, std::string>> train_config_echo(const TrainOpts& o) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("data", o.dir);
  kv.emplace_back("files", o.files);
  kv.emplace_back("algorithm", o.algorithm);
  kv.emplace_back("metric", o.metric);
  kv.emplace_back("threshold_pre", format_double(o.threshold_pre));
  kv.emplace_back("threshold_rec", format_double(o.threshold_rec));
  if (!o.set_sizes.empty()) kv.emplace_back("set_sizes", o.set_sizes);
  kv.emplace_back("cap", std::to_string(o.cap));
  return kv;
}

void run_train(const TrainOpts& o) {
  TrainConfig cfg = make_train_config(o);
  validate(cfg);
  auto loaded = load_splits(o.dir, parse_files(o.files), nullptr, RelationPolicy::extend);
  KnowledgeGraph g(std::move(loaded.triples), std::move(loaded.vocab));
  auto comments = provenance_lines(loaded.inputs, train_config_echo(o));

  std::ostringstream body;
  std::size_t families = 0, sets = 0;
  auto t0 = std::chrono::steady_clock::now();
  if (cfg.algorithm == CnfAlgorithm::exhaustive) {
    ExhaustiveCnf cnf = cnf_train_exhaustive(g, cfg);
    for (const auto& fam : cnf.families)
      if (!fam.empty()) {
        ++families;
        sets += fam.size();
      }
    serialize_cnf(cnf, g.vocab(), body, comments);
  } else {
    OptimizedCnf cnf = cnf_train_optimized(g, cfg);
    for (const auto& entry : cnf.entries)
      if (!entry.empty()) {
        ++families;
        sets += entry.size();
      }
    serialize_cnf(cnf, g.vocab(), body, comments);
  }
  auto t1 = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  if (o.out == "-") {
    std::cout << body.str();
    std::cerr << "trained " << families << " families, " << sets << " stored sets in "
              << format_double(ms) << " ms\n";
    return;
  }
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw UsageError("cannot write output file: " + o.out);
  out << body.str();
  std::cout << "trained " << families << " families, " << sets << " stored sets in "
            << format_double(ms) << " ms -> " << o.out << "\n";
}

// ---- query -------------------------------------------------------------------

struct QueryOpts {
  std::string dir;
  std::string files = "train";
  std::string cnf_path;
  std::string head;
  std::string relation;
  std::string direction = "head";
};

void run_query(const QueryOpts& o) {
  auto loaded = load_splits(o.dir, parse_files(o.files), nullptr, RelationPolicy::extend);
  KnowledgeGraph g(std::move(loaded.triples), std::move(loaded.vocab));
  std::ifstream in(o.cnf_path, std::ios::binary);
  if (!in) throw UsageError("cannot open cnf file: " + o.cnf_path);
  Cnf cnf = deserialize_cnf(in, g.vocab());

  EntityId h = resolve_entity(g.vocab(), o.head);
  RelationId r = resolve_relation(g.vocab(), o.relation);
  if (o.direction == "tail")
    r = g.inverse(r);  // (?, r, t) becomes (t, inverse(r), ?)
  else if (o.direction != "head")
    throw UsageError("--direction must be head or tail");

  IdSet selected = cnf_generate(g, cnf, h, r);
  std::cout << "#query head=" << o.head << " relation=" << g.vocab().relation_name(r)
            << "\n";
  if (const auto* ex = std::get_if<ExhaustiveCnf>(&cnf)) {
    const ScoredSet* best = cnf_select_exhaustive(g, *ex, h, r);
    if (best) {
      std::vector<std::string> names;
      for (RelationId m : best->rels) names.push_back(g.vocab().relation_name(m));
      std::sort(names.begin(), names.end());
      std::cout << "#winning-set " << join(names, ",")
                << " precision=" << detail::score_text(best->precision)
                << " recall=" << detail::score_text(best->recall) << "\n";
    }
    for (RelationId rel : selected)
      std::cout << g.vocab().relation_name(rel) << "\n";
  } else {
    const auto& entry = std::get<OptimizedCnf>(cnf).entry(r);
    for (RelationId rel : selected) {
      auto it = std::lower_bound(entry.begin(), entry.end(), rel,
                                 [](const ScoredNeighbor& n, RelationId x) {
                                   return n.rel < x;
                                 });
      std::cout << g.vocab().relation_name(rel) << "\t"
                << detail::score_text(it->precision) << "\t"
                << detail::score_text(it->recall) << "\n";
    }
  }
  if (selected.empty()) std::cout << "#empty-selection\n";
}

// ---- pool --------------------------------------------------------------------

struct PoolOpts {
  std::string dir;
  std::string files = "train";
  std::string cnf_dir;    // defaults to dir
  std::string cnf_files;  // defaults to files
  std::string cnf_path;
  std::string head;
  std::string relation;
  std::string direction = "head";
  std::size_t hops = 1;
  std::size_t max_layer_edges = 0;  // 0 = unlimited
  std::string out = "-";
};

void run_pool(const PoolOpts& o) {
  std::string cnf_dir = o.cnf_dir.empty() ? o.dir : o.cnf_dir;
  std::string cnf_files = o.cnf_files.empty() ? o.files : o.cnf_files;
  InputList inputs;
  LoadedTriples expansion;
  if (cnf_dir == o.dir && cnf_files == o.files) {
    expansion = load_splits(o.dir, parse_files(o.files), nullptr, RelationPolicy::extend);
    inputs = expansion.inputs;
  } else {
    // Inductive setting: the expansion graph must reuse the training relation
    // vocabulary (new relations are a contract violation), entities may be new.
    auto training =
        load_splits(cnf_dir, parse_files(cnf_files), nullptr, RelationPolicy::extend);
    expansion = load_splits(o.dir, parse_files(o.files), &training.vocab,
                            RelationPolicy::require_known);
    inputs = training.inputs;
    inputs.insert(inputs.end(), expansion.inputs.begin(), expansion.inputs.end());
  }
  KnowledgeGraph g(std::move(expansion.triples), std::move(expansion.vocab));

  std::ifstream in(o.cnf_path, std::ios::binary);
  if (!in) throw UsageError("cannot open cnf file: " + o.cnf_path);
  Cnf cnf = deserialize_cnf(in, g.vocab());
  inputs.emplace_back(o.cnf_path, file_digest(o.cnf_path));

  EntityId h = resolve_entity(g.vocab(), o.head);
  RelationId r = resolve_relation(g.vocab(), o.relation);
  if (o.direction == "tail")
    r = g.inverse(r);
  else if (o.direction != "head")
    throw UsageError("--direction must be head or tail");

  std::size_t cap = o.max_layer_edges == 0 ? kUnlimitedEdges : o.max_layer_edges;
  ContextGraph cg = build_context_graph(g, h, r, o.hops, cnf, cap);

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("data", o.dir);
  kv.emplace_back("files", o.files);
  if (cnf_dir != o.dir || cnf_files != o.files) {
    kv.emplace_back("cnf_data", cnf_dir);
    kv.emplace_back("cnf_files", cnf_files);
  }
  kv.emplace_back("cnf", o.cnf_path);
  kv.emplace_back("head", o.head);
  kv.emplace_back("relation", o.relation);
  kv.emplace_back("direction", o.direction);
  kv.emplace_back("hops", std::to_string(o.hops));
  if (o.max_layer_edges) kv.emplace_back("max_layer_edges", std::to_string(o.max_layer_edges));
  auto comments = provenance_lines(inputs, kv);

  std::ostringstream body;
  export_context_graph(cg, g.vocab(), body, comments);
  std::ostream* msg = &std::cout;
  if (o.out == "-") {
    std::cout << body.str();
    msg = &std::cerr;
  } else {
    std::ofstream outf(o.out, std::ios::binary);
    if (!outf) throw UsageError("cannot write output file: " + o.out);
    outf << body.str();
  }
  for (std::size_t l = 0; l < cg.layers.size(); ++l)
    (*msg) << "layer " << (l + 1) << ": " << cg.layers[l].size() << " edges\n";
  (*msg) << "union: " << cg.union_edges.size() << " edges\n";
}

// ---- verify ------------------------------------------------------------------

struct VerifyOpts {
  std::string suite;
  std::uint64_t seed = 1;
  std::size_t graphs = 50;
  std::size_t queries = 200;
  std::size_t max_entities = 50;
  std::size_t max_relations = 8;
  std::size_t entities = 10000;
  std::size_t relations = 5;
  double prob = 0.3;
  std::size_t samples = 100;
  std::size_t set_size = 2;
  double tolerance = 0.02;
  unsigned threads = 0;
};

class CheckLog {
 public:
  void pass(const std::string& what) { std::cout << "[ ok ] " << what << "\n"; }
  void fail(const std::string& what) {
    std::cout << "[FAIL] " << what << "\n";
    ++failures_;
  }
  void check(bool ok, const std::string& what) { ok ? pass(what) : fail(what); }
  void finish() const {
    if (failures_)
      throw VerificationError(std::to_string(failures_) + " verification checks failed");
  }

 private:
  std::size_t failures_ = 0;
};

void verify_metrics(const VerifyOpts& o, CheckLog& log) {
  Rng rng(o.seed);
  std::size_t mismatches = 0, compared = 0;
  for (std::size_t gi = 0; gi < o.graphs; ++gi) {
    KnowledgeGraph g = random_graph(rng, o.max_entities, o.max_relations);
    std::size_t n2 = g.num_relation_ids();
    for (std::size_t q = 0; q < o.queries; ++q) {
      IdSet nr;
      std::size_t len = rng.below(4);
      for (std::size_t i = 0; i < len; ++i)
        nr.push_back(static_cast<RelationId>(rng.below(n2)));
      sort_unique(nr);
      RelationId r = static_cast<RelationId>(rng.below(n2));
      RelevanceScore pre = rel_precision(g, nr, r);
      RelevanceScore rec = rel_recall(g, nr, r);
      RelevanceScore npre = naive_relevance(g, nr, r, MetricKind::precision);
      RelevanceScore nrec = naive_relevance(g, nr, r, MetricKind::recall);
      ++compared;
      if (!(pre == npre && rec == nrec)) ++mismatches;
    }
  }
  log.check(mismatches == 0,
            "metric agreement with naive counting: " + std::to_string(o.graphs) +
                " graphs, " + std::to_string(compared) + " queries, " +
                std::to_string(mismatches) + " mismatches");
}

void verify_cnf(const VerifyOpts& o, CheckLog& log) {
  Rng rng(o.seed);
  const double thresholds[] = {0.1, 0.3, 0.5, 0.9};
  const MetricMode modes[] = {MetricMode::precision_only, MetricMode::recall_only,
                              MetricMode::both};
  std::size_t family_mismatches = 0, singleton_mismatches = 0, families = 0;
  for (std::size_t gi = 0; gi < o.graphs; ++gi) {
    KnowledgeGraph g = random_graph(rng, 30, o.max_relations);
    TrainConfig cfg;
    cfg.algorithm = CnfAlgorithm::exhaustive;
    cfg.metric = modes[gi % 3];
    cfg.threshold_pre = thresholds[gi % 4];
    cfg.threshold_rec = thresholds[(gi / 4) % 4];
    cfg.threads = o.threads;
    switch (gi % 4) {
      case 0: cfg.set_sizes.reset(); break;
      case 1: cfg.set_sizes = SizeRange{1, 2}; break;
      case 2: cfg.set_sizes = SizeRange{1, 4}; break;
      default: cfg.set_sizes = SizeRange{4, 6}; break;
    }
    ExhaustiveCnf ex = cnf_train_exhaustive(g, cfg);
    for (RelationId r = 0; r < g.num_relation_ids(); ++r) {
      ++families;
      if (brute_force_cnf(g, r, cfg) != ex.families[r]) ++family_mismatches;
    }
    TrainConfig cfg1 = cfg;
    cfg1.set_sizes = SizeRange{1, 2};
    ExhaustiveCnf ex1 = cnf_train_exhaustive(g, cfg1);
    TrainConfig cfg_opt = cfg;
    cfg_opt.algorithm = CnfAlgorithm::optimized;
    cfg_opt.set_sizes.reset();
    OptimizedCnf opt = cnf_train_optimized(g, cfg_opt);
    for (RelationId r = 0; r < g.num_relation_ids(); ++r) {
      const auto& fam = ex1.families[r];
      const auto& entry = opt.entries[r];
      bool same = fam.size() == entry.size();
      if (same)
        for (std::size_t i = 0; i < fam.size(); ++i) {
          // canonical family order for singletons is ascending by id
          const ScoredSet& s = fam[i];
          const ScoredNeighbor& n = entry[i];
          if (s.rels.size() != 1 || s.rels[0] != n.rel || s.precision != n.precision ||
              s.recall != n.recall) {
            same = false;
            break;
          }
        }
      if (!same) ++singleton_mismatches;
    }
  }
  log.check(family_mismatches == 0,
            "exhaustive families equal brute-force enumeration: " +
                std::to_string(families) + " families, " +
                std::to_string(family_mismatches) + " mismatches");
  log.check(singleton_mismatches == 0,
            "optimized tables equal the size-1 exhaustive stratum: " +
                std::to_string(singleton_mismatches) + " mismatches");
}

void verify_theorem(const VerifyOpts& o, CheckLog& log) {
  SyntheticSpec spec;
  spec.num_entities = o.entities;
  spec.relation_probs.assign(o.relations, o.prob);
  spec.seed = o.seed;
  KnowledgeGraph g = generate_synthetic(spec);
  auto fmt = [](const IdentityStats& s) {
    return "max_dev=" + format_double(s.max_dev) + " mean_dev=" +
           format_double(s.mean_dev) + " samples=" + std::to_string(s.samples) +
           " skipped=" + std::to_string(s.skipped);
  };
  auto report = verify_independence_identities(g, spec.num_entities, 2, o.samples,
                                               o.seed + 1);
  log.check(report.recall.max_dev <= o.tolerance && report.recall.samples > 0,
            "pairwise recall identity on independent draws: " + fmt(report.recall));
  log.check(report.precision.max_dev <= o.tolerance && report.precision.samples > 0,
            "pairwise precision identity on independent draws: " + fmt(report.precision));
  if (o.set_size > 2) {
    auto ext = verify_independence_identities(g, spec.num_entities, o.set_size,
                                              o.samples, o.seed + 2);
    log.check(ext.recall.max_dev <= o.tolerance && ext.recall.samples > 0,
              "size-" + std::to_string(o.set_size) + " recall identity: " +
                  fmt(ext.recall));
    log.check(ext.precision.max_dev <= o.tolerance && ext.precision.samples > 0,
              "size-" + std::to_string(o.set_size) + " precision identity: " +
                  fmt(ext.precision));
  }
  // Power check: with engineered correlation the recall identity must break.
  KnowledgeGraph bad = make_correlated_fixture(1000);
  double lhs = rel_recall(bad, IdSet{1, 2}, 0).value();
  double rhs = rel_recall(bad, IdSet{1}, 0).value() * rel_recall(bad, IdSet{2}, 0).value();
  double dev = std::abs(lhs - rhs);
  log.check(dev > 0.1,
            "correlated fixture breaks the recall identity: deviation=" +
                format_double(dev));
}

void run_verify(const VerifyOpts& o) {
  CheckLog log;
  if (o.suite == "metrics")
    verify_metrics(o, log);
  else if (o.suite == "cnf")
    verify_cnf(o, log);
  else if (o.suite == "theorem")
    verify_theorem(o, log);
  else
    throw UsageError("unknown suite: " + o.suite);
  log.finish();
  std::cout << "suite " << o.suite << ": all checks passed\n";
}

// ---- bench -------------------------------------------------------------------

struct BenchOpts {
  std::string dir;
  std::string files = "train";
  std::string metric = "both";
  double threshold_pre = 1e-2;
  double threshold_rec = 1e-2;
  std::string set_sizes = "4:6";
  unsigned threads = 0;
};

void run_bench(const BenchOpts& o) {
  auto loaded = load_splits(o.dir, parse_files(o.files), nullptr, RelationPolicy::extend);
  KnowledgeGraph g(std::move(loaded.triples), std::move(loaded.vocab));
  TrainConfig cfg;
  auto metric = parse_metric_mode(o.metric);
  if (!metric) throw UsageError("unknown metric mode: " + o.metric);
  cfg.metric = *metric;
  cfg.threshold_pre = o.threshold_pre;
  cfg.threshold_rec = o.threshold_rec;
  cfg.algorithm = CnfAlgorithm::exhaustive;
  cfg.set_sizes = parse_size_range(o.set_sizes);
  cfg.threads = o.threads;
  validate(cfg);
  BenchReport report = run_benchmark(g, o.dir + " [" + o.files + "]", cfg);
  print_bench_report(report, std::cout);
}

// Fill still-unset options of an already-parsed subcommand from a flat
// key=value file, so explicit flags keep priority over file values.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  sub.allow_config_extras(CLI::config_extras_mode::error);
  try {
    sub.parse_from_stream(in);
  } catch (const CLI::Error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query-specific context subgraphs over knowledge graphs"};
  app.require_subcommand(1);

  unsigned env_threads = 0;
  try {
    env_threads = env_default_threads();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  StatsOpts stats_opts;
  auto* stats = app.add_subcommand("stats", "per-split dataset statistics");
  stats->add_option("dir", stats_opts.dir, "dataset directory")->required();

  TrainOpts train_opts;
  train_opts.threads = env_threads;
  auto* train = app.add_subcommand("train", "train context neighbor families");
  train->add_option("dir", train_opts.dir, "dataset directory")->required();
  train->add_option("--files", train_opts.files, "comma-joined splits (default train)");
  train->add_option("--algorithm", train_opts.algorithm, "exhaustive|optimized")
      ->check(CLI::IsMember({"exhaustive", "optimized"}));
  train->add_option("--metric", train_opts.metric, "precision|recall|both")
      ->check(CLI::IsMember({"precision", "recall", "both"}));
  train->add_option("--threshold-pre", train_opts.threshold_pre,
                    "precision threshold, strict (0,1)");
  train->add_option("--threshold-rec", train_opts.threshold_rec,
                    "recall threshold, strict (0,1)");
  train->add_option("--set-sizes", train_opts.set_sizes,
                    "half-open size window LO:HI (exhaustive only)");
  train->add_option("--cap", train_opts.cap,
                    "largest neighborhood enumerable without a size window");
  train->add_option("--threads", train_opts.threads,
                    "worker threads (0 = hardware, env CONTEXT_POOL_THREADS)");
  train->add_option("--out", train_opts.out, "output file ('-' for stdout)")->required();

  QueryOpts query_opts;
  auto* query = app.add_subcommand("query", "preview selected neighbor relations");
  query->add_option("dir", query_opts.dir, "dataset directory")->required();
  query->add_option("--files", query_opts.files, "comma-joined splits (default train)");
  query->add_option("--cnf", query_opts.cnf_path, "trained family file")->required();
  query->add_option("--head", query_opts.head, "entity name")->required();
  query->add_option("--relation", query_opts.relation, "relation name")->required();
  query->add_option("--direction", query_opts.direction,
                    "head: (h,r,?); tail: (?,r,--head) via the inverse relation")
      ->check(CLI::IsMember({"head", "tail"}));

  PoolOpts pool_opts;
  auto* pool = app.add_subcommand("pool", "build a query-specific context subgraph");
  pool->add_option("dir", pool_opts.dir, "expansion dataset directory")->required();
  pool->add_option("--files", pool_opts.files, "comma-joined splits (default train)");
  pool->add_option("--cnf-data", pool_opts.cnf_dir,
                   "training dataset directory (defaults to the expansion directory)");
  pool->add_option("--cnf-files", pool_opts.cnf_files,
                   "training splits (defaults to --files)");
  pool->add_option("--cnf", pool_opts.cnf_path, "trained family file")->required();
  pool->add_option("--head", pool_opts.head, "entity name")->required();
  pool->add_option("--relation", pool_opts.relation, "relation name")->required();
  pool->add_option("--direction", pool_opts.direction,
                   "head: (h,r,?); tail: (?,r,--head) via the inverse relation")
      ->check(CLI::IsMember({"head", "tail"}));
  pool->add_option("--hops", pool_opts.hops, "layer count (>= 1)")->required();
  pool->add_option("--max-layer-edges", pool_opts.max_layer_edges,
                   "abort if a layer stores more edges (0 = unlimited)");
  pool->add_option("--out", pool_opts.out, "output file ('-' for stdout)");

  VerifyOpts verify_opts;
  verify_opts.threads = env_threads;
  auto* verify = app.add_subcommand("verify", "run self-verification suites");
  verify->add_option("--suite", verify_opts.suite, "metrics|cnf|theorem")
      ->required()
      ->check(CLI::IsMember({"metrics", "cnf", "theorem"}));
  verify->add_option("--seed", verify_opts.seed, "rng seed");
  verify->add_option("--graphs", verify_opts.graphs, "random graphs per suite");
  verify->add_option("--queries", verify_opts.queries, "queries per graph (metrics)");
  verify->add_option("--max-entities", verify_opts.max_entities,
                     "entity bound for random graphs");
  verify->add_option("--max-relations", verify_opts.max_relations,
                     "forward-relation bound for random graphs");
  verify->add_option("--entities", verify_opts.entities, "synthetic population (theorem)");
  verify->add_option("--relations", verify_opts.relations, "synthetic relations (theorem)");
  verify->add_option("--prob", verify_opts.prob, "synthetic membership probability");
  verify->add_option("--samples", verify_opts.samples, "sampled combinations (theorem)");
  verify->add_option("--set-size", verify_opts.set_size,
                     "also check the identity at this set size (theorem)");
  verify->add_option("--tolerance", verify_opts.tolerance, "max allowed deviation");
  verify->add_option("--threads", verify_opts.threads, "worker threads");

  BenchOpts bench_opts;
  bench_opts.threads = env_threads;
  auto* bench = app.add_subcommand("bench", "time exhaustive vs optimized training");
  bench->add_option("dir", bench_opts.dir, "dataset directory")->required();
  bench->add_option("--files", bench_opts.files, "comma-joined splits (default train)");
  bench->add_option("--metric", bench_opts.metric, "precision|recall|both")
      ->check(CLI::IsMember({"precision", "recall", "both"}));
  bench->add_option("--threshold-pre", bench_opts.threshold_pre, "precision threshold");
  bench->add_option("--threshold-rec", bench_opts.threshold_rec, "recall threshold");
  bench->add_option("--set-sizes", bench_opts.set_sizes,
                    "exhaustive size window (default 4:6)");
  bench->add_option("--threads", bench_opts.threads, "worker threads");

  struct Dispatch {
    CLI::App* sub;
    std::string config;
    std::function<void()> run;
  };
  std::array<Dispatch, 6> dispatch{{
      {stats, {}, [&] { run_stats(stats_opts); }},
      {train, {}, [&] { run_train(train_opts); }},
      {query, {}, [&] { run_query(query_opts); }},
      {pool, {}, [&] { run_pool(pool_opts); }},
      {verify, {}, [&] { run_verify(verify_opts); }},
      {bench, {}, [&] { run_bench(bench_opts); }},
  }};
  for (Dispatch& d : dispatch)
    d.sub->add_option("--config", d.config,
                      "flat key=value file; command-line flags win");

  try {
    app.parse(argc, argv);
    for (Dispatch& d : dispatch)
      if (app.got_subcommand(d.sub)) {
        if (!d.config.empty()) apply_config_file(*d.sub, d.config);
        d.run();
      }
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 4;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 5;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
