#pragma once

#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>
#include <thread>

#include "ctxpool/cnf.hpp"
#include "ctxpool/kg.hpp"
#include "ctxpool/util.hpp"

namespace ctxpool {

// Wall-clock comparison of the two trainers on one graph, single run each.
struct BenchReport {
  std::string dataset;
  GraphStats stats;
  TrainConfig exhaustive_config;
  TrainConfig optimized_config;
  std::uint64_t exhaustive_ns = 0;
  std::uint64_t optimized_ns = 0;
  std::size_t exhaustive_sets = 0;   // stored sets across all families
  std::size_t optimized_sets = 0;    // stored singleton entries
  unsigned threads = 1;

  double speedup() const {
    return static_cast<double>(exhaustive_ns) /
           static_cast<double>(std::max<std::uint64_t>(optimized_ns, 1));
  }
};

// Times exhaustive then optimized training under the same thresholds/metric.
// The size window applies to the exhaustive run only (optimized is singleton
// by construction); graph/index construction is excluded from both timings.
inline BenchReport run_benchmark(const KnowledgeGraph& g, std::string dataset_name,
                                 const TrainConfig& cfg) {
  using clock = std::chrono::steady_clock;
  BenchReport report;
  report.dataset = std::move(dataset_name);
  report.stats = g.stats();
  report.threads = resolve_threads(cfg.threads);

  TrainConfig ex_cfg = cfg;
  ex_cfg.algorithm = CnfAlgorithm::exhaustive;
  report.exhaustive_config = ex_cfg;
  auto t0 = clock::now();
  ExhaustiveCnf ex = cnf_train_exhaustive(g, ex_cfg);
  auto t1 = clock::now();
  report.exhaustive_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  for (const auto& family : ex.families) report.exhaustive_sets += family.size();

  TrainConfig opt_cfg = cfg;
  opt_cfg.algorithm = CnfAlgorithm::optimized;
  opt_cfg.set_sizes.reset();
  report.optimized_config = opt_cfg;
  auto t2 = clock::now();
  OptimizedCnf opt = cnf_train_optimized(g, opt_cfg);
  auto t3 = clock::now();
  report.optimized_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t3 - t2).count();
  for (const auto& entry : opt.entries) report.optimized_sets += entry.size();
  return report;
}

inline void print_bench_report(const BenchReport& r, std::ostream& out) {
  auto ms = [](std::uint64_t ns) {
    return static_cast<double>(ns) / 1e6;
  };
  out << "dataset\t" << r.dataset << "\n";
  out << "graph\trelations=" << r.stats.num_relations
      << "\tentities=" << r.stats.num_entities
      << "\ttriples=" << r.stats.num_triples << "\n";
  out << "config\tmetric=" << to_string(r.exhaustive_config.metric)
      << "\tthreshold_pre=" << format_double(r.exhaustive_config.threshold_pre)
      << "\tthreshold_rec=" << format_double(r.exhaustive_config.threshold_rec);
  if (r.exhaustive_config.set_sizes)
    out << "\tset_sizes=[" << r.exhaustive_config.set_sizes->lo << ","
        << r.exhaustive_config.set_sizes->hi << ")";
  out << "\n";
  out << "machine\tthreads=" << r.threads
      << "\thardware_concurrency=" << std::thread::hardware_concurrency()
      << "\ttiming=wall-clock, single run\n";
  out << "exhaustive\tms=" << format_double(ms(r.exhaustive_ns))
      << "\tstored_sets=" << r.exhaustive_sets << "\n";
  out << "optimized\tms=" << format_double(ms(r.optimized_ns))
      << "\tstored_sets=" << r.optimized_sets << "\n";
  out << "speedup\t" << format_double(r.speedup()) << "x\n";
}

}  // namespace ctxpool
