#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <sstream>

#include "ctxpool/bench.hpp"
#include "ctxpool/util.hpp"
#include "testutil.hpp"

using namespace ctxpool;
using ctxpool::test::make_toy;
using ctxpool::test::write_temp;

TEST_CASE("split preserves empty fields") {
  auto f = split("a\tb\tc", '\t');
  REQUIRE(f.size() == 3);
  CHECK(f[1] == "b");
  f = split("a\t\t", '\t');
  REQUIRE(f.size() == 3);
  CHECK(f[1].empty());
  CHECK(f[2].empty());
  f = split("", '\t');
  REQUIRE(f.size() == 1);
}

TEST_CASE("doubles format to their shortest round-trip form") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.01) == "0.01");
  CHECK(format_double(1e-05) == "1e-05");
  for (double v : {0.3, 1.0 / 3.0, 123456.789, 1e-9}) {
    std::string s = format_double(v);
    double back = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc{});
    CHECK(back == v);
  }
}

TEST_CASE("file digests are stable and content-sensitive") {
  std::string p1 = write_temp("digest_a.txt", "hello\n");
  std::string p2 = write_temp("digest_b.txt", "hello!\n");
  std::string d1 = file_digest(p1);
  CHECK(d1.size() == 16);
  CHECK(d1 == file_digest(p1));
  CHECK(d1 != file_digest(p2));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("rng draws are reproducible and bounded") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next() == b.next());
    double u = a.uniform01();
    b.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(7) == b.below(7));
  }
  CHECK(resolve_threads(0) >= 1);
  CHECK(resolve_threads(3) == 3);
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [&](std::size_t i) {
                                 if (i == 57) throw UsageError("boom");
                               }),
                  UsageError);
}

TEST_CASE("benchmark reports carry both timings and stored-set counts") {
  auto toy = make_toy();
  TrainConfig cfg;
  cfg.metric = MetricMode::both;
  cfg.threshold_pre = 0.4;
  cfg.threshold_rec = 0.4;
  cfg.set_sizes = SizeRange{1, 3};
  cfg.threads = 1;
  BenchReport r = run_benchmark(toy.g, "toy", cfg);
  CHECK(r.dataset == "toy");
  CHECK(r.stats == GraphStats{3, 9, 6});
  CHECK(r.exhaustive_sets == 6);  // {b} | {a,q},{a},{q} | {a,b},{b}
  CHECK(r.optimized_sets == 4);   // a->{b}, b->{a,q}, q->{b}
  CHECK(r.speedup() > 0.0);

  std::ostringstream out;
  print_bench_report(r, out);
  std::string text = out.str();
  for (const char* key :
       {"dataset\t", "graph\t", "config\t", "machine\t", "exhaustive\t",
        "optimized\t", "speedup\t"})
    CHECK(text.find(key) != std::string::npos);
  CHECK(text.find("set_sizes=[1,3)") != std::string::npos);
}
