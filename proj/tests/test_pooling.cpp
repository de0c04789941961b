#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ctxpool/oracle.hpp"
#include "ctxpool/pooling.hpp"
#include "testutil.hpp"

using namespace ctxpool;
using ctxpool::test::make_toy;
using ctxpool::test::write_temp;

namespace {

Cnf toy_optimized(const KnowledgeGraph& g) {
  TrainConfig cfg;
  cfg.algorithm = CnfAlgorithm::optimized;
  cfg.threshold_pre = 0.4;
  cfg.threshold_rec = 0.4;
  cfg.threads = 1;
  return cnf_train_optimized(g, cfg);
}

Cnf toy_exhaustive(const KnowledgeGraph& g) {
  TrainConfig cfg;
  cfg.algorithm = CnfAlgorithm::exhaustive;
  cfg.threshold_pre = 0.4;
  cfg.threshold_rec = 0.4;
  cfg.set_sizes = SizeRange{1, 3};
  cfg.threads = 1;
  return cnf_train_exhaustive(g, cfg);
}

}  // namespace

TEST_CASE("one optimized step from the toy query emits the supporting edge") {
  auto toy = make_toy();
  Cnf cnf = toy_optimized(toy.g);
  Frontier frontier{FrontierEdge{toy.A, toy.q_inv}};
  StepResult step = context_pooling_step(toy.g, frontier, cnf);
  REQUIRE(step.edges.size() == 1);
  CHECK(step.edges[0] == Triple{toy.A, toy.b, toy.X2});
  REQUIRE(step.next.size() == 1);
  CHECK(step.next[0] == FrontierEdge{toy.X2, toy.b});
}

TEST_CASE("one exhaustive step widens to the winning set") {
  auto toy = make_toy();
  Cnf cnf = toy_exhaustive(toy.g);
  Frontier frontier{FrontierEdge{toy.A, toy.q_inv}};
  StepResult step = context_pooling_step(toy.g, frontier, cnf);
  REQUIRE(step.edges.size() == 2);
  CHECK(step.edges[0] == Triple{toy.A, toy.a, toy.X1});
  CHECK(step.edges[1] == Triple{toy.A, toy.b, toy.X2});
  CHECK(step.next == Frontier{FrontierEdge{toy.X1, toy.a}, FrontierEdge{toy.X2, toy.b}});
}

TEST_CASE("admission scores come from the inverse of the frontier relation") {
  auto toy = make_toy();
  ContextScore s = score_generator(toy.g, toy.q_inv, toy.b);
  CHECK(s.precision == RelevanceScore{1, 2});
  CHECK(s.recall == RelevanceScore{1, 1});
  ContextScore weak = score_generator(toy.g, toy.q_inv, toy.a);
  CHECK(weak.precision == RelevanceScore{1, 3});
}

TEST_CASE("layer count is exact and trailing layers stay empty") {
  auto toy = make_toy();
  Cnf cnf = toy_optimized(toy.g);
  ContextGraph cg = build_context_graph(toy.g, toy.A, toy.q, 3, cnf);
  REQUIRE(cg.layers.size() == 3);
  CHECK(cg.layers[0].size() == 1);
  CHECK(cg.layers[1].empty());  // nothing is trained for b_inv
  CHECK(cg.layers[2].empty());
  CHECK(cg.union_edges == cg.layers[0]);
}

TEST_CASE("pooling is query-specific through the head neighborhood") {
  auto toy = make_toy();
  Cnf cnf = toy_optimized(toy.g);
  ContextGraph from_b = build_context_graph(toy.g, toy.B, toy.q, 1, cnf);
  REQUIRE(from_b.layers[0].size() == 1);
  CHECK(from_b.layers[0][0] == Triple{toy.B, toy.b, toy.X5});
  // A sink entity has no admitted relations for this query.
  ContextGraph from_x3 = build_context_graph(toy.g, toy.X3, toy.q, 1, cnf);
  CHECK(from_x3.union_edges.empty());
}

TEST_CASE("argument errors and the layer cap") {
  auto toy = make_toy();
  Cnf cnf = toy_exhaustive(toy.g);
  CHECK_THROWS_AS(build_context_graph(toy.g, toy.A, toy.q, 0, cnf), UsageError);
  CHECK_THROWS_AS(build_context_graph(toy.g, 99, toy.q, 1, cnf), LookupError);
  CHECK_THROWS_AS(build_context_graph(toy.g, toy.A, 99, 1, cnf), LookupError);
  CHECK_THROWS_AS(build_context_graph(toy.g, toy.A, toy.q, 1, cnf, 1), CapacityError);
  CHECK_NOTHROW(build_context_graph(toy.g, toy.A, toy.q, 1, cnf, 2));
}

TEST_CASE("exported context graphs are sorted, labeled, and deterministic") {
  auto toy = make_toy();
  Cnf cnf = toy_exhaustive(toy.g);
  ContextGraph cg = build_context_graph(toy.g, toy.A, toy.q, 2, cnf);
  std::ostringstream out1, out2;
  export_context_graph(cg, toy.g.vocab(), out1, {"prov line"});
  export_context_graph(cg, toy.g.vocab(), out2, {"prov line"});
  CHECK(out1.str() == out2.str());
  CHECK(out1.str() ==
        "# prov line\n"
        "#hop\thead\trelation\ttail\n"
        "1\tA\ta\tX1\n"
        "1\tA\tb\tX2\n");

  ContextGraph empty;
  std::ostringstream eout;
  export_context_graph(empty, toy.g.vocab(), eout);
  CHECK(eout.str() == "#hop\thead\trelation\ttail\n");
}

TEST_CASE("pooled edges always exist in the source graph") {
  Rng rng(41);
  for (int i = 0; i < 6; ++i) {
    KnowledgeGraph g = random_graph(rng, 35, 6);
    TrainConfig cfg;
    cfg.algorithm = CnfAlgorithm::optimized;
    cfg.threshold_pre = 0.15;
    cfg.threshold_rec = 0.15;
    cfg.threads = 1;
    Cnf cnf = cnf_train_optimized(g, cfg);
    for (int q = 0; q < 20; ++q) {
      EntityId h = static_cast<EntityId>(rng.below(g.num_entities()));
      RelationId r = static_cast<RelationId>(rng.below(g.num_relation_ids()));
      std::size_t hops = 1 + rng.below(3);
      ContextGraph cg = build_context_graph(g, h, r, hops, cnf);
      REQUIRE(cg.layers.size() == hops);
      std::vector<Triple> rebuilt;
      for (const auto& layer : cg.layers)
        rebuilt.insert(rebuilt.end(), layer.begin(), layer.end());
      std::sort(rebuilt.begin(), rebuilt.end());
      rebuilt.erase(std::unique(rebuilt.begin(), rebuilt.end()), rebuilt.end());
      CHECK(rebuilt == cg.union_edges);
      for (const Triple& e : cg.union_edges) CHECK(g.has_edge(e.h, e.r, e.t));
    }
  }
}

TEST_CASE("families trained on one graph guide expansion on another") {
  auto toy = make_toy();
  Cnf cnf = toy_optimized(toy.g);

  // An expansion graph with unseen entities but the training relations.
  std::string path = write_temp("pool_expansion.txt",
                                "D\ta\tY1\nD\tb\tY2\nD\tq\tY3\nE\tb\tY4\n");
  Vocabulary vocab = toy.g.vocab();
  auto triples = load_triples(path, vocab, RelationPolicy::require_known);
  KnowledgeGraph expansion(triples, vocab);

  EntityId D = *vocab.entity_id("D");
  ContextGraph cg = build_context_graph(expansion, D, toy.q, 1, cnf);
  REQUIRE(cg.layers[0].size() == 1);
  CHECK(cg.layers[0][0].r == toy.b);
  CHECK(cg.layers[0][0].t == *vocab.entity_id("Y2"));
}
