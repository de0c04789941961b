#pragma once

// Shared fixtures: a small hand-checkable graph plus id handles, and helpers
// for temp files. The toy graph:
//   A a X1, A b X2, A q X3, B a X4, B b X5, C a X6
// Neighborhoods (forward relations): A {a,b,q}, B {a,b}, C {a}.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ctxpool/kg.hpp"
#include "ctxpool/vocab.hpp"

namespace ctxpool::test {

struct ToyGraph {
  KnowledgeGraph g;
  EntityId A, B, C, X1, X2, X3, X4, X5, X6;
  RelationId a, b, q, a_inv, b_inv, q_inv;
};

inline ToyGraph make_toy(InverseAugmentation aug = InverseAugmentation::enabled) {
  const char* rows[][3] = {
      {"A", "a", "X1"}, {"A", "b", "X2"}, {"A", "q", "X3"},
      {"B", "a", "X4"}, {"B", "b", "X5"}, {"C", "a", "X6"},
  };
  Vocabulary v;
  std::vector<Triple> ts;
  for (const auto& row : rows)
    ts.push_back(Triple{v.intern_entity(row[0]), v.intern_relation(row[1]),
                        v.intern_entity(row[2])});
  auto e = [&v](const char* n) { return *v.entity_id(n); };
  auto r = [&v](const char* n) { return *v.relation_id(n); };
  return ToyGraph{
      KnowledgeGraph(std::move(ts), v, aug),
      e("A"), e("B"), e("C"), e("X1"), e("X2"), e("X3"), e("X4"), e("X5"), e("X6"),
      r("a"), r("b"), r("q"), v.inverse(r("a")), v.inverse(r("b")), v.inverse(r("q")),
  };
}

// Writes content to a fresh file under the build-tree temp dir and returns
// its path. Files persist for the test run; names must be unique per test.
inline std::string write_temp(const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ctxpool_tests";
  fs::create_directories(dir);
  fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

}  // namespace ctxpool::test
