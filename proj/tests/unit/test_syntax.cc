#include <gtest/gtest.h>

#include <queue>

#include "precedence/errors.h"
#include "precedence/syntax.h"
#include "testing.h"

namespace precedence {
namespace {

// 0 translocate -> 1 sites -> 2 endosomes -> 3 binds; 3 -> 4 ITSN1.
Sentence small() {
  Sentence s;
  const std::vector<std::string> lemmas = {"translocate", "site", "endosome", "bind", "itsn1"};
  for (int i = 0; i < 5; ++i) s.tokens.push_back({i, lemmas[i], lemmas[i], "NN"});
  s.graph = DependencyGraph(5,
                            {{0, 1, "prep_to"}, {1, 2, "prep_such_as"}, {2, 3, "rcmod"},
                             {3, 4, "nsubj"}},
                            {0});
  return s;
}

TEST(ShortestPath, DirectionsAndRendering) {
  const Sentence s = small();
  const auto p = shortest_path(s.graph, 4, 1);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(render_path(*p), "<nsubj <rcmod <prep_such_as");
  EXPECT_EQ(render_path(*p, PathMode::Lemmas, &s), "<nsubj:bind <rcmod:endosome <prep_such_as:site");
  EXPECT_EQ(render_path(*p, PathMode::EndpointsRoles, &s, "THEME"),
            "itsn1 <nsubj <rcmod <prep_such_as THEME");
  EXPECT_EQ(render_path(p->reversed()), ">prep_such_as >rcmod >nsubj");
  EXPECT_EQ(p->reversed().reversed(), *p);
  EXPECT_EQ(p->nodes(), (std::vector<int>{4, 3, 2, 1}));
  EXPECT_THROW(render_path(*p, PathMode::Lemmas), UsageError);
  EXPECT_TRUE(shortest_path(s.graph, 2, 2)->empty());
  EXPECT_THROW(shortest_path(s.graph, 0, 9), ValidationError);
}

TEST(ShortestPath, DisconnectedTokens) {
  const DependencyGraph g(4, {{0, 1, "a"}, {2, 3, "b"}}, {0, 2});
  EXPECT_FALSE(shortest_path(g, 1, 3).has_value());
  EXPECT_EQ(render_path(path_to_root(g, 3)), ">b");
  const DependencyGraph orphan(3, {{0, 1, "a"}}, {0});
  EXPECT_THROW(path_to_root(orphan, 2), StructuralError);
}

TEST(ShortestPath, TieBreakPrefersDownThenRelation) {
  // Two length-2 routes from 0 to 3: via 1 (down "b", down "x") and via 2
  // (down "a", down "y"); "a" sorts first.
  const DependencyGraph g(4, {{0, 1, "b"}, {0, 2, "a"}, {1, 3, "x"}, {2, 3, "y"}}, {0});
  const auto p = shortest_path(g, 0, 3);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(render_path(*p), ">a >y");
}

std::vector<int> bfs(const DependencyGraph& g, int from) {
  std::vector<int> dist(g.size(), -1);
  std::queue<int> q;
  q.push(from);
  dist[from] = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const Edge& e : g.edges()) {
      for (auto [a, b] : {std::pair{e.governor, e.dependent}, std::pair{e.dependent, e.governor}}) {
        if (a == u && dist[b] < 0) {
          dist[b] = dist[u] + 1;
          q.push(b);
        }
      }
    }
  }
  return dist;
}

bool has_edge(const DependencyGraph& g, int gov, int dep, const std::string& rel) {
  for (const Edge& e : g.edges()) {
    if (e.governor == gov && e.dependent == dep && e.relation == rel) return true;
  }
  return false;
}

TEST(ShortestPath, RandomTreesMatchBreadthFirstOracle) {
  testing::Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Sentence s = testing::random_sentence(rng, 0, testing::uniform_int(rng, 1, 15));
    const int from = testing::uniform_int(rng, 0, s.size() - 1);
    const int to = testing::uniform_int(rng, 0, s.size() - 1);
    const auto p = shortest_path(s.graph, from, to);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(static_cast<int>(p->size()), bfs(s.graph, from)[to]);
    int at = p->source;
    EXPECT_EQ(at, from);
    for (const SynStep& step : p->steps) {
      if (step.direction == Direction::Down) {
        EXPECT_TRUE(has_edge(s.graph, at, step.landing, step.relation));
      } else {
        EXPECT_TRUE(has_edge(s.graph, step.landing, at, step.relation));
      }
      at = step.landing;
    }
    EXPECT_EQ(p->target(), to);

    const SynPath root = path_to_root(s.graph, to);
    EXPECT_TRUE(s.graph.is_root(root.source));
    EXPECT_EQ(root.target(), to);
    for (const SynStep& step : root.steps) EXPECT_EQ(step.direction, Direction::Down);
  }
}

TEST(SpanHead, FirstTokenGovernedFromOutside) {
  const Sentence s = small();
  EXPECT_EQ(span_head(s, {1, 4}), 1);
  EXPECT_EQ(span_head(s, {3, 5}), 3);
  EXPECT_EQ(span_head(s, {0, 5}), 0);
}

}  // namespace
}  // namespace precedence
