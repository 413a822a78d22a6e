#include "precedence/syntax.h"

#include <deque>
#include <limits>
#include <map>
#include <tuple>

#include "precedence/errors.h"

namespace precedence {

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

std::vector<std::vector<SynStep>> undirected_adjacency(
    const DependencyGraph& graph) {
  std::vector<std::vector<SynStep>> adjacency(graph.size());
  for (const Edge& e : graph.edges()) {
    adjacency[e.governor].push_back({Direction::Down, e.relation, e.dependent});
    adjacency[e.dependent].push_back({Direction::Up, e.relation, e.governor});
  }
  return adjacency;
}

std::vector<int> bfs_distances(const std::vector<std::vector<SynStep>>& adj,
                               int origin) {
  std::vector<int> dist(adj.size(), kUnreached);
  std::deque<int> queue{origin};
  dist[origin] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const SynStep& s : adj[u]) {
      if (dist[s.landing] == kUnreached) {
        dist[s.landing] = dist[u] + 1;
        queue.push_back(s.landing);
      }
    }
  }
  return dist;
}

void check_index(const DependencyGraph& graph, int token) {
  if (token < 0 || static_cast<std::size_t>(token) >= graph.size()) {
    throw ValidationError("token index " + std::to_string(token) +
                          " out of range for graph of " +
                          std::to_string(graph.size()) + " tokens");
  }
}

}  // namespace

SynPath SynPath::reversed() const {
  SynPath out;
  out.source = target();
  const std::vector<int> visited = nodes();
  for (std::size_t i = steps.size(); i-- > 0;) {
    const SynStep& s = steps[i];
    out.steps.push_back({s.direction == Direction::Down ? Direction::Up
                                                        : Direction::Down,
                         s.relation, visited[i]});
  }
  return out;
}

std::vector<int> SynPath::nodes() const {
  std::vector<int> out{source};
  for (const SynStep& s : steps) out.push_back(s.landing);
  return out;
}

std::optional<SynPath> shortest_path(const DependencyGraph& graph, int from,
                                     int to) {
  check_index(graph, from);
  check_index(graph, to);
  if (from == to) return SynPath{from, {}};

  const auto adjacency = undirected_adjacency(graph);
  const std::vector<int> dist = bfs_distances(adjacency, to);
  if (dist[from] == kUnreached) return std::nullopt;

  // Walk the layered DAG of shortest paths, keeping every node reachable by
  // the lexicographically smallest prefix chosen so far.
  using Parent = std::pair<int, const SynStep*>;
  std::vector<std::map<int, Parent>> layers;
  std::map<int, Parent> frontier{{from, {-1, nullptr}}};
  for (int remaining = dist[from]; remaining > 0; --remaining) {
    const SynStep* best = nullptr;
    for (const auto& [u, unused] : frontier) {
      for (const SynStep& s : adjacency[u]) {
        if (dist[s.landing] != remaining - 1) continue;
        if (best == nullptr ||
            std::tie(s.direction, s.relation) <
                std::tie(best->direction, best->relation)) {
          best = &s;
        }
      }
    }
    std::map<int, Parent> next;
    for (const auto& [u, unused] : frontier) {
      for (const SynStep& s : adjacency[u]) {
        if (dist[s.landing] == remaining - 1 && s.direction == best->direction &&
            s.relation == best->relation) {
          next.emplace(s.landing, Parent{u, &s});
        }
      }
    }
    layers.push_back(frontier);
    frontier = std::move(next);
  }

  SynPath path;
  path.source = from;
  path.steps.resize(static_cast<std::size_t>(dist[from]));
  int node = to;
  std::map<int, Parent> last = frontier;
  for (std::size_t i = path.steps.size(); i-- > 0;) {
    const Parent& parent = last.at(node);
    path.steps[i] = *parent.second;
    node = parent.first;
    last = layers[i];
  }
  return path;
}

SynPath path_to_root(const DependencyGraph& graph, int token) {
  check_index(graph, token);
  if (graph.is_root(token)) return SynPath{token, {}};

  // Climb governor links breadth-first; the first root found is nearest.
  std::map<int, std::size_t> reached_via;  // node -> edge used to climb
  std::deque<int> queue{token};
  reached_via.emplace(token, std::numeric_limits<std::size_t>::max());
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (std::size_t e : graph.incoming(u)) {
      const int g = graph.edges()[e].governor;
      if (reached_via.count(g)) continue;
      reached_via.emplace(g, e);
      if (graph.is_root(g)) {
        SynPath path;
        path.source = g;
        int node = g;
        while (node != token) {
          const Edge& edge = graph.edges()[reached_via.at(node)];
          path.steps.push_back({Direction::Down, edge.relation, edge.dependent});
          node = edge.dependent;
        }
        return path;
      }
      queue.push_back(g);
    }
  }

  const auto adjacency = undirected_adjacency(graph);
  const std::vector<int> dist = bfs_distances(adjacency, token);
  int nearest = -1;
  for (int root : graph.roots()) {
    if (dist[root] != kUnreached && (nearest < 0 || dist[root] < dist[nearest])) {
      nearest = root;
    }
  }
  if (nearest < 0) {
    throw StructuralError("token " + std::to_string(token) +
                          " is not connected to any root");
  }
  return *shortest_path(graph, nearest, token);
}

int span_head(const Sentence& sentence, const Span& span) {
  for (int t = span.start; t < span.end; ++t) {
    const auto gov = sentence.graph.governor(t);
    if (!gov || !span.contains(*gov)) return t;
  }
  return span.end - 1;
}

std::string render_path(const SynPath& path, PathMode mode,
                        const Sentence* sentence,
                        std::string_view endpoint_tag) {
  if (path.empty()) return "";
  if (mode != PathMode::Unlexicalized && sentence == nullptr) {
    throw UsageError("lexicalized path rendering needs the sentence");
  }
  const auto lemma = [&](int index) -> const std::string& {
    return sentence->tokens.at(static_cast<std::size_t>(index)).lemma;
  };
  std::string out;
  if (mode == PathMode::EndpointsRoles || mode == PathMode::EndpointsLabels) {
    out = lemma(path.source);
  }
  for (const SynStep& s : path.steps) {
    if (!out.empty()) out += ' ';
    out += s.direction == Direction::Down ? '>' : '<';
    out += s.relation;
    if (mode == PathMode::Lemmas) {
      out += ':';
      out += lemma(s.landing);
    }
  }
  if ((mode == PathMode::EndpointsRoles || mode == PathMode::EndpointsLabels) &&
      !endpoint_tag.empty()) {
    out += ' ';
    out += endpoint_tag;
  }
  return out;
}

}  // namespace precedence
