#include "tracenet/analysis.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "tracenet/csv.h"
#include "tracenet/rng.h"

namespace tracenet {

UndirectedGraph::UndirectedGraph(int n,
                                 std::span<const std::pair<int, int>> edges)
    : n_(n) {
  if (n < 0) throw DomainError("negative node count");
  std::vector<std::pair<int, int>> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw DomainError("edge endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (a == b) continue;
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (auto [a, b] : arcs) ++offsets_[a + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.reserve(arcs.size());
  for (auto [a, b] : arcs) adjacency_.push_back(b);
}

std::string_view reference_kind_name(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::kScaleFree:
      return "scale_free";
    case ReferenceKind::kRandom:
      return "random";
    case ReferenceKind::kMesh:
      return "mesh";
  }
  return "?";
}

std::pair<int, int> mesh_dimensions(int n_nodes) {
  if (n_nodes < 1) throw ConfigError("mesh needs at least one node");
  int rows = static_cast<int>(std::sqrt(static_cast<double>(n_nodes)));
  while (rows > 1 && n_nodes % rows != 0) --rows;
  return {rows, n_nodes / rows};
}

namespace {

std::int64_t max_edges(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

UndirectedGraph scale_free(int n, std::int64_t m, Rng& rng) {
  const std::int64_t per_node = (m + n - 1) / n;
  int core = static_cast<int>(std::clamp<std::int64_t>(per_node + 1, 2, n));
  if (max_edges(core) > m) {
    throw ConfigError("too few edges for a preferential attachment graph");
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  // Every endpoint once per incident edge, so uniform picks are
  // degree-proportional.
  std::vector<int> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2 * m));
  for (int a = 0; a < core; ++a) {
    for (int b = a + 1; b < core; ++b) {
      edges.emplace_back(a, b);
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  }
  const std::int64_t rest = m - max_edges(core);
  const std::int64_t grown = n - core;
  if (grown == 0 && rest > 0) {
    throw ConfigError("edge count exceeds what the node count allows");
  }
  std::vector<int> picked;
  for (std::int64_t j = 0; j < grown; ++j) {
    const int v = core + static_cast<int>(j);
    const auto k = static_cast<int>((j + 1) * rest / grown - j * rest / grown);
    if (k > v) throw ConfigError("edge count too large for attachment");
    picked.clear();
    while (static_cast<int>(picked.size()) < k) {
      const int t = endpoints.empty()
                        ? static_cast<int>(rng.below(v))
                        : endpoints[rng.below(endpoints.size())];
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
        picked.push_back(t);
      }
    }
    for (int t : picked) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return UndirectedGraph(n, edges);
}

UndirectedGraph random_graph(int n, std::int64_t m, Rng& rng) {
  if (m > max_edges(n)) {
    throw ConfigError("edge count exceeds what the node count allows");
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  while (static_cast<std::int64_t>(edges.size()) < m) {
    int a = static_cast<int>(rng.below(n));
    int b = static_cast<int>(rng.below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const auto key = (static_cast<std::uint64_t>(a) << 32) |
                     static_cast<std::uint32_t>(b);
    if (seen.insert(key).second) edges.emplace_back(a, b);
  }
  return UndirectedGraph(n, edges);
}

UndirectedGraph mesh(int n) {
  const auto [rows, cols] = mesh_dimensions(n);
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return UndirectedGraph(n, edges);
}

}  // namespace

UndirectedGraph generate_reference_graph(ReferenceKind kind, int n_nodes,
                                         std::int64_t n_edges,
                                         std::uint64_t seed) {
  if (n_nodes < 1) throw ConfigError("reference graph needs nodes");
  if (n_edges < 0) throw ConfigError("negative edge count");
  Rng rng(derive_seed(seed, reference_kind_name(kind)));
  switch (kind) {
    case ReferenceKind::kScaleFree:
      return scale_free(n_nodes, n_edges, rng);
    case ReferenceKind::kRandom:
      return random_graph(n_nodes, n_edges, rng);
    case ReferenceKind::kMesh:
      return mesh(n_nodes);
  }
  throw ConfigError("unknown reference graph kind");
}

UndirectedGraph undirected_view(const TracingDag& dag,
                                std::vector<PersonId>* ids) {
  const std::vector<PersonId> nodes = dag.nodes();
  std::vector<int> index(static_cast<std::size_t>(dag.id_bound()), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    index[nodes[i]] = static_cast<int>(i);
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(dag.edge_count());
  for (const DagEdge& e : dag.edges()) {
    edges.emplace_back(index[e.parent], index[e.child]);
  }
  if (ids != nullptr) *ids = nodes;
  return UndirectedGraph(static_cast<int>(nodes.size()), edges);
}

UndirectedGraph aggregate_contacts(std::span<const ContactGraph> graphs,
                                   int population) {
  std::vector<std::pair<int, int>> edges;
  for (const ContactGraph& g : graphs) {
    for (const ContactEdge& e : g.edges()) edges.emplace_back(e.a, e.b);
  }
  return UndirectedGraph(population, edges);
}

CoverageCurve hop_coverage_from(const UndirectedGraph& graph,
                                std::string topology,
                                std::span<const int> sources, int max_hops) {
  if (max_hops < 0) throw DomainError("max_hops must be >= 0");
  const int n = graph.node_count();
  CoverageCurve curve{std::move(topology), {}};
  if (n == 0) {
    curve.fraction.assign(static_cast<std::size_t>(max_hops) + 1, 0.0);
    return curve;
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> frontier;
  for (int s : sources) {
    if (s < 0 || s >= n) throw DomainError("coverage source outside graph");
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
    }
  }
  std::size_t covered = frontier.size();
  curve.fraction.push_back(static_cast<double>(covered) / n);
  std::vector<int> next;
  for (int h = 1; h <= max_hops; ++h) {
    next.clear();
    for (int v : frontier) {
      for (int w : graph.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
      }
    }
    covered += next.size();
    curve.fraction.push_back(static_cast<double>(covered) / n);
    frontier.swap(next);
  }
  return curve;
}

CoverageCurve hop_coverage(const UndirectedGraph& graph, std::string topology,
                           int sample_size, int max_hops, std::uint64_t seed) {
  const int n = graph.node_count();
  if (sample_size < 1 || sample_size > n) {
    throw DomainError("coverage sample of " + std::to_string(sample_size) +
                      " from a graph with " + std::to_string(n) + " nodes");
  }
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_seed(seed, "coverage"));
  for (int i = 0; i < sample_size; ++i) {
    const auto j = i + static_cast<int>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(sample_size);
  return hop_coverage_from(graph, std::move(topology), ids, max_hops);
}

namespace {

// Adds the dependency of every node on shortest paths from `s`.
void brandes_source(const UndirectedGraph& g, int s, std::vector<double>& acc,
                    std::vector<int>& dist, std::vector<double>& sigma,
                    std::vector<double>& delta, std::vector<int>& order) {
  std::fill(dist.begin(), dist.end(), -1);
  std::fill(sigma.begin(), sigma.end(), 0.0);
  std::fill(delta.begin(), delta.end(), 0.0);
  order.clear();
  dist[s] = 0;
  sigma[s] = 1;
  order.push_back(s);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int v = order[head];
    for (int w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        order.push_back(w);
      }
      if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int w = *it;
    for (int v : g.neighbors(w)) {
      if (dist[v] == dist[w] - 1) {
        delta[v] += sigma[v] / sigma[w] * (1 + delta[w]);
      }
    }
    if (w != s) acc[w] += delta[w];
  }
}

}  // namespace

std::vector<double> betweenness(const UndirectedGraph& graph, int threads,
                                int exact_limit, int pivots,
                                std::uint64_t seed) {
  const int n = graph.node_count();
  std::vector<int> sources(static_cast<std::size_t>(n));
  std::iota(sources.begin(), sources.end(), 0);
  double scale = 0.5;
  if (n > exact_limit && pivots < n) {
    Rng rng(derive_seed(seed, "pivots"));
    for (int i = 0; i < pivots; ++i) {
      const auto j = i + static_cast<int>(rng.below(n - i));
      std::swap(sources[i], sources[j]);
    }
    sources.resize(pivots);
    std::sort(sources.begin(), sources.end());
    scale *= static_cast<double>(n) / pivots;
  }

  // Fixed chunking keeps the summation order independent of `threads`.
  constexpr std::size_t kChunks = 64;
  const std::size_t chunk_count = std::min(kChunks, sources.size());
  std::vector<std::vector<double>> partial(chunk_count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<int> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<int> order;
    order.reserve(n);
    for (std::size_t c = next++; c < chunk_count; c = next++) {
      std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
      const std::size_t lo = c * sources.size() / chunk_count;
      const std::size_t hi = (c + 1) * sources.size() / chunk_count;
      for (std::size_t i = lo; i < hi; ++i) {
        brandes_source(graph, sources[i], acc, dist, sigma, delta, order);
      }
      partial[c] = std::move(acc);
    }
  };
  const int pool_size =
      std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(chunk_count, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < pool_size; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (const auto& p : partial) {
    for (int v = 0; v < n; ++v) out[v] += p[v];
  }
  for (double& x : out) x *= scale;
  return out;
}

std::vector<PersonId> top_k(std::span<const double> scores, int k) {
  std::vector<PersonId> ids;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > 0) ids.push_back(static_cast<PersonId>(i));
  }
  const auto cmp = [&](PersonId a, PersonId b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  const auto keep = std::min<std::size_t>(ids.size(), std::max(k, 0));
  std::partial_sort(ids.begin(), ids.begin() + keep, ids.end(), cmp);
  ids.resize(keep);
  return ids;
}

double jaccard(std::span<const PersonId> a, std::span<const PersonId> b) {
  std::vector<PersonId> x(a.begin(), a.end());
  std::vector<PersonId> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::sort(y.begin(), y.end());
  y.erase(std::unique(y.begin(), y.end()), y.end());
  if (x.empty() && y.empty()) return 1.0;
  std::vector<PersonId> both;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                        std::back_inserter(both));
  const std::size_t uni = x.size() + y.size() - both.size();
  return static_cast<double>(both.size()) / static_cast<double>(uni);
}

std::vector<double> ipc_node_scores(std::span<const IpcResult> results,
                                    int population) {
  std::vector<double> out(static_cast<std::size_t>(population), 0.0);
  for (const IpcResult& r : results) {
    for (const CandidateScore& s : r.scores) {
      if (s.candidate < 0 || s.candidate >= population) {
        throw DomainError("IPC candidate outside the population");
      }
      out[s.candidate] += s.raw_pi;
    }
  }
  return out;
}

ContrastReport centrality_contrast(std::span<const double> betweenness_scores,
                                   std::span<const double> ipc_scores, int k) {
  ContrastReport r;
  r.betweenness_top = top_k(betweenness_scores, k);
  r.ipc_top = top_k(ipc_scores, k);
  r.jaccard = jaccard(r.betweenness_top, r.ipc_top);
  return r;
}

int degree_quantile(const std::map<int, std::int64_t>& histogram, double q) {
  std::int64_t total = 0;
  for (const auto& [d, c] : histogram) total += c;
  if (total == 0) return 0;
  const double target = q * static_cast<double>(total);
  std::int64_t seen = 0;
  for (const auto& [d, c] : histogram) {
    seen += c;
    if (static_cast<double>(seen) >= target) return d;
  }
  return histogram.rbegin()->first;
}

TailCheck check_heavy_tail(const std::map<int, std::int64_t>& histogram) {
  TailCheck t;
  std::int64_t total = 0;
  for (const auto& [d, c] : histogram) {
    if (c > 0) total += c;
  }
  if (total == 0) return t;

  // Median of the expanded degree list (mean of the two middle values for an
  // even count).
  auto nth = [&](std::int64_t k) {
    std::int64_t seen = 0;
    for (const auto& [d, c] : histogram) {
      seen += c;
      if (seen > k) return d;
    }
    return histogram.rbegin()->first;
  };
  t.median = total % 2 == 1 ? nth(total / 2)
                            : 0.5 * (nth(total / 2 - 1) + nth(total / 2));
  for (const auto& [d, c] : histogram) {
    if (c > 0) t.max_degree = std::max(t.max_degree, d);
  }
  if (t.max_degree < 1) return t;

  std::vector<double> density;
  for (int lo = 1; lo <= t.max_degree; lo *= 2) {
    std::int64_t c = 0;
    for (auto it = histogram.lower_bound(lo);
         it != histogram.end() && it->first < 2 * lo; ++it) {
      c += it->second;
    }
    density.push_back(static_cast<double>(c) / lo);
  }
  const auto mode = static_cast<std::size_t>(
      std::max_element(density.begin(), density.end()) - density.begin());
  t.mode_bin = 1 << mode;
  t.monotone = true;
  for (std::size_t i = mode + 1; i < density.size(); ++i) {
    if (!(density[i] < density[i - 1])) t.monotone = false;
  }
  t.decades = std::log10(static_cast<double>(t.max_degree) / t.mode_bin);
  t.heavy = t.max_degree >= 10 * t.median && t.monotone && t.decades >= 1.0;
  return t;
}

std::map<int, std::int64_t> degree_histogram(const UndirectedGraph& graph) {
  std::map<int, std::int64_t> hist;
  for (int v = 0; v < graph.node_count(); ++v) ++hist[graph.degree(v)];
  return hist;
}

void write_coverage(std::ostream& out, std::span<const CoverageCurve> curves,
                    std::string_view comment) {
  write_comment(out, comment);
  out << "topology,hop,fraction\n";
  for (const CoverageCurve& c : curves) {
    for (std::size_t h = 0; h < c.fraction.size(); ++h) {
      out << c.topology << ',' << h << ',' << format_double(c.fraction[h])
          << '\n';
    }
  }
}

void write_contrast(std::ostream& out, const ContrastReport& report,
                    std::string_view comment) {
  write_comment(out, comment);
  out << "rank,betweenness_node,ipc_node\n";
  const std::size_t rows =
      std::max(report.betweenness_top.size(), report.ipc_top.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << i + 1 << ',';
    if (i < report.betweenness_top.size()) out << report.betweenness_top[i];
    out << ',';
    if (i < report.ipc_top.size()) out << report.ipc_top[i];
    out << '\n';
  }
}

void write_degree_histogram(std::ostream& out,
                            const std::map<int, std::int64_t>& histogram,
                            std::string_view comment) {
  write_comment(out, comment);
  out << "degree,count\n";
  for (const auto& [d, c] : histogram) out << d << ',' << c << '\n';
}

}  // namespace tracenet
