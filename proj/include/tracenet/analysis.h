#ifndef TRACENET_ANALYSIS_H_
#define TRACENET_ANALYSIS_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracenet/centrality.h"
#include "tracenet/contact_graph.h"
#include "tracenet/tracing.h"

namespace tracenet {

// Simple undirected graph on nodes [0, n) without self-loops or parallel
// edges.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  // Duplicate pairs and self-loops are dropped. Throws DomainError for ids
  // outside [0, n).
  UndirectedGraph(int n, std::span<const std::pair<int, int>> edges);

  int node_count() const { return n_; }
  std::size_t edge_count() const { return adjacency_.size() / 2; }
  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  int degree(int v) const {
    return static_cast<int>(offsets_[v + 1] - offsets_[v]);
  }

 private:
  int n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> adjacency_;
};

enum class ReferenceKind { kScaleFree, kRandom, kMesh };
std::string_view reference_kind_name(ReferenceKind kind);

// Most square rows x cols with rows * cols == n_nodes and rows <= cols.
std::pair<int, int> mesh_dimensions(int n_nodes);

// Scale-free: preferential attachment grown from a small clique, with the
// per-node attachment count varied so the edge count is exact. Random:
// n_edges distinct pairs drawn uniformly. Mesh: non-wrapping 2-D lattice on
// mesh_dimensions(n_nodes); n_edges is ignored since a lattice fixes it.
// Throws ConfigError if the requested counts are infeasible.
UndirectedGraph generate_reference_graph(ReferenceKind kind, int n_nodes,
                                         std::int64_t n_edges,
                                         std::uint64_t seed);

// Tracing DAG with edge direction and multiplicity dropped, nodes renumbered
// in increasing person id. `ids`, if given, receives the person behind each
// node.
UndirectedGraph undirected_view(const TracingDag& dag,
                                std::vector<PersonId>* ids = nullptr);

// Union of all daily contacts over persons [0, population).
UndirectedGraph aggregate_contacts(std::span<const ContactGraph> graphs,
                                   int population);

struct CoverageCurve {
  std::string topology;
  // fraction[h] = share of nodes within h hops of the sample, h = 0..max.
  std::vector<double> fraction;
};

// Multi-source BFS from `sample_size` distinct nodes drawn with `seed`.
// Throws DomainError if the graph has fewer nodes than the sample.
CoverageCurve hop_coverage(const UndirectedGraph& graph, std::string topology,
                           int sample_size, int max_hops, std::uint64_t seed);
CoverageCurve hop_coverage_from(const UndirectedGraph& graph,
                                std::string topology,
                                std::span<const int> sources, int max_hops);

// Brandes betweenness (unnormalized, each unordered pair counted once).
// Exact when node_count <= exact_limit, otherwise estimated from `pivots`
// sources drawn with `seed` and scaled by n / pivots. The result does not
// depend on the thread count.
std::vector<double> betweenness(const UndirectedGraph& graph, int threads = 1,
                                int exact_limit = 5000, int pivots = 512,
                                std::uint64_t seed = 0);

// Top-k ids by descending score, ties to the lower id; ids with score <= 0
// are never ranked.
std::vector<PersonId> top_k(std::span<const double> scores, int k);
// |A & B| / |A | B|; 1 when both are empty.
double jaccard(std::span<const PersonId> a, std::span<const PersonId> b);

// Sum of raw pi per candidate over all leaves, indexed by person id.
std::vector<double> ipc_node_scores(std::span<const IpcResult> results,
                                    int population);

struct ContrastReport {
  std::vector<PersonId> betweenness_top;
  std::vector<PersonId> ipc_top;
  double jaccard = 0;
};

ContrastReport centrality_contrast(std::span<const double> betweenness_scores,
                                   std::span<const double> ipc_scores, int k);

struct TailCheck {
  double median = 0;
  int max_degree = 0;
  // Lower edge of the densest log2 bin among degrees >= 1.
  int mode_bin = 0;
  // Densities strictly decrease from the mode bin to the last bin.
  bool monotone = false;
  // log10(max_degree / mode_bin).
  double decades = 0;
  bool heavy = false;
};

// Median over every node of the histogram, including degree 0. heavy means
// max >= 10 x median, a monotone tail and at least one decade of tail.
TailCheck check_heavy_tail(const std::map<int, std::int64_t>& histogram);

// Smallest degree d such that at least q of the nodes have degree <= d.
int degree_quantile(const std::map<int, std::int64_t>& histogram, double q);

std::map<int, std::int64_t> degree_histogram(const UndirectedGraph& graph);

// CSV `topology,hop,fraction`.
void write_coverage(std::ostream& out, std::span<const CoverageCurve> curves,
                    std::string_view comment = {});
// CSV `rank,betweenness_node,ipc_node`; a shorter list leaves its column
// empty.
void write_contrast(std::ostream& out, const ContrastReport& report,
                    std::string_view comment = {});
// CSV `degree,count`.
void write_degree_histogram(std::ostream& out,
                            const std::map<int, std::int64_t>& histogram,
                            std::string_view comment = {});

}  // namespace tracenet

#endif  // TRACENET_ANALYSIS_H_
