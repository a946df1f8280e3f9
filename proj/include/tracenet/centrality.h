#ifndef TRACENET_CENTRALITY_H_
#define TRACENET_CENTRALITY_H_

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "tracenet/tracing.h"
#include "tracenet/types.h"

namespace tracenet {

struct IpcParams {
  // Per-hop decay of the signal sent upstream from each infectious leaf.
  double alpha = 0.5;
  // Depth of the upstream sweep (H).
  int max_hops = 2;
  // Leave the scored leaf out of the phi sources. Sensitivity knob only.
  bool exclude_focal_leaf = false;

  // Throws ConfigError.
  void validate() const;
};

// Weight of an edge reached at hop h from a leaf: alpha^(h-1), with 0^0 = 1.
// Throws DomainError for h < 1.
double edge_weight(int hop, const IpcParams& params);

// Infectious Path Centrality is computed in two sweeps over the DAG.
//
// Upstream sweep (phi). Every source leaf emits a signal against edge
// direction. A walk of length h (1 <= h <= H) ending at y contributes
// alpha^(h-1) to phi_y. Parallel edges are distinct walks.
//
//   phi_y = sum_{leaves l} sum_{h=1..H} alpha^(h-1) * walks_h(l -> y)
//
// Downstream accumulation (pi). For a leaf u and each parent v of u, phi is
// gathered from v's ancestors within H-1 further hops, scaled by the focal
// leaf's attenuation at that depth (an ancestor d hops above v is hop d+1
// from u and carries alpha^d):
//
//   pi_v = m(u,v) + sum_{d=1..H-1} alpha^d * sum_x walks_d(v -> x) * phi_x
//
// where m(u,v) is the number of parallel u<-v contact edges, each of weight
// alpha^0 = 1. Scores are normalized by the per-leaf maximum.
//
// Returns phi for every node with phi > 0.
std::map<PersonId, double> accumulate_phi(const TracingDag& dag,
                                          std::span<const PersonId> leaves,
                                          const IpcParams& params);

struct CandidateScore {
  PersonId candidate = 0;
  double raw_pi = 0.0;
  double normalized_pi = 0.0;
};

struct IpcResult {
  PersonId leaf = 0;
  // Sorted by candidate id.
  std::vector<CandidateScore> scores;

  const CandidateScore* find(PersonId candidate) const;
};

// Scores the parents of `leaf`, using every leaf of the DAG as a phi source.
// Throws DomainError if `leaf` is not a leaf of the DAG.
IpcResult infectious_path_centrality(const TracingDag& dag, PersonId leaf,
                                     const IpcParams& params);

// Same results as calling infectious_path_centrality per leaf, sharing the
// upstream sweep.
std::vector<IpcResult> batch_ipc(const TracingDag& dag,
                                 std::span<const PersonId> leaves,
                                 const IpcParams& params);

// Precomputed sweeps for one DAG state. Cheap to query per leaf.
class IpcEngine {
 public:
  IpcEngine(const TracingDag& dag, const IpcParams& params);

  IpcResult score(PersonId leaf) const;
  double phi(PersonId person) const;

 private:
  // Single-source upstream sweep from `leaf`, as (person, phi) pairs.
  std::map<PersonId, double> phi_from(PersonId leaf) const;
  // sum_{d=1..H-1} alpha^d * sum_x walks_d(v -> x) * field(x)
  double gather_upstream(PersonId v,
                         const std::map<PersonId, double>& field) const;

  const TracingDag& dag_;
  IpcParams params_;
  std::vector<double> phi_;
  std::vector<double> gathered_;
};

// CSV `leaf,candidate,raw_pi,normalized_pi`.
void write_ipc(std::ostream& out, std::span<const IpcResult> results,
               std::string_view comment = {});
std::vector<IpcResult> parse_ipc(std::istream& in, std::string_view source);

}  // namespace tracenet

#endif  // TRACENET_CENTRALITY_H_
