#ifndef TRACENET_TRACING_H_
#define TRACENET_TRACING_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "tracenet/contact_graph.h"
#include "tracenet/epidemic.h"
#include "tracenet/types.h"

namespace tracenet {

using EdgeId = std::uint32_t;

// Recalled interaction, directed from potential infector to infectee.
// is_transmission is ground truth: visible to training, never to inference.
struct DagEdge {
  PersonId parent = 0;
  PersonId child = 0;
  int day = 0;
  int hour = 0;
  PoiId poi = 0;
  bool is_transmission = false;

  friend bool operator==(const DagEdge&, const DagEdge&) = default;
};

// Contact-tracing graph grown one infection at a time. Recording an infectee
// adds one incoming edge per contact event on its infection day and makes it a
// leaf.
//
// Acyclicity is kept by a retroactive rule: when a person is recorded as
// infected, any outgoing edges it already had are dropped. Those were recalled
// by earlier infectees while this person was still susceptible, so they point
// backward in time and cannot be transmissions. Afterwards every edge between
// two infected persons runs from the earlier-recorded one to the later one,
// and never-infected contacts have no incoming edges.
class TracingDag {
 public:
  // Throws IntegrityError if the infectee is already recorded or the
  // infector has no matching (neighbor, hour, poi) entry in day_contacts.
  void record_infection(const TransmissionEvent& event,
                        std::span<const Contact> day_contacts);

  // Rebuilds a DAG from exported edges (grouped by child in recording order).
  // Throws IntegrityError if a child does not have exactly one transmission
  // edge or children interleave.
  static TracingDag from_edges(std::span<const DagEdge> edges);

  bool contains(PersonId person) const;
  bool is_leaf(PersonId person) const;
  // Recorded infectees in recording order.
  std::span<const PersonId> leaves() const { return leaves_; }
  std::vector<PersonId> nodes() const;
  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return live_edges_; }
  // One past the largest person id that is a node.
  PersonId id_bound() const { return static_cast<PersonId>(nodes_.size()); }

  std::span<const EdgeId> incoming(PersonId person) const;
  std::span<const EdgeId> outgoing(PersonId person) const;
  int in_degree(PersonId person) const {
    return static_cast<int>(incoming(person).size());
  }
  int out_degree(PersonId person) const {
    return static_cast<int>(outgoing(person).size());
  }
  const DagEdge& edge(EdgeId id) const { return edges_[id]; }
  // Live edges in insertion order.
  std::vector<DagEdge> edges() const;

  std::optional<int> infection_day(PersonId person) const;

 private:
  struct Node {
    bool present = false;
    bool leaf = false;
    int infection_day = -1;
    std::vector<EdgeId> in;
    std::vector<EdgeId> out;
  };

  Node& touch(PersonId person);
  const Node* find(PersonId person) const;
  EdgeId add_edge(const DagEdge& e);
  void drop_outgoing(PersonId person);

  std::vector<Node> nodes_;
  std::vector<DagEdge> edges_;
  std::vector<char> alive_;
  std::vector<PersonId> leaves_;
  std::size_t node_count_ = 0;
  std::size_t live_edges_ = 0;
};

// Replays every transmission against its day's contact graph.
TracingDag build_tracing_dag(std::span<const TransmissionEvent> events,
                             std::span<const ContactGraph> graphs);

// degree -> number of nodes with that in-degree. Sums to node_count().
std::map<int, std::int64_t> in_degree_histogram(const TracingDag& dag);

// (#non-transmission edges) / (#transmission edges); 0 for an empty DAG.
double class_imbalance(const TracingDag& dag);

// CSV `parent,child,day,hour,poi,is_transmission`.
void write_dag(std::ostream& out, const TracingDag& dag,
               std::string_view comment = {});
TracingDag parse_dag(std::istream& in, std::string_view source);

}  // namespace tracenet

#endif  // TRACENET_TRACING_H_
