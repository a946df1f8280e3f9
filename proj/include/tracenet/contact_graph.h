#ifndef TRACENET_CONTACT_GRAPH_H_
#define TRACENET_CONTACT_GRAPH_H_

#include <compare>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "tracenet/mobility.h"
#include "tracenet/types.h"

namespace tracenet {

// Undirected co-location edge, stored with a < b.
struct ContactEdge {
  PersonId a = 0;
  PersonId b = 0;
  int hour = 0;
  PoiId poi = 0;

  friend auto operator<=>(const ContactEdge&, const ContactEdge&) = default;
};

// One edge seen from one endpoint.
struct Contact {
  PersonId neighbor = 0;
  int hour = 0;
  PoiId poi = 0;

  friend auto operator<=>(const Contact&, const Contact&) = default;
};

// Person-to-person interactions of a single day. Immutable once built.
// Edges are kept in (hour, poi, a, b) order, which is also the order in which
// the epidemic evaluates exposures.
class ContactGraph {
 public:
  ContactGraph() = default;
  ContactGraph(int day, std::vector<ContactEdge> edges);

  int day() const { return day_; }
  std::span<const ContactEdge> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  // Contacts of `person` sorted by (hour, neighbor, poi). Unknown ids yield
  // an empty span.
  std::span<const Contact> contacts_of(PersonId person) const;

  // Copy without any edge touching a person for whom excluded[p] != 0.
  ContactGraph without(std::span<const char> excluded) const;

 private:
  int day_ = 0;
  std::vector<ContactEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Contact> adjacency_;
};

// One graph per day in [0, n_days): every (poi, day, hour) bucket with k
// distinct devices becomes a complete graph on k vertices. Visits on days
// >= n_days are ignored.
std::vector<ContactGraph> build_contact_graphs(
    std::span<const VisitRecord> visits, int n_days);

// Owning copy of graph.contacts_of(person).
std::vector<Contact> daily_edge_list(const ContactGraph& graph,
                                     PersonId person);

// CSV `day,person_a,person_b,hour,poi_id`.
void write_contact_edges(std::ostream& out,
                         std::span<const ContactGraph> graphs,
                         std::string_view comment = {});

}  // namespace tracenet

#endif  // TRACENET_CONTACT_GRAPH_H_
