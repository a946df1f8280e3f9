#include "tracenet/tracing.h"

#include <algorithm>
#include <string>

#include "tracenet/csv.h"

namespace tracenet {

TracingDag::Node& TracingDag::touch(PersonId person) {
  if (person < 0) throw IntegrityError("negative person id in tracing DAG");
  if (static_cast<std::size_t>(person) >= nodes_.size()) {
    nodes_.resize(static_cast<std::size_t>(person) + 1);
  }
  Node& n = nodes_[person];
  if (!n.present) {
    n.present = true;
    ++node_count_;
  }
  return n;
}

const TracingDag::Node* TracingDag::find(PersonId person) const {
  if (person < 0 || static_cast<std::size_t>(person) >= nodes_.size()) {
    return nullptr;
  }
  const Node& n = nodes_[person];
  return n.present ? &n : nullptr;
}

EdgeId TracingDag::add_edge(const DagEdge& e) {
  const auto id = static_cast<EdgeId>(edges_.size());
  edges_.push_back(e);
  alive_.push_back(1);
  touch(e.parent).out.push_back(id);
  touch(e.child).in.push_back(id);
  ++live_edges_;
  return id;
}

void TracingDag::drop_outgoing(PersonId person) {
  Node& n = nodes_[person];
  for (EdgeId id : n.out) {
    const DagEdge& e = edges_[id];
    if (e.is_transmission) {
      throw IntegrityError("person " + std::to_string(person) +
                           " transmitted before being infected");
    }
    auto& in = nodes_[e.child].in;
    in.erase(std::find(in.begin(), in.end(), id));
    alive_[id] = 0;
    --live_edges_;
  }
  n.out.clear();
}

void TracingDag::record_infection(const TransmissionEvent& event,
                                  std::span<const Contact> day_contacts) {
  if (const Node* existing = find(event.infectee);
      existing != nullptr && existing->infection_day >= 0) {
    throw IntegrityError("person " + std::to_string(event.infectee) +
                         " recorded as infected twice");
  }
  const auto match = std::find(day_contacts.begin(), day_contacts.end(),
                               Contact{event.infector, event.hour, event.poi});
  if (match == day_contacts.end()) {
    throw IntegrityError("infector " + std::to_string(event.infector) +
                         " is not a same-day contact of infectee " +
                         std::to_string(event.infectee));
  }

  Node& child = touch(event.infectee);
  child.infection_day = event.day;
  child.leaf = true;
  leaves_.push_back(event.infectee);
  drop_outgoing(event.infectee);

  for (const Contact& c : day_contacts) {
    add_edge({c.neighbor, event.infectee, event.day, c.hour, c.poi,
              &c == &*match});
  }
}

TracingDag TracingDag::from_edges(std::span<const DagEdge> edges) {
  TracingDag dag;
  std::size_t begin = 0;
  while (begin < edges.size()) {
    const PersonId child = edges[begin].child;
    std::size_t end = begin;
    int transmissions = 0;
    while (end < edges.size() && edges[end].child == child) {
      transmissions += edges[end].is_transmission ? 1 : 0;
      ++end;
    }
    if (transmissions != 1) {
      throw IntegrityError("child " + std::to_string(child) + " has " +
                           std::to_string(transmissions) +
                           " transmission edges");
    }
    if (dag.is_leaf(child)) {
      throw IntegrityError("edges of child " + std::to_string(child) +
                           " are not contiguous");
    }
    Node& n = dag.touch(child);
    n.infection_day = edges[begin].day;
    n.leaf = true;
    dag.leaves_.push_back(child);
    dag.drop_outgoing(child);
    for (std::size_t i = begin; i < end; ++i) dag.add_edge(edges[i]);
    begin = end;
  }
  return dag;
}

bool TracingDag::contains(PersonId person) const {
  return find(person) != nullptr;
}

bool TracingDag::is_leaf(PersonId person) const {
  const Node* n = find(person);
  return n != nullptr && n->leaf;
}

std::vector<PersonId> TracingDag::nodes() const {
  std::vector<PersonId> out;
  out.reserve(node_count_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].present) out.push_back(static_cast<PersonId>(i));
  }
  return out;
}

std::span<const EdgeId> TracingDag::incoming(PersonId person) const {
  const Node* n = find(person);
  return n ? std::span<const EdgeId>(n->in) : std::span<const EdgeId>();
}

std::span<const EdgeId> TracingDag::outgoing(PersonId person) const {
  const Node* n = find(person);
  return n ? std::span<const EdgeId>(n->out) : std::span<const EdgeId>();
}

std::vector<DagEdge> TracingDag::edges() const {
  std::vector<DagEdge> out;
  out.reserve(live_edges_);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (alive_[i]) out.push_back(edges_[i]);
  }
  return out;
}

std::optional<int> TracingDag::infection_day(PersonId person) const {
  const Node* n = find(person);
  if (n == nullptr || n->infection_day < 0) return std::nullopt;
  return n->infection_day;
}

TracingDag build_tracing_dag(std::span<const TransmissionEvent> events,
                             std::span<const ContactGraph> graphs) {
  TracingDag dag;
  for (const TransmissionEvent& e : events) {
    if (e.day < 0 || static_cast<std::size_t>(e.day) >= graphs.size()) {
      throw IntegrityError("transmission on day " + std::to_string(e.day) +
                           " has no contact graph");
    }
    dag.record_infection(e, graphs[e.day].contacts_of(e.infectee));
  }
  return dag;
}

std::map<int, std::int64_t> in_degree_histogram(const TracingDag& dag) {
  std::map<int, std::int64_t> hist;
  for (PersonId p : dag.nodes()) ++hist[dag.in_degree(p)];
  return hist;
}

double class_imbalance(const TracingDag& dag) {
  std::int64_t positive = 0;
  std::int64_t negative = 0;
  for (PersonId leaf : dag.leaves()) {
    for (EdgeId id : dag.incoming(leaf)) {
      (dag.edge(id).is_transmission ? positive : negative) += 1;
    }
  }
  return positive == 0 ? 0.0
                       : static_cast<double>(negative) /
                             static_cast<double>(positive);
}

void write_dag(std::ostream& out, const TracingDag& dag,
               std::string_view comment) {
  write_comment(out, comment);
  out << "parent,child,day,hour,poi,is_transmission\n";
  for (const DagEdge& e : dag.edges()) {
    out << e.parent << ',' << e.child << ',' << e.day << ',' << e.hour << ','
        << e.poi << ',' << (e.is_transmission ? 1 : 0) << '\n';
  }
}

TracingDag parse_dag(std::istream& in, std::string_view source) {
  CsvReader reader(in, std::string(source),
                   "parent,child,day,hour,poi,is_transmission");
  std::vector<DagEdge> edges;
  while (reader.next()) {
    const std::int64_t label = reader.integer(5);
    if (label != 0 && label != 1) reader.fail("is_transmission must be 0 or 1");
    edges.push_back({static_cast<PersonId>(reader.integer(0)),
                     static_cast<PersonId>(reader.integer(1)),
                     static_cast<int>(reader.integer(2)),
                     static_cast<int>(reader.integer(3)),
                     static_cast<PoiId>(reader.integer(4)), label == 1});
  }
  return TracingDag::from_edges(edges);
}

}  // namespace tracenet
