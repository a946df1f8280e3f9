#include "tracenet/contact_graph.h"

#include <algorithm>
#include <tuple>

#include "tracenet/csv.h"

namespace tracenet {

ContactGraph::ContactGraph(int day, std::vector<ContactEdge> edges)
    : day_(day), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end(),
            [](const ContactEdge& x, const ContactEdge& y) {
              return std::tie(x.hour, x.poi, x.a, x.b) <
                     std::tie(y.hour, y.poi, y.a, y.b);
            });
  PersonId max_id = -1;
  for (const ContactEdge& e : edges_) max_id = std::max({max_id, e.a, e.b});
  const auto n = static_cast<std::size_t>(max_id + 1);

  offsets_.assign(n + 1, 0);
  for (const ContactEdge& e : edges_) {
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const ContactEdge& e : edges_) {
    adjacency_[cursor[e.a]++] = {e.b, e.hour, e.poi};
    adjacency_[cursor[e.b]++] = {e.a, e.hour, e.poi};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + offsets_[i],
              adjacency_.begin() + offsets_[i + 1],
              [](const Contact& x, const Contact& y) {
                return std::tie(x.hour, x.neighbor, x.poi) <
                       std::tie(y.hour, y.neighbor, y.poi);
              });
  }
}

std::span<const Contact> ContactGraph::contacts_of(PersonId person) const {
  if (person < 0 || static_cast<std::size_t>(person) + 1 >= offsets_.size()) {
    return {};
  }
  return std::span<const Contact>(adjacency_)
      .subspan(offsets_[person], offsets_[person + 1] - offsets_[person]);
}

ContactGraph ContactGraph::without(std::span<const char> excluded) const {
  auto is_excluded = [&](PersonId p) {
    return static_cast<std::size_t>(p) < excluded.size() && excluded[p] != 0;
  };
  std::vector<ContactEdge> kept;
  kept.reserve(edges_.size());
  for (const ContactEdge& e : edges_) {
    if (!is_excluded(e.a) && !is_excluded(e.b)) kept.push_back(e);
  }
  return ContactGraph(day_, std::move(kept));
}

std::vector<ContactGraph> build_contact_graphs(
    std::span<const VisitRecord> visits, int n_days) {
  // Bucket by (day, hour, poi); within a bucket devices are distinct because
  // visit tuples are unique.
  std::vector<VisitRecord> sorted;
  sorted.reserve(visits.size());
  for (const VisitRecord& v : visits) {
    if (v.day >= 0 && v.day < n_days) sorted.push_back(v);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const VisitRecord& x, const VisitRecord& y) {
              return std::tie(x.day, x.hour, x.poi_id, x.device_id) <
                     std::tie(y.day, y.hour, y.poi_id, y.device_id);
            });

  std::vector<std::vector<ContactEdge>> per_day(std::max(n_days, 0));
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    std::size_t end = begin + 1;
    const VisitRecord& head = sorted[begin];
    while (end < sorted.size() && sorted[end].day == head.day &&
           sorted[end].hour == head.hour &&
           sorted[end].poi_id == head.poi_id) {
      ++end;
    }
    auto& out = per_day[head.day];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < end; ++j) {
        out.push_back({sorted[i].device_id, sorted[j].device_id, head.hour,
                       head.poi_id});
      }
    }
    begin = end;
  }

  std::vector<ContactGraph> graphs;
  graphs.reserve(per_day.size());
  for (int day = 0; day < n_days; ++day) {
    graphs.emplace_back(day, std::move(per_day[day]));
  }
  return graphs;
}

std::vector<Contact> daily_edge_list(const ContactGraph& graph,
                                     PersonId person) {
  const auto contacts = graph.contacts_of(person);
  return {contacts.begin(), contacts.end()};
}

void write_contact_edges(std::ostream& out,
                         std::span<const ContactGraph> graphs,
                         std::string_view comment) {
  write_comment(out, comment);
  out << "day,person_a,person_b,hour,poi_id\n";
  for (const ContactGraph& g : graphs) {
    for (const ContactEdge& e : g.edges()) {
      out << g.day() << ',' << e.a << ',' << e.b << ',' << e.hour << ','
          << e.poi << '\n';
    }
  }
}

}  // namespace tracenet
