#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.h"
#include "tracenet/contact_graph.h"

namespace tracenet {
namespace {

TEST(ContactGraph, ThreeDevicesOneBucketGiveTriangle) {
  std::vector<VisitRecord> v{{0, 4, 0, 9}, {1, 4, 0, 9}, {2, 4, 0, 9}};
  const auto g = build_contact_graphs(v, 1);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].edge_count(), 3u);
}

TEST(ContactGraph, DifferentHoursDoNotMeet) {
  std::vector<VisitRecord> v{{0, 4, 0, 9}, {1, 4, 0, 10}};
  EXPECT_EQ(build_contact_graphs(v, 1)[0].edge_count(), 0u);
}

TEST(ContactGraph, IsolatedAndUnknownPersons) {
  std::vector<VisitRecord> v{{0, 4, 0, 9}, {1, 4, 0, 9}, {2, 5, 0, 9}};
  const auto g = build_contact_graphs(v, 1);
  EXPECT_TRUE(daily_edge_list(g[0], 2).empty());
  EXPECT_TRUE(daily_edge_list(g[0], 99).empty());
  EXPECT_TRUE(daily_edge_list(g[0], -1).empty());
}

TEST(ContactGraph, PersonInTriangleHasTwoNeighbors) {
  std::vector<VisitRecord> v{{0, 4, 0, 9}, {1, 4, 0, 9}, {2, 4, 0, 9}};
  EXPECT_EQ(daily_edge_list(build_contact_graphs(v, 1)[0], 1).size(), 2u);
}

TEST(ContactGraph, ParallelContactsAreKept) {
  std::vector<VisitRecord> v{{0, 4, 0, 9}, {1, 4, 0, 9}, {0, 6, 0, 12}, {1, 6, 0, 12}};
  const auto g = build_contact_graphs(v, 1);
  EXPECT_EQ(g[0].edge_count(), 2u);
  const auto c = daily_edge_list(g[0], 0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (Contact{1, 9, 4}));
  EXPECT_EQ(c[1], (Contact{1, 12, 6}));
}

std::vector<VisitRecord> random_visits(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::set<VisitRecord> s;
  while (static_cast<int>(s.size()) < n) {
    s.insert({static_cast<PersonId>(rng() % 150), static_cast<PoiId>(rng() % 12),
              static_cast<int>(rng() % 4), static_cast<int>(rng() % 24)});
  }
  return {s.begin(), s.end()};
}

TEST(ContactGraph, MatchesPairwiseOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto visits = random_visits(seed, 1000);
    const auto graphs = build_contact_graphs(visits, 4);
    std::set<std::tuple<int, PersonId, PersonId, int, PoiId>> got;
    std::size_t total = 0;
    for (const ContactGraph& g : graphs) {
      for (const ContactEdge& e : g.edges()) {
        ASSERT_LT(e.a, e.b);
        got.emplace(g.day(), e.a, e.b, e.hour, e.poi);
        ++total;
      }
    }
    EXPECT_EQ(total, got.size());
    EXPECT_EQ(got, oracle::contact_pairs(visits));
  }
}

TEST(ContactGraph, BucketCompletenessAndSymmetry) {
  const auto visits = random_visits(9, 1000);
  const auto graphs = build_contact_graphs(visits, 4);
  std::map<std::tuple<int, int, int>, std::int64_t> bucket;
  for (const VisitRecord& v : visits) ++bucket[{v.day, v.poi_id, v.hour}];
  std::int64_t expected = 0;
  for (auto [key, k] : bucket) expected += k * (k - 1) / 2;
  std::int64_t edges = 0;
  for (const ContactGraph& g : graphs) {
    edges += static_cast<std::int64_t>(g.edge_count());
    for (const ContactEdge& e : g.edges()) {
      const auto from_a = daily_edge_list(g, e.a);
      const auto from_b = daily_edge_list(g, e.b);
      EXPECT_NE(std::find(from_a.begin(), from_a.end(), Contact{e.b, e.hour, e.poi}),
                from_a.end());
      EXPECT_NE(std::find(from_b.begin(), from_b.end(), Contact{e.a, e.hour, e.poi}),
                from_b.end());
    }
  }
  EXPECT_EQ(edges, expected);
}

TEST(ContactGraph, EdgeListMatchesLinearScan) {
  const auto visits = random_visits(4, 1000);
  const auto graphs = build_contact_graphs(visits, 4);
  for (const ContactGraph& g : graphs) {
    for (PersonId p = 0; p < 150; p += 7) {
      std::vector<Contact> scan;
      for (const ContactEdge& e : g.edges()) {
        if (e.a == p) scan.push_back({e.b, e.hour, e.poi});
        if (e.b == p) scan.push_back({e.a, e.hour, e.poi});
      }
      std::sort(scan.begin(), scan.end(), [](const Contact& x, const Contact& y) {
        return std::tie(x.hour, x.neighbor, x.poi) < std::tie(y.hour, y.neighbor, y.poi);
      });
      EXPECT_EQ(daily_edge_list(g, p), scan);
    }
  }
}

TEST(ContactGraph, EdgesInEvaluationOrder) {
  const auto graphs = build_contact_graphs(random_visits(5, 1000), 4);
  for (const ContactGraph& g : graphs) {
    const auto e = g.edges();
    EXPECT_TRUE(std::is_sorted(e.begin(), e.end(), [](const ContactEdge& x, const ContactEdge& y) {
      return std::tie(x.hour, x.poi, x.a, x.b) < std::tie(y.hour, y.poi, y.a, y.b);
    }));
  }
}

TEST(ContactGraph, WithoutDropsExcludedPersons) {
  std::vector<VisitRecord> v{{0, 4, 0, 9}, {1, 4, 0, 9}, {2, 4, 0, 9}};
  const auto g = build_contact_graphs(v, 1)[0];
  std::vector<char> mask{0, 1, 0};
  const ContactGraph f = g.without(mask);
  ASSERT_EQ(f.edge_count(), 1u);
  EXPECT_EQ(f.edges()[0].a, 0);
  EXPECT_EQ(f.edges()[0].b, 2);
  EXPECT_TRUE(daily_edge_list(f, 1).empty());
}

TEST(ContactGraph, EdgeExport) {
  std::vector<VisitRecord> v{{3, 4, 1, 9}, {1, 4, 1, 9}};
  std::ostringstream out;
  write_contact_edges(out, build_contact_graphs(v, 2));
  EXPECT_EQ(out.str(), "day,person_a,person_b,hour,poi_id\n1,1,3,9,4\n");
}

}  // namespace
}  // namespace tracenet
