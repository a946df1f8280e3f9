// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "commands.h"
#include "oracles.h"
#include "tracenet/analysis.h"
#include "tracenet/centrality.h"
#include "tracenet/classifier.h"
#include "tracenet/config.h"
#include "tracenet/contact_graph.h"
#include "tracenet/epidemic.h"
#include "tracenet/mitigation.h"
#include "tracenet/mobility.h"
#include "tracenet/rng.h"
#include "tracenet/tracing.h"

namespace tracenet {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Shared desk-scale inputs, built once.
struct Desk {
  RunConfig config = desk_config();
  std::vector<VisitRecord> visits;
  std::vector<ContactGraph> train_graphs;
  std::vector<ContactGraph> deploy_graphs;
  EpidemicResult outbreak;
  TracingDag dag;
  EdgeClassifier model;
  std::vector<ScenarioResult> sweep_results;

  Desk() {
    visits = generate_visits(config.mobility);
    train_graphs = cli::window_graphs(visits, 0, config.train_days);
    deploy_graphs =
        cli::window_graphs(visits, config.train_days, config.mobility.horizon_days);
    outbreak = run_epidemic(train_graphs, config.mobility.n_people, config.disease);
    dag = build_tracing_dag(outbreak.events, train_graphs);
    const FeatureSchema schema = FeatureSchema::from_ipc(config.ipc);
    const auto ipc = batch_ipc(dag, dag.leaves(), config.ipc);
    model = train(build_training_set(dag, ipc, schema), schema, config.classifier).model;
  }

  ScenarioSetup setup() const {
    ScenarioSetup s;
    s.graphs = deploy_graphs;
    s.population = config.mobility.n_people;
    s.disease = config.disease;
    s.disease.horizon_days = config.deploy_days();
    s.ipc = config.ipc;
    s.model = &model;
    return s;
  }
};

Outcome ipc_oracle() {
  std::mt19937_64 rng(20240601);
  const std::array<double, 3> alphas{0.25, 0.5, 0.75};
  double worst = 0;
  int leaves = 0;
  for (int t = 0; t < 200; ++t) {
    const TracingDag dag = oracle::random_dag(rng, 50, 4);
    const int h = 1 + t % 4;
    const double a = alphas[(t / 4) % 3];
    const oracle::IpcOracle ref(dag, a, h);
    const std::vector<PersonId> sources(dag.leaves().begin(), dag.leaves().end());
    IpcParams p;
    p.alpha = a;
    p.max_hops = h;
    for (PersonId leaf : dag.leaves()) {
      ++leaves;
      const auto want = ref.raw_pi(leaf, sources);
      const IpcResult got = infectious_path_centrality(dag, leaf, p);
      if (got.scores.size() != want.size()) {
        return {false, "candidate sets differ on DAG " + std::to_string(t)};
      }
      double top = 0;
      for (const auto& [v, pi] : want) top = std::max(top, pi);
      for (const CandidateScore& s : got.scores) {
        const auto it = want.find(s.candidate);
        if (it == want.end()) return {false, "unexpected candidate"};
        worst = std::max(worst, std::abs(s.raw_pi - it->second) / std::abs(it->second));
        const double norm = it->second / top;
        worst = std::max(worst, std::abs(s.normalized_pi - norm) / norm);
      }
    }
  }
  return {worst <= 1e-9, "200 DAGs, " + std::to_string(leaves) +
                             " leaves, max relative error " + fmt("%.3g", worst)};
}

Outcome shared_ancestor() {
  // Leaf u with candidates v and i. v and i were infected by y and w; y is
  // also the infector of the second leaf z, and v a contact of z.
  const PersonId u = 1, z = 2, v = 3, i = 4, y = 5, w = 6;
  auto record = [](TracingDag& dag, PersonId child, std::vector<PersonId> parents, int day) {
    std::vector<Contact> c;
    for (PersonId p : parents) c.push_back({p, 1, 0});
    dag.record_infection({parents.front(), child, day, 1, 0}, c);
  };
  TracingDag dag;
  record(dag, v, {y}, 0);
  record(dag, i, {w}, 0);
  record(dag, u, {v, i}, 3);
  record(dag, z, {y, v}, 4);
  int checked = 0;
  double smallest_gap = 1e9;
  for (int h = 2; h <= 8; ++h) {
    for (int k = 1; k <= 99; ++k) {
      IpcParams p;
      p.alpha = k / 100.0;
      p.max_hops = h;
      const IpcResult r = infectious_path_centrality(dag, u, p);
      const double gap = r.find(v)->raw_pi - r.find(i)->raw_pi;
      smallest_gap = std::min(smallest_gap, gap);
      ++checked;
      if (!(gap > 0)) {
        return {false, "pi(shared) <= pi(single) at alpha=" + fmt("%.2f", p.alpha) +
                           " H=" + std::to_string(h)};
      }
    }
  }
  return {true, std::to_string(checked) + " (alpha, H) settings, smallest gap " +
                    fmt("%.3g", smallest_gap)};
}

Outcome seir_invariants(const Desk& desk) {
  const DiseaseParams base = desk.config.disease;
  const int n = desk.config.mobility.n_people;
  std::int64_t runs = 0, days = 0, infectees = 0;
  auto check_agents = [&](const std::vector<AgentState>& agents,
                          const std::vector<PersonId>& seeds,
                          const std::vector<TransmissionEvent>& events,
                          const DiseaseParams& p, int horizon) -> std::string {
    std::set<PersonId> seed_set(seeds.begin(), seeds.end());
    std::map<PersonId, int> parents;
    for (const TransmissionEvent& e : events) ++parents[e.infectee];
    for (std::size_t k = 0; k < agents.size(); ++k) {
      const auto person = static_cast<PersonId>(k);
      const AgentState& a = agents[k];
      const bool ever = a.compartment != Compartment::kSusceptible;
      if (seed_set.count(person)) {
        if (parents.count(person)) return "seed with a transmission edge";
        continue;
      }
      const int want = ever ? 1 : 0;
      if (parents[person] != want) return "agent without exactly one transmission edge";
      if (!ever) continue;
      ++infectees;
      if (a.day_infectious && *a.day_infectious - *a.day_infected != p.incubation_days) {
        return "incubation timer off";
      }
      const int expected_infectious = *a.day_infected + p.incubation_days;
      if (!a.day_infectious && expected_infectious < horizon) return "missed E->I";
      if (a.compartment == Compartment::kRecovered &&
          *a.day_infectious + p.infectious_days >= horizon) {
        return "recovered too early";
      }
      if (a.compartment == Compartment::kInfectious &&
          *a.day_infectious + p.infectious_days < horizon) {
        return "recovered too late";
      }
    }
    return {};
  };

  for (std::uint64_t s = 0; s < 5; ++s) {
    DiseaseParams p = base;
    p.rng_seed = derive_seed(base.rng_seed, {s});
    const EpidemicResult r = run_epidemic(desk.train_graphs, n, p);
    ++runs;
    for (const DailySnapshot& snap : r.snapshots) {
      ++days;
      if (count_compartments(snap).total() != n) return {false, "conservation broken"};
    }
    // Per-day timers from snapshots.
    for (int k = 0; k < n; ++k) {
      const AgentState& a = r.final_states[k];
      if (!a.day_infectious) continue;
      for (int d = 0; d < p.horizon_days; ++d) {
        const Compartment c = r.snapshots[d].compartments[k];
        const bool infectious_window =
            d >= *a.day_infectious && d < *a.day_infectious + p.infectious_days;
        if (infectious_window != (c == Compartment::kInfectious)) {
          return {false, "infectious window is not exactly 7 days"};
        }
      }
    }
    const std::string err = check_agents(r.final_states, r.seeds, r.events, p, p.horizon_days);
    if (!err.empty()) return {false, err};
  }
  for (const ScenarioResult& r : desk.sweep_results) {
    ++runs;
    for (const CompartmentCounts& c : r.daily) {
      ++days;
      if (c.total() != n) return {false, "conservation broken in a scenario"};
    }
    DiseaseParams p = base;
    const std::string err = check_agents(r.final_states, r.seeds, r.events, p,
                                         desk.config.deploy_days());
    if (!err.empty()) return {false, err + " in a scenario"};
  }
  return {true, std::to_string(runs) + " runs, " + std::to_string(days) + " run-days, " +
                    std::to_string(infectees) + " infectees checked"};
}

Outcome classifier_ablation(const Desk& desk) {
  const RunConfig& c = desk.config;
  const std::vector<int> hops{0, 2};
  const std::vector<double> alphas{0.1, 0.5};
  const auto h = ablate_hops(desk.dag, hops, 0.5, c.classifier);
  const auto a = ablate_alpha(desk.dag, alphas, 2, c.classifier);
  const double f0 = h[0].second, f2 = h[1].second;
  const double fa1 = a[0].second, fa5 = a[1].second;
  const bool gap = f2 - f0 >= 0.10;
  const bool alpha_order = fa5 >= fa1;
  const bool absolute = f2 >= 0.75;
  std::string detail = "F1(H=0)=" + fmt("%.3f", f0) + " F1(H=2)=" + fmt("%.3f", f2) +
                       " gap " + fmt("%.3f", f2 - f0) + (gap ? " ok" : " < 0.10") +
                       "; F1(a=0.1)=" + fmt("%.3f", fa1) + " F1(a=0.5)=" + fmt("%.3f", fa5) +
                       (alpha_order ? " ok" : " wrong order") + "; absolute " +
                       (absolute ? "ok" : "< 0.75");
  return {gap && alpha_order && absolute, detail};
}

std::vector<double> rts(const std::vector<ScenarioResult>& results, PolicyKind k) {
  std::vector<double> out;
  for (const ScenarioResult& r : results) {
    if (r.policy.kind == k) out.push_back(r.rt.value_or(std::nan("")));
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome mitigation_order(const Desk& desk, double seconds) {
  const auto none = rts(desk.sweep_results, PolicyKind::kNone);
  const auto fwd = rts(desk.sweep_results, PolicyKind::kForward);
  const auto bi = rts(desk.sweep_results, PolicyKind::kBidirectional);
  if (none.size() != 20 || fwd.size() != 20 || bi.size() != 20) {
    return {false, "expected 20 runs per policy"};
  }
  for (const auto* v : {&none, &fwd, &bi}) {
    for (double x : *v) {
      if (std::isnan(x)) return {false, "undefined R_t in a run"};
    }
  }
  const std::uint64_t seed = derive_seed(desk.config.master_seed, "acceptance-bootstrap");
  const BootstrapInterval bf = paired_bootstrap(bi, fwd, 0.95, 10000, seed);
  const BootstrapInterval fn = paired_bootstrap(fwd, none, 0.95, 10000, seed + 1);
  const double m_none = mean(none), m_fwd = mean(fwd), m_bi = mean(bi);
  const double reduction = 1.0 - m_bi / m_none;
  const bool gate = m_none > 1.0;
  const bool order = bf.upper < 0 && fn.upper < 0;
  const bool big = reduction >= 0.5;
  std::string detail = "mean R_t none=" + fmt("%.3f", m_none) + " forward=" +
                       fmt("%.3f", m_fwd) + " bidirectional=" + fmt("%.3f", m_bi) +
                       "; 95% CI bi-fwd [" + fmt("%.3f", bf.lower) + ", " +
                       fmt("%.3f", bf.upper) + "], fwd-none [" + fmt("%.3f", fn.lower) +
                       ", " + fmt("%.3f", fn.upper) + "]" + (order ? " ok" : " not separated") +
                       "; reduction " + fmt("%.1f", 100 * reduction) + "%" +
                       (big ? " ok" : " < 50%") + "; baseline " +
                       (gate ? "> 1" : "<= 1") + "; 60 scenarios in " +
                       fmt("%.1f", seconds) + " s";
  return {gate && order && big, detail};
}

Outcome rt_arithmetic(const Desk& desk) {
  int checked = 0;
  auto same = [](std::optional<double> a, std::optional<double> b) {
    return a.has_value() == b.has_value() && (!a || *a == *b);
  };
  if (!same(effective_reproduction(desk.outbreak.events, desk.outbreak.final_states),
            oracle::reproduction(desk.outbreak.events, desk.outbreak.final_states))) {
    return {false, "training outbreak differs"};
  }
  ++checked;
  for (const ScenarioResult& r : desk.sweep_results) {
    if (!same(r.rt, oracle::reproduction(r.events, r.final_states))) {
      return {false, "scenario run " + std::to_string(r.run) + " differs"};
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " runs match the group-by-infector count exactly"};
}

Outcome scale_free(const Desk& desk) {
  const oracle::Tail t = oracle::tail_of(in_degree_histogram(desk.dag));
  const bool spread = t.max_degree >= 10 * t.median;
  const bool tail = t.monotone && t.decades >= 1.0;
  return {spread && tail,
          "nodes " + std::to_string(desk.dag.node_count()) + ", edges " +
              std::to_string(desk.dag.edge_count()) + ", max in-degree " +
              std::to_string(t.max_degree) + ", median " + fmt("%.1f", t.median) +
              ", tail from bin " + std::to_string(t.mode_bin) + " over " +
              fmt("%.2f", t.decades) + " decades" +
              (t.monotone ? ", decreasing" : ", not decreasing")};
}

Outcome hop_coverage_shape(const Desk& desk) {
  const AnalysisConfig& a = desk.config.analysis;
  const std::uint64_t seed = derive_seed(desk.config.master_seed, "analysis");
  const auto sf = hop_coverage(
      generate_reference_graph(ReferenceKind::kScaleFree, a.reference_nodes,
                               a.reference_edges, seed),
      "scale_free", a.sample_size, 6, seed);
  const auto mesh = hop_coverage(
      generate_reference_graph(ReferenceKind::kMesh, a.reference_nodes,
                               a.reference_edges, seed),
      "mesh", a.sample_size, 6, seed);
  const double sf_gain = sf.fraction[3] - sf.fraction[2];
  double mesh_min = 1.0;
  for (int h = 1; h <= 6; ++h) {
    mesh_min = std::min(mesh_min, mesh.fraction[h] - mesh.fraction[h - 1]);
  }
  return {sf_gain < 0.05 && mesh_min > 0.05,
          "scale-free gain hop 2->3 " + fmt("%.4f", sf_gain) +
              ", smallest mesh gain through hop 6 " + fmt("%.4f", mesh_min)};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "tracenet_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> pipeline{
      {"generate"}, {"simulate"}, {"ipc"}, {"train"}, {"ablate", "hops"},
      {"ablate", "alpha"}, {"mitigate"}, {"analyze"}};
  for (const char* run : {"a", "b"}) {
    for (const auto& cmd : pipeline) {
      std::vector<std::string> args{"tracenet", "--out", (root / run).string(), "--quiet",
                                    "--threads", std::string(run) == "a" ? "1" : "2"};
      args.insert(args.end(), cmd.begin(), cmd.end());
      std::vector<const char*> argv;
      for (const std::string& s : args) argv.push_back(s.c_str());
      std::ostringstream out, err;
      if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
        return {false, cmd[0] + " failed: " + err.str()};
      }
    }
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "a");
    if (slurp(e.path()) != slurp(root / "b" / rel)) {
      return {false, rel.string() + " differs between reruns"};
    }
    ++files;
  }
  fs::remove_all(root);
  return {files > 0, std::to_string(files) + " files byte-identical across reruns"};
}

}  // namespace
}  // namespace tracenet

int main() {
  using namespace tracenet;
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << id << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL")
              << " - " << o.detail << std::endl;
  };

  Desk desk;
  SweepConfig sc = desk.config.mitigation;
  sc.test_fractions = {0.3};
  sc.n_runs = 20;
  const auto t0 = Clock::now();
  desk.sweep_results = sweep(desk.setup(), sc);
  const double sweep_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  report(1, "ipc oracle equivalence", ipc_oracle);
  report(2, "shared ancestor dominance", shared_ancestor);
  report(3, "seir invariants", [&] { return seir_invariants(desk); });
  report(4, "classifier ablation", [&] { return classifier_ablation(desk); });
  report(5, "mitigation ordering", [&] { return mitigation_order(desk, sweep_seconds); });
  report(6, "r_t arithmetic", [&] { return rt_arithmetic(desk); });
  report(7, "scale-free in-degree", [&] { return scale_free(desk); });
  report(8, "hop coverage", [&] { return hop_coverage_shape(desk); });
  report(9, "determinism", determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
