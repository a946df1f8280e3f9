#include "commands.h"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "tracenet/analysis.h"
#include "tracenet/centrality.h"
#include "tracenet/classifier.h"
#include "tracenet/csv.h"
#include "tracenet/epidemic.h"
#include "tracenet/mitigation.h"
#include "tracenet/rng.h"
#include "tracenet/tracing.h"

namespace tracenet::cli {

namespace fs = std::filesystem;

namespace {

void log(const Context& ctx, const std::string& line) {
  if (ctx.log != nullptr) *ctx.log << line << '\n';
}

std::string provenance(const Context& ctx) {
  return "config_hash=" + ctx.config.hash();
}

fs::path artifact(const Context& ctx, std::string_view name) {
  return ctx.out_dir / name;
}

// Opens an upstream artifact or names the command that produces it.
std::ifstream open_input(const Context& ctx, std::string_view name,
                         std::string_view producer) {
  const fs::path path = artifact(ctx, name);
  std::ifstream in(path);
  if (!in) {
    throw PrerequisiteError(path.string() + " is missing; run `tracenet " +
                            std::string(producer) + "` first");
  }
  return in;
}

class Output {
 public:
  Output(const Context& ctx, std::string_view name) : path_(artifact(ctx, name)) {
    fs::create_directories(path_.parent_path());
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw Error(ExitCode::kRuntime, "io", "cannot write " + path_.string());
    }
  }
  ~Output() noexcept(false) {
    out_.close();
    if (!out_ && std::uncaught_exceptions() == 0) {
      throw Error(ExitCode::kRuntime, "io", "failed writing " + path_.string());
    }
  }
  std::ostream& stream() { return out_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::vector<VisitRecord> load_visits(const Context& ctx) {
  auto in = open_input(ctx, kVisits, "generate");
  auto visits = parse_visits(in, artifact(ctx, kVisits).string());
  const MobilityConfig& m = ctx.config.mobility;
  for (const VisitRecord& v : visits) {
    if (v.device_id >= m.n_people || v.poi_id >= m.n_pois ||
        v.day >= m.horizon_days) {
      throw ValidationError(
          "visits.csv does not fit the configured population, venues or "
          "horizon; rerun `tracenet generate`");
    }
  }
  return visits;
}

TracingDag load_dag(const Context& ctx) {
  auto in = open_input(ctx, kDag, "simulate");
  return parse_dag(in, artifact(ctx, kDag).string());
}

std::string ipc_comment(const Context& ctx) {
  const IpcParams& p = ctx.config.ipc;
  return provenance(ctx) + " alpha=" + format_double(p.alpha) +
         " max_hops=" + std::to_string(p.max_hops) +
         " exclude_focal_leaf=" + (p.exclude_focal_leaf ? "1" : "0");
}

std::vector<IpcResult> load_ipc(const Context& ctx) {
  auto in = open_input(ctx, kIpc, "ipc");
  std::string first;
  std::getline(in, first);
  if (first != "# " + ipc_comment(ctx)) {
    throw PrerequisiteError(artifact(ctx, kIpc).string() +
                            " was computed with other settings; rerun "
                            "`tracenet ipc`");
  }
  in.seekg(0);
  return parse_ipc(in, artifact(ctx, kIpc).string());
}

EdgeClassifier load_model(const Context& ctx) {
  const fs::path path = artifact(ctx, kModel);
  if (!fs::exists(path)) {
    throw PrerequisiteError(path.string() +
                            " is missing; run `tracenet train` first");
  }
  return EdgeClassifier::load(path);
}

}  // namespace

std::vector<ContactGraph> window_graphs(std::span<const VisitRecord> visits,
                                        int begin, int end) {
  return build_contact_graphs(slice_days(visits, begin, end), end - begin);
}

void cmd_generate(const Context& ctx) {
  const auto visits = generate_visits(ctx.config.mobility);
  Output out(ctx, kVisits);
  write_visits(out.stream(), visits, provenance(ctx));
  log(ctx, "generate: " + std::to_string(visits.size()) + " visits");
}

void cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto visits = load_visits(ctx);
  const auto graphs = window_graphs(visits, 0, c.train_days);
  const EpidemicResult result =
      run_epidemic(graphs, c.mobility.n_people, c.disease);
  const TracingDag dag = build_tracing_dag(result.events, graphs);
  {
    Output out(ctx, kSnapshots);
    write_snapshots(out.stream(), result.snapshots, provenance(ctx));
  }
  {
    Output out(ctx, kEvents);
    write_events(out.stream(), result.events, provenance(ctx));
  }
  {
    Output out(ctx, kDag);
    write_dag(out.stream(), dag, provenance(ctx));
  }
  log(ctx, "simulate: " + std::to_string(result.events.size()) +
               " transmissions, DAG with " + std::to_string(dag.node_count()) +
               " nodes and " + std::to_string(dag.edge_count()) + " edges");
}

void cmd_ipc(const Context& ctx) {
  const TracingDag dag = load_dag(ctx);
  const auto results = batch_ipc(dag, dag.leaves(), ctx.config.ipc);
  Output out(ctx, kIpc);
  write_ipc(out.stream(), results, ipc_comment(ctx));
  log(ctx, "ipc: scored " + std::to_string(results.size()) + " leaves");
}

void cmd_train(const Context& ctx) {
  const TracingDag dag = load_dag(ctx);
  const auto ipc = load_ipc(ctx);
  const FeatureSchema schema = FeatureSchema::from_ipc(ctx.config.ipc);
  const auto examples = build_training_set(dag, ipc, schema);
  const TrainingResult result = train(examples, schema, ctx.config.classifier);
  {
    Output out(ctx, kModel);
    result.model.save(out.stream());
  }
  {
    Output out(ctx, kMetrics);
    write_metrics(out.stream(), result.history, provenance(ctx));
  }
  log(ctx, "train: held-out F1 " + format_double(result.holdout.f1) + " on " +
               std::to_string(result.holdout_examples) + " edges");
}

void cmd_ablate(const Context& ctx, std::string_view which) {
  const RunConfig& c = ctx.config;
  const TracingDag dag = load_dag(ctx);
  if (which == "hops") {
    const auto rows = ablate_hops(dag, c.ablation.hops, c.ipc.alpha, c.classifier);
    Output out(ctx, kAblationHops);
    write_comment(out.stream(), provenance(ctx));
    out.stream() << "hops,f1\n";
    for (const auto& [h, f1] : rows) {
      out.stream() << h << ',' << format_double(f1) << '\n';
    }
  } else if (which == "alpha") {
    const auto rows =
        ablate_alpha(dag, c.ablation.alphas, c.ipc.max_hops, c.classifier);
    Output out(ctx, kAblationAlpha);
    write_comment(out.stream(), provenance(ctx));
    out.stream() << "alpha,f1\n";
    for (const auto& [a, f1] : rows) {
      out.stream() << format_double(a) << ',' << format_double(f1) << '\n';
    }
  } else {
    throw ConfigError("ablate expects 'hops' or 'alpha', got '" +
                      std::string(which) + "'");
  }
  log(ctx, "ablate: " + std::string(which) + " done");
}

void cmd_mitigate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  if (c.deploy_days() < 1) {
    throw ConfigError(
        "mitigation needs a deployment window: mobility.horizon_days must "
        "exceed run.train_days");
  }
  const auto visits = load_visits(ctx);
  const auto graphs = window_graphs(visits, c.train_days, c.mobility.horizon_days);
  const bool needs_model =
      std::find(c.mitigation.policies.begin(), c.mitigation.policies.end(),
                PolicyKind::kBidirectional) != c.mitigation.policies.end();
  std::optional<EdgeClassifier> model;
  if (needs_model) model = load_model(ctx);

  ScenarioSetup setup;
  setup.graphs = graphs;
  setup.population = c.mobility.n_people;
  setup.disease = c.disease;
  setup.disease.horizon_days = c.deploy_days();
  setup.ipc = c.ipc;
  setup.model = model ? &*model : nullptr;
  SweepConfig sweep_config = c.mitigation;
  sweep_config.threads = ctx.threads;
  const auto results = sweep(setup, sweep_config);

  {
    Output out(ctx, kSweep);
    write_sweep(out.stream(), results, provenance(ctx));
  }
  {
    Output out(ctx, kSweepSummary);
    write_comment(out.stream(), provenance(ctx));
    out.stream() << "policy,test_fraction,runs,mean_rt,min_rt,max_rt\n";
    for (const CellSummary& s : summarize(results)) {
      out.stream() << policy_name(s.policy) << ','
                   << format_double(s.test_fraction) << ',' << s.runs << ','
                   << format_double(s.mean_rt) << ','
                   << format_double(s.min_rt) << ','
                   << format_double(s.max_rt) << '\n';
    }
  }
  for (const ScenarioResult& r : results) {
    const std::string name = std::string(kDailyDir) + "/" +
                             std::string(policy_name(r.policy.kind)) + "_" +
                             format_double(r.policy.test_fraction) + "_" +
                             std::to_string(r.run) + ".csv";
    Output out(ctx, name);
    write_daily(out.stream(), r, provenance(ctx));
  }
  log(ctx, "mitigate: " + std::to_string(results.size()) + " scenarios");
}

void cmd_analyze(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const AnalysisConfig& a = c.analysis;
  const auto visits = load_visits(ctx);
  const TracingDag dag = load_dag(ctx);
  const auto ipc = load_ipc(ctx);
  const std::uint64_t seed = derive_seed(c.master_seed, "analysis");

  std::vector<CoverageCurve> curves;
  for (ReferenceKind kind : {ReferenceKind::kScaleFree, ReferenceKind::kRandom,
                             ReferenceKind::kMesh}) {
    const UndirectedGraph g = generate_reference_graph(
        kind, a.reference_nodes, a.reference_edges, seed);
    curves.push_back(hop_coverage(g, std::string(reference_kind_name(kind)),
                                  std::min(a.sample_size, g.node_count()),
                                  a.max_hops, seed));
  }
  const UndirectedGraph dag_view = undirected_view(dag);
  if (dag_view.node_count() > 0) {
    curves.push_back(hop_coverage(dag_view, "tracing_dag",
                                  std::min(a.sample_size, dag_view.node_count()),
                                  a.max_hops, seed));
  }
  {
    Output out(ctx, kCoverage);
    write_coverage(out.stream(), curves, provenance(ctx));
  }
  {
    Output out(ctx, kDegree);
    write_degree_histogram(out.stream(), in_degree_histogram(dag),
                           provenance(ctx));
  }

  const auto graphs = window_graphs(visits, 0, c.train_days);
  const UndirectedGraph contacts =
      aggregate_contacts(graphs, c.mobility.n_people);
  const auto bc = betweenness(contacts, ctx.threads, a.betweenness_exact_limit,
                              a.betweenness_pivots, seed);
  const auto ipc_scores = ipc_node_scores(ipc, c.mobility.n_people);
  const ContrastReport report = centrality_contrast(bc, ipc_scores, a.top_k);
  {
    Output out(ctx, kContrast);
    write_contrast(out.stream(), report,
                   provenance(ctx) + " jaccard=" + format_double(report.jaccard));
  }
  log(ctx, "analyze: top-" + std::to_string(a.top_k) + " Jaccard " +
               format_double(report.jaccard));
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Contact tracing simulation and analysis toolkit", "tracenet"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;
  app.add_option("--config", config_path,
                 "Run configuration (defaults to the built-in desk setup)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the master seed");
  app.add_option("--threads", threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "Suppress progress output");

  std::string which;
  for (const char* name :
       {"generate", "simulate", "ipc", "train", "mitigate", "analyze"}) {
    app.add_subcommand(name);
  }
  app.add_subcommand("ablate", "Retrain over a hop or alpha grid")
      ->add_option("which", which, "hops or alpha")
      ->required()
      ->check(CLI::IsMember({"hops", "alpha"}));
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "tracenet: error code=" << static_cast<int>(ExitCode::kConfig)
        << " kind=usage: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kConfig);
  }

  try {
    Context ctx;
    ctx.config = config_path.empty() ? desk_config() : load_config(config_path);
    if (*seed_opt) {
      ctx.config.master_seed = seed;
      ctx.config.finalize();
    }
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    ctx.log = quiet ? nullptr : &err;
    fs::create_directories(ctx.out_dir);

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "generate") cmd_generate(ctx);
    else if (command == "simulate") cmd_simulate(ctx);
    else if (command == "ipc") cmd_ipc(ctx);
    else if (command == "train") cmd_train(ctx);
    else if (command == "ablate") cmd_ablate(ctx, which);
    else if (command == "mitigate") cmd_mitigate(ctx);
    else if (command == "analyze") cmd_analyze(ctx);
    return 0;
  } catch (const Error& e) {
    err << "tracenet: error code=" << static_cast<int>(e.code())
        << " kind=" << e.tag() << ": " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "tracenet: error code=" << static_cast<int>(ExitCode::kRuntime)
        << " kind=internal: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kRuntime);
  }
}

}  // namespace tracenet::cli
