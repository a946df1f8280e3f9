#ifndef TRACENET_CONFIG_H_
#define TRACENET_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "tracenet/centrality.h"
#include "tracenet/classifier.h"
#include "tracenet/epidemic.h"
#include "tracenet/mitigation.h"
#include "tracenet/mobility.h"

namespace tracenet {

struct AblationConfig {
  std::vector<int> hops{0, 1, 2, 3};
  std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9};
};

struct AnalysisConfig {
  int reference_nodes = 20000;
  std::int64_t reference_edges = 116000;
  int sample_size = 500;
  int max_hops = 8;
  int top_k = 50;
  int betweenness_exact_limit = 5000;
  int betweenness_pivots = 512;
};

// Everything a pipeline run needs. Seeds of the individual stages are derived
// from master_seed; the per-module rng_seed fields are filled in by
// finalize().
struct RunConfig {
  std::uint64_t master_seed = 1;
  MobilityConfig mobility;
  // Days [0, train_days) train the classifier; the rest of the mobility
  // horizon is the deployment window for mitigation.
  int train_days = 30;
  DiseaseParams disease;
  IpcParams ipc;
  TrainConfig classifier;
  AblationConfig ablation;
  SweepConfig mitigation;
  AnalysisConfig analysis;

  int deploy_days() const { return mobility.horizon_days - train_days; }

  // Derives stage seeds and window lengths, then validates. Throws
  // ConfigError.
  void finalize();
  // Canonical text form; parse_config(to_text()) round-trips.
  std::string to_text() const;
  // Hash of to_text(), as 16 hex digits.
  std::string hash() const;
};

// TOML-style `[section]` / `key = value` text. Values are integers, reals,
// booleans, "strings" or [arrays] of those. Unknown sections or keys, bad
// values and repeated keys throw ConfigError naming the line. The result is
// finalized.
RunConfig parse_config(std::istream& in, std::string_view source = "<config>");
// Throws ConfigError if the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

// Compact configuration used by the acceptance suite and the README example:
// 5,000 people, 500 venues, two 30-day windows.
RunConfig desk_config();

}  // namespace tracenet

#endif  // TRACENET_CONFIG_H_
