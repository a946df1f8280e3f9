#ifndef TRACENET_TOOLS_COMMANDS_H_
#define TRACENET_TOOLS_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracenet/config.h"
#include "tracenet/contact_graph.h"
#include "tracenet/mobility.h"

namespace tracenet::cli {

struct Context {
  RunConfig config;
  std::filesystem::path out_dir = "out";
  int threads = 1;
  // Progress lines; null silences them.
  std::ostream* log = nullptr;
};

// Artifact names inside the output directory.
inline constexpr std::string_view kVisits = "visits.csv";
inline constexpr std::string_view kSnapshots = "snapshots.csv";
inline constexpr std::string_view kEvents = "events.csv";
inline constexpr std::string_view kDag = "dag.csv";
inline constexpr std::string_view kIpc = "ipc.csv";
inline constexpr std::string_view kModel = "model.txt";
inline constexpr std::string_view kMetrics = "metrics.csv";
inline constexpr std::string_view kAblationHops = "ablation_hops.csv";
inline constexpr std::string_view kAblationAlpha = "ablation_alpha.csv";
inline constexpr std::string_view kSweep = "sweep.csv";
inline constexpr std::string_view kSweepSummary = "sweep_summary.csv";
inline constexpr std::string_view kDailyDir = "daily";
inline constexpr std::string_view kCoverage = "coverage.csv";
inline constexpr std::string_view kDegree = "degree.csv";
inline constexpr std::string_view kContrast = "contrast.csv";

// Contact graphs of days [begin, end) of the visit log, renumbered from 0.
std::vector<ContactGraph> window_graphs(std::span<const VisitRecord> visits,
                                        int begin, int end);

void cmd_generate(const Context& ctx);
void cmd_simulate(const Context& ctx);
void cmd_ipc(const Context& ctx);
void cmd_train(const Context& ctx);
// which is "hops" or "alpha".
void cmd_ablate(const Context& ctx, std::string_view which);
void cmd_mitigate(const Context& ctx);
void cmd_analyze(const Context& ctx);

// Parses arguments, runs one command and reports errors as a single line
// `tracenet: error code=<exit> kind=<tag>: <message>` on `err`. Returns the
// process exit code.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace tracenet::cli

#endif  // TRACENET_TOOLS_COMMANDS_H_
