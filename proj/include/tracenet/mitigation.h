#ifndef TRACENET_MITIGATION_H_
#define TRACENET_MITIGATION_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "tracenet/centrality.h"
#include "tracenet/classifier.h"
#include "tracenet/contact_graph.h"
#include "tracenet/epidemic.h"
#include "tracenet/types.h"

namespace tracenet {

enum class PolicyKind { kNone, kForward, kBidirectional };
std::string_view policy_name(PolicyKind kind);
// Throws ConfigError for unknown names.
PolicyKind parse_policy(std::string_view name);

// Who besides the predicted infector is quarantined under Bidirectional.
enum class QuarantineScope { kInfectorOnly, kInfectorPlusNeighbors };
std::string_view scope_name(QuarantineScope scope);
QuarantineScope parse_scope(std::string_view name);

struct MitigationPolicy {
  PolicyKind kind = PolicyKind::kNone;
  // Probability that a symptomatic agent is tested on the day it becomes
  // Infectious.
  double test_fraction = 0.01;
  int start_day = 8;
  int quarantine_days_forward = 7;
  int lookback_days = 5;
  QuarantineScope scope = QuarantineScope::kInfectorPlusNeighbors;

  // Throws ConfigError.
  void validate() const;
};

enum class QuarantineReason { kTestedPositive, kPredictedExposure };

struct QuarantineInterval {
  PersonId person = 0;
  // Inclusive.
  int start_day = 0;
  int end_day = 0;
  QuarantineReason reason = QuarantineReason::kTestedPositive;
};

class QuarantineLedger {
 public:
  void add(const QuarantineInterval& interval);
  bool is_quarantined(PersonId person, int day) const;
  // mask[p] != 0 for every person quarantined on `day`.
  std::vector<char> mask(int day, int population) const;
  // Distinct (person, day) pairs with day in [0, horizon_days).
  std::int64_t person_days(int horizon_days) const;
  std::span<const QuarantineInterval> intervals() const { return intervals_; }

 private:
  std::vector<QuarantineInterval> intervals_;
};

// Offspring per ever-infectious agent: events / #agents that reached the
// Infectious state. nullopt when nobody was ever infectious.
std::optional<double> effective_reproduction(
    std::span<const TransmissionEvent> events, std::int64_t ever_infectious);
std::optional<double> effective_reproduction(
    std::span<const TransmissionEvent> events,
    std::span<const AgentState> agents);

struct ScenarioSetup {
  // Deployment-window contact graphs, one per day of disease.horizon_days.
  std::span<const ContactGraph> graphs;
  int population = 0;
  DiseaseParams disease;
  IpcParams ipc;
  // Required for Bidirectional; its schema must match `ipc`.
  const EdgeClassifier* model = nullptr;
  // Stream for the per-agent test coin.
  std::uint64_t testing_seed = 0;
  // Keep the quarantine-filtered graphs in the result.
  bool keep_graphs = false;
};

struct ScenarioResult {
  MitigationPolicy policy;
  // Index within a sweep (0 for a single scenario).
  int run = 0;
  std::uint64_t disease_seed = 0;
  std::uint64_t testing_seed = 0;
  // Start-of-day counts, as in the epidemic snapshots.
  std::vector<CompartmentCounts> daily;
  std::vector<std::int64_t> daily_quarantined;
  std::vector<TransmissionEvent> events;
  std::vector<PersonId> seeds;
  std::vector<PersonId> tested_positive;
  std::vector<AgentState> final_states;
  QuarantineLedger ledger;
  std::optional<double> rt;
  std::int64_t total_infected = 0;
  std::int64_t quarantine_person_days = 0;
  std::vector<ContactGraph> filtered_graphs;
};

// Online run: each day applies timers, tests newly Infectious symptomatic
// agents (from start_day), issues quarantines, then transmits on the graph
// without quarantined agents. Bidirectional additionally predicts each
// positive's infector from IPC on the tracing DAG grown so far and
// quarantines it, plus its contacts over the previous lookback_days when the
// scope says so. Throws ConfigError for a missing or mismatched model.
ScenarioResult run_scenario(const ScenarioSetup& setup,
                            const MitigationPolicy& policy);

struct SweepConfig {
  std::vector<PolicyKind> policies{PolicyKind::kNone, PolicyKind::kForward,
                                   PolicyKind::kBidirectional};
  std::vector<double> test_fractions{0.01, 0.1, 0.3, 1.0};
  int n_runs = 20;
  std::uint64_t master_seed = 0;
  // start_day, quarantine lengths and scope for every cell.
  MitigationPolicy base;
  int threads = 1;

  void validate() const;
};

// Seeds of one sweep cell. The disease seed depends on the run index only,
// so every policy and fraction sees the same seeds and latent draws.
std::uint64_t sweep_disease_seed(std::uint64_t master, int run);
std::uint64_t sweep_testing_seed(std::uint64_t master, PolicyKind policy,
                                 double test_fraction, int run);

// Results ordered by (policy, test fraction, run). `setup.disease.rng_seed`
// and `setup.testing_seed` are replaced per run.
std::vector<ScenarioResult> sweep(const ScenarioSetup& setup,
                                  const SweepConfig& config);

struct CellSummary {
  PolicyKind policy = PolicyKind::kNone;
  double test_fraction = 0;
  int runs = 0;
  double mean_rt = 0;
  double min_rt = 0;
  double max_rt = 0;
};

// Per (policy, fraction) cell over runs with a defined R_t.
std::vector<CellSummary> summarize(std::span<const ScenarioResult> results);

struct BootstrapInterval {
  double mean_difference = 0;
  double lower = 0;
  double upper = 0;
};

// Percentile interval for mean(a[i] - b[i]). Throws DomainError if the
// samples differ in length or are empty.
BootstrapInterval paired_bootstrap(std::span<const double> a,
                                   std::span<const double> b,
                                   double confidence, int resamples,
                                   std::uint64_t seed);

// CSV `policy,test_fraction,run,rt,total_infected,quarantine_person_days`.
// An undefined R_t is written as NA.
void write_sweep(std::ostream& out, std::span<const ScenarioResult> results,
                 std::string_view comment = {});
// CSV `day,S,E,I,R,quarantined`.
void write_daily(std::ostream& out, const ScenarioResult& result,
                 std::string_view comment = {});

}  // namespace tracenet

#endif  // TRACENET_MITIGATION_H_
