#include "tracenet/mitigation.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "tracenet/csv.h"
#include "tracenet/rng.h"
#include "tracenet/tracing.h"

namespace tracenet {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kNone:
      return "none";
    case PolicyKind::kForward:
      return "forward";
    case PolicyKind::kBidirectional:
      return "bidirectional";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "none") return PolicyKind::kNone;
  if (name == "forward") return PolicyKind::kForward;
  if (name == "bidirectional") return PolicyKind::kBidirectional;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::string_view scope_name(QuarantineScope scope) {
  return scope == QuarantineScope::kInfectorOnly ? "infector_only"
                                                 : "infector_plus_neighbors";
}

QuarantineScope parse_scope(std::string_view name) {
  if (name == "infector_only") return QuarantineScope::kInfectorOnly;
  if (name == "infector_plus_neighbors") {
    return QuarantineScope::kInfectorPlusNeighbors;
  }
  throw ConfigError("unknown quarantine scope '" + std::string(name) + "'");
}

void MitigationPolicy::validate() const {
  if (!(test_fraction > 0 && test_fraction <= 1)) {
    throw ConfigError("test_fraction must be in (0, 1]");
  }
  if (start_day < 1) throw ConfigError("mitigation.start_day must be >= 1");
  if (quarantine_days_forward < 1) {
    throw ConfigError("mitigation.quarantine_days_forward must be >= 1");
  }
  if (lookback_days < 0) {
    throw ConfigError("mitigation.lookback_days must be >= 0");
  }
}

void QuarantineLedger::add(const QuarantineInterval& interval) {
  if (interval.end_day < interval.start_day) {
    throw DomainError("quarantine interval ends before it starts");
  }
  intervals_.push_back(interval);
}

bool QuarantineLedger::is_quarantined(PersonId person, int day) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [&](const QuarantineInterval& q) {
                       return q.person == person && q.start_day <= day &&
                              day <= q.end_day;
                     });
}

std::vector<char> QuarantineLedger::mask(int day, int population) const {
  std::vector<char> out(static_cast<std::size_t>(population), 0);
  for (const QuarantineInterval& q : intervals_) {
    if (q.start_day <= day && day <= q.end_day && q.person >= 0 &&
        q.person < population) {
      out[q.person] = 1;
    }
  }
  return out;
}

std::int64_t QuarantineLedger::person_days(int horizon_days) const {
  std::set<std::pair<PersonId, int>> days;
  for (const QuarantineInterval& q : intervals_) {
    const int lo = std::max(q.start_day, 0);
    const int hi = std::min(q.end_day, horizon_days - 1);
    for (int d = lo; d <= hi; ++d) days.emplace(q.person, d);
  }
  return static_cast<std::int64_t>(days.size());
}

std::optional<double> effective_reproduction(
    std::span<const TransmissionEvent> events, std::int64_t ever_infectious) {
  if (ever_infectious <= 0) return std::nullopt;
  return static_cast<double>(events.size()) /
         static_cast<double>(ever_infectious);
}

std::optional<double> effective_reproduction(
    std::span<const TransmissionEvent> events,
    std::span<const AgentState> agents) {
  const auto n = std::count_if(agents.begin(), agents.end(),
                               [](const AgentState& a) {
                                 return a.day_infectious.has_value();
                               });
  return effective_reproduction(events, static_cast<std::int64_t>(n));
}

namespace {

class ScenarioRunner {
 public:
  ScenarioRunner(const ScenarioSetup& setup, const MitigationPolicy& policy)
      : setup_(setup),
        policy_(policy),
        epidemic_(setup.population, setup.disease),
        tested_(static_cast<std::size_t>(setup.population), 0) {}

  ScenarioResult run() {
    const int horizon = setup_.disease.horizon_days;
    ScenarioResult result;
    result.policy = policy_;
    result.disease_seed = setup_.disease.rng_seed;
    result.testing_seed = setup_.testing_seed;
    result.seeds = epidemic_.seeds();
    filtered_.reserve(horizon);

    for (int day = 0; day < horizon; ++day) {
      epidemic_.begin_day(day);
      result.daily.push_back(count_compartments(epidemic_.agents()));
      if (policy_.kind != PolicyKind::kNone && day >= policy_.start_day) {
        test_and_trace(day, result);
      }
      const std::vector<char> mask = ledger_.mask(day, setup_.population);
      result.daily_quarantined.push_back(
          std::count(mask.begin(), mask.end(), 1));
      filtered_.push_back(setup_.graphs[day].without(mask));
      const ContactGraph& today = filtered_.back();
      for (const TransmissionEvent& e : epidemic_.transmit(today)) {
        if (policy_.kind == PolicyKind::kBidirectional) {
          dag_.record_infection(e, today.contacts_of(e.infectee));
        }
        result.events.push_back(e);
      }
    }

    result.final_states = epidemic_.agents();
    result.rt = effective_reproduction(result.events, result.final_states);
    result.total_infected = std::count_if(
        result.final_states.begin(), result.final_states.end(),
        [](const AgentState& a) {
          return a.compartment != Compartment::kSusceptible;
        });
    result.ledger = ledger_;
    result.quarantine_person_days = ledger_.person_days(horizon);
    if (setup_.keep_graphs) result.filtered_graphs = std::move(filtered_);
    return result;
  }

 private:
  void quarantine(PersonId person, int day, QuarantineReason reason) {
    ledger_.add({person, day, day + policy_.quarantine_days_forward - 1,
                 reason});
  }

  void test_and_trace(int day, ScenarioResult& result) {
    const auto& agents = epidemic_.agents();
    const double threshold = setup_.disease.symptomatic_virality_threshold;
    std::optional<IpcEngine> engine;
    for (PersonId p : epidemic_.newly_infectious()) {
      if (tested_[p] || !(agents[p].virality_v > threshold)) continue;
      tested_[p] = 1;
      if (!(keyed_uniform(setup_.testing_seed, static_cast<std::uint64_t>(p)) <
            policy_.test_fraction)) {
        continue;
      }
      result.tested_positive.push_back(p);
      quarantine(p, day, QuarantineReason::kTestedPositive);
      if (policy_.kind != PolicyKind::kBidirectional) continue;
      if (!dag_.is_leaf(p) || dag_.in_degree(p) == 0) continue;

      if (!engine) engine.emplace(dag_, setup_.ipc);
      const IpcResult ipc = engine->score(p);
      const auto examples =
          leaf_examples(dag_, p, &ipc, setup_.model->schema());
      const auto predicted = predict_infector(*setup_.model, examples);
      if (!predicted) continue;
      const PersonId infector = predicted->candidate;
      quarantine(infector, day, QuarantineReason::kPredictedExposure);
      if (policy_.scope != QuarantineScope::kInfectorPlusNeighbors) continue;
      for (int d = std::max(0, day - policy_.lookback_days); d < day; ++d) {
        for (const Contact& c : filtered_[d].contacts_of(infector)) {
          quarantine(c.neighbor, day, QuarantineReason::kPredictedExposure);
        }
      }
    }
  }

  const ScenarioSetup& setup_;
  MitigationPolicy policy_;
  Epidemic epidemic_;
  TracingDag dag_;
  QuarantineLedger ledger_;
  std::vector<char> tested_;
  std::vector<ContactGraph> filtered_;
};

}  // namespace

ScenarioResult run_scenario(const ScenarioSetup& setup,
                            const MitigationPolicy& policy) {
  policy.validate();
  setup.disease.validate();
  if (static_cast<int>(setup.graphs.size()) != setup.disease.horizon_days) {
    throw ConfigError("scenario needs " +
                      std::to_string(setup.disease.horizon_days) +
                      " daily contact graphs, got " +
                      std::to_string(setup.graphs.size()));
  }
  if (policy.kind == PolicyKind::kBidirectional) {
    if (setup.model == nullptr) {
      throw ConfigError("bidirectional tracing needs a trained classifier");
    }
    setup.ipc.validate();
    if (!setup.model->schema().matches(setup.ipc)) {
      throw ConfigError(
          "classifier feature schema does not match the IPC settings "
          "(retrain with the current ipc.max_hops and ipc.alpha)");
    }
  }
  return ScenarioRunner(setup, policy).run();
}

void SweepConfig::validate() const {
  if (policies.empty()) throw ConfigError("sweep needs at least one policy");
  if (test_fractions.empty()) {
    throw ConfigError("sweep needs at least one test fraction");
  }
  if (n_runs < 1) throw ConfigError("mitigation.n_runs must be >= 1");
  if (threads < 1) throw ConfigError("thread count must be >= 1");
  for (double f : test_fractions) {
    MitigationPolicy p = base;
    p.test_fraction = f;
    p.validate();
  }
}

std::uint64_t sweep_disease_seed(std::uint64_t master, int run) {
  return derive_seed(master, {hash_bytes("disease"),
                              static_cast<std::uint64_t>(run)});
}

std::uint64_t sweep_testing_seed(std::uint64_t master, PolicyKind policy,
                                 double test_fraction, int run) {
  return derive_seed(master, {hash_bytes("testing"),
                              hash_bytes(policy_name(policy)),
                              std::bit_cast<std::uint64_t>(test_fraction),
                              static_cast<std::uint64_t>(run)});
}

std::vector<ScenarioResult> sweep(const ScenarioSetup& setup,
                                  const SweepConfig& config) {
  config.validate();
  struct Cell {
    PolicyKind policy;
    double fraction;
    int run;
  };
  std::vector<Cell> cells;
  for (PolicyKind p : config.policies) {
    for (double f : config.test_fractions) {
      for (int r = 0; r < config.n_runs; ++r) cells.push_back({p, f, r});
    }
  }

  std::vector<std::optional<ScenarioResult>> slots(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size() && !failed; i = next++) {
      try {
        const Cell& c = cells[i];
        ScenarioSetup s = setup;
        s.disease.rng_seed = sweep_disease_seed(config.master_seed, c.run);
        s.testing_seed = sweep_testing_seed(config.master_seed, c.policy,
                                            c.fraction, c.run);
        MitigationPolicy policy = config.base;
        policy.kind = c.policy;
        policy.test_fraction = c.fraction;
        ScenarioResult r = run_scenario(s, policy);
        r.run = c.run;
        slots[i] = std::move(r);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int n_threads =
      std::min<int>(config.threads, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<ScenarioResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<CellSummary> summarize(std::span<const ScenarioResult> results) {
  std::vector<CellSummary> out;
  for (const ScenarioResult& r : results) {
    if (!r.rt) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const CellSummary& c) {
      return c.policy == r.policy.kind &&
             c.test_fraction == r.policy.test_fraction;
    });
    if (it == out.end()) {
      out.push_back({r.policy.kind, r.policy.test_fraction, 0, 0.0, *r.rt,
                     *r.rt});
      it = std::prev(out.end());
    }
    it->mean_rt += *r.rt;
    it->min_rt = std::min(it->min_rt, *r.rt);
    it->max_rt = std::max(it->max_rt, *r.rt);
    ++it->runs;
  }
  for (CellSummary& c : out) c.mean_rt /= c.runs;
  return out;
}

BootstrapInterval paired_bootstrap(std::span<const double> a,
                                   std::span<const double> b,
                                   double confidence, int resamples,
                                   std::uint64_t seed) {
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("paired bootstrap needs two equal-length samples");
  }
  if (!(confidence > 0 && confidence < 1) || resamples < 1) {
    throw DomainError("bad bootstrap confidence or resample count");
  }
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  BootstrapInterval out;
  for (double d : diff) out.mean_difference += d;
  out.mean_difference /= static_cast<double>(n);

  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (double& m : means) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += diff[rng.below(n)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1 - confidence) / 2;
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  out.lower = quantile(tail);
  out.upper = quantile(1 - tail);
  return out;
}

void write_sweep(std::ostream& out, std::span<const ScenarioResult> results,
                 std::string_view comment) {
  write_comment(out, comment);
  out << "policy,test_fraction,run,rt,total_infected,quarantine_person_days\n";
  for (const ScenarioResult& r : results) {
    out << policy_name(r.policy.kind) << ','
        << format_double(r.policy.test_fraction) << ',' << r.run << ','
        << (r.rt ? format_double(*r.rt) : std::string("NA")) << ','
        << r.total_infected << ',' << r.quarantine_person_days << '\n';
  }
}

void write_daily(std::ostream& out, const ScenarioResult& result,
                 std::string_view comment) {
  write_comment(out, comment);
  out << "day,S,E,I,R,quarantined\n";
  for (std::size_t d = 0; d < result.daily.size(); ++d) {
    const CompartmentCounts& c = result.daily[d];
    out << d << ',' << c.susceptible << ',' << c.exposed << ','
        << c.infectious << ',' << c.recovered << ','
        << result.daily_quarantined[d] << '\n';
  }
}

}  // namespace tracenet
