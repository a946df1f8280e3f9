#ifndef TRACENET_EPIDEMIC_H_
#define TRACENET_EPIDEMIC_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "tracenet/contact_graph.h"
#include "tracenet/types.h"

namespace tracenet {

enum class Compartment : std::uint8_t {
  kSusceptible,
  kExposed,
  kInfectious,
  kRecovered,
};

std::string_view compartment_name(Compartment c);

struct DiseaseParams {
  int incubation_days = 5;
  int infectious_days = 7;
  int horizon_days = 30;
  double seed_fraction = 0.01;
  // Infectious agents with virality strictly above this count as symptomatic.
  double symptomatic_virality_threshold = 0.5;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError.
  void validate() const;
};

struct AgentState {
  Compartment compartment = Compartment::kSusceptible;
  double immunity_delta = 0.0;
  // Zero until the agent becomes Infectious.
  double virality_v = 0.0;
  std::optional<int> day_infected;
  std::optional<int> day_infectious;
  std::optional<PersonId> infector;
};

struct TransmissionEvent {
  PersonId infector = 0;
  PersonId infectee = 0;
  int day = 0;
  int hour = 0;
  PoiId poi = 0;

  friend bool operator==(const TransmissionEvent&,
                         const TransmissionEvent&) = default;
};

// Compartments at the start of a day, after timer transitions and before
// that day's contacts.
struct DailySnapshot {
  int day = 0;
  std::vector<Compartment> compartments;
};

struct CompartmentCounts {
  std::int64_t susceptible = 0;
  std::int64_t exposed = 0;
  std::int64_t infectious = 0;
  std::int64_t recovered = 0;

  std::int64_t total() const {
    return susceptible + exposed + infectious + recovered;
  }
  friend bool operator==(const CompartmentCounts&,
                         const CompartmentCounts&) = default;
};

CompartmentCounts count_compartments(const DailySnapshot& snapshot);
CompartmentCounts count_compartments(std::span<const AgentState> agents);

// Agent-based SEIR state machine advanced one day at a time. Infection of a
// Susceptible j by an Infectious i on any contact requires v_i > delta_j.
// Exposed agents are not contagious.
//
// Per day: begin_day() applies timer transitions, then transmit() evaluates
// the day's contacts in the graph's (hour, poi, a, b) order; the first
// qualifying contact infects.
class Epidemic {
 public:
  // Seeds round(seed_fraction * population) agents chosen from the rng_seed
  // stream.
  Epidemic(int population, const DiseaseParams& params);
  Epidemic(int population, const DiseaseParams& params,
           std::vector<PersonId> seeds);

  // Replaces the drawn immunity and virality of one agent. Only allowed
  // before the first begin_day(); throws DomainError otherwise or for values
  // outside [0, 1].
  void set_traits(PersonId person, double immunity, double virality);
  // Must be called with consecutive days starting at 0.
  void begin_day(int day);
  std::span<const PersonId> newly_infectious() const {
    return newly_infectious_;
  }
  std::vector<TransmissionEvent> transmit(const ContactGraph& graph);

  int population() const { return static_cast<int>(agents_.size()); }
  int current_day() const { return day_; }
  const DiseaseParams& params() const { return params_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  const std::vector<PersonId>& seeds() const { return seeds_; }
  DailySnapshot snapshot() const;

 private:
  void init_agents();

  DiseaseParams params_;
  std::vector<AgentState> agents_;
  // Virality each agent will reveal on becoming Infectious.
  std::vector<double> latent_virality_;
  std::vector<PersonId> seeds_;
  std::vector<PersonId> newly_infectious_;
  int day_ = -1;
  bool transmitted_today_ = false;
};

struct EpidemicResult {
  std::vector<DailySnapshot> snapshots;
  std::vector<TransmissionEvent> events;
  std::vector<AgentState> final_states;
  std::vector<PersonId> seeds;
};

// Throws ConfigError unless graphs.size() == params.horizon_days.
EpidemicResult run_epidemic(std::span<const ContactGraph> graphs,
                            int population, const DiseaseParams& params);
EpidemicResult run_epidemic(std::span<const ContactGraph> graphs,
                            int population, const DiseaseParams& params,
                            std::vector<PersonId> seeds);

// CSV `day,person,compartment`.
void write_snapshots(std::ostream& out,
                     std::span<const DailySnapshot> snapshots,
                     std::string_view comment = {});
// CSV `infector,infectee,day,hour,poi`.
void write_events(std::ostream& out,
                  std::span<const TransmissionEvent> events,
                  std::string_view comment = {});
std::vector<TransmissionEvent> parse_events(std::istream& in,
                                            std::string_view source);

}  // namespace tracenet

#endif  // TRACENET_EPIDEMIC_H_
