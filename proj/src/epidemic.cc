#include "tracenet/epidemic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tracenet/csv.h"
#include "tracenet/rng.h"

namespace tracenet {

std::string_view compartment_name(Compartment c) {
  switch (c) {
    case Compartment::kSusceptible:
      return "S";
    case Compartment::kExposed:
      return "E";
    case Compartment::kInfectious:
      return "I";
    case Compartment::kRecovered:
      return "R";
  }
  return "?";
}

void DiseaseParams::validate() const {
  if (incubation_days < 1) throw ConfigError("disease.incubation_days must be >= 1");
  if (infectious_days < 1) throw ConfigError("disease.infectious_days must be >= 1");
  if (horizon_days < 1) throw ConfigError("disease.horizon_days must be >= 1");
  if (!(seed_fraction > 0.0 && seed_fraction <= 1.0)) {
    throw ConfigError("disease.seed_fraction must be in (0, 1]");
  }
  if (!(symptomatic_virality_threshold >= 0.0 &&
        symptomatic_virality_threshold <= 1.0)) {
    throw ConfigError("disease.symptomatic_virality_threshold must be in [0, 1]");
  }
}

CompartmentCounts count_compartments(const DailySnapshot& snapshot) {
  CompartmentCounts c;
  for (Compartment x : snapshot.compartments) {
    switch (x) {
      case Compartment::kSusceptible: ++c.susceptible; break;
      case Compartment::kExposed: ++c.exposed; break;
      case Compartment::kInfectious: ++c.infectious; break;
      case Compartment::kRecovered: ++c.recovered; break;
    }
  }
  return c;
}

CompartmentCounts count_compartments(std::span<const AgentState> agents) {
  DailySnapshot s;
  s.compartments.reserve(agents.size());
  for (const AgentState& a : agents) s.compartments.push_back(a.compartment);
  return count_compartments(s);
}

Epidemic::Epidemic(int population, const DiseaseParams& params)
    : params_(params) {
  params_.validate();
  if (population < 1) throw ConfigError("population must be >= 1");
  agents_.resize(population);
  init_agents();

  const auto n_seeds = std::clamp<std::int64_t>(
      std::llround(params_.seed_fraction * population), 1, population);
  std::vector<PersonId> ids(population);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_seed(params_.rng_seed, "seeds"));
  for (std::int64_t i = 0; i < n_seeds; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.below(population - i));
    std::swap(ids[i], ids[j]);
  }
  seeds_.assign(ids.begin(), ids.begin() + n_seeds);
  std::sort(seeds_.begin(), seeds_.end());
  for (PersonId s : seeds_) {
    AgentState& a = agents_[s];
    a.compartment = Compartment::kInfectious;
    a.day_infectious = 0;
    a.virality_v = latent_virality_[s];
  }
}

Epidemic::Epidemic(int population, const DiseaseParams& params,
                   std::vector<PersonId> seeds)
    : params_(params), seeds_(std::move(seeds)) {
  params_.validate();
  if (population < 1) throw ConfigError("population must be >= 1");
  agents_.resize(population);
  init_agents();
  std::sort(seeds_.begin(), seeds_.end());
  seeds_.erase(std::unique(seeds_.begin(), seeds_.end()), seeds_.end());
  for (PersonId s : seeds_) {
    if (s < 0 || s >= population) throw ConfigError("seed id out of range");
    AgentState& a = agents_[s];
    a.compartment = Compartment::kInfectious;
    a.day_infectious = 0;
    a.virality_v = latent_virality_[s];
  }
}

void Epidemic::init_agents() {
  Rng immunity(derive_seed(params_.rng_seed, "immunity"));
  Rng virality(derive_seed(params_.rng_seed, "virality"));
  latent_virality_.resize(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    agents_[i].immunity_delta = immunity.uniform();
    latent_virality_[i] = virality.uniform();
  }
}

void Epidemic::set_traits(PersonId person, double immunity, double virality) {
  if (day_ >= 0) throw DomainError("traits are fixed once the run has started");
  if (person < 0 || person >= population()) {
    throw DomainError("person " + std::to_string(person) + " out of range");
  }
  if (!(immunity >= 0.0 && immunity <= 1.0 && virality >= 0.0 &&
        virality <= 1.0)) {
    throw DomainError("immunity and virality must be in [0, 1]");
  }
  AgentState& a = agents_[person];
  a.immunity_delta = immunity;
  latent_virality_[person] = virality;
  if (a.compartment == Compartment::kInfectious) a.virality_v = virality;
}

void Epidemic::begin_day(int day) {
  if (day != day_ + 1) {
    throw DomainError("epidemic days must advance by one (expected " +
                      std::to_string(day_ + 1) + ", got " +
                      std::to_string(day) + ")");
  }
  day_ = day;
  transmitted_today_ = false;
  newly_infectious_.clear();
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentState& a = agents_[i];
    if (a.compartment == Compartment::kInfectious &&
        *a.day_infectious + params_.infectious_days == day) {
      a.compartment = Compartment::kRecovered;
    } else if (a.compartment == Compartment::kExposed &&
               *a.day_infected + params_.incubation_days == day) {
      a.compartment = Compartment::kInfectious;
      a.day_infectious = day;
      a.virality_v = latent_virality_[i];
      newly_infectious_.push_back(static_cast<PersonId>(i));
    }
  }
  if (day == 0) newly_infectious_ = seeds_;
}

std::vector<TransmissionEvent> Epidemic::transmit(const ContactGraph& graph) {
  if (day_ < 0 || transmitted_today_) {
    throw DomainError("transmit() must follow exactly one begin_day()");
  }
  if (graph.day() != day_) {
    throw DomainError("contact graph for day " + std::to_string(graph.day()) +
                      " applied on day " + std::to_string(day_));
  }
  transmitted_today_ = true;
  const auto n = static_cast<PersonId>(agents_.size());
  std::vector<TransmissionEvent> events;
  auto try_infect = [&](PersonId src, PersonId dst, const ContactEdge& e) {
    AgentState& s = agents_[src];
    AgentState& d = agents_[dst];
    if (s.compartment != Compartment::kInfectious ||
        d.compartment != Compartment::kSusceptible) {
      return false;
    }
    if (!(s.virality_v > d.immunity_delta)) return false;
    d.compartment = Compartment::kExposed;
    d.day_infected = day_;
    d.infector = src;
    events.push_back({src, dst, day_, e.hour, e.poi});
    return true;
  };
  for (const ContactEdge& e : graph.edges()) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) {
      throw DomainError("contact references person outside the population");
    }
    if (!try_infect(e.a, e.b, e)) try_infect(e.b, e.a, e);
  }
  return events;
}

DailySnapshot Epidemic::snapshot() const {
  DailySnapshot s;
  s.day = day_;
  s.compartments.reserve(agents_.size());
  for (const AgentState& a : agents_) s.compartments.push_back(a.compartment);
  return s;
}

namespace {

EpidemicResult run(std::span<const ContactGraph> graphs, Epidemic epidemic) {
  const DiseaseParams& params = epidemic.params();
  if (static_cast<int>(graphs.size()) != params.horizon_days) {
    throw ConfigError("contact graphs cover " + std::to_string(graphs.size()) +
                      " days but disease.horizon_days is " +
                      std::to_string(params.horizon_days));
  }
  EpidemicResult result;
  for (int day = 0; day < params.horizon_days; ++day) {
    epidemic.begin_day(day);
    result.snapshots.push_back(epidemic.snapshot());
    auto events = epidemic.transmit(graphs[day]);
    result.events.insert(result.events.end(), events.begin(), events.end());
  }
  result.final_states = epidemic.agents();
  result.seeds = epidemic.seeds();
  return result;
}

}  // namespace

EpidemicResult run_epidemic(std::span<const ContactGraph> graphs,
                            int population, const DiseaseParams& params) {
  return run(graphs, Epidemic(population, params));
}

EpidemicResult run_epidemic(std::span<const ContactGraph> graphs,
                            int population, const DiseaseParams& params,
                            std::vector<PersonId> seeds) {
  return run(graphs, Epidemic(population, params, std::move(seeds)));
}

void write_snapshots(std::ostream& out,
                     std::span<const DailySnapshot> snapshots,
                     std::string_view comment) {
  write_comment(out, comment);
  out << "day,person,compartment\n";
  for (const DailySnapshot& s : snapshots) {
    for (std::size_t p = 0; p < s.compartments.size(); ++p) {
      out << s.day << ',' << p << ',' << compartment_name(s.compartments[p])
          << '\n';
    }
  }
}

void write_events(std::ostream& out,
                  std::span<const TransmissionEvent> events,
                  std::string_view comment) {
  write_comment(out, comment);
  out << "infector,infectee,day,hour,poi\n";
  for (const TransmissionEvent& e : events) {
    out << e.infector << ',' << e.infectee << ',' << e.day << ',' << e.hour
        << ',' << e.poi << '\n';
  }
}

std::vector<TransmissionEvent> parse_events(std::istream& in,
                                            std::string_view source) {
  CsvReader reader(in, std::string(source), "infector,infectee,day,hour,poi");
  std::vector<TransmissionEvent> events;
  while (reader.next()) {
    events.push_back({static_cast<PersonId>(reader.integer(0)),
                      static_cast<PersonId>(reader.integer(1)),
                      static_cast<int>(reader.integer(2)),
                      static_cast<int>(reader.integer(3)),
                      static_cast<PoiId>(reader.integer(4))});
  }
  return events;
}

}  // namespace tracenet
